//! Radial solutions of S_k(D²u) = b(|x|) f(u) on balls.
//!
//! * [`integrate_blowup_ivp`] shoots from the origin and detects the blowup radius.
//! * [`solve_exhaustion_bvp`] solves u = j on the sphere for an increasing schedule of j.
//! * [`solve_w`] gives the torsion-type solution S_k(D²w) = b, w = 0 on the sphere.
//! * [`asymptotics_report`] and [`build_subsolution_h`] compare against the profile.

mod bvp;
mod ivp;
mod ode;
mod report;
mod w;

use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{param, Result};
use crate::profile::{NonlinearitySpec, ScalarFn, WeightSpec};

pub use bvp::{solve_exhaustion_bvp, BvpOptions};
pub use ivp::{integrate_blowup_ivp, integrate_blowup_ivp_with, shoot_blowup_radius, IvpOptions};
pub use report::{asymptotics_report, asymptotics_report_with, build_subsolution_h, ReportLadder, SubsolutionH};
pub use w::{solve_w, WSolution};

/// Radial weight b(r) > 0.
#[derive(Clone)]
pub enum RadialWeight {
    /// b(r) = b̲·m(R − r)^{k+1}.
    FromWeight(WeightSpec),
    Custom(ScalarFn),
}

impl std::fmt::Debug for RadialWeight {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::FromWeight(w) => write!(fm, "FromWeight({w:?})"),
            Self::Custom(_) => write!(fm, "Custom"),
        }
    }
}

/// S_k(D²u) = b(|x|) f(u) on the ball of radius `radius` in ℝⁿ.
#[derive(Clone, Debug)]
pub struct RadialProblem {
    pub n: usize,
    pub k: usize,
    pub radius: f64,
    pub f: NonlinearitySpec,
    pub b: RadialWeight,
}

impl RadialProblem {
    pub fn new(n: usize, k: usize, radius: f64, f: NonlinearitySpec, b: RadialWeight) -> Result<Self> {
        if n < 2 {
            return param(format!("dimension n = {n} must be >= 2"));
        }
        if k == 0 || k > n {
            return param(format!("order k = {k} outside 1..={n}"));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return param(format!("radius must be positive, got {radius}"));
        }
        Ok(Self { n, k, radius, f, b })
    }

    /// b ≡ 1.
    pub fn unit_weight(n: usize, k: usize, radius: f64, f: NonlinearitySpec) -> Result<Self> {
        Self::new(n, k, radius, f, RadialWeight::FromWeight(WeightSpec::unit()))
    }

    pub fn b(&self, r: f64) -> f64 {
        match &self.b {
            RadialWeight::FromWeight(w) => w.b_of_distance(self.radius - r, self.k),
            RadialWeight::Custom(b) => b(r),
        }
    }

    pub fn describe(&self) -> Value {
        let b = match &self.b {
            RadialWeight::FromWeight(w) => w.describe(),
            RadialWeight::Custom(_) => json!("custom"),
        };
        json!({ "n": self.n, "k": self.k, "radius": self.radius, "f": self.f.describe(), "b": b })
    }
}

/// Step and iteration counters.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SolveMeta {
    pub method: &'static str,
    pub tol: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub newton_iterations: usize,
    pub u0: Option<f64>,
    pub boundary_value: Option<f64>,
}

/// Samples of a radial solution on an increasing grid in [0, rstar].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialSolution {
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub u1: Vec<f64>,
    /// Blowup radius (IVP) or the ball radius (boundary-value solutions).
    pub rstar: f64,
    pub meta: SolveMeta,
}

impl RadialSolution {
    /// Cubic Hermite interpolation of (u, u′) at `r`; `None` outside the sampled range.
    pub fn interpolate(&self, r: f64) -> Option<(f64, f64)> {
        let n = self.r.len();
        if n < 2 || !(r >= self.r[0] && r <= self.r[n - 1]) {
            return None;
        }
        let i = self.r.partition_point(|&x| x <= r).clamp(1, n - 1);
        let (x0, x1) = (self.r[i - 1], self.r[i]);
        let h = x1 - x0;
        let t = (r - x0) / h;
        let (y0, y1, m0, m1) = (self.u[i - 1], self.u[i], self.u1[i - 1] * h, self.u1[i] * h);
        let (t2, t3) = (t * t, t * t * t);
        let u = (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1;
        let du = ((6.0 * t2 - 6.0 * t) * y0 + (3.0 * t2 - 4.0 * t + 1.0) * m0 + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * m1)
            / h;
        Some((u, du))
    }

    /// CSV with columns (r, u, u1).
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        crate::report::write_csv(
            path,
            &["r", "u", "u1"],
            (0..self.r.len()).map(|i| vec![self.r[i], self.u[i], self.u1[i]]),
        )
    }

    pub fn metadata(&self, prob: &RadialProblem) -> Value {
        json!({ "problem": prob.describe(), "rstar": self.rstar, "nodes": self.r.len(), "meta": self.meta })
    }
}
