//! Boundary asymptotics of radial solutions and the ψ(−w) subsolution.

use crate::error::{param, Error, Result};
use crate::hessian::sk_radial;
use crate::profile::{build_psi, ProfileFns, PsiProfile};
use crate::report::{AsymptoticsReport, ReportRow};

use super::{solve_w, RadialProblem, RadialSolution, WSolution};

/// Geometric ladder of distances d = R* − r, as fractions of R*.
#[derive(Debug, Clone, Copy)]
pub struct ReportLadder {
    pub d_max: f64,
    pub d_min: f64,
    pub per_decade: usize,
}

impl Default for ReportLadder {
    fn default() -> Self {
        Self { d_max: 1e-1, d_min: 1e-4, per_decade: 4 }
    }
}

impl ReportLadder {
    pub fn distances(&self, scale: f64) -> Vec<f64> {
        let decades = (self.d_max / self.d_min).log10();
        let count = (decades * self.per_decade as f64).round() as usize;
        (0..=count)
            .map(|i| scale * self.d_max * 10f64.powf(-(i as f64) / self.per_decade as f64))
            .collect()
    }
}

/// Rows (d, u, φ(ξM(d)), ratio) on the default ladder 1e-1·R* … 1e-4·R*.
pub fn asymptotics_report(sol: &RadialSolution, p: &ProfileFns, xi: f64) -> Result<AsymptoticsReport> {
    asymptotics_report_with(sol, p, xi, &ReportLadder::default())
}

pub fn asymptotics_report_with(
    sol: &RadialSolution,
    p: &ProfileFns,
    xi: f64,
    ladder: &ReportLadder,
) -> Result<AsymptoticsReport> {
    if !(xi > 0.0) {
        return param(format!("amplitude xi must be positive, got {xi}"));
    }
    let mut rows = Vec::new();
    let mut missing = Vec::new();
    for d in ladder.distances(sol.rstar) {
        let r = sol.rstar - d;
        let (Some((u, _)), true) = (sol.interpolate(r), d > 0.0 && d < sol.rstar) else {
            missing.push(d);
            continue;
        };
        let predicted = p.predicted_profile(xi, d)?;
        rows.push(ReportRow { d, u, predicted, ratio: u / predicted });
    }
    if !missing.is_empty() {
        return Err(Error::ReportTruncated {
            reason: format!("no solution samples at distances {missing:?}"),
            rows,
        });
    }
    Ok(AsymptoticsReport { xi, rows, bins: vec![] })
}

/// h̲(r) = ψ(−w(r)).
#[derive(Clone, Debug)]
pub struct SubsolutionH {
    pub w: WSolution,
    pub psi: PsiProfile,
}

pub fn build_subsolution_h(prob: &RadialProblem) -> Result<SubsolutionH> {
    let psi = build_psi(&prob.f, prob.k)?;
    Ok(SubsolutionH { w: solve_w(prob)?, psi })
}

impl SubsolutionH {
    fn argument(&self, r: f64) -> Result<f64> {
        let t = -self.w.w(r);
        if !(t > 0.0 && t < self.psi.domain_sup()) {
            return param(format!("psi argument {t:e} at r = {r} outside (0, {:e})", self.psi.domain_sup()));
        }
        Ok(t)
    }

    pub fn value(&self, r: f64) -> Result<f64> {
        self.psi.psi(self.argument(r)?)
    }

    /// (h̲, h̲′, h̲″) by the chain rule with ψ′ = −f(ψ)^{1/k}, ψ″ = f^{(2−k)/k} f′/k.
    pub fn derivatives(&self, r: f64) -> Result<(f64, f64, f64)> {
        let h = self.value(r)?;
        let (_, w1, w2) = self.w.derivatives(r);
        let (p1, p2) = (self.psi.psi_prime_at_value(h), self.psi.psi_second_at_value(h));
        Ok((h, -p1 * w1, p2 * w1 * w1 - p1 * w2))
    }

    /// S_k(D²h̲) / (b f(h̲)) at r > 0; the subsolution claim is that this is ≥ 1.
    pub fn ratio(&self, r: f64) -> Result<f64> {
        let prob = &self.w.prob;
        let (h, h1, h2) = self.derivatives(r)?;
        Ok(sk_radial(h1, h2, r, prob.n, prob.k)? / (prob.b(r) * prob.f.f(h)))
    }

    /// Radius r_j of the sublevel ball {h̲ < j}; `None` when h̲(0) ≥ j.
    pub fn sublevel_radius(&self, j: f64) -> Result<Option<f64>> {
        if !(j > 0.0) {
            return param(format!("level must be positive, got {j}"));
        }
        let target = -self.psi.big_psi(j);
        if self.w.w(0.0) >= target {
            return Ok(None);
        }
        let (mut lo, mut hi) = (0.0, self.w.prob.radius);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.w.w(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(Some(0.5 * (lo + hi)))
    }
}
