//! Boundary-value exhaustion: S_k(D²u) = b f(u) in the ball, u = j on the sphere.
//!
//! Finite volumes on a uniform grid r_i = i·h. Integrating rⁿ⁻¹S_k over the
//! cell around r_i gives (C(n−1,k−1)/k)(q_{i+½} − q_{i−½}) with the flux
//! q = r^{n−k}(u′)^k, so the discrete operator is conservative and
//! reproduces the w-equation exactly in the flux.

use crate::error::{param, Error, Result};
use crate::hessian::binomial;

use super::{RadialProblem, RadialSolution, SolveMeta};

#[derive(Debug, Clone, Copy)]
pub struct BvpOptions {
    /// Target grid spacing; the actual h divides the radius evenly.
    pub grid_h: f64,
    /// Scaled residual tolerance.
    pub tol: f64,
    pub max_newton: usize,
}

impl Default for BvpOptions {
    fn default() -> Self {
        Self { grid_h: 1.0 / 512.0, tol: 1e-10, max_newton: 100 }
    }
}

struct Grid {
    h: f64,
    r: Vec<f64>,
    /// r_{i+½}^{n−k}.
    face: Vec<f64>,
    vol: Vec<f64>,
    b: Vec<f64>,
    coef: f64,
    k: i32,
}

impl Grid {
    fn new(prob: &RadialProblem, grid_h: f64) -> Result<Self> {
        let cells = (prob.radius / grid_h).round().max(4.0) as usize;
        let h = prob.radius / cells as f64;
        let (n, k) = (prob.n as i32, prob.k as i32);
        let r: Vec<f64> = (0..=cells).map(|i| i as f64 * h).collect();
        let face: Vec<f64> = (0..cells).map(|i| ((i as f64 + 0.5) * h).powi(n - k)).collect();
        let vol: Vec<f64> = (0..cells)
            .map(|i| {
                let hi = (i as f64 + 0.5) * h;
                let lo = if i == 0 { 0.0 } else { (i as f64 - 0.5) * h };
                (hi.powi(n) - lo.powi(n)) / n as f64
            })
            .collect();
        let b: Vec<f64> = r.iter().map(|&x| prob.b(x)).collect();
        if b.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return param("weight b must be positive and finite on the ball");
        }
        Ok(Self { h, r, face, vol, b, coef: binomial(prob.n - 1, prob.k - 1) / k as f64, k })
    }

    fn unknowns(&self) -> usize {
        self.r.len() - 1
    }

    /// Flux q_{i+½} and its derivative with respect to the slope s.
    fn flux(&self, i: usize, ui: f64, uj: f64) -> (f64, f64) {
        let s = (uj - ui) / self.h;
        let a = s.abs().powi(self.k - 1);
        (self.face[i] * s * a, self.face[i] * self.k as f64 * a / self.h)
    }

    /// Residual F and the scaled max norm |F_i| / (V_i (1 + b_i f(u_i))).
    fn residual(&self, prob: &RadialProblem, u: &[f64], out: &mut [f64]) -> f64 {
        let m = self.unknowns();
        let mut norm = 0.0f64;
        let mut q_left = 0.0;
        for i in 0..m {
            let (q_right, _) = self.flux(i, u[i], u[i + 1]);
            let src = self.b[i] * prob.f.f(u[i]);
            out[i] = self.coef * (q_right - q_left) - self.vol[i] * src;
            let scaled = out[i].abs() / (self.vol[i] * (1.0 + src));
            if !scaled.is_finite() {
                norm = f64::INFINITY;
            }
            norm = norm.max(scaled);
            q_left = q_right;
        }
        norm
    }
}

/// Thomas algorithm; `lower[0]` and `upper[m-1]` are ignored.
fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) -> bool {
    let m = diag.len();
    let mut c = vec![0.0; m];
    let mut beta = diag[0];
    if beta == 0.0 {
        return false;
    }
    rhs[0] /= beta;
    for i in 1..m {
        c[i - 1] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * c[i - 1];
        if beta == 0.0 || !beta.is_finite() {
            return false;
        }
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..m - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
    true
}

fn newton(prob: &RadialProblem, grid: &Grid, u: &mut [f64], opts: &BvpOptions, meta: &mut SolveMeta) -> Result<()> {
    let m = grid.unknowns();
    let mut res = vec![0.0; m];
    let mut trial_res = vec![0.0; m];
    let mut norm = grid.residual(prob, u, &mut res);
    let mut history = vec![norm];
    if !norm.is_finite() {
        return Err(Error::SolveFailure { reason: "source term overflows at the initial iterate".into(), residual_history: history });
    }
    let (mut lower, mut diag, mut upper) = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    for _ in 0..opts.max_newton {
        if norm <= opts.tol {
            return Ok(());
        }
        meta.newton_iterations += 1;
        let mut d_left = 0.0;
        for i in 0..m {
            let (_, d_right) = grid.flux(i, u[i], u[i + 1]);
            lower[i] = grid.coef * d_left;
            upper[i] = grid.coef * d_right;
            diag[i] = -grid.coef * (d_right + d_left) - grid.vol[i] * grid.b[i] * prob.f.f_prime(u[i]);
            d_left = d_right;
        }
        let mut delta: Vec<f64> = res.iter().map(|v| -v).collect();
        if !solve_tridiagonal(&lower, &diag, &upper, &mut delta) {
            return Err(Error::SolveFailure { reason: "singular Newton matrix".into(), residual_history: history });
        }
        let base: Vec<f64> = u.to_vec();
        let mut lambda = 1.0;
        loop {
            for i in 0..m {
                u[i] = base[i] + lambda * delta[i];
            }
            let trial = grid.residual(prob, u, &mut trial_res);
            if trial < norm || (trial <= opts.tol) {
                norm = trial;
                std::mem::swap(&mut res, &mut trial_res);
                break;
            }
            lambda *= 0.5;
            if lambda < 2f64.powi(-30) {
                u[..m].copy_from_slice(&base[..m]);
                history.push(trial);
                return Err(Error::SolveFailure {
                    reason: "damping floor reached without residual decrease".into(),
                    residual_history: history,
                });
            }
        }
        history.push(norm);
        let step = delta.iter().zip(u.iter()).map(|(d, v)| (lambda * d).abs() / (1.0 + v.abs())).fold(0.0, f64::max);
        if step < 1e-15 {
            return Ok(());
        }
    }
    if norm <= opts.tol {
        return Ok(());
    }
    Err(Error::SolveFailure { reason: format!("no convergence in {} Newton steps", opts.max_newton), residual_history: history })
}

/// Solves u = j on the sphere for each j of the (strictly increasing)
/// schedule, continuing from the previous solution.
pub fn solve_exhaustion_bvp(prob: &RadialProblem, j_schedule: &[f64], opts: &BvpOptions) -> Result<Vec<RadialSolution>> {
    if j_schedule.is_empty() || j_schedule.windows(2).any(|w| !(w[1] > w[0])) {
        return param("boundary schedule must be non-empty and strictly increasing");
    }
    if !(j_schedule[0] > 0.0) {
        return param(format!("boundary values must be positive, got {}", j_schedule[0]));
    }
    if !(opts.grid_h > 0.0) || !(opts.grid_h < prob.radius) {
        return param(format!("grid spacing {} must lie in (0, R)", opts.grid_h));
    }
    let grid = Grid::new(prob, opts.grid_h)?;
    let big_r = prob.radius;
    let mut u: Vec<f64> =
        grid.r.iter().map(|&x| j_schedule[0] * (0.9 + 0.1 * x * x / (big_r * big_r))).collect();
    let mut out = Vec::with_capacity(j_schedule.len());
    for &j in j_schedule {
        let last = u.len() - 1;
        u[last] = j;
        let mut meta = SolveMeta { method: "bvp", tol: opts.tol, boundary_value: Some(j), ..Default::default() };
        newton(prob, &grid, &mut u, opts, &mut meta)?;
        out.push(RadialSolution { r: grid.r.clone(), u1: slopes(&grid, &u), u: u.clone(), rstar: big_r, meta });
    }
    Ok(out)
}

/// u′ at the nodes: zero at the centre, one-sided at the sphere, central elsewhere.
fn slopes(grid: &Grid, u: &[f64]) -> Vec<f64> {
    let m = u.len();
    let h = grid.h;
    (0..m)
        .map(|i| {
            if i == 0 {
                0.0
            } else if i == m - 1 {
                (3.0 * u[i] - 4.0 * u[i - 1] + u[i - 2]) / (2.0 * h)
            } else {
                (u[i + 1] - u[i - 1]) / (2.0 * h)
            }
        })
        .collect()
}
