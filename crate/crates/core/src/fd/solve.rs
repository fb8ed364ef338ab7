//! Damped Newton for Δu = b(x) f(u) with red–black SOR inner solves.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::profile::{NonlinearitySpec, WeightSpec};

use super::domain::DomainSpec2D;
use super::grid::Field2D;

pub type PlaneFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Δu = b(x) f(u) on a disk or ellipse.
#[derive(Clone)]
pub struct FdProblem {
    pub domain: DomainSpec2D,
    pub f: NonlinearitySpec,
    /// b(x) = b̲·m(d(x))² unless overridden.
    pub weight: WeightSpec,
    pub b_override: Option<PlaneFn>,
}

impl std::fmt::Debug for FdProblem {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("FdProblem")
            .field("domain", &self.domain)
            .field("f", &self.f)
            .field("weight", &self.weight)
            .field("b_override", &self.b_override.is_some())
            .finish()
    }
}

impl FdProblem {
    pub fn new(domain: DomainSpec2D, f: NonlinearitySpec, weight: WeightSpec) -> Self {
        Self { domain, f, weight, b_override: None }
    }

    fn b_at(&self, grid: &Field2D, p: usize) -> f64 {
        match &self.b_override {
            Some(b) => {
                let (x, y) = grid.coords(p);
                b(x, y)
            }
            None => self.weight.b_of_distance(grid.dist[p], 1),
        }
    }
}

#[derive(Clone)]
pub enum BoundaryData {
    Constant(f64),
    Function(PlaneFn),
}

impl BoundaryData {
    fn at(&self, x: f64, y: f64) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::Function(g) => g(x, y),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FdOptions {
    /// Outer tolerance on the scaled residual; inner solves go to tol/10.
    pub tol: f64,
    pub max_newton: usize,
    pub max_sweeps: usize,
    /// Over-relaxation factor; defaults to 2/(1 + π h/diam).
    pub omega: Option<f64>,
}

impl Default for FdOptions {
    fn default() -> Self {
        Self { tol: 1e-9, max_newton: 60, max_sweeps: 200_000, omega: None }
    }
}

/// Per-node stencil: coefficients, neighbours and fixed boundary values.
struct Stencil {
    nodes: Vec<usize>,
    /// Red nodes first, then black.
    split: usize,
    coef: Vec<[f64; 4]>,
    nbr: Vec<[Option<usize>; 4]>,
    /// Σ coef·g over cut arms.
    bc: Vec<f64>,
    diag: Vec<f64>,
    b: Vec<f64>,
    /// 4/h² over |diag|: maps residuals to regular-node scale.
    scale: Vec<f64>,
    g_max: f64,
}

impl Stencil {
    fn new(prob: &FdProblem, grid: &Field2D, g: &BoundaryData) -> Self {
        let mut red = Vec::new();
        let mut black = Vec::new();
        for p in grid.interior_nodes() {
            let (i, j) = (p % grid.nx, p / grid.nx);
            if (i + j) % 2 == 0 {
                red.push(p);
            } else {
                black.push(p);
            }
        }
        let split = red.len();
        red.extend(black);
        let nodes = red;
        let mut coef = Vec::with_capacity(nodes.len());
        let mut nbr = Vec::with_capacity(nodes.len());
        let mut bc = Vec::with_capacity(nodes.len());
        let mut diag = Vec::with_capacity(nodes.len());
        let mut b = Vec::with_capacity(nodes.len());
        let mut scale = Vec::with_capacity(nodes.len());
        let h2 = grid.h * grid.h;
        let mut g_max = f64::NEG_INFINITY;
        for &p in &nodes {
            let arms = &grid.arms[p];
            let l = arms.len;
            // Shortley–Weller: 2/(h₊(h₊+h₋)) and 2/(h₋(h₊+h₋)) per axis.
            let c = [
                2.0 / (l[0] * (l[0] + l[1])),
                2.0 / (l[1] * (l[0] + l[1])),
                2.0 / (l[2] * (l[2] + l[3])),
                2.0 / (l[3] * (l[2] + l[3])),
            ];
            let mut acc = 0.0;
            for d in 0..4 {
                if arms.nbr[d].is_none() {
                    let (x, y) = grid.arm_end(p, d);
                    let gv = g.at(x, y);
                    g_max = g_max.max(gv);
                    acc += c[d] * gv;
                }
            }
            let dg = -(c[0] + c[1] + c[2] + c[3]);
            coef.push(c);
            nbr.push(arms.nbr);
            bc.push(acc);
            diag.push(dg);
            b.push(prob.b_at(grid, p));
            scale.push(4.0 / h2 / dg.abs());
        }
        Self { nodes, split, coef, nbr, bc, diag, b, scale, g_max }
    }

    fn laplacian(&self, idx: usize, u: &[f64]) -> f64 {
        let p = self.nodes[idx];
        let mut s = self.bc[idx] + self.diag[idx] * u[p];
        for d in 0..4 {
            if let Some(q) = self.nbr[idx][d] {
                s += self.coef[idx][d] * u[q];
            }
        }
        s
    }

    /// F = Lu − b f(u) per stencil entry, and its scaled max norm.
    fn residual(&self, f: &NonlinearitySpec, u: &[f64], out: &mut [f64]) -> f64 {
        let mut norm = 0.0f64;
        for idx in 0..self.nodes.len() {
            let r = self.laplacian(idx, u) - self.b[idx] * f.f(u[self.nodes[idx]]);
            out[idx] = r;
            let scaled = r.abs() * self.scale[idx];
            norm = if scaled.is_finite() { norm.max(scaled) } else { f64::INFINITY };
        }
        norm
    }

    /// Red–black SOR for (L − diag(σ)) δ = rhs with δ = 0 on the boundary.
    fn sor(&self, sigma: &[f64], rhs: &[f64], delta: &mut [f64], omega: f64, tol: f64, max_sweeps: usize) -> Option<usize> {
        let n = self.nodes.len();
        for sweep in 1..=max_sweeps {
            for range in [0..self.split, self.split..n] {
                for idx in range {
                    let p = self.nodes[idx];
                    let mut off = 0.0;
                    for d in 0..4 {
                        if let Some(q) = self.nbr[idx][d] {
                            off += self.coef[idx][d] * delta[q];
                        }
                    }
                    let gs = (rhs[idx] - off) / (self.diag[idx] - sigma[idx]);
                    delta[p] += omega * (gs - delta[p]);
                }
            }
            if sweep % 10 == 0 {
                let mut worst = 0.0f64;
                for idx in 0..n {
                    let p = self.nodes[idx];
                    let mut lin = (self.diag[idx] - sigma[idx]) * delta[p];
                    for d in 0..4 {
                        if let Some(q) = self.nbr[idx][d] {
                            lin += self.coef[idx][d] * delta[q];
                        }
                    }
                    worst = worst.max((lin - rhs[idx]).abs() * self.scale[idx]);
                }
                if worst <= tol {
                    return Some(sweep);
                }
                if !worst.is_finite() {
                    return None;
                }
            }
        }
        None
    }
}

/// Iteration statistics of one Dirichlet solve.
#[derive(Debug, Clone, Default, Serialize)]
pub struct SolveStats {
    pub newton_iterations: usize,
    pub sor_sweeps: usize,
    pub residual_history: Vec<f64>,
}

/// Solves Δu = b f(u) with u = g on the boundary, starting from `initial`
/// (or from g's value at the origin's nearest boundary point when absent).
pub fn solve_dirichlet(
    prob: &FdProblem,
    g: &BoundaryData,
    grid: &Field2D,
    initial: Option<&[f64]>,
    opts: &FdOptions,
) -> Result<(Field2D, SolveStats)> {
    if grid.domain != prob.domain {
        return param("grid was built for a different domain");
    }
    if !(opts.tol > 0.0) {
        return param(format!("tolerance must be positive, got {}", opts.tol));
    }
    let st = Stencil::new(prob, grid, g);
    let n = st.nodes.len();
    let mut u = match initial {
        Some(v) if v.len() == grid.values.len() => v.to_vec(),
        Some(_) => return param("initial field has the wrong size"),
        None => {
            let (a, _) = prob.domain.semi_axes();
            vec![g.at(a, 0.0); grid.values.len()]
        }
    };
    let omega = opts.omega.unwrap_or(2.0 / (1.0 + std::f64::consts::PI * grid.h / prob.domain.diameter()));
    let mut res = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut norm = st.residual(&prob.f, &u, &mut res);
    let mut stats = SolveStats { residual_history: vec![norm], ..Default::default() };
    let mut sigma = vec![0.0; n];
    let mut delta = vec![0.0; grid.values.len()];
    while norm > opts.tol {
        if stats.newton_iterations >= opts.max_newton {
            return Err(Error::SolveFailure {
                reason: format!("no convergence in {} Newton steps", opts.max_newton),
                residual_history: stats.residual_history,
            });
        }
        stats.newton_iterations += 1;
        for idx in 0..n {
            sigma[idx] = st.b[idx] * prob.f.f_prime(u[st.nodes[idx]]);
        }
        let rhs: Vec<f64> = res.iter().map(|r| -r).collect();
        delta.iter_mut().for_each(|d| *d = 0.0);
        // Inexact Newton: loose inner solves while far from the root.
        let inner_tol = (0.1 * opts.tol).max(1e-3 * norm);
        match st.sor(&sigma, &rhs, &mut delta, omega, inner_tol, opts.max_sweeps) {
            Some(sweeps) => stats.sor_sweeps += sweeps,
            None => {
                return Err(Error::SolveFailure {
                    reason: "inner SOR solve did not converge".into(),
                    residual_history: stats.residual_history,
                })
            }
        }
        let base = u.clone();
        let mut lambda = 1.0;
        loop {
            for &p in &st.nodes {
                u[p] = base[p] + lambda * delta[p];
            }
            let t = st.residual(&prob.f, &u, &mut trial);
            if t < norm || t <= opts.tol {
                norm = t;
                std::mem::swap(&mut res, &mut trial);
                break;
            }
            lambda *= 0.5;
            if lambda < 2f64.powi(-30) {
                stats.residual_history.push(t);
                return Err(Error::SolveFailure {
                    reason: "damping floor reached without residual decrease".into(),
                    residual_history: stats.residual_history,
                });
            }
        }
        stats.residual_history.push(norm);
    }
    // Δu = b f(u) ≥ 0, so u is discretely subharmonic.
    let u_max = st.nodes.iter().map(|&p| u[p]).fold(f64::NEG_INFINITY, f64::max);
    if u_max > st.g_max + 1e-8 * (1.0 + st.g_max.abs()) {
        return Err(Error::SolveFailure {
            reason: format!("discrete maximum principle violated: max u = {u_max:e} > max g = {:e}", st.g_max),
            residual_history: stats.residual_history,
        });
    }
    let mut out = grid.clone();
    for p in 0..out.values.len() {
        out.values[p] = if grid.is_inside(p) { u[p] } else { f64::NAN };
    }
    Ok((out, stats))
}
