//! Forward integration from the origin until blowup.

use crate::error::{param, Error, Result};
use crate::hessian::{binomial, cone_membership, radial_eigenvalues};

use super::ode::{step_factor, trial, State};
use super::{RadialProblem, RadialSolution, SolveMeta};

#[derive(Debug, Clone, Copy)]
pub struct IvpOptions {
    /// Relative and absolute tolerance per step.
    pub tol: f64,
    /// Stop once u or u′ exceeds this.
    pub blowup_threshold: f64,
    pub max_steps: usize,
    /// Give up if no blowup before this multiple of the ball radius.
    pub r_max_factor: f64,
}

impl Default for IvpOptions {
    fn default() -> Self {
        Self { tol: 1e-10, blowup_threshold: 1e12, max_steps: 2_000_000, r_max_factor: 1e4 }
    }
}

pub fn integrate_blowup_ivp(prob: &RadialProblem, u0: f64, tol: f64) -> Result<RadialSolution> {
    integrate_blowup_ivp_with(prob, u0, &IvpOptions { tol, ..Default::default() })
}

/// u″ from the closed radial form: (b f − C(n−1,k) t^k) / (C(n−1,k−1) t^{k−1}), t = u′/r.
fn second_derivative(prob: &RadialProblem, c1: f64, c2: f64, r: f64, u: f64, v: f64) -> f64 {
    let k = prob.k as i32;
    let t = v / r;
    if k > 1 && !(t > 0.0) {
        return f64::NAN;
    }
    (prob.b(r) * prob.f.f(u) - c1 * t.powi(k)) / (c2 * t.powi(k - 1))
}

pub fn integrate_blowup_ivp_with(prob: &RadialProblem, u0: f64, opts: &IvpOptions) -> Result<RadialSolution> {
    if !(u0 > 0.0) || !u0.is_finite() {
        return param(format!("initial value u0 must be positive, got {u0}"));
    }
    if !(opts.tol > 0.0) {
        return param(format!("tolerance must be positive, got {}", opts.tol));
    }
    let (n, k) = (prob.n, prob.k);
    let (c1, c2) = (binomial(n - 1, k), binomial(n - 1, k - 1));
    let rhs = |r: f64, y: State| [y[1], second_derivative(prob, c1, c2, r, y[0], y[1])];

    // Near the origin D²u ≈ c·I with C(n,k) c^k = b(0) f(u0).
    let c = (prob.b(0.0) * prob.f.f(u0) / binomial(n, k)).powf(1.0 / k as f64);
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::IntegrationFailure { r: 0.0, u: u0, v: 0.0, reason: format!("b(0) f(u0) = {}", c) });
    }
    let r0 = 1e-8 * prob.radius;
    let mut x = r0;
    let mut y = [u0 + 0.5 * c * r0 * r0, c * r0];
    let mut dy = [y[1], c];
    let mut rs = vec![0.0, x];
    let mut us = vec![u0, y[0]];
    let mut u1s = vec![0.0, y[1]];
    let mut u2s = vec![c, c];
    let mut meta = SolveMeta { method: "ivp", tol: opts.tol, u0: Some(u0), ..Default::default() };

    let mut h = 1e-3 * prob.radius;
    let r_max = opts.r_max_factor * prob.radius;
    let fail = |x: f64, y: State, reason: String| Error::IntegrationFailure { r: x, u: y[0], v: y[1], reason };
    loop {
        if meta.accepted_steps + meta.rejected_steps >= opts.max_steps {
            return Err(fail(x, y, format!("step limit {} reached", opts.max_steps)));
        }
        if x > r_max {
            return Err(fail(x, y, format!("no blowup before r = {r_max:e}")));
        }
        if h <= 4.0 * f64::EPSILON * x {
            // Step size has hit the resolution of r; accept if clearly blowing up.
            if y[1] > 1e6 && us.len() >= 3 {
                break;
            }
            return Err(fail(x, y, "step size underflow".into()));
        }
        let t = trial(&rhs, x, y, dy, h, opts.tol, opts.tol);
        if t.err <= 1.0 {
            x += h;
            y = t.y;
            dy = t.dy;
            meta.accepted_steps += 1;
            let lam = radial_eigenvalues(y[1], dy[1], x, n)
                .map_err(|e| fail(x, y, format!("bad state: {e}")))?;
            let cone = cone_membership(&lam, k)?;
            if !cone.admissible {
                return Err(fail(x, y, format!("left the admissible cone: sigmas {:?}", cone.sigmas)));
            }
            rs.push(x);
            us.push(y[0]);
            u1s.push(y[1]);
            u2s.push(dy[1]);
            if y[0] > opts.blowup_threshold || y[1] > opts.blowup_threshold {
                break;
            }
        } else {
            meta.rejected_steps += 1;
        }
        h *= step_factor(t.err);
    }

    // g = u′/u″ is asymptotically linear in the distance to the blowup radius
    // for both power-type and logarithmic blowup; extrapolate it to zero.
    let m = rs.len();
    let (ra, rb) = (rs[m - 2], rs[m - 1]);
    let (ga, gb) = (u1s[m - 2] / u2s[m - 2], u1s[m - 1] / u2s[m - 1]);
    let slope = (gb - ga) / (rb - ra);
    let rstar = if slope < 0.0 && slope.is_finite() { rb - gb / slope } else { rb };
    Ok(RadialSolution { r: rs, u: us, u1: u1s, rstar: rstar.max(rb), meta })
}

/// Finds u0 whose blowup radius equals the ball radius, by bisection in ln u0.
///
/// Relies on the blowup radius decreasing in u0.
pub fn shoot_blowup_radius(prob: &RadialProblem, opts: &IvpOptions, rel_tol: f64) -> Result<RadialSolution> {
    let target = prob.radius;
    let rstar = |u0: f64| integrate_blowup_ivp_with(prob, u0, opts);
    let bracket_fail = || param("could not bracket the blowup radius");
    // Invariant once bracketed: rstar(lo) > target >= rstar(hi).
    let (mut lo, mut hi) = (1.0f64, 1.0f64);
    let (mut sol_lo, mut sol_hi);
    let first = rstar(1.0)?;
    if first.rstar > target {
        sol_lo = first;
        hi = 2.0;
        sol_hi = rstar(hi)?;
        while sol_hi.rstar > target {
            (lo, sol_lo) = (hi, sol_hi);
            hi *= 2.0;
            if hi > 1e300 {
                return bracket_fail();
            }
            sol_hi = rstar(hi)?;
        }
    } else {
        sol_hi = first;
        lo = 0.5;
        sol_lo = rstar(lo)?;
        while sol_lo.rstar <= target {
            (hi, sol_hi) = (lo, sol_lo);
            lo *= 0.5;
            if lo < 1e-300 {
                return bracket_fail();
            }
            sol_lo = rstar(lo)?;
        }
    }
    let mut best = if (sol_lo.rstar - target).abs() < (sol_hi.rstar - target).abs() { sol_lo } else { sol_hi };
    for _ in 0..200 {
        if (best.rstar - target).abs() <= rel_tol * target || hi / lo - 1.0 < 1e-15 {
            break;
        }
        let mid = (lo * hi).sqrt();
        let sol = rstar(mid)?;
        if sol.rstar > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if (sol.rstar - target).abs() < (best.rstar - target).abs() {
            best = sol;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::NonlinearitySpec;

    #[test]
    fn liouville_blowup_radius() {
        let prob = RadialProblem::unit_weight(2, 1, 1.0, NonlinearitySpec::exponential(2.0).unwrap()).unwrap();
        let sol = integrate_blowup_ivp(&prob, 2f64.ln(), 1e-11).unwrap();
        assert!((sol.rstar - 1.0).abs() < 1e-6, "{}", sol.rstar);
    }
}
