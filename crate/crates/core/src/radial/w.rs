//! S_k(D²w) = b in the ball, w = 0 on the sphere, through the exact reduction
//! r^{n−k}(w′)^k = (k/C(n−1,k−1)) ∫₀^r sⁿ⁻¹ b.

use crate::error::Result;
use crate::hessian::binomial;
use crate::quadrature::integrate;

use super::{RadialProblem, RadialSolution, SolveMeta};

/// Evaluators for w, w′ and w″ plus a sampled [`RadialSolution`].
#[derive(Clone, Debug)]
pub struct WSolution {
    pub prob: RadialProblem,
    pub solution: RadialSolution,
    /// K = k/C(n−1,k−1).
    k_const: f64,
}

/// Number of panels for the tabulated w.
const W_PANELS: usize = 400;

pub fn solve_w(prob: &RadialProblem) -> Result<WSolution> {
    let k_const = prob.k as f64 / binomial(prob.n - 1, prob.k - 1);
    let mut me = WSolution {
        prob: prob.clone(),
        solution: RadialSolution { r: vec![], u: vec![], u1: vec![], rstar: prob.radius, meta: SolveMeta::default() },
        k_const,
    };
    let big_r = prob.radius;
    let r: Vec<f64> = (0..=W_PANELS).map(|i| big_r * i as f64 / W_PANELS as f64).collect();
    let mut u = vec![0.0; r.len()];
    for i in (0..W_PANELS).rev() {
        u[i] = u[i + 1] - integrate(|s| me.w1(s), r[i], r[i + 1], 0.0, 1e-14).value;
    }
    let u1 = r.iter().map(|&s| me.w1(s)).collect();
    me.solution = RadialSolution {
        r,
        u,
        u1,
        rstar: big_r,
        meta: SolveMeta { method: "w", tol: 1e-14, ..Default::default() },
    };
    Ok(me)
}

impl WSolution {
    /// J(r) = ∫₀¹ tⁿ⁻¹ b(rt) dt = r⁻ⁿ ∫₀^r sⁿ⁻¹ b.
    fn mean_b(&self, r: f64) -> f64 {
        let n = self.prob.n as i32;
        integrate(|t| t.powi(n - 1) * self.prob.b(r * t), 0.0, 1.0, 0.0, 1e-14).value
    }

    /// w′(r) = r (K J(r))^{1/k}.
    pub fn w1(&self, r: f64) -> f64 {
        r * (self.k_const * self.mean_b(r)).powf(1.0 / self.prob.k as f64)
    }

    /// w″(r) = (K/k)(K J)^{(1−k)/k} (b(r) − (n−k) J(r)).
    pub fn w2(&self, r: f64) -> f64 {
        let (n, k) = (self.prob.n as f64, self.prob.k as f64);
        let j = self.mean_b(r);
        self.k_const / k * (self.k_const * j).powf((1.0 - k) / k) * (self.prob.b(r) - (n - k) * j)
    }

    /// w(r) = −∫_r^R w′.
    pub fn w(&self, r: f64) -> f64 {
        let sol = &self.solution;
        let big_r = self.prob.radius;
        let r = r.clamp(0.0, big_r);
        let i = ((r / big_r * W_PANELS as f64).ceil() as usize).min(W_PANELS);
        sol.u[i] - integrate(|s| self.w1(s), r, sol.r[i], 0.0, 1e-14).value
    }

    /// (w, w′, w″) at r.
    pub fn derivatives(&self, r: f64) -> (f64, f64, f64) {
        (self.w(r), self.w1(r), self.w2(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hessian::sk_radial;
    use crate::profile::NonlinearitySpec;

    fn unit(n: usize, k: usize) -> WSolution {
        solve_w(&RadialProblem::unit_weight(n, k, 1.0, NonlinearitySpec::power(3.0).unwrap()).unwrap()).unwrap()
    }

    #[test]
    fn closed_forms() {
        for (n, k, c) in [(2, 1, 4.0), (2, 2, 2.0), (3, 1, 6.0)] {
            let w = unit(n, k);
            for r in [0.0, 0.3, 0.77, 1.0] {
                let exact = (r * r - 1.0) / c;
                assert!((w.w(r) - exact).abs() < 1e-14, "n={n} k={k} r={r}: {}", w.w(r));
                assert!((w.w1(r) - 2.0 * r / c).abs() < 1e-14);
                assert!((w.w2(r) - 2.0 / c).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn variable_weight_satisfies_equation() {
        let b = std::sync::Arc::new(|r: f64| 1.0 + r * r);
        let prob = RadialProblem::new(3, 2, 1.0, NonlinearitySpec::power(5.0).unwrap(), super::super::RadialWeight::Custom(b))
            .unwrap();
        let w = solve_w(&prob).unwrap();
        for r in [0.1, 0.5, 0.9] {
            let (_, w1, w2) = w.derivatives(r);
            let sk = sk_radial(w1, w2, r, 3, 2).unwrap();
            assert!((sk - (1.0 + r * r)).abs() < 1e-12);
        }
        assert_eq!(w.w(1.0), 0.0);
        assert!(w.w(0.0) < 0.0);
    }
}
