//! Decreasing functions T(s) = ∫_s^∞ g and their inverses, with a
//! log–log Hermite table used to seed bracketed bisection.

use crate::error::{Error, Result};
use crate::quadrature::{integrate_to_infinity, TailIntegral, TailOptions};

use super::spec::ScalarFn;

/// Cache resolution in nodes per decade of the tail value.
const NODES_PER_DECADE: f64 = 64.0;
/// Relative width at which bisection stops.
const BISECTION_RTOL: f64 = 1e-14;

#[derive(Clone)]
pub(crate) struct TailInverse {
    integrand: ScalarFn,
    hint: Option<f64>,
    sup: f64,
    tail_exponent: Option<f64>,
    /// (ln t, ln s, d ln s / d ln t), ascending in ln t.
    table: Vec<(f64, f64, f64)>,
}

impl TailInverse {
    pub fn build(integrand: ScalarFn, hint: Option<f64>) -> Result<Self> {
        let opts = TailOptions { exponent_hint: hint, ..Default::default() };
        let tail_exponent = match integrate_to_infinity(|x| integrand(x), 1.0, opts) {
            TailIntegral::Divergent { tail_exponent } => {
                return Err(Error::KellerOssermanViolation { tail_exponent })
            }
            TailIntegral::Convergent { tail_exponent, .. } => tail_exponent,
        };
        let mut me = Self { integrand, hint, sup: f64::INFINITY, tail_exponent, table: Vec::new() };
        me.sup = me.value_at_zero();
        me.build_table();
        Ok(me)
    }

    fn value_at_zero(&self) -> f64 {
        let s0 = 1e-12;
        let g0 = (self.integrand)(s0);
        let g1 = (self.integrand)(2.0 * s0);
        let p0 = (g1 / g0).log2();
        if !(p0 > -1.0 + 1e-9) {
            return f64::INFINITY;
        }
        self.value(s0) + g0 * s0 / (p0 + 1.0)
    }

    fn build_table(&mut self) {
        let t_min = 1e-16;
        let t_max = 1e8f64.min(self.sup * (1.0 - 1e-6));
        let step = std::f64::consts::LN_10 / NODES_PER_DECADE;
        let mut nodes = Vec::new();
        for dir in [1.0, -1.0] {
            let mut ln_s = 0.0f64;
            if dir < 0.0 {
                ln_s -= self.next_step(0.0, step);
            }
            loop {
                let s = ln_s.exp();
                let t = self.value(s);
                if !(t > 0.0) || !t.is_finite() {
                    break;
                }
                let dlnt = -s * (self.integrand)(s) / t;
                if !(dlnt < 0.0) || !dlnt.is_finite() {
                    break;
                }
                nodes.push((t.ln(), ln_s, 1.0 / dlnt));
                if t < t_min || t > t_max || ln_s.abs() > 640.0 {
                    break;
                }
                ln_s += dir * (step / dlnt.abs()).clamp(1e-4, std::f64::consts::LN_10);
            }
        }
        nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
        nodes.dedup_by(|a, b| a.0 == b.0);
        self.table = nodes;
    }

    fn next_step(&self, ln_s: f64, step: f64) -> f64 {
        let s = ln_s.exp();
        let t = self.value(s);
        let dlnt = (s * (self.integrand)(s) / t).abs();
        (step / dlnt).clamp(1e-4, std::f64::consts::LN_10)
    }

    /// T(s) = ∫_s^∞ g.
    pub fn value(&self, s: f64) -> f64 {
        let opts = TailOptions { exponent_hint: self.hint, ..Default::default() };
        match integrate_to_infinity(|x| (self.integrand)(x), s, opts) {
            TailIntegral::Convergent { value, .. } => value,
            TailIntegral::Divergent { .. } => f64::INFINITY,
        }
    }

    /// lim_{s→0⁺} T(s); infinite when g is not integrable at 0.
    pub fn sup(&self) -> f64 {
        self.sup
    }

    pub fn tail_exponent(&self) -> Option<f64> {
        self.tail_exponent
    }

    fn table_guess(&self, ln_t: f64) -> Option<f64> {
        let tab = &self.table;
        if tab.len() < 2 || ln_t < tab[0].0 || ln_t > tab[tab.len() - 1].0 {
            return None;
        }
        let i = tab.partition_point(|node| node.0 <= ln_t).clamp(1, tab.len() - 1);
        let (x0, y0, m0) = tab[i - 1];
        let (x1, y1, m1) = tab[i];
        let h = x1 - x0;
        let u = (ln_t - x0) / h;
        let (u2, u3) = (u * u, u * u * u);
        let y = (2.0 * u3 - 3.0 * u2 + 1.0) * y0
            + (u3 - 2.0 * u2 + u) * h * m0
            + (-2.0 * u3 + 3.0 * u2) * y1
            + (u3 - u2) * h * m1;
        Some(y.exp())
    }

    /// Unpolished inverse from the cached table (≈1e-9 relative); `None`
    /// outside the cached range.
    pub fn inverse_cached(&self, t: f64) -> Option<f64> {
        self.table_guess(t.ln())
    }

    /// s with T(s) = t, by bracketing then bisection in ln s.
    pub fn inverse(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || !(t < self.sup) {
            return Err(Error::Parameter(format!(
                "argument {t:e} outside the inverse's domain (0, {:e})",
                self.sup
            )));
        }
        let seed = self.table_guess(t.ln()).unwrap_or(1.0);
        // Invariant: T(lo) >= t >= T(hi), lo < hi.
        let mut width: f64 = if self.table.is_empty() || seed == 1.0 { 1.0 } else { 1e-7 };
        let (mut lo, mut hi);
        loop {
            lo = seed * (-width).exp();
            hi = seed * width.exp();
            let ok_lo = self.value(lo) >= t;
            let ok_hi = self.value(hi) <= t;
            if ok_lo && ok_hi {
                break;
            }
            width *= 8.0;
            if width > 700.0 {
                return Err(Error::Parameter(format!("could not bracket inverse at t = {t:e}")));
            }
        }
        for _ in 0..200 {
            if hi / lo - 1.0 <= BISECTION_RTOL {
                break;
            }
            let mid = (lo * hi).sqrt();
            if mid <= lo || mid >= hi {
                break;
            }
            if self.value(mid) >= t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((lo * hi).sqrt())
    }
}
