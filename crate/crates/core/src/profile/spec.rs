use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{param, Result};
use crate::quadrature::integrate;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Lower integration limit for F when f has no closed-form antiderivative.
pub(crate) const F_EPS0: f64 = 1e-12;

/// User-supplied nonlinearity with derivative.
#[derive(Clone)]
pub struct CustomNonlinearity {
    pub f: ScalarFn,
    pub f_prime: ScalarFn,
    /// Known exponent p with f(τ) ~ τ^p at infinity, if any.
    pub tail_exponent_hint: Option<f64>,
}

/// Right-hand side nonlinearity f(u) on (0, ∞).
///
/// `Power { gamma: 0.0 }` is the constant nonlinearity f ≡ 1. Power laws are
/// extended by zero to u ≤ 0 so that overshooting Newton iterates stay finite.
#[derive(Clone)]
pub enum NonlinearitySpec {
    Power { gamma: f64 },
    Exponential { rate: f64 },
    Custom(CustomNonlinearity),
}

impl fmt::Debug for NonlinearitySpec {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Power { gamma } => write!(fm, "Power {{ gamma: {gamma} }}"),
            Self::Exponential { rate } => write!(fm, "Exponential {{ rate: {rate} }}"),
            Self::Custom(c) => write!(fm, "Custom {{ tail_exponent_hint: {:?} }}", c.tail_exponent_hint),
        }
    }
}

impl NonlinearitySpec {
    pub fn power(gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return param(format!("power exponent must be finite and >= 0, got {gamma}"));
        }
        Ok(Self::Power { gamma })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate > 0.0) || !rate.is_finite() {
            return param(format!("exponential rate must be positive, got {rate}"));
        }
        Ok(Self::Exponential { rate })
    }

    /// Wraps a custom f after checking (f₁) on a geometric grid.
    pub fn custom(f: ScalarFn, f_prime: ScalarFn, tail_exponent_hint: Option<f64>) -> Result<Self> {
        let spec = Self::Custom(CustomNonlinearity { f, f_prime, tail_exponent_hint });
        spec.check_f1()?;
        Ok(spec)
    }

    /// (f₁): positive and nondecreasing, sampled at 16 points per decade on [1e-6, 1e6].
    pub fn check_f1(&self) -> Result<()> {
        let mut prev = 0.0;
        for i in 0..=(12 * 16) {
            let s = 1e-6 * 10f64.powf(i as f64 / 16.0);
            let v = self.f(s);
            if !(v > 0.0) || !v.is_finite() {
                return param(format!("(f1) violated: f({s:.3e}) = {v} is not positive"));
            }
            if v < prev * (1.0 - 1e-12) {
                return param(format!("(f1) violated: f decreases near s = {s:.3e}"));
            }
            prev = v;
        }
        Ok(())
    }

    pub fn f(&self, s: f64) -> f64 {
        match self {
            Self::Power { gamma } => {
                if *gamma == 0.0 {
                    1.0
                } else {
                    s.max(0.0).powf(*gamma)
                }
            }
            Self::Exponential { rate } => (rate * s).exp(),
            Self::Custom(c) => (c.f)(s),
        }
    }

    pub fn f_prime(&self, s: f64) -> f64 {
        match self {
            Self::Power { gamma } => {
                if *gamma == 0.0 || s <= 0.0 {
                    0.0
                } else {
                    gamma * s.powf(gamma - 1.0)
                }
            }
            Self::Exponential { rate } => rate * (rate * s).exp(),
            Self::Custom(c) => (c.f_prime)(s),
        }
    }

    /// ln f(s), without overflow for the built-in kinds.
    pub fn ln_f(&self, s: f64) -> f64 {
        match self {
            Self::Power { gamma } => gamma * s.ln(),
            Self::Exponential { rate } => rate * s,
            Self::Custom(c) => (c.f)(s).ln(),
        }
    }

    /// F(s) = ∫₀^s f.
    pub fn big_f(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        match self {
            Self::Power { gamma } => s.powf(gamma + 1.0) / (gamma + 1.0),
            Self::Exponential { rate } => (rate * s).exp_m1() / rate,
            Self::Custom(c) => custom_antiderivative(&c.f, s),
        }
    }

    /// ln F(s), without overflow for the built-in kinds.
    pub fn ln_big_f(&self, s: f64) -> f64 {
        match self {
            Self::Power { gamma } => (gamma + 1.0) * s.ln() - (gamma + 1.0).ln(),
            Self::Exponential { rate } => {
                let x = rate * s;
                if x < 1.0 {
                    (x.exp_m1() / rate).ln()
                } else {
                    x + (-(-x).exp()).ln_1p() - rate.ln()
                }
            }
            Self::Custom(_) => self.big_f(s).ln(),
        }
    }

    /// Asymptotic power p of f(τ) ~ τ^p, if the kind has one.
    pub fn tail_exponent(&self) -> Option<f64> {
        match self {
            Self::Power { gamma } => Some(*gamma),
            Self::Exponential { .. } => None,
            Self::Custom(c) => c.tail_exponent_hint,
        }
    }

    pub fn describe(&self) -> Value {
        match self {
            Self::Power { gamma } => json!({ "kind": "power", "gamma": gamma }),
            Self::Exponential { rate } => json!({ "kind": "exponential", "rate": rate }),
            Self::Custom(c) => json!({ "kind": "custom", "tail_exponent_hint": c.tail_exponent_hint }),
        }
    }
}

/// ∫_{ε₀}^s f plus the local power fit f ≈ f(ε₀)(τ/ε₀)^p on (0, ε₀).
fn custom_antiderivative(f: &ScalarFn, s: f64) -> f64 {
    let e0 = F_EPS0.min(s);
    let f0 = f(e0);
    let f1 = f(2.0 * e0);
    let p = if f0 > 0.0 && f1 > 0.0 { (f1 / f0).log2() } else { 0.0 };
    let head = if p > -1.0 { f0 * e0 / (p + 1.0) } else { f64::INFINITY };
    if s <= e0 {
        return head;
    }
    // Geometric panels keep relative accuracy across many decades.
    let mut a = e0;
    let mut total = head;
    while a < s {
        let b = (2.0 * a).min(s);
        total += integrate(|t| f(t), a, b, 0.0, 1e-13).value;
        a = b;
    }
    total
}

/// Weight profile m(t) from (b₂).
#[derive(Clone)]
pub enum WeightKind {
    Constant { c: f64 },
    Power { alpha: f64 },
    Custom { m: ScalarFn, m_prime: ScalarFn },
}

impl fmt::Debug for WeightKind {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant { c } => write!(fm, "Constant {{ c: {c} }}"),
            Self::Power { alpha } => write!(fm, "Power {{ alpha: {alpha} }}"),
            Self::Custom { .. } => write!(fm, "Custom"),
        }
    }
}

/// m(t) together with the validity window and the liminf/limsup constants b̲, b̄.
#[derive(Clone, Debug)]
pub struct WeightSpec {
    pub kind: WeightKind,
    pub delta0: f64,
    pub b_lower: f64,
    pub b_upper: f64,
}

impl WeightSpec {
    pub fn new(kind: WeightKind, delta0: f64, b_lower: f64, b_upper: f64) -> Result<Self> {
        if !(delta0 > 0.0) {
            return param(format!("delta0 must be positive, got {delta0}"));
        }
        if !(b_lower > 0.0) || !(b_upper >= b_lower) || !b_upper.is_finite() {
            return param(format!("(b2) needs 0 < b_lower <= b_upper, got {b_lower}, {b_upper}"));
        }
        match &kind {
            WeightKind::Constant { c } if !(*c > 0.0) => {
                return param(format!("constant weight must be positive, got {c}"))
            }
            WeightKind::Power { alpha } if !(*alpha > 0.0) => {
                return param(format!("power weight needs alpha > 0, got {alpha}"))
            }
            _ => {}
        }
        let spec = Self { kind, delta0, b_lower, b_upper };
        spec.check_monotone()?;
        Ok(spec)
    }

    /// b ≡ 1 with m ≡ 1.
    pub fn unit() -> Self {
        Self { kind: WeightKind::Constant { c: 1.0 }, delta0: 1.0, b_lower: 1.0, b_upper: 1.0 }
    }

    fn check_monotone(&self) -> Result<()> {
        let mut prev = 0.0;
        for i in 1..=400 {
            let t = self.delta0 * 10f64.powf(-8.0 + 8.0 * i as f64 / 400.0) * (1.0 - 1e-9);
            let v = self.m(t);
            if !(v > 0.0) || !v.is_finite() {
                return param(format!("(b2) violated: m({t:.3e}) = {v} is not positive"));
            }
            if v < prev * (1.0 - 1e-12) {
                return param(format!("(b2) violated: m decreases near t = {t:.3e}"));
            }
            prev = v;
        }
        Ok(())
    }

    pub fn m(&self, t: f64) -> f64 {
        match &self.kind {
            WeightKind::Constant { c } => *c,
            WeightKind::Power { alpha } => t.max(0.0).powf(*alpha),
            WeightKind::Custom { m, .. } => m(t),
        }
    }

    pub fn m_prime(&self, t: f64) -> f64 {
        match &self.kind {
            WeightKind::Constant { .. } => 0.0,
            WeightKind::Power { alpha } => alpha * t.max(0.0).powf(alpha - 1.0),
            WeightKind::Custom { m_prime, .. } => m_prime(t),
        }
    }

    /// M(t) = ∫₀^t m.
    pub fn big_m(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            WeightKind::Constant { c } => c * t,
            WeightKind::Power { alpha } => t.powf(alpha + 1.0) / (alpha + 1.0),
            WeightKind::Custom { m, .. } => integrate(|s| m(s), 0.0, t, 0.0, 1e-13).value,
        }
    }

    /// b in normal form b̲·m(d)^{k+1}.
    pub fn b_of_distance(&self, d: f64, k: usize) -> f64 {
        self.b_lower * self.m(d).powi(k as i32 + 1)
    }

    pub fn describe(&self) -> Value {
        let kind = match &self.kind {
            WeightKind::Constant { c } => json!({ "kind": "constant", "c": c }),
            WeightKind::Power { alpha } => json!({ "kind": "power", "alpha": alpha }),
            WeightKind::Custom { .. } => json!({ "kind": "custom" }),
        };
        json!({ "m": kind, "delta0": self.delta0, "b_lower": self.b_lower, "b_upper": self.b_upper })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_antiderivatives() {
        let p = NonlinearitySpec::power(3.0).unwrap();
        assert_eq!(p.big_f(2.0), 4.0);
        let e = NonlinearitySpec::exponential(2.0).unwrap();
        assert!((e.big_f(1.0) - (2f64.exp() - 1.0) / 2.0).abs() < 1e-15);
        assert!((e.ln_big_f(400.0) - (800.0 - 2f64.ln())).abs() < 1e-12);
        assert!((e.ln_big_f(0.1) - e.big_f(0.1).ln()).abs() < 1e-14);
    }

    #[test]
    fn custom_antiderivative_matches_power() {
        let f: ScalarFn = Arc::new(|s: f64| s.powi(3));
        let fp: ScalarFn = Arc::new(|s: f64| 3.0 * s * s);
        let c = NonlinearitySpec::custom(f, fp, Some(3.0)).unwrap();
        for s in [1e-3f64, 0.5, 3.0, 40.0] {
            let exact = s.powi(4) / 4.0;
            assert!((c.big_f(s) - exact).abs() < 1e-11 * exact, "{s}");
        }
    }

    #[test]
    fn f1_check_rejects_decreasing() {
        let f: ScalarFn = Arc::new(|s: f64| 1.0 / (1.0 + s));
        let fp: ScalarFn = Arc::new(|s: f64| -1.0 / (1.0 + s).powi(2));
        assert!(NonlinearitySpec::custom(f, fp, None).is_err());
        assert!(NonlinearitySpec::exponential(0.0).is_err());
        assert!(NonlinearitySpec::power(-1.0).is_err());
    }

    #[test]
    fn weight_closed_forms() {
        let w = WeightSpec::new(WeightKind::Power { alpha: 1.0 }, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(w.big_m(0.5), 0.125);
        assert_eq!(w.m_prime(0.3), 1.0);
        let custom = WeightSpec::new(
            WeightKind::Custom { m: Arc::new(|t: f64| t * t), m_prime: Arc::new(|t: f64| 2.0 * t) },
            1.0,
            1.0,
            1.0,
        )
        .unwrap();
        assert!((custom.big_m(0.6) - 0.072).abs() < 1e-15);
        assert!(WeightSpec::new(WeightKind::Constant { c: 1.0 }, 1.0, 2.0, 1.0).is_err());
    }
}
