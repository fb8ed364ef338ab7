//! Adaptive Gauss–Kronrod quadrature and improper integrals over [s, ∞).

/// Kronrod abscissae for the 15-point rule (the even-indexed ones are the
/// 7-point Gauss nodes).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// One G7–K15 panel: (Kronrod estimate, |K − G|).
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Globally adaptive G7–K15 on a finite interval.
///
/// Bisects the panel with the largest error estimate until the summed error
/// is within `max(abs_tol, rel_tol·|I|)` or 2000 panels are in play.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> QuadResult {
    if a == b {
        return QuadResult { value: 0.0, error: 0.0, evaluations: 0 };
    }
    let (v0, e0) = gk15(&f, a, b);
    let mut panels = vec![(a, b, v0, e0)];
    let mut evaluations = 15;
    loop {
        let value: f64 = panels.iter().map(|p| p.2).sum();
        let error: f64 = panels.iter().map(|p| p.3).sum();
        if error <= abs_tol.max(rel_tol * value.abs()) || panels.len() >= 2000 || !value.is_finite() {
            return QuadResult { value, error, evaluations };
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (pa, pb, _, _) = panels.swap_remove(worst);
        let mid = 0.5 * (pa + pb);
        if mid <= pa || mid >= pb {
            // Panel at round-off width; nothing left to gain.
            let (v, e) = gk15(&f, pa, pb);
            let _ = e;
            panels.push((pa, pb, v, 0.0));
            evaluations += 15;
            continue;
        }
        let (vl, el) = gk15(&f, pa, mid);
        let (vr, er) = gk15(&f, mid, pb);
        evaluations += 30;
        panels.push((pa, mid, vl, el));
        panels.push((mid, pb, vr, er));
    }
}

/// Outcome of integrating a positive, eventually decreasing integrand on [s, ∞).
#[derive(Debug, Clone, PartialEq)]
pub enum TailIntegral {
    Convergent {
        value: f64,
        /// Local power-law exponent used for the analytic tail, if one was fitted.
        tail_exponent: Option<f64>,
        panels: usize,
    },
    Divergent {
        tail_exponent: f64,
    },
}

/// Options for [`integrate_to_infinity`].
#[derive(Debug, Clone, Copy)]
pub struct TailOptions {
    pub rel_tol: f64,
    /// Known asymptotic exponent p of the integrand (g(τ) ~ τ^p); p ≥ -1
    /// short-circuits to divergence.
    pub exponent_hint: Option<f64>,
    pub max_panels: usize,
}

impl Default for TailOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-14, exponent_hint: None, max_panels: 4000 }
    }
}

/// ∫_s^∞ g(τ) dτ for positive g, s > 0.
///
/// Integrates geometric panels [a, 2a] with adaptive G–K. Once τ ≥ 1 the
/// local exponent p = log₂(g(2a)/g(a)) is monitored: when it is flat to 1e-8
/// over four doublings (a bit more than a decade) the remainder is taken
/// analytically as g(b)·b/(−p−1), or the integral is declared divergent
/// when p ≥ −1. Exponentially decaying integrands stop once a panel no
/// longer changes the running sum.
pub fn integrate_to_infinity<G: Fn(f64) -> f64>(g: G, s: f64, opts: TailOptions) -> TailIntegral {
    if let Some(p) = opts.exponent_hint {
        if p >= -1.0 {
            return TailIntegral::Divergent { tail_exponent: p };
        }
    }
    assert!(s > 0.0 && s.is_finite(), "lower limit must be positive and finite");
    let mut a = s;
    let mut total = 0.0;
    let mut exps: Vec<f64> = Vec::new();
    let mut ga = g(a);
    for panel in 0..opts.max_panels {
        let b = 2.0 * a;
        if !b.is_finite() {
            break;
        }
        let gb = g(b);
        let piece = integrate(&g, a, b, 0.0, opts.rel_tol).value;
        total += piece;
        let p = if ga > 0.0 && gb > 0.0 && ga.is_finite() && gb.is_finite() {
            (gb / ga).log2()
        } else {
            f64::NEG_INFINITY
        };
        if a >= 1.0 {
            exps.push(p);
        }
        // Underflow or exponential decay: the rest is invisible in the sum.
        if gb == 0.0 || (panel >= 2 && p < -1.0 && piece <= 1e-17 * total) {
            return TailIntegral::Convergent { value: total, tail_exponent: None, panels: panel + 1 };
        }
        if exps.len() >= 5 {
            let last = exps[exps.len() - 1];
            let back = exps[exps.len() - 5];
            if last.is_finite() && (last - back).abs() <= 1e-8 * last.abs().max(1.0) {
                if last < -1.0 - 1e-8 {
                    total += gb * b / (-last - 1.0);
                    return TailIntegral::Convergent {
                        value: total,
                        tail_exponent: Some(last),
                        panels: panel + 1,
                    };
                }
                return TailIntegral::Divergent { tail_exponent: last };
            }
        }
        a = b;
        ga = gb;
    }
    let last = exps.last().copied().unwrap_or(f64::NAN);
    if last < -1.0 {
        TailIntegral::Convergent { value: total, tail_exponent: Some(last), panels: opts.max_panels }
    } else {
        TailIntegral::Divergent { tail_exponent: last }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-14, 1e-14);
        assert!((r.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity() {
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-12, 1e-12);
        assert!((r.value - 2.0).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn power_tail_is_exact() {
        match integrate_to_infinity(|t: f64| t.powf(-1.25), 3.0, TailOptions::default()) {
            TailIntegral::Convergent { value, tail_exponent, .. } => {
                let exact = 4.0 * 3f64.powf(-0.25);
                assert!((value - exact).abs() < 1e-12 * exact, "{value} vs {exact}");
                assert!((tail_exponent.unwrap() + 1.25).abs() < 1e-10);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn exponential_tail() {
        match integrate_to_infinity(|t: f64| (-t).exp(), 0.5, TailOptions::default()) {
            TailIntegral::Convergent { value, .. } => {
                assert!((value - (-0.5f64).exp()).abs() < 1e-14);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn harmonic_tail_diverges() {
        match integrate_to_infinity(|t: f64| 1.0 / t, 1.0, TailOptions::default()) {
            TailIntegral::Divergent { tail_exponent } => assert!((tail_exponent + 1.0).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
        let hinted = TailOptions { exponent_hint: Some(-0.5), ..Default::default() };
        assert!(matches!(integrate_to_infinity(|t: f64| t.powf(-0.5), 1.0, hinted), TailIntegral::Divergent { .. }));
    }

    #[test]
    fn small_lower_limit_with_integrable_singularity() {
        // ∫_s^∞ (e^{2τ}-1)^{-1/2} dτ = arcsin(e^{-s}).
        let s = 1e-9;
        match integrate_to_infinity(|t: f64| 1.0 / (2.0 * t).exp_m1().sqrt(), s, TailOptions::default()) {
            TailIntegral::Convergent { value, .. } => {
                let exact = (-s).exp().asin();
                assert!((value - exact).abs() < 1e-10 * exact, "{value} vs {exact}");
            }
            other => panic!("{other:?}"),
        }
    }
}
