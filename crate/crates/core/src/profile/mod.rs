//! Keller–Osserman profile machinery.
//!
//! For a nonlinearity f and order k this builds
//!
//! * F(τ) = ∫₀^τ f, H = ((k+1)F)^{1/(k+1)},
//! * Φ(s) = ∫_s^∞ dτ/H(τ) and its inverse φ,
//! * Ψ(s) = ∫_s^∞ f^{-1/k} and its inverse ψ,
//!
//! plus the limit constants C_f = lim H′Φ (s → ∞) and
//! C_m = lim (M/m)′ (t → 0⁺) and the asymptotic amplitudes ξ̲, ξ̄.

mod limits;
pub mod spec;
mod tail;

use std::sync::Arc;

use serde::Serialize;

pub use limits::aitken_limit;
pub use spec::{CustomNonlinearity, NonlinearitySpec, ScalarFn, WeightKind, WeightSpec};

use crate::error::{param, Error, Result};
use tail::TailInverse;

/// Weight-independent profile: F, H, Φ, φ for a given (f, k).
#[derive(Clone)]
pub struct Profile {
    k: usize,
    f: NonlinearitySpec,
    phi_tail: TailInverse,
}

impl std::fmt::Debug for Profile {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("Profile")
            .field("k", &self.k)
            .field("f", &self.f)
            .field("phi_sup", &self.phi_tail.sup())
            .finish()
    }
}

fn ln_h(f: &NonlinearitySpec, k: usize, s: f64) -> f64 {
    (((k + 1) as f64).ln() + f.ln_big_f(s)) / (k + 1) as f64
}

/// Builds F, H, Φ and φ; fails with `KellerOssermanViolation` when Φ diverges.
pub fn build_profile(f: &NonlinearitySpec, k: usize) -> Result<Profile> {
    if k == 0 {
        return param("order k must be >= 1");
    }
    let hint = f.tail_exponent().map(|p| -(p + 1.0) / (k + 1) as f64);
    let fc = f.clone();
    let integrand: ScalarFn = Arc::new(move |s: f64| (-ln_h(&fc, k, s)).exp());
    let phi_tail = TailInverse::build(integrand, hint)?;
    Ok(Profile { k, f: f.clone(), phi_tail })
}

impl Profile {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn nonlinearity(&self) -> &NonlinearitySpec {
        &self.f
    }

    pub fn big_f(&self, s: f64) -> f64 {
        self.f.big_f(s)
    }

    pub fn h(&self, s: f64) -> f64 {
        ln_h(&self.f, self.k, s).exp()
    }

    /// H′(s) = f(s)·((k+1)F(s))^{-k/(k+1)}.
    pub fn h_prime(&self, s: f64) -> f64 {
        (self.f.ln_f(s) - self.k as f64 * ln_h(&self.f, self.k, s)).exp()
    }

    /// Φ(s).
    pub fn big_phi(&self, s: f64) -> f64 {
        self.phi_tail.value(s)
    }

    /// Φ(0⁺): supremum of φ's domain (infinite for power laws with γ ≥ k).
    pub fn phi_domain_sup(&self) -> f64 {
        self.phi_tail.sup()
    }

    /// Fitted power of 1/H at infinity, when the tail was closed analytically.
    pub fn tail_exponent(&self) -> Option<f64> {
        self.phi_tail.tail_exponent()
    }

    /// φ(t) = Φ⁻¹(t).
    pub fn phi(&self, t: f64) -> Result<f64> {
        self.phi_tail.inverse(t)
    }

    /// Table interpolant of φ, without the bisection polish.
    pub fn phi_cached(&self, t: f64) -> Option<f64> {
        self.phi_tail.inverse_cached(t)
    }

    /// φ′ in terms of the value φ(t) = s: −H(s).
    pub fn phi_prime_at_value(&self, s: f64) -> f64 {
        -self.h(s)
    }

    /// φ″ in terms of the value φ(t) = s: H(s)^{1−k}·f(s).
    pub fn phi_second_at_value(&self, s: f64) -> f64 {
        ((1.0 - self.k as f64) * ln_h(&self.f, self.k, s) + self.f.ln_f(s)).exp()
    }

    pub fn phi_prime(&self, t: f64) -> Result<f64> {
        Ok(self.phi_prime_at_value(self.phi(t)?))
    }

    pub fn phi_second(&self, t: f64) -> Result<f64> {
        Ok(self.phi_second_at_value(self.phi(t)?))
    }

    /// ((k+1)F(s))^{k/(k+1)} / f(s) = H^k/f, the ratio −φ′/φ″ at φ = s.
    pub fn hk_over_f(&self, s: f64) -> f64 {
        (self.k as f64 * ln_h(&self.f, self.k, s) - self.f.ln_f(s)).exp()
    }
}

/// C_f = lim_{s→∞} H′(s)Φ(s), by Aitken extrapolation along s = 2^i.
pub fn compute_cf(p: &Profile) -> Result<f64> {
    aitken_limit("C_f", |i| {
        let s = 2f64.powi(i as i32);
        let phi = p.big_phi(s);
        let v = p.h_prime(s) * phi;
        (phi > 0.0 && v.is_finite()).then_some(v)
    })
}

/// Ψ(s) = ∫_s^∞ f^{-1/k} and its inverse ψ.
#[derive(Clone)]
pub struct PsiProfile {
    k: usize,
    f: NonlinearitySpec,
    tail: TailInverse,
}

impl std::fmt::Debug for PsiProfile {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("PsiProfile").field("k", &self.k).field("f", &self.f).finish()
    }
}

/// Builds Ψ and ψ, checking ψ′(t) = −f(ψ(t))^{1/k} at five sample points.
pub fn build_psi(f: &NonlinearitySpec, k: usize) -> Result<PsiProfile> {
    if k == 0 {
        return param("order k must be >= 1");
    }
    let hint = f.tail_exponent().map(|p| -p / k as f64);
    let fc = f.clone();
    let integrand: ScalarFn = Arc::new(move |s: f64| (-fc.ln_f(s) / k as f64).exp());
    let tail = TailInverse::build(integrand, hint)?;
    let psi = PsiProfile { k, f: f.clone(), tail };
    let sup = psi.tail.sup();
    let anchor = if sup.is_finite() { 0.5 * sup } else { 1.0 };
    for frac in [0.05, 0.2, 0.5, 1.0, 1.6] {
        let t = anchor * frac;
        let h = 1e-4 * t;
        let fd = (psi.psi(t + h)? - psi.psi(t - h)?) / (2.0 * h);
        let exact = psi.psi_prime_at_value(psi.psi(t)?);
        if (fd - exact).abs() > 1e-6 * exact.abs() {
            return Err(Error::Parameter(format!(
                "psi derivative check failed at t = {t:e}: {fd:e} vs {exact:e}"
            )));
        }
    }
    Ok(psi)
}

impl PsiProfile {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn big_psi(&self, s: f64) -> f64 {
        self.tail.value(s)
    }

    pub fn psi(&self, t: f64) -> Result<f64> {
        self.tail.inverse(t)
    }

    /// Ψ(0⁺), the supremum of ψ's domain.
    pub fn domain_sup(&self) -> f64 {
        self.tail.sup()
    }

    /// ψ′ at ψ = s: −f(s)^{1/k}.
    pub fn psi_prime_at_value(&self, s: f64) -> f64 {
        -(self.f.ln_f(s) / self.k as f64).exp()
    }

    /// ψ″ at ψ = s: f(s)^{(2−k)/k} f′(s) / k.
    pub fn psi_second_at_value(&self, s: f64) -> f64 {
        let k = self.k as f64;
        ((2.0 - k) / k * self.f.ln_f(s)).exp() * self.f.f_prime(s) / k
    }
}

/// C_m = lim_{t→0⁺} (M/m)′(t), from central differences along t₀·2^{-i}.
pub fn build_weight(w: &WeightSpec) -> Result<f64> {
    let t0 = 0.5 * w.delta0;
    let ratio = |t: f64| w.big_m(t) / w.m(t);
    aitken_limit("C_m", |i| {
        let t = t0 * 0.5f64.powi(i as i32);
        let h = 1e-4 * t;
        let v = (ratio(t + h) - ratio(t - h)) / (2.0 * h);
        (t > 1e-280).then_some(v)
    })
}

/// 1 − C_f^{-1}(1 − C_m), the factor shared by ξ̲, ξ̄ and the barrier limits.
pub fn structure_factor(c_f: f64, c_m: f64) -> f64 {
    1.0 - (1.0 - c_m) / c_f
}

/// Asymptotic amplitudes (ξ̲, ξ̄).
pub fn xi_bounds(w: &WeightSpec, l0_max: f64, l0_min: f64, c_f: f64, c_m: f64, k: usize) -> Result<(f64, f64)> {
    if !(c_f > 1.0 - c_m) {
        return Err(Error::ConditionViolation {
            label: "(1.5)",
            detail: format!("need C_f > 1 - C_m, got C_f = {c_f}, C_m = {c_m}"),
        });
    }
    if !(l0_min > 0.0) || !(l0_min <= l0_max) {
        return param(format!("need 0 < l0 <= L0, got l0 = {l0_min}, L0 = {l0_max}"));
    }
    let s = structure_factor(c_f, c_m);
    let e = 1.0 / (k + 1) as f64;
    Ok(((w.b_lower / (l0_max * s)).powf(e), (w.b_upper / (l0_min * s)).powf(e)))
}

/// Probe values of F^{k/(k+1)}/f along s = 2^i, i = 5..30.
#[derive(Debug, Clone, Serialize)]
pub struct LimitDiagnostic {
    pub probes: Vec<(f64, f64)>,
    pub sup: f64,
}

impl LimitDiagnostic {
    pub fn last(&self) -> f64 {
        self.probes.last().map_or(f64::NAN, |p| p.1)
    }
}

pub fn check_limit_ff(f: &NonlinearitySpec, k: usize) -> LimitDiagnostic {
    let kk = k as f64;
    let probes: Vec<(f64, f64)> = (5..=30)
        .map(|i| {
            let s = 2f64.powi(i);
            (s, (kk / (kk + 1.0) * f.ln_big_f(s) - f.ln_f(s)).exp())
        })
        .collect();
    let sup = probes.iter().fold(0.0f64, |m, p| m.max(p.1));
    LimitDiagnostic { probes, sup }
}

/// The two explicit families of boundary-blowup asymptotics for f = s^γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RemarkCase {
    /// b ≡ 1, m ≡ 1.
    UnitWeight,
    /// b = d^{α(k+1)}, m = t^α.
    DistanceWeight { alpha: f64 },
}

/// u ~ coeff·d^exponent, with the lower coefficient from l₀ and the upper from L₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedForm {
    pub exponent: f64,
    pub coeff_lower: f64,
    pub coeff_upper: f64,
}

pub fn remark_case_closed_forms(case: RemarkCase, k: usize, gamma: f64, l0_max: f64, l0_min: f64) -> Result<ClosedForm> {
    let kf = k as f64;
    if k == 0 || !(gamma > kf) {
        return param(format!("need gamma > k >= 1, got gamma = {gamma}, k = {k}"));
    }
    if !(l0_min > 0.0) || !(l0_min <= l0_max) {
        return param(format!("need 0 < l0 <= L0, got l0 = {l0_min}, L0 = {l0_max}"));
    }
    let gk = gamma - kf;
    let (exponent, core) = match case {
        RemarkCase::UnitWeight => (-(kf + 1.0) / gk, (kf + 1.0).powf(kf) * (gamma + 1.0) / gk.powf(kf + 1.0)),
        RemarkCase::DistanceWeight { alpha } => {
            if !(alpha > 0.0) {
                return param(format!("distance weight needs alpha > 0, got {alpha}"));
            }
            (
                -(kf + 1.0) * (alpha + 1.0) / gk,
                (gamma + alpha * kf + alpha + 1.0) * (kf + 1.0).powf(kf) * (alpha + 1.0).powf(kf)
                    / gk.powf(kf + 1.0),
            )
        }
    };
    Ok(ClosedForm {
        exponent,
        coeff_lower: (l0_min * core).powf(1.0 / gk),
        coeff_upper: (l0_max * core).powf(1.0 / gk),
    })
}

/// Profile and weight together, with the limit constants and feasibility flags.
#[derive(Clone, Debug)]
pub struct ProfileFns {
    pub k: usize,
    pub profile: Profile,
    pub weight: WeightSpec,
    pub c_f: f64,
    pub c_m: f64,
    /// Φ finite (always true for a constructed value; construction fails otherwise).
    pub ko_ok: bool,
    /// C_f > 1 − C_m.
    pub condition15_ok: bool,
}

impl ProfileFns {
    pub fn new(f: &NonlinearitySpec, k: usize, weight: WeightSpec) -> Result<Self> {
        let profile = build_profile(f, k)?;
        Self::from_profile(profile, weight)
    }

    pub fn from_profile(profile: Profile, weight: WeightSpec) -> Result<Self> {
        let c_f = compute_cf(&profile)?;
        let c_m = build_weight(&weight)?;
        Ok(Self {
            k: profile.k,
            profile,
            weight,
            c_f,
            c_m,
            ko_ok: true,
            condition15_ok: c_f > 1.0 - c_m,
        })
    }

    pub fn big_m(&self, t: f64) -> f64 {
        self.weight.big_m(t)
    }

    pub fn phi(&self, t: f64) -> Result<f64> {
        self.profile.phi(t)
    }

    pub fn xi_bounds(&self, l0_max: f64, l0_min: f64) -> Result<(f64, f64)> {
        xi_bounds(&self.weight, l0_max, l0_min, self.c_f, self.c_m, self.k)
    }

    /// φ(ξ·M(d)) for 0 < d < δ₀.
    pub fn predicted_profile(&self, xi: f64, d: f64) -> Result<f64> {
        if !(d > 0.0 && d < self.weight.delta0) {
            return param(format!("distance {d} outside the weight window (0, {})", self.weight.delta0));
        }
        self.profile.phi(xi * self.weight.big_m(d))
    }
}

/// One row of an exported profile table; `t` doubles as the distance fed to M.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProfileRow {
    pub t: f64,
    pub phi: f64,
    pub phi_prime: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
    pub predicted: f64,
}

/// Rows at `per_decade` points per decade over [t_min, t_max], always including t = 1 when in range.
pub fn profile_table(p: &ProfileFns, xi: f64, t_min: f64, t_max: f64, per_decade: usize) -> Result<Vec<ProfileRow>> {
    if !(t_min > 0.0 && t_max > t_min) || per_decade == 0 {
        return param("profile table needs 0 < t_min < t_max and per_decade >= 1");
    }
    let lo = (t_min.log10() * per_decade as f64).ceil() as i64;
    let hi = (t_max.log10() * per_decade as f64).floor() as i64;
    let mut rows = Vec::new();
    for e in lo..=hi {
        let t = 10f64.powf(e as f64 / per_decade as f64);
        if t >= p.profile.phi_domain_sup() {
            break;
        }
        let phi = p.profile.phi(t)?;
        let big_m = p.big_m(t);
        let predicted = if t < p.weight.delta0 && xi * big_m < p.profile.phi_domain_sup() {
            p.profile.phi(xi * big_m)?
        } else {
            f64::NAN
        };
        rows.push(ProfileRow { t, phi, phi_prime: p.profile.phi_prime_at_value(phi), big_m, predicted });
    }
    Ok(rows)
}
