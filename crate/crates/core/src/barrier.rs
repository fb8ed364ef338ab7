//! Explicit barriers φ(ξ M(d ∓ σ)) near ∂Ω and φ(−εw) in the ball, with
//! sample-based certification of admissibility and of the differential
//! inequalities they are built to satisfy.
//!
//! Everything is expressed through the eigenvalues of D²(g∘d) in principal
//! coordinates: tangential −g′ρ_i/(1 − dρ_i) and normal g″.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::fd::ellipse_curvature;
use crate::hessian::{binomial, elementary_symmetric_upto, radial_eigenvalues, EigenSpectrum};
use crate::profile::{check_limit_ff, structure_factor, LimitDiagnostic, ProfileFns};
use crate::radial::WSolution;

/// Relative round-off allowance on margins.
pub const MARGIN_TOL: f64 = 1e-9;

/// Boundary shapes with a closed-form principal curvature provider.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CurvatureModel {
    /// ρ_i = 1/R for all n − 1 directions.
    Ball { radius: f64 },
    /// n = 2; κ(t) = ab/(a² sin²t + b² cos²t)^{3/2}.
    Ellipse { a: f64, b: f64 },
}

/// Collar geometry: dimension, curvatures and the extremes of σ_{k−1}(ρ) over ∂Ω.
#[derive(Debug, Clone, Serialize)]
pub struct CollarGeometry {
    pub n: usize,
    pub k: usize,
    pub model: CurvatureModel,
    /// L₀ = max σ_{k−1}(ρ).
    pub l0_max: f64,
    /// l₀ = min σ_{k−1}(ρ).
    pub l0_min: f64,
}

impl CollarGeometry {
    pub fn ball(n: usize, k: usize, radius: f64) -> Result<Self> {
        if n < 2 || k == 0 || k > n {
            return param(format!("need n >= 2 and 1 <= k <= n, got n = {n}, k = {k}"));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return param(format!("radius must be positive, got {radius}"));
        }
        let s = binomial(n - 1, k - 1) * radius.powi(1 - k as i32);
        Ok(Self { n, k, model: CurvatureModel::Ball { radius }, l0_max: s, l0_min: s })
    }

    /// Planar ellipse with semi-axes a ≥ b > 0; k ∈ {1, 2}.
    pub fn ellipse(k: usize, a: f64, b: f64) -> Result<Self> {
        if !(b > 0.0 && a >= b) || !a.is_finite() {
            return param(format!("ellipse needs a >= b > 0, got a = {a}, b = {b}"));
        }
        let (lo, hi) = match k {
            1 => (1.0, 1.0),
            2 => (b / (a * a), a / (b * b)),
            _ => return param(format!("a planar domain needs k <= 2, got {k}")),
        };
        Ok(Self { n: 2, k, model: CurvatureModel::Ellipse { a, b }, l0_max: hi, l0_min: lo })
    }

    /// Principal curvatures at boundary parameter θ ∈ [0, 1).
    pub fn curvatures(&self, theta: f64) -> Vec<f64> {
        match self.model {
            CurvatureModel::Ball { radius } => vec![1.0 / radius; self.n - 1],
            CurvatureModel::Ellipse { a, b } => vec![ellipse_curvature(a, b, std::f64::consts::TAU * theta)],
        }
    }

    pub fn max_curvature(&self) -> f64 {
        match self.model {
            CurvatureModel::Ball { radius } => 1.0 / radius,
            CurvatureModel::Ellipse { a, b } => a / (b * b),
        }
    }

    pub fn focal_radius(&self) -> f64 {
        1.0 / self.max_curvature()
    }

    /// ρ_i/(1 − dρ_i) at distance d from the boundary point with parameter θ.
    pub fn shifted_curvatures(&self, d: f64, theta: f64) -> Result<Vec<f64>> {
        self.curvatures(theta)
            .into_iter()
            .map(|rho| {
                let q = 1.0 - d * rho;
                if q > 0.0 {
                    Ok(rho / q)
                } else {
                    Err(Error::Geometry(format!("d = {d} is past the focal radius 1/{rho}")))
                }
            })
            .collect()
    }

    pub fn with_scaled_curvature(&self, factor: f64) -> Result<Self> {
        match self.model {
            CurvatureModel::Ball { radius } => Self::ball(self.n, self.k, radius / factor),
            CurvatureModel::Ellipse { a, b } => Self::ellipse(self.k, a / factor, b / factor),
        }
    }
}

/// Eigenvalues of D²(g∘d): g″ first, then −g′ρ_i/(1 − dρ_i).
pub fn composite_eigs(g1: f64, g2: f64, d: f64, rho: &[f64]) -> Result<EigenSpectrum> {
    let mut values = Vec::with_capacity(rho.len() + 1);
    values.push(g2);
    for &r in rho {
        let q = 1.0 - d * r;
        if !(q > 0.0) {
            return Err(Error::Geometry(format!("1 - d·rho = {q} <= 0 at d = {d}, rho = {r}")));
        }
        values.push(-g1 * r / q);
    }
    EigenSpectrum::new(values)
}

/// ε, the shift σ, the collar half-width δ_ε and the two perturbed amplitudes.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BarrierParams {
    pub eps: f64,
    pub sigma_shift: f64,
    pub delta_eps: f64,
    /// ((b̲ − 2ε)/((1 + ε)L₀ S))^{1/(k+1)} with S = 1 − (1 − C_m)/C_f.
    pub xi_eps_lower: f64,
    /// ((b̄ + 2ε)/((1 − ε)l₀ S))^{1/(k+1)}.
    pub xi_eps_upper: f64,
}

impl BarrierParams {
    pub fn new(p: &ProfileFns, geom: &CollarGeometry, eps: f64, sigma_shift: f64, delta_eps: f64) -> Result<Self> {
        let (lo, hi) = xi_eps(p, geom, eps)?;
        if !(delta_eps > 0.0) || !(sigma_shift > 0.0 && sigma_shift < delta_eps) {
            return param(format!("need 0 < sigma < delta, got sigma = {sigma_shift}, delta = {delta_eps}"));
        }
        if 2.0 * delta_eps >= geom.focal_radius() {
            return param(format!("collar 2·delta = {} reaches the focal radius {}", 2.0 * delta_eps, geom.focal_radius()));
        }
        if 2.0 * delta_eps > p.weight.delta0 {
            return param(format!("collar 2·delta = {} exceeds the weight window {}", 2.0 * delta_eps, p.weight.delta0));
        }
        Ok(Self { eps, sigma_shift, delta_eps, xi_eps_lower: lo, xi_eps_upper: hi })
    }

    /// Collar where the supersolution is checked: (σ, 2δ).
    pub fn upper_window(&self) -> (f64, f64) {
        (self.sigma_shift, 2.0 * self.delta_eps)
    }

    /// Collar where the subsolution is checked: (0, 2δ − σ).
    pub fn lower_window(&self) -> (f64, f64) {
        (0.0, 2.0 * self.delta_eps - self.sigma_shift)
    }
}

/// (ξ̲_ε, ξ̄_ε) for 0 < ε < min(b̲/2, 1).
pub fn xi_eps(p: &ProfileFns, geom: &CollarGeometry, eps: f64) -> Result<(f64, f64)> {
    if p.k != geom.k {
        return param(format!("profile has k = {} but geometry has k = {}", p.k, geom.k));
    }
    let w = &p.weight;
    if !(eps > 0.0 && eps < 0.5 * w.b_lower && eps < 1.0) {
        return param(format!("need 0 < eps < min(b_lower/2, 1), got eps = {eps}, b_lower = {}", w.b_lower));
    }
    if !p.condition15_ok {
        return Err(Error::ConditionViolation {
            label: "(1.5)",
            detail: format!("need C_f > 1 - C_m, got C_f = {}, C_m = {}", p.c_f, p.c_m),
        });
    }
    let s = structure_factor(p.c_f, p.c_m);
    let e = 1.0 / (p.k + 1) as f64;
    let lo = ((w.b_lower - 2.0 * eps) / ((1.0 + eps) * geom.l0_max * s)).powf(e);
    let hi = ((w.b_upper + 2.0 * eps) / ((1.0 - eps) * geom.l0_min * s)).powf(e);
    Ok((lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BarrierKind {
    /// φ(ξ̲_ε M(d − σ)).
    Upper,
    /// φ(ξ̄_ε M(d + σ)).
    Lower,
}

/// Value, d-derivatives and the expansion intermediates of a barrier at one distance.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BarrierPoint {
    pub d: f64,
    pub u: f64,
    pub g1: f64,
    pub g2: f64,
    /// (M m′/m²)·H^k/(ξ M f) at d ∓ σ: tends to (1 − C_m)/C_f at the boundary.
    pub a1: f64,
    /// H^k/(ξ m f): tends to 0 at the boundary.
    pub a2: f64,
    pub m: f64,
    pub f_u: f64,
    /// H(u) = ((k+1)F(u))^{1/(k+1)}.
    pub h: f64,
}

/// One of the two barriers; borrows the profile it was built from.
#[derive(Debug, Clone, Copy)]
pub struct Barrier<'a> {
    pub kind: BarrierKind,
    pub p: &'a ProfileFns,
    pub params: BarrierParams,
}

pub fn build_barriers<'a>(p: &'a ProfileFns, geom: &CollarGeometry, bp: &BarrierParams) -> Result<(Barrier<'a>, Barrier<'a>)> {
    if p.k != geom.k {
        return param(format!("profile has k = {} but geometry has k = {}", p.k, geom.k));
    }
    Ok((Barrier { kind: BarrierKind::Upper, p, params: *bp }, Barrier { kind: BarrierKind::Lower, p, params: *bp }))
}

impl Barrier<'_> {
    pub fn xi(&self) -> f64 {
        match self.kind {
            BarrierKind::Upper => self.params.xi_eps_lower,
            BarrierKind::Lower => self.params.xi_eps_upper,
        }
    }

    pub fn window(&self) -> (f64, f64) {
        match self.kind {
            BarrierKind::Upper => self.params.upper_window(),
            BarrierKind::Lower => self.params.lower_window(),
        }
    }

    fn shifted(&self, d: f64) -> f64 {
        match self.kind {
            BarrierKind::Upper => d - self.params.sigma_shift,
            BarrierKind::Lower => d + self.params.sigma_shift,
        }
    }

    pub fn eval(&self, d: f64) -> Result<BarrierPoint> {
        let (lo, hi) = self.window();
        if !(d > lo && d < hi) {
            return param(format!("d = {d} outside the barrier window ({lo}, {hi})"));
        }
        let w = &self.p.weight;
        let prof = &self.p.profile;
        let xi = self.xi();
        let ds = self.shifted(d);
        let (m, mp) = (w.m(ds), w.m_prime(ds));
        let u = prof.phi(xi * w.big_m(ds))?;
        let h = prof.h(u);
        let f_u = prof.nonlinearity().f(u);
        let phi1 = -h;
        let phi2 = prof.phi_second_at_value(u);
        let hk_f = prof.hk_over_f(u);
        Ok(BarrierPoint {
            d,
            u,
            g1: xi * m * phi1,
            g2: xi * xi * m * m * phi2 + xi * mp * phi1,
            a1: mp * hk_f / (xi * m * m),
            a2: hk_f / (xi * m),
            m,
            f_u,
            h,
        })
    }
}

/// A collar sample: distance and boundary parameter θ ∈ [0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollarSample {
    pub d: f64,
    pub theta: f64,
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    out
}

/// Randomly shifted Halton points (bases 2, 3) in [0, 1)².
pub fn halton_points(count: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (s1, s2): (f64, f64) = (rng.random(), rng.random());
    (1..=count as u64)
        .map(|i| ((radical_inverse(i, 2) + s1).fract(), (radical_inverse(i, 3) + s2).fract()))
        .collect()
}

/// Quasi-random samples in the open window (lo, hi), log-uniform in d − lo
/// over six decades so the blow-up edge is resolved.
pub fn collar_samples(window: (f64, f64), count: usize, seed: u64) -> Result<Vec<CollarSample>> {
    let (lo, hi) = window;
    if !(hi > lo && lo >= 0.0) || count == 0 {
        return param(format!("bad collar window ({lo}, {hi}) or empty sample set"));
    }
    Ok(halton_points(count, seed)
        .into_iter()
        .map(|(q, theta)| CollarSample { d: lo + (hi - lo) * 10f64.powf(-6.0 * q) * (1.0 - 1e-12), theta })
        .collect())
}

/// Per-sample record of a barrier check.
#[derive(Debug, Clone, Serialize)]
pub struct MarginSample {
    pub d: f64,
    pub theta: f64,
    pub u: f64,
    /// σ_1..σ_k of the Hessian spectrum.
    pub sigma: Vec<f64>,
    pub rhs: f64,
    /// b f(u) − σ_k (upper) or σ_k − b f(u) (lower), divided by b f(u).
    pub margin: f64,
    pub a1: f64,
    pub a2: f64,
    /// ξ^{j+1} m^{j+1} f H^{j−k}, j = 1..k.
    pub prefactor: Vec<f64>,
    /// (1 − a1)σ_{j−1}(κ) + a2 σ_j(κ), j = 1..k.
    pub bracket: Vec<f64>,
    /// σ_{k−1}(κ) and σ_k(κ) with κ_i = ρ_i/(1 − dρ_i).
    pub sigma_km1_kappa: f64,
    pub sigma_k_kappa: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MarginReport {
    pub kind: BarrierKind,
    pub params: BarrierParams,
    pub passed: bool,
    pub admissible: bool,
    /// Smallest relative margin.
    pub worst_margin: f64,
    /// max_j |σ_j/prefactor_j − bracket_j| / max(1, |bracket_j|).
    pub bracket_mismatch: f64,
    /// (a₄): σ_j(κ) > 0 for j < k at every sample.
    pub a4_ok: bool,
    /// (a₅): (1 − ε)l₀ ≤ σ_{k−1}(κ) ≤ (1 + ε)L₀ at every sample.
    pub a5_ok: bool,
    /// Observed supremum of σ_k(κ) (the bound in (a₆) is not quantified).
    pub sup_sigma_k_kappa: f64,
    pub samples: Vec<MarginSample>,
}

impl MarginReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// b(d, θ) on the collar.
pub type CollarWeight<'a> = &'a dyn Fn(f64, f64) -> f64;

/// b = b̲·m(d)^{k+1}, the normal form of the weight.
pub fn normal_form_weight(p: &ProfileFns) -> impl Fn(f64, f64) -> f64 + '_ {
    move |d, _| p.weight.b_of_distance(d, p.k)
}

fn verify(barrier: &Barrier, geom: &CollarGeometry, b: CollarWeight, samples: &[CollarSample]) -> Result<MarginReport> {
    let k = barrier.p.k;
    if k != geom.k {
        return param(format!("profile has k = {k} but geometry has k = {}", geom.k));
    }
    let xi = barrier.xi();
    let eps = barrier.params.eps;
    let mut out = Vec::with_capacity(samples.len());
    let (mut admissible, mut a4_ok, mut a5_ok) = (true, true, true);
    let (mut worst, mut mismatch, mut sup6) = (f64::INFINITY, 0.0f64, f64::NEG_INFINITY);
    for s in samples {
        let pt = barrier.eval(s.d)?;
        let rho = geom.curvatures(s.theta);
        let kappa = geom.shifted_curvatures(s.d, s.theta)?;
        let lam = composite_eigs(pt.g1, pt.g2, s.d, &rho)?;
        let sig = elementary_symmetric_upto(lam.values(), k);
        let sk_kappa = elementary_symmetric_upto(&kappa, k);
        let rhs = b(s.d, s.theta) * pt.f_u;
        let margin = match barrier.kind {
            BarrierKind::Upper => (rhs - sig[k]) / rhs,
            BarrierKind::Lower => (sig[k] - rhs) / rhs,
        };
        let mut prefactor = Vec::with_capacity(k);
        let mut bracket = Vec::with_capacity(k);
        for j in 1..=k {
            let pj = (xi * pt.m).powi(j as i32 + 1) * pt.f_u * pt.h.powi(j as i32 - k as i32);
            let bj = (1.0 - pt.a1) * sk_kappa[j - 1] + pt.a2 * sk_kappa[j];
            mismatch = mismatch.max((sig[j] / pj - bj).abs() / bj.abs().max(1.0));
            prefactor.push(pj);
            bracket.push(bj);
            admissible &= sig[j] > 0.0;
        }
        a4_ok &= sk_kappa[1..k].iter().all(|v| *v > 0.0);
        let s_km1 = sk_kappa[k - 1];
        a5_ok &= (1.0 - eps) * geom.l0_min <= s_km1 && s_km1 <= (1.0 + eps) * geom.l0_max;
        sup6 = sup6.max(sk_kappa[k]);
        worst = worst.min(margin);
        out.push(MarginSample {
            d: s.d,
            theta: s.theta,
            u: pt.u,
            sigma: sig[1..].to_vec(),
            rhs,
            margin,
            a1: pt.a1,
            a2: pt.a2,
            prefactor,
            bracket,
            sigma_km1_kappa: s_km1,
            sigma_k_kappa: sk_kappa[k],
        });
    }
    if worst.is_nan() {
        worst = f64::NEG_INFINITY;
    }
    Ok(MarginReport {
        kind: barrier.kind,
        params: barrier.params,
        passed: admissible && worst >= -MARGIN_TOL,
        admissible,
        worst_margin: worst,
        bracket_mismatch: mismatch,
        a4_ok,
        a5_ok,
        sup_sigma_k_kappa: sup6,
        samples: out,
    })
}

/// Checks S_j(D²ū) > 0 (j ≤ k) and S_k(D²ū) ≤ b f(ū) at every sample.
pub fn verify_supersolution(
    upper: &Barrier,
    geom: &CollarGeometry,
    b: CollarWeight,
    samples: &[CollarSample],
) -> Result<MarginReport> {
    if upper.kind != BarrierKind::Upper {
        return param("verify_supersolution needs the upper barrier");
    }
    verify(upper, geom, b, samples)
}

/// Checks S_j(D²u̲) > 0 (j ≤ k) and S_k(D²u̲) ≥ b f(u̲) at every sample.
pub fn verify_subsolution(
    lower: &Barrier,
    geom: &CollarGeometry,
    b: CollarWeight,
    samples: &[CollarSample],
) -> Result<MarginReport> {
    if lower.kind != BarrierKind::Lower {
        return param("verify_subsolution needs the lower barrier");
    }
    verify(lower, geom, b, samples)
}

#[derive(Debug, Clone, Copy)]
pub struct CertifyOptions {
    pub samples: usize,
    pub seed: u64,
    /// σ = sigma_fraction·δ.
    pub sigma_fraction: f64,
    /// First δ as a fraction of the focal radius.
    pub initial_fraction: f64,
    pub max_halvings: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self { samples: 200, seed: 0x5eed, sigma_fraction: 0.25, initial_fraction: 0.2, max_halvings: 30 }
    }
}

/// Outcome of the δ_ε search.
#[derive(Debug, Clone, Serialize)]
pub struct Certification {
    pub eps: f64,
    pub delta_eps: f64,
    /// (δ tried, supersolution passed, subsolution passed).
    pub attempts: Vec<(f64, bool, bool)>,
    pub upper: MarginReport,
    pub lower: MarginReport,
}

/// Halves δ from `initial_fraction`·(focal radius) until both barriers
/// certify on their collars.
pub fn certify_barriers(
    p: &ProfileFns,
    geom: &CollarGeometry,
    eps: f64,
    b: CollarWeight,
    opts: &CertifyOptions,
) -> Result<Certification> {
    let mut delta = (opts.initial_fraction * geom.focal_radius()).min(0.499 * p.weight.delta0);
    let mut attempts = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..=opts.max_halvings {
        let bp = BarrierParams::new(p, geom, eps, opts.sigma_fraction * delta, delta)?;
        let (upper, lower) = build_barriers(p, geom, &bp)?;
        let up = verify_supersolution(&upper, geom, b, &collar_samples(bp.upper_window(), opts.samples, opts.seed)?)?;
        let lo = verify_subsolution(&lower, geom, b, &collar_samples(bp.lower_window(), opts.samples, opts.seed)?)?;
        attempts.push((delta, up.passed, lo.passed));
        if up.passed && lo.passed {
            return Ok(Certification { eps, delta_eps: delta, attempts, upper: up, lower: lo });
        }
        worst = up.worst_margin.min(lo.worst_margin).max(worst.min(0.0));
        delta *= 0.5;
    }
    Err(Error::CertificationFailure { worst_margin: worst })
}

/// Result of one ε on the ladder for h̄ = φ(−εw).
#[derive(Debug, Clone, Serialize)]
pub struct Lemma23Attempt {
    pub eps: f64,
    pub passed: bool,
    pub admissible: bool,
    pub worst_margin: f64,
    /// Radius of the worst sample.
    pub worst_r: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma23Report {
    pub eps_found: f64,
    pub attempts: Vec<Lemma23Attempt>,
    /// F^{k/(k+1)}/f along s = 2^i; should tend to 0.
    pub limit: LimitDiagnostic,
}

/// ε ladder 2⁰, 2⁻¹, …, 2⁻ⁿ.
pub fn default_eps_ladder(levels: usize) -> Vec<f64> {
    (0..=levels).map(|i| 0.5f64.powi(i as i32)).collect()
}

/// Radii in (0, R): half uniform, half log-clustered toward R.
pub fn ball_samples(radius: f64, count: usize, seed: u64) -> Vec<f64> {
    halton_points(count, seed)
        .into_iter()
        .enumerate()
        .map(|(i, (q, v))| {
            let r = if i % 2 == 0 { v } else { 1.0 - 10f64.powf(-6.0 * q) };
            radius * r.clamp(1e-6, 1.0 - 1e-7)
        })
        .collect()
}

fn check_h_bar(p: &ProfileFns, w: &WSolution, eps: f64, radii: &[f64]) -> Result<Lemma23Attempt> {
    let prob = &w.prob;
    let (n, k) = (prob.n, prob.k);
    let prof = &p.profile;
    let mut worst = f64::INFINITY;
    let mut worst_r = f64::NAN;
    let mut admissible = true;
    for &r in radii {
        let (wv, w1, w2) = w.derivatives(r);
        let s = prof.phi(-eps * wv)?;
        let h = prof.h(s);
        let u1 = eps * w1 * h;
        let u2 = eps * eps * w1 * w1 * prof.phi_second_at_value(s) + eps * w2 * h;
        let lam = radial_eigenvalues(u1, u2, r, n)?;
        let sig = elementary_symmetric_upto(lam.values(), k);
        admissible &= sig[1..].iter().all(|v| *v > 0.0);
        let rhs = prob.b(r) * prof.nonlinearity().f(s);
        let margin = (rhs - sig[k]) / rhs;
        if !(margin >= worst) {
            worst = margin;
            worst_r = r;
        }
    }
    Ok(Lemma23Attempt { eps, passed: admissible && worst >= -MARGIN_TOL, admissible, worst_margin: worst, worst_r })
}

/// Walks the ladder (largest ε first) until h̄ = φ(−εw) satisfies
/// S_k(D²h̄) ≤ b f(h̄) at every sample radius.
pub fn verify_lemma23(p: &ProfileFns, w: &WSolution, eps_ladder: &[f64], samples: usize, seed: u64) -> Result<Lemma23Report> {
    if p.k != w.prob.k {
        return param(format!("profile has k = {} but w solves k = {}", p.k, w.prob.k));
    }
    if eps_ladder.is_empty() || eps_ladder.iter().any(|e| !(*e > 0.0)) {
        return param("eps ladder must be non-empty and positive");
    }
    let radii = ball_samples(w.prob.radius, samples, seed);
    let mut ladder = eps_ladder.to_vec();
    ladder.sort_by(|a, b| b.total_cmp(a));
    let mut attempts = Vec::new();
    for eps in ladder {
        let a = check_h_bar(p, w, eps, &radii)?;
        let passed = a.passed;
        attempts.push(a);
        if passed {
            return Ok(Lemma23Report {
                eps_found: eps,
                attempts,
                limit: check_limit_ff(p.profile.nonlinearity(), p.k),
            });
        }
    }
    let worst = attempts.iter().map(|a| a.worst_margin).fold(f64::NEG_INFINITY, f64::max);
    Err(Error::CertificationFailure { worst_margin: worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn composite_examples() {
        let e = composite_eigs(-1.0, 2.0, 0.1, &[1.0, 1.0]).unwrap();
        assert_relative_eq!(e.values()[0], 2.0);
        assert_relative_eq!(e.values()[1], 1.0 / 0.9, max_relative = 1e-15);
        assert_relative_eq!(e.values()[2], 1.0 / 0.9, max_relative = 1e-15);
        assert_eq!(composite_eigs(1.0, 3.0, 0.5, &[0.0, 0.0]).unwrap().values(), &[3.0, 0.0, 0.0]);
        assert_eq!(composite_eigs(1.0, 0.0, 0.0, &[1.0, 1.0]).unwrap().values(), &[0.0, -1.0, -1.0]);
        assert!(matches!(composite_eigs(1.0, 0.0, 1.0, &[1.0]), Err(Error::Geometry(_))));
    }

    #[test]
    fn halton_is_seeded() {
        assert_eq!(halton_points(5, 7), halton_points(5, 7));
        assert_ne!(halton_points(5, 7), halton_points(5, 8));
        assert_eq!(radical_inverse(3, 2), 0.75);
    }

    #[test]
    fn ellipse_sigma_bounds() {
        let g = CollarGeometry::ellipse(2, 2.0, 1.0).unwrap();
        assert_eq!((g.l0_min, g.l0_max), (0.25, 2.0));
        assert!(CollarGeometry::ellipse(3, 2.0, 1.0).is_err());
    }
}
