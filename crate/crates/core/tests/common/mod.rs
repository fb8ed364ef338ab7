//! Checks shared by the algebra property tests and the acceptance suite.
//! Each returns `Err` with a description of the first violated relation.
#![allow(dead_code)]

use std::sync::Arc;

use hessian_blowup::fd::{build_grid, solve_dirichlet, BoundaryData, DomainSpec2D, FdOptions, FdProblem, Field2D};
use hessian_blowup::hessian::{
    binomial, cone_membership, elementary_symmetric_all, matrix_sk, sigma_partial, sk_radial, EigenSpectrum, SymMatrix,
};
use hessian_blowup::profile::{NonlinearitySpec, WeightSpec};

pub type Check = Result<(), String>;

/// σ_j from the product recurrence against Newton's identities on power sums.
pub fn newton_identities(lambda: &[f64]) -> Check {
    let n = lambda.len();
    let e = elementary_symmetric_all(lambda);
    let p: Vec<f64> = (0..=n).map(|i| lambda.iter().map(|x| x.powi(i as i32)).sum()).collect();
    let abs: Vec<f64> = lambda.iter().map(|x| x.abs()).collect();
    let e_abs = elementary_symmetric_all(&abs);
    let mut rebuilt = vec![1.0; n + 1];
    for j in 1..=n {
        let (mut acc, mut terms) = (0.0, 0.0);
        for i in 1..=j {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * rebuilt[j - i] * p[i];
            terms += (rebuilt[j - i] * p[i]).abs();
        }
        rebuilt[j] = acc / j as f64;
        let scale = e_abs[j].max(terms / j as f64);
        if (rebuilt[j] - e[j]).abs() > 1e-10 * scale {
            return Err(format!("sigma_{j}: recurrence {} vs power sums {}", e[j], rebuilt[j]));
        }
    }
    Ok(())
}

fn sym(rows: &[Vec<f64>]) -> SymMatrix {
    SymMatrix::from_rows(rows).unwrap()
}

/// S_k(S ± ξξᵀ) = S_k(S) ± Σ ∂S_k/∂S_ij ξ_i ξ_j, derivative by central differences.
pub fn rank_one(s: &[Vec<f64>], xi: &[f64], k: usize) -> Check {
    let n = s.len();
    let h = 1e-2;
    let sk = |rows: &[Vec<f64>]| matrix_sk(&sym(rows), k).unwrap();
    let base = sk(s);
    let mut directional = 0.0;
    let mut scale = base.abs();
    for i in 0..n {
        for j in i..n {
            let bump = |t: f64| {
                let mut m = s.to_vec();
                m[i][j] += t;
                if i != j {
                    m[j][i] += t;
                }
                sk(&m)
            };
            // Each principal minor is at most quadratic in the pair, so this is exact.
            let d = (bump(h) - bump(-h)) / (2.0 * h);
            let term = d * xi[i] * xi[j];
            directional += term;
            scale += term.abs();
        }
    }
    for sign in [1.0, -1.0] {
        let m: Vec<Vec<f64>> =
            (0..n).map(|i| (0..n).map(|j| s[i][j] + sign * xi[i] * xi[j]).collect()).collect();
        let lhs = sk(&m);
        let rhs = base + sign * directional;
        if (lhs - rhs).abs() > 1e-9 * scale.max(1.0) {
            return Err(format!("k = {k}, sign {sign}: {lhs} vs {rhs}"));
        }
    }
    Ok(())
}

/// Γ_1 ⊃ Γ_2 ⊃ … ⊃ Γ_n.
pub fn cone_nesting(lambda: &[f64]) -> Check {
    let spec = EigenSpectrum::new(lambda.to_vec()).unwrap();
    let n = lambda.len();
    let flags: Vec<bool> = (1..=n).map(|k| cone_membership(&spec, k).unwrap().admissible).collect();
    for k in 1..n {
        if flags[k] && !flags[k - 1] {
            return Err(format!("{lambda:?} in Gamma_{} but not Gamma_{k}", k + 1));
        }
    }
    Ok(())
}

/// ∂σ_k/∂λ_i > 0 for every i when λ ∈ Γ_k; vacuous outside the cone.
pub fn positive_partials(lambda: &[f64], k: usize) -> Check {
    let spec = EigenSpectrum::new(lambda.to_vec()).unwrap();
    if !cone_membership(&spec, k).unwrap().admissible {
        return Ok(());
    }
    for i in 0..lambda.len() {
        let d = sigma_partial(k, &spec, i).unwrap();
        if !(d > 0.0) {
            return Err(format!("d sigma_{k} / d lambda_{i} = {d} at {lambda:?}"));
        }
    }
    Ok(())
}

/// sk_radial against C(n−1,k−1)/(k r^{n−1}) · (r^{n−k}(u′)^k)′ by forward
/// differences on three step sizes: the error must shrink linearly.
pub fn divergence_form(n: usize, k: usize, r: f64, c: f64) -> Check {
    let u1 = |s: f64| 2.0 * s + 4.0 * c * s.powi(3);
    let u2 = |s: f64| 2.0 + 12.0 * c * s * s;
    let flux = |s: f64| s.powi((n - k) as i32) * u1(s).powi(k as i32);
    let exact = sk_radial(u1(r), u2(r), r, n, k).unwrap();
    let scale = binomial(n - 1, k - 1) / (k as f64 * r.powi(n as i32 - 1));
    let errs: Vec<f64> = [1e-3, 5e-4, 2.5e-4]
        .iter()
        .map(|&h| (scale * (flux(r + h) - flux(r)) / h - exact).abs())
        .collect();
    let ratios = [errs[0] / errs[1], errs[1] / errs[2]];
    if ratios.iter().any(|q| !(1.8..=2.2).contains(q)) {
        return Err(format!("n = {n}, k = {k}, r = {r}: errors {errs:?} not first order"));
    }
    Ok(())
}

pub fn liouville(r2: f64) -> f64 {
    (2.0 / (1.0 - r2)).ln()
}

pub fn max_error(field: &Field2D, exact: impl Fn(f64, f64) -> f64) -> f64 {
    field
        .interior_nodes()
        .map(|p| {
            let (x, y) = field.coords(p);
            (field.values[p] - exact(x, y)).abs()
        })
        .fold(0.0, f64::max)
}

pub fn torsion_error(h: f64) -> f64 {
    let dom = DomainSpec2D::disk(1.0).unwrap();
    let prob = FdProblem::new(dom, NonlinearitySpec::power(0.0).unwrap(), WeightSpec::unit());
    let grid = build_grid(&dom, h).unwrap();
    let (u, _) = solve_dirichlet(&prob, &BoundaryData::Constant(0.0), &grid, None, &FdOptions::default()).unwrap();
    max_error(&u, |x, y| (x * x + y * y - 1.0) / 4.0)
}

/// Δu = 1 with a harmonic quartic added, so the stencil is not exact.
pub fn quartic_torsion_error(h: f64) -> f64 {
    let dom = DomainSpec2D::disk(1.0).unwrap();
    let prob = FdProblem::new(dom, NonlinearitySpec::power(0.0).unwrap(), WeightSpec::unit());
    let exact = |x: f64, y: f64| (x * x + y * y - 1.0) / 4.0 + x.powi(4) - 6.0 * x * x * y * y + y.powi(4);
    let grid = build_grid(&dom, h).unwrap();
    let g = BoundaryData::Function(Arc::new(exact));
    let (u, _) = solve_dirichlet(&prob, &g, &grid, None, &FdOptions::default()).unwrap();
    max_error(&u, exact)
}

pub fn truncated_liouville_error(h: f64) -> f64 {
    let dom = DomainSpec2D::disk(0.9).unwrap();
    let prob = FdProblem::new(dom, NonlinearitySpec::exponential(2.0).unwrap(), WeightSpec::unit());
    let grid = build_grid(&dom, h).unwrap();
    let g = BoundaryData::Function(Arc::new(|x: f64, y: f64| liouville(x * x + y * y)));
    let (u, _) = solve_dirichlet(&prob, &g, &grid, None, &FdOptions::default()).unwrap();
    max_error(&u, |x, y| liouville(x * x + y * y))
}
