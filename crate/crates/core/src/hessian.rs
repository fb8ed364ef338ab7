//! Elementary symmetric functions, the admissible cones Γ_k, and the
//! eigenvalue structure of radial and small dense Hessians.

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

/// Largest matrix the Jacobi eigensolver accepts.
pub const MAX_JACOBI_SIZE: usize = 8;

/// Ordered Hessian eigenvalues λ ∈ ℝⁿ, n ≥ 2, all finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSpectrum {
    values: Vec<f64>,
}

impl EigenSpectrum {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return param(format!("spectrum needs n >= 2 entries, got {}", values.len()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return param(format!("spectrum entry {bad} is not finite"));
        }
        Ok(Self { values })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn sigma(&self, j: usize) -> f64 {
        sigma_slice(j, &self.values)
    }
}

/// All elementary symmetric functions σ_0..σ_len of `values`.
///
/// Coefficients of ∏(1 + λ_i t), built one factor at a time.
pub fn elementary_symmetric_all(values: &[f64]) -> Vec<f64> {
    elementary_symmetric_upto(values, values.len())
}

/// σ_0..σ_kmax of `values` (entries past `values.len()` are zero).
pub fn elementary_symmetric_upto(values: &[f64], kmax: usize) -> Vec<f64> {
    let mut c = vec![0.0; kmax + 1];
    c[0] = 1.0;
    for (m, &lam) in values.iter().enumerate() {
        let top = (m + 1).min(kmax);
        for j in (1..=top).rev() {
            c[j] += lam * c[j - 1];
        }
    }
    c
}

/// σ_j of an arbitrary slice; σ_0 = 1 and σ_j = 0 for j > len.
pub fn sigma_slice(j: usize, values: &[f64]) -> f64 {
    if j == 0 {
        return 1.0;
    }
    if j > values.len() {
        return 0.0;
    }
    elementary_symmetric_upto(values, j)[j]
}

pub fn sigma(j: usize, lambda: &EigenSpectrum) -> f64 {
    lambda.sigma(j)
}

/// Result of testing λ ∈ Γ_k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeReport {
    pub k: usize,
    /// σ_1..σ_k.
    pub sigmas: Vec<f64>,
    pub admissible: bool,
}

/// Strict membership test for Γ_k = {σ_j(λ) > 0, j = 1..k}. No tolerance.
pub fn cone_membership(lambda: &EigenSpectrum, k: usize) -> Result<ConeReport> {
    let n = lambda.n();
    if k == 0 || k > n {
        return param(format!("cone order k = {k} outside 1..={n}"));
    }
    let all = elementary_symmetric_upto(lambda.values(), k);
    let sigmas = all[1..=k].to_vec();
    let admissible = sigmas.iter().all(|&s| s > 0.0);
    Ok(ConeReport { k, sigmas, admissible })
}

/// ∂σ_j/∂λ_i = σ_{j-1}(λ with entry `i` removed). `i` is zero-based.
pub fn sigma_partial(j: usize, lambda: &EigenSpectrum, i: usize) -> Result<f64> {
    let n = lambda.n();
    if j == 0 || j > n {
        return param(format!("order j = {j} outside 1..={n}"));
    }
    if i >= n {
        return param(format!("index {i} out of range for n = {n}"));
    }
    let reduced: Vec<f64> = lambda
        .values()
        .iter()
        .enumerate()
        .filter_map(|(m, &v)| (m != i).then_some(v))
        .collect();
    Ok(sigma_slice(j - 1, &reduced))
}

/// Binomial coefficient C(n, k) as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Spectrum of D²u for u = u(|x|): (u″, u′/r, …, u′/r).
pub fn radial_eigenvalues(u1: f64, u2: f64, r: f64, n: usize) -> Result<EigenSpectrum> {
    if !(r > 0.0) {
        return param(format!("radius must be positive, got {r}"));
    }
    let mut values = Vec::with_capacity(n);
    values.push(u2);
    values.extend(std::iter::repeat_n(u1 / r, n.saturating_sub(1)));
    EigenSpectrum::new(values)
}

/// σ_k of the radial spectrum in closed form:
/// C(n-1,k)(u′/r)^k + C(n-1,k-1) u″ (u′/r)^{k-1}.
pub fn sk_radial(u1: f64, u2: f64, r: f64, n: usize, k: usize) -> Result<f64> {
    if !(r > 0.0) {
        return param(format!("radius must be positive, got {r}"));
    }
    if k == 0 || k > n {
        return param(format!("order k = {k} outside 1..={n}"));
    }
    Ok(sk_radial_unchecked(u1, u2, r, n, k))
}

#[inline]
pub(crate) fn sk_radial_unchecked(u1: f64, u2: f64, r: f64, n: usize, k: usize) -> f64 {
    let t = u1 / r;
    binomial(n - 1, k) * t.powi(k as i32) + binomial(n - 1, k - 1) * u2 * t.powi(k as i32 - 1)
}

/// Dense symmetric matrix, row-major, at most [`MAX_JACOBI_SIZE`] wide.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Builds from rows; rejects ragged input and asymmetry beyond 1e-12 relative.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || n > MAX_JACOBI_SIZE {
            return param(format!("matrix size {n} outside 1..={MAX_JACOBI_SIZE}"));
        }
        if rows.iter().any(|r| r.len() != n) {
            return param("matrix is not square");
        }
        let data: Vec<f64> = rows.iter().flatten().copied().collect();
        if data.iter().any(|v| !v.is_finite()) {
            return param("matrix has non-finite entries");
        }
        let scale = data.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (data[i * n + j], data[j * n + i]);
                if (a - b).abs() > 1e-12 * scale {
                    return param(format!("matrix not symmetric at ({i},{j}): {a} vs {b}"));
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let n = values.len();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { values[i] } else { 0.0 }).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(<[f64]>::to_vec).collect()
    }
}

/// Eigenvalues by cyclic Jacobi rotations, sorted descending.
///
/// Sweeps until the off-diagonal Frobenius norm is at most `tol`
/// (or stalls at round-off, which for n ≤ 8 is well below any useful tol).
pub fn symmetric_eigenvalues(a: &SymMatrix, tol: f64) -> Result<EigenSpectrum> {
    let n = a.n;
    let mut m = a.data.clone();
    let off = |m: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[i * n + j] * m[i * n + j];
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off(&m) > tol {
        sweeps += 1;
        if sweeps > 100 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..n {
                    let arp = m[r * n + p];
                    let arq = m[r * n + q];
                    m[r * n + p] = c * arp - s * arq;
                    m[r * n + q] = s * arp + c * arq;
                }
                for r in 0..n {
                    let apr = m[p * n + r];
                    let aqr = m[q * n + r];
                    m[p * n + r] = c * apr - s * aqr;
                    m[q * n + r] = s * apr + c * aqr;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    eig.sort_by(|x, y| y.total_cmp(x));
    if n < 2 {
        return param("eigen-spectrum needs n >= 2");
    }
    EigenSpectrum::new(eig)
}

/// S_k(A) = σ_k(λ(A)).
pub fn matrix_sk(a: &SymMatrix, k: usize) -> Result<f64> {
    Ok(symmetric_eigenvalues(a, 1e-14)?.sigma(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(v: &[f64]) -> EigenSpectrum {
        EigenSpectrum::new(v.to_vec()).unwrap()
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(2, &spec(&[1.0, 2.0, 3.0])), 11.0);
        assert_eq!(sigma(3, &spec(&[1.0, 1.0, 1.0, 1.0])), 4.0);
        assert_eq!(sigma(0, &spec(&[5.0, -7.0])), 1.0);
        assert_eq!(sigma(5, &spec(&[5.0, -7.0])), 0.0);
    }

    #[test]
    fn cone_examples() {
        let r = cone_membership(&spec(&[3.0, -1.0]), 1).unwrap();
        assert!(r.admissible);
        assert_eq!(r.sigmas, vec![2.0]);
        let r = cone_membership(&spec(&[3.0, -1.0]), 2).unwrap();
        assert!(!r.admissible);
        assert_eq!(r.sigmas[1], -3.0);
        let r = cone_membership(&spec(&[1.0, 1.0, 1.0]), 3).unwrap();
        assert!(r.admissible);
        assert_eq!(r.sigmas, vec![3.0, 3.0, 1.0]);
        assert!(cone_membership(&spec(&[1.0, 1.0]), 3).is_err());
        assert!(cone_membership(&spec(&[1.0, 1.0]), 0).is_err());
    }

    #[test]
    fn cone_boundary_is_excluded() {
        // σ_2(1,-1) = -1, σ_1 = 0: not in Γ_1 since the test is strict.
        assert!(!cone_membership(&spec(&[1.0, -1.0]), 1).unwrap().admissible);
    }

    #[test]
    fn partial_examples() {
        assert_eq!(sigma_partial(2, &spec(&[1.0, 2.0, 3.0]), 0).unwrap(), 5.0);
        assert_eq!(sigma_partial(1, &spec(&[-4.0, 9.0, 0.5]), 2).unwrap(), 1.0);
        assert_eq!(sigma_partial(3, &spec(&[1.0, 2.0, 3.0, 4.0]), 3).unwrap(), 11.0);
        assert!(sigma_partial(2, &spec(&[1.0, 2.0]), 2).is_err());
    }

    #[test]
    fn radial_eigenvalue_examples() {
        assert_eq!(radial_eigenvalues(2.0, 4.0, 1.0, 3).unwrap().values(), &[4.0, 2.0, 2.0]);
        assert_eq!(radial_eigenvalues(0.0, 7.5, 1.0, 2).unwrap().values(), &[7.5, 0.0]);
        assert_eq!(radial_eigenvalues(3.0, 1.0, 3.0, 4).unwrap().values(), &[1.0; 4]);
        assert!(radial_eigenvalues(1.0, 1.0, 0.0, 3).is_err());
    }

    #[test]
    fn sk_radial_examples() {
        assert_eq!(sk_radial(2.0, 4.0, 1.0, 3, 2).unwrap(), 20.0);
        for r in [0.1, 0.5, 0.9, 2.0] {
            assert!((sk_radial(r, 1.0, r, 2, 2).unwrap() - 1.0).abs() < 1e-15);
            assert!((sk_radial(r / 2.0, 0.5, r, 2, 1).unwrap() - 1.0).abs() < 1e-15);
        }
        assert!(sk_radial(1.0, 1.0, -1.0, 2, 1).is_err());
        assert!(sk_radial(1.0, 1.0, 1.0, 2, 3).is_err());
    }

    #[test]
    fn jacobi_examples() {
        let id = SymMatrix::diagonal(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(symmetric_eigenvalues(&id, 1e-14).unwrap().values(), &[1.0, 1.0, 1.0]);
        let d = SymMatrix::diagonal(&[-2.0, 5.0]).unwrap();
        assert_eq!(symmetric_eigenvalues(&d, 1e-14).unwrap().values(), &[5.0, -2.0]);
        let a = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let e = symmetric_eigenvalues(&a, 1e-14).unwrap();
        assert!((e.values()[0] - 3.0).abs() < 1e-14 && (e.values()[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn asymmetric_rejected() {
        assert!(SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.1, 2.0]]).is_err());
        assert!(SymMatrix::from_rows(&vec![vec![1.0; 9]; 9]).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(4, 0), 1.0);
        assert_eq!(binomial(2, 3), 0.0);
    }
}
