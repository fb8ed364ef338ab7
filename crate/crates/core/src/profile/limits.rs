use crate::error::{Error, Result};

/// Maximum number of probe terms before giving up.
pub const MAX_TERMS: usize = 40;

/// Limit of a sequence via Aitken Δ² with a convergence monitor.
///
/// `term(i)` yields the i-th probe value; `None` (or a non-finite value) ends
/// the sequence early, e.g. when the probe point leaves the representable
/// range. Returns once two consecutive extrapolants agree to 1e-10 relative;
/// otherwise accepts the last extrapolant if the final three agree to 1e-3.
pub fn aitken_limit<T>(quantity: &'static str, mut term: T) -> Result<f64>
where
    T: FnMut(usize) -> Option<f64>,
{
    let mut xs: Vec<f64> = Vec::new();
    let mut acc: Vec<f64> = Vec::new();
    let mut agreed = 0;
    for i in 0..MAX_TERMS {
        match term(i) {
            Some(x) if x.is_finite() => xs.push(x),
            _ => break,
        }
        let n = xs.len();
        if n < 3 {
            continue;
        }
        let (x0, x1, x2) = (xs[n - 3], xs[n - 2], xs[n - 1]);
        let denom = x2 - 2.0 * x1 + x0;
        let a = if denom.abs() <= 1e-13 * x2.abs().max(1e-300) {
            x2
        } else {
            x2 - (x2 - x1) * (x2 - x1) / denom
        };
        if let Some(&prev) = acc.last() {
            if (a - prev).abs() <= 1e-10 * a.abs().max(1e-300) {
                agreed += 1;
                if agreed >= 2 {
                    return Ok(a);
                }
            } else {
                agreed = 0;
            }
        }
        acc.push(a);
    }
    let tail: Vec<f64> = acc.iter().rev().take(3).copied().collect();
    if tail.len() == 3 {
        let hi = tail.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        let lo = tail.iter().fold(f64::INFINITY, |m, &v| m.min(v));
        if hi - lo <= 1e-3 * tail[0].abs().max(1e-300) {
            return Ok(tail[0]);
        }
    }
    Err(Error::LimitNotDetected { quantity, last: tail })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_convergence_is_accelerated() {
        let v = aitken_limit("test", |i| Some(2.0 + 0.5f64.powi(i as i32))).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn constant_sequence() {
        assert_eq!(aitken_limit("c", |_| Some(1.5)).unwrap(), 1.5);
    }

    #[test]
    fn oscillation_is_rejected() {
        let r = aitken_limit("osc", |i| Some(if i % 2 == 0 { 1.0 } else { -1.0 } * (1.0 + i as f64)));
        assert!(matches!(r, Err(Error::LimitNotDetected { .. })));
    }

    #[test]
    fn short_sequences_fail() {
        assert!(aitken_limit("short", |i| (i < 2).then_some(1.0)).is_err());
    }
}
