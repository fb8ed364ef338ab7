//! Disks and ellipses: membership, distance to the boundary, curvature.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{param, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DomainSpec2D {
    Disk { radius: f64 },
    /// Semi-axes a ≥ b along x and y.
    Ellipse { a: f64, b: f64 },
}

impl DomainSpec2D {
    pub fn disk(radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return param(format!("disk radius must be positive, got {radius}"));
        }
        Ok(Self::Disk { radius })
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        if !(b > 0.0) || !(a >= b) || !a.is_finite() {
            return param(format!("ellipse needs a >= b > 0, got a = {a}, b = {b}"));
        }
        Ok(Self::Ellipse { a, b })
    }

    pub fn semi_axes(&self) -> (f64, f64) {
        match *self {
            Self::Disk { radius } => (radius, radius),
            Self::Ellipse { a, b } => (a, b),
        }
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.semi_axes().0
    }

    /// Strict interior test.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let (a, b) = self.semi_axes();
        (x / a).powi(2) + (y / b).powi(2) < 1.0
    }

    /// Distance from a point inside to the boundary.
    pub fn distance(&self, x: f64, y: f64) -> f64 {
        match *self {
            Self::Disk { radius } => radius - x.hypot(y),
            Self::Ellipse { a, b } => ellipse_nearest(a, b, x.abs(), y.abs()).0,
        }
    }

    /// Curvature of the boundary at the point nearest to (x, y).
    pub fn curvature_at_nearest(&self, x: f64, y: f64) -> f64 {
        match *self {
            Self::Disk { radius } => 1.0 / radius,
            Self::Ellipse { a, b } => ellipse_curvature(a, b, ellipse_nearest(a, b, x.abs(), y.abs()).1),
        }
    }

    /// Smallest and largest boundary curvature.
    pub fn curvature_range(&self) -> (f64, f64) {
        let (a, b) = self.semi_axes();
        (ellipse_curvature(a, b, FRAC_PI_2), ellipse_curvature(a, b, 0.0))
    }

    /// Distance from (x, y) to the boundary along the axis direction
    /// (`axis` 0 = x, 1 = y; `sign` ±1).
    pub fn crossing(&self, x: f64, y: f64, axis: usize, sign: f64) -> f64 {
        let (a, b) = self.semi_axes();
        if axis == 0 {
            let xb = a * (1.0 - (y / b).powi(2)).max(0.0).sqrt();
            xb - sign * x
        } else {
            let yb = b * (1.0 - (x / a).powi(2)).max(0.0).sqrt();
            yb - sign * y
        }
    }

    pub fn describe(&self) -> Value {
        match *self {
            Self::Disk { radius } => json!({ "kind": "disk", "radius": radius }),
            Self::Ellipse { a, b } => json!({ "kind": "ellipse", "a": a, "b": b }),
        }
    }
}

/// κ(t) = ab / (a² sin²t + b² cos²t)^{3/2} at the point (a cos t, b sin t).
pub fn ellipse_curvature(a: f64, b: f64, t: f64) -> f64 {
    let (s, c) = t.sin_cos();
    a * b / (a * a * s * s + b * b * c * c).powf(1.5)
}

/// Nearest boundary point of the ellipse to (x, y) with x, y ≥ 0:
/// (distance, parameter t ∈ [0, π/2]).
///
/// Newton on (a²−b²) sin t cos t − a x sin t + b y cos t = 0 from four
/// starts, each clamped to the quadrant; the closest converged point wins.
pub fn ellipse_nearest(a: f64, b: f64, x: f64, y: f64) -> (f64, f64) {
    let g = |t: f64| {
        let (s, c) = t.sin_cos();
        (a * a - b * b) * s * c - a * x * s + b * y * c
    };
    let dg = |t: f64| {
        let (s, c) = t.sin_cos();
        (a * a - b * b) * (c * c - s * s) - a * x * c - b * y * s
    };
    let dist = |t: f64| {
        let (s, c) = t.sin_cos();
        (x - a * c).hypot(y - b * s)
    };
    let starts = [0.0, 0.25 * std::f64::consts::PI, FRAC_PI_2, (a * y).atan2(b * x)];
    let mut best = (f64::INFINITY, 0.0);
    for &t0 in &starts {
        let mut t = t0;
        for _ in 0..60 {
            let d = dg(t);
            if d == 0.0 {
                break;
            }
            let next = (t - g(t) / d).clamp(0.0, FRAC_PI_2);
            let done = (next - t).abs() < 1e-15;
            t = next;
            if done {
                break;
            }
        }
        // Endpoints of the quadrant are candidates too.
        for cand in [t, 0.0, FRAC_PI_2] {
            let dc = dist(cand);
            if dc < best.0 {
                best = (dc, cand);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centre_distances() {
        assert_eq!(DomainSpec2D::disk(1.0).unwrap().distance(0.0, 0.0), 1.0);
        assert!((DomainSpec2D::ellipse(2.0, 1.0).unwrap().distance(0.0, 0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ellipse_distance_against_brute_force() {
        let (a, b) = (1.7, 0.9);
        for (x, y) in [(0.3, 0.2), (1.2, 0.1), (0.05, 0.7), (1.5, 0.3), (0.0, 0.0), (0.9, 0.0)] {
            let (d, t) = ellipse_nearest(a, b, x, y);
            // Dense scan of the quadrant refined by golden-section.
            let f = |t: f64| (x - a * t.cos()).hypot(y - b * t.sin());
            let mut best = (f64::INFINITY, 0.0);
            for i in 0..=20000 {
                let s = FRAC_PI_2 * i as f64 / 20000.0;
                if f(s) < best.0 {
                    best = (f(s), s);
                }
            }
            assert!(d <= best.0 + 1e-12, "({x},{y}): {d} vs {}", best.0);
            assert!((d - best.0).abs() < 1e-8);
            assert!((f(t) - d).abs() < 1e-15);
        }
    }

    #[test]
    fn curvature_extremes() {
        let e = DomainSpec2D::ellipse(2.0, 1.0).unwrap();
        let (lo, hi) = e.curvature_range();
        assert!((lo - 2.0 / 8.0).abs() < 1e-15 && (hi - 2.0).abs() < 1e-15);
        assert!((e.curvature_at_nearest(1.9, 0.0) - 2.0).abs() < 1e-12);
    }
}
