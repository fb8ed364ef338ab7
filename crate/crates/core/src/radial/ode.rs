//! Dormand–Prince 5(4) for two-component systems.

pub(crate) type State = [f64; 2];

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// 5th-order weights minus the embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

pub(crate) struct Trial {
    pub y: State,
    /// Derivative at the new point (first stage of the next step).
    pub dy: State,
    /// Scaled error norm; ≤ 1 accepts.
    pub err: f64,
}

/// One trial step from (x, y) with derivative `dy0` at x.
pub(crate) fn trial<F>(rhs: &F, x: f64, y: State, dy0: State, h: f64, rtol: f64, atol: f64) -> Trial
where
    F: Fn(f64, State) -> State,
{
    let mut k = [[0.0; 2]; 7];
    k[0] = dy0;
    for s in 1..7 {
        let mut ys = y;
        for (c, ys_c) in ys.iter_mut().enumerate() {
            for (j, kj) in k.iter().enumerate().take(s) {
                *ys_c += h * A[s][j] * kj[c];
            }
        }
        k[s] = rhs(x + C[s] * h, ys);
    }
    // Stage 7 is evaluated at the 5th-order solution (FSAL).
    let mut ynew = y;
    for (c, yn) in ynew.iter_mut().enumerate() {
        for j in 0..6 {
            *yn += h * A[6][j] * k[j][c];
        }
    }
    let mut err = 0.0f64;
    for c in 0..2 {
        let e: f64 = (0..7).map(|j| E[j] * k[j][c]).sum::<f64>() * h;
        let sc = atol + rtol * y[c].abs().max(ynew[c].abs());
        err = err.max((e / sc).abs());
    }
    if !err.is_finite() || ynew.iter().chain(k[6].iter()).any(|v| !v.is_finite()) {
        err = f64::INFINITY;
    }
    Trial { y: ynew, dy: k[6], err }
}

/// Step-size factor from an error norm, with the usual safety and clamps.
pub(crate) fn step_factor(err: f64) -> f64 {
    if err == 0.0 {
        5.0
    } else if !err.is_finite() {
        0.1
    } else {
        (0.9 * err.powf(-0.2)).clamp(0.1, 5.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_one_period() {
        let rhs = |_x: f64, y: State| [y[1], -y[0]];
        let (mut x, mut y) = (0.0, [1.0, 0.0]);
        let mut dy = rhs(x, y);
        let mut h: f64 = 0.01;
        let end = 2.0 * std::f64::consts::PI;
        while x < end {
            h = h.min(end - x);
            let t = trial(&rhs, x, y, dy, h, 1e-12, 1e-12);
            if t.err <= 1.0 {
                x += h;
                y = t.y;
                dy = t.dy;
            }
            h *= step_factor(t.err);
        }
        assert!((y[0] - 1.0).abs() < 1e-10 && y[1].abs() < 1e-10, "{y:?}");
    }
}
