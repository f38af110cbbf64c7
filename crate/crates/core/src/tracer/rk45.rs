//! Dormand–Prince 5(4) pair for planar autonomous systems.

pub type State = [f64; 2];

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
/// Fifth-order weights; also the last stage row (first same as last).
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
/// Fifth minus fourth order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[inline]
fn comb(y: State, h: f64, k: &[State], a: &[f64]) -> State {
    let mut out = y;
    for (ki, ai) in k.iter().zip(a) {
        out[0] += h * ai * ki[0];
        out[1] += h * ai * ki[1];
    }
    out
}

/// One trial step from `y` with derivative `f0 = f(y)`.
pub struct Step {
    pub y: State,
    /// Derivative at the new state, reused as `f0` of the next step.
    pub f: State,
    /// Local error estimate per component.
    pub err: State,
}

pub fn step<F, E>(f: &mut F, y: State, f0: State, h: f64) -> Result<Step, E>
where
    F: FnMut(State) -> Result<State, E>,
{
    debug_assert_eq!(C[0], 0.0);
    let mut k = [[0.0; 2]; 7];
    k[0] = f0;
    k[1] = f(comb(y, h, &k[..1], &A2))?;
    k[2] = f(comb(y, h, &k[..2], &A3))?;
    k[3] = f(comb(y, h, &k[..3], &A4))?;
    k[4] = f(comb(y, h, &k[..4], &A5))?;
    k[5] = f(comb(y, h, &k[..5], &A6))?;
    let y1 = comb(y, h, &k[..6], &B);
    k[6] = f(y1)?;
    let mut err = [0.0; 2];
    for (ki, ei) in k.iter().zip(&E) {
        err[0] += h * ei * ki[0];
        err[1] += h * ei * ki[1];
    }
    Ok(Step { y: y1, f: k[6], err })
}

/// Scaled error norm; a step is acceptable when it is at most one.
pub fn error_norm(y0: State, y1: State, err: State, rtol: f64, atol: f64) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..2 {
        let sc = atol + rtol * y0[i].abs().max(y1[i].abs());
        m = m.max(err[i].abs() / sc);
    }
    m
}

/// Step size factor from the error norm of the last trial step.
pub fn step_factor(norm: f64) -> f64 {
    if norm == 0.0 {
        return 5.0;
    }
    (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
}

/// Cubic Hermite interpolation across an accepted step, `θ ∈ [0,1]`.
pub fn hermite(y0: State, f0: State, y1: State, f1: State, h: f64, th: f64) -> State {
    let t2 = th * th;
    let t3 = t2 * th;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + th;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    [
        h00 * y0[0] + h * h10 * f0[0] + h01 * y1[0] + h * h11 * f1[0],
        h00 * y0[1] + h * h10 * f0[1] + h01 * y1[1] + h * h11 * f1[1],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotate(y: State) -> Result<State, ()> {
        Ok([-y[1], y[0]])
    }

    #[test]
    fn weights_are_consistent() {
        assert!((B.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(E.iter().sum::<f64>().abs() < 1e-15);
        for (row, c) in [&A2[..], &A3, &A4, &A5, &A6].iter().zip(&C[1..]) {
            assert!((row.iter().sum::<f64>() - c).abs() < 1e-14);
        }
    }

    #[test]
    fn fifth_order_on_rotation() {
        let err_at = |h: f64| {
            let n = (1.0 / h).round() as usize;
            let mut y = [1.0, 0.0];
            let mut f0 = rotate(y).unwrap();
            for _ in 0..n {
                let s = step(&mut rotate, y, f0, h).unwrap();
                y = s.y;
                f0 = s.f;
            }
            (y[0] - 1f64.cos()).hypot(y[1] - 1f64.sin())
        };
        let e1 = err_at(0.1);
        let e2 = err_at(0.05);
        let order = (e1 / e2).log2();
        assert!(order > 4.7 && order < 5.5, "order {order}");
    }

    #[test]
    fn hermite_reproduces_endpoints() {
        let y = hermite([1.0, 2.0], [0.5, 0.0], [3.0, 4.0], [0.0, 1.0], 0.1, 1.0);
        assert_eq!(y, [3.0, 4.0]);
        let y = hermite([1.0, 2.0], [0.5, 0.0], [3.0, 4.0], [0.0, 1.0], 0.1, 0.0);
        assert_eq!(y, [1.0, 2.0]);
    }
}
