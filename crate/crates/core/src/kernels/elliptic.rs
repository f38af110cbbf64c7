//! Complete elliptic integrals of the first and second kind.
//!
//! Parameter convention: `m = k^2`, so that
//! `K(m) = ∫_0^{π/2} (1 - m sin²t)^{-1/2} dt` and
//! `E(m) = ∫_0^{π/2} (1 - m sin²t)^{1/2} dt`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// `(K(m), E(m))` for `0 <= m < 1`.
pub fn complete_elliptic_ke(m: f64) -> Result<(f64, f64)> {
    if !m.is_finite() || !(0.0..1.0).contains(&m) {
        return Err(Error::invalid(format!(
            "elliptic parameter m = {m} outside [0, 1)"
        )));
    }
    Ok(ke_complementary(m, 1.0 - m))
}

/// Arithmetic-geometric mean evaluation taking both `m` and `m1 = 1 - m`.
///
/// Passing the complementary parameter separately keeps full relative
/// accuracy when `m` is close to one (the near-singular ring kernel), where
/// forming `1 - m` would cancel.
pub(crate) fn ke_complementary(m: f64, m1: f64) -> (f64, f64) {
    let mut a = 1.0_f64;
    let mut b = m1.max(0.0).sqrt();
    let mut sum = 0.5 * m;
    let mut pow = 0.5;
    for _ in 0..64 {
        let c = 0.5 * (a - b);
        // a - b stalls at rounding level; accumulating further would add
        // 2^n-amplified noise to the E sum
        if c <= 4.0 * f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        pow *= 2.0;
        sum += pow * c * c;
        a = an;
        b = bn;
    }
    let k = FRAC_PI_2 / a;
    (k, k * (1.0 - sum))
}
