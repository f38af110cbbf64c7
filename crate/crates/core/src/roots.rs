//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Bisection for a sign change of `f` on `[lo, hi]`, to absolute width
/// `tol`. The endpoints may be given in either order of sign.
pub fn bisect(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
    context: &str,
) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::NoSignChange {
            lo,
            hi,
            context: context.to_string(),
        });
    }
    let sa = fa.signum();
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14, "test").unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
        let r = bisect(|x| 2.0 - x * x, 2.0, 0.0, 1e-14, "test").unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn reports_missing_bracket() {
        assert!(matches!(
            bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-10, "test"),
            Err(Error::NoSignChange { .. })
        ));
    }
}
