//! Odd-image logarithmic kernel of the half-plane:
//! `(1/2π)(log|x - y*| - log|x - y|)` with `y* = (y1, -y2)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::point::Point;

const FRAC_1_2PI: f64 = 0.5 / PI;

/// `[K, ∂_{x1} K, ∂_{x2} K]` without argument checks.
///
/// Evaluated through `|x - y*|² = |x - y|² + 4 x2 y2` so that the value is
/// exactly odd in `x2` and exactly zero on the axis.
#[inline]
pub(crate) fn plane_kernel_all(x: Point, y: Point) -> [f64; 3] {
    let d1 = x.axial - y.axial;
    let sign = if x.radial < 0.0 { -1.0 } else { 1.0 };
    let x2 = x.radial.abs();
    let near = d1 * d1 + (x2 - y.radial).powi(2);
    if near == 0.0 {
        return [0.0; 3];
    }
    let cross = 4.0 * x2 * y.radial;
    let far = near + cross;
    let value = sign * 0.5 * FRAC_1_2PI * (cross / near).ln_1p();
    let d_axial = -sign * FRAC_1_2PI * d1 * cross / (far * near);
    let d_radial = FRAC_1_2PI * ((x2 + y.radial) / far - (x2 - y.radial) / near);
    [value, d_axial, d_radial]
}

/// The odd-image kernel at plane point `x` for a source `y` with `y2 > 0`.
pub fn kernel2d(x: Point, y: Point) -> Result<f64> {
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::invalid("non-finite kernel argument"));
    }
    if y.radial <= 0.0 {
        return Err(Error::invalid(format!(
            "source must lie in the upper half-plane, got y2 = {}",
            y.radial
        )));
    }
    if x == y || x == y.reflected() {
        return Err(Error::KernelSingularity);
    }
    Ok(plane_kernel_all(x, y)[0])
}

/// Gradient `(∂_{x1}, ∂_{x2})` of the odd-image kernel in the first slot.
pub fn kernel2d_gradient(x: Point, y: Point) -> Result<[f64; 2]> {
    kernel2d(x, y)?;
    let [_, a, r] = plane_kernel_all(x, y);
    Ok([a, r])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_value() {
        let v = kernel2d(Point::new(0.0, 1.0), Point::new(0.0, 2.0)).unwrap();
        assert!((v - 3f64.ln() / (2.0 * PI)).abs() < 1e-15);
        assert!((v - 0.174851).abs() < 5e-6);
    }

    #[test]
    fn zero_on_axis() {
        assert_eq!(kernel2d(Point::new(5.0, 0.0), Point::new(1.0, 1.0)).unwrap(), 0.0);
    }

    #[test]
    fn matches_two_log_form() {
        let x = Point::new(0.3, 0.7);
        let y = Point::new(0.1, 0.4);
        let direct = (x.dist(&y.reflected()).ln() - x.dist(&y).ln()) / (2.0 * PI);
        assert!((kernel2d(x, y).unwrap() - direct).abs() < 1e-14);
    }

    #[test]
    fn exactly_odd() {
        let y = Point::new(-0.2, 0.9);
        for x in [Point::new(0.3, 0.7), Point::new(2.0, 0.01), Point::new(-1.0, 3.0)] {
            let a = kernel2d(x, y).unwrap();
            let b = kernel2d(x.reflected(), y).unwrap();
            assert_eq!(a, -b);
        }
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let x = Point::new(0.3, 0.7);
        let y = Point::new(0.1, 0.4);
        let h = 1e-6;
        let [ga, gr] = kernel2d_gradient(x, y).unwrap();
        let fa = (kernel2d(Point::new(x.axial + h, x.radial), y).unwrap()
            - kernel2d(Point::new(x.axial - h, x.radial), y).unwrap())
            / (2.0 * h);
        let fr = (kernel2d(Point::new(x.axial, x.radial + h), y).unwrap()
            - kernel2d(Point::new(x.axial, x.radial - h), y).unwrap())
            / (2.0 * h);
        assert!((ga - fa).abs() < 1e-8);
        assert!((gr - fr).abs() < 1e-8);
    }

    #[test]
    fn singular_and_invalid() {
        let y = Point::new(0.0, 1.0);
        assert!(matches!(kernel2d(y, y), Err(Error::KernelSingularity)));
        assert!(matches!(kernel2d(y.reflected(), y), Err(Error::KernelSingularity)));
        assert!(kernel2d(y, Point::new(0.0, -1.0)).is_err());
    }
}
