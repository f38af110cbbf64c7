//! Randomised comparison of the fast kernels against independent
//! evaluations: ϑ-quadrature for the ring kernel, the unfactored logarithm
//! for the plane kernel, and finite differences for all derivatives.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::plane::{kernel2d, kernel2d_gradient};
use super::ring::{kernel3d, kernel3d_dr, kernel3d_dz, kernel3d_quadrature};
use crate::error::Result;
use crate::point::Point;

/// Points closer than this to the source are skipped.
const MIN_SEPARATION: f64 = 1e-3;
const ORACLE_TOLERANCE: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub points: usize,
    /// Largest relative difference of kernel values.
    pub max_relative_error: f64,
    /// Largest `|d − d_fd| / max(1e-8, 1e-5 |d|)`; at most one passes.
    pub max_derivative_ratio: f64,
}

/// Fourth-order central difference with step `h`.
fn central(f: impl Fn(f64) -> Result<f64>, x: f64, h: f64) -> Result<f64> {
    let d1 = f(x + h)? - f(x - h)?;
    let d2 = f(x + 2.0 * h)? - f(x - 2.0 * h)?;
    Ok((8.0 * d1 - d2) / (12.0 * h))
}

fn derivative_ratio(d: f64, fd: f64) -> f64 {
    (d - fd).abs() / 1e-8f64.max(1e-5 * d.abs())
}

/// Ring kernel on `points` random pairs with radii in `(0.05, 3)` and
/// axial positions in `(−2, 2)`.
pub fn ring_kernel_oracle(points: usize, seed: u64) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = OracleReport {
        points: 0,
        max_relative_error: 0.0,
        max_derivative_ratio: 0.0,
    };
    while rep.points < points {
        let (r, z, rs, zs): (f64, f64, f64, f64) = (
            rng.gen_range(0.05..3.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(0.05..3.0),
            rng.gen_range(-2.0..2.0),
        );
        let sep = (r - rs).hypot(z - zs);
        if sep < MIN_SEPARATION {
            continue;
        }
        rep.points += 1;
        let fast = kernel3d(r, z, rs, zs)?.value;
        let slow = kernel3d_quadrature(r, z, rs, zs, ORACLE_TOLERANCE)?.value;
        rep.max_relative_error = rep.max_relative_error.max((fast - slow).abs() / slow.abs());
        let h = 1e-3 * sep.min(r);
        let fz = central(|x| Ok(kernel3d(r, x, rs, zs)?.value), z, h)?;
        let fr = central(|x| Ok(kernel3d(x, z, rs, zs)?.value), r, h)?;
        rep.max_derivative_ratio = rep
            .max_derivative_ratio
            .max(derivative_ratio(kernel3d_dz(r, z, rs, zs)?, fz))
            .max(derivative_ratio(kernel3d_dr(r, z, rs, zs)?, fr));
    }
    Ok(rep)
}

/// Plane kernel on random pairs in `(−2, 2) × (0.05, 3)`.
pub fn plane_kernel_oracle(points: usize, seed: u64) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = OracleReport {
        points: 0,
        max_relative_error: 0.0,
        max_derivative_ratio: 0.0,
    };
    while rep.points < points {
        let x = Point::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.05..3.0));
        let y = Point::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.05..3.0));
        let sep = x.dist(&y);
        if sep < MIN_SEPARATION {
            continue;
        }
        rep.points += 1;
        let fast = kernel2d(x, y)?;
        let naive = (x.dist(&y.reflected()) / sep).ln() / (2.0 * std::f64::consts::PI);
        rep.max_relative_error = rep.max_relative_error.max((fast - naive).abs() / naive.abs());
        let h = 1e-3 * sep.min(x.radial);
        let f1 = central(|a| kernel2d(Point::new(a, x.radial), y), x.axial, h)?;
        let f2 = central(|b| kernel2d(Point::new(x.axial, b), y), x.radial, h)?;
        let g = kernel2d_gradient(x, y)?;
        rep.max_derivative_ratio = rep
            .max_derivative_ratio
            .max(derivative_ratio(g[0], f1))
            .max(derivative_ratio(g[1], f2));
    }
    Ok(rep)
}
