//! Green's function of the axisymmetric Stokes stream function and its
//! derivatives with respect to the observation point.
//!
//! `G(r, z, r', z') = (r r' / 2π) ∫_0^π cos ϑ / sqrt(r² + r'² - 2 r r' cos ϑ + (z - z')²) dϑ`
//!
//! The fast path reduces the ϑ-integral to complete elliptic integrals,
//! `G = sqrt(S) / (4π) · F(m)` with `S = (r + r')² + (z - z')²`,
//! `m = 4 r r' / S` and `F(m) = (2 - m) K(m) - 2 E(m)`. `F` vanishes like
//! `π m² / 16`, so below [`SERIES_LIMIT`] it is summed from its power series
//! instead of being formed by cancellation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::elliptic::ke_complementary;
use super::quad1d::integrate_adaptive;
use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 0.3;
const FRAC_1_4PI: f64 = 0.25 / PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelMethod {
    Elliptic,
    AdaptiveQuadrature,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub value: f64,
    pub method: KernelMethod,
    pub est_error: f64,
}

/// `F(m)` and `F'(m)` given `m` and its complement `m1 = 1 - m`.
fn f_and_derivative(m: f64, m1: f64) -> (f64, f64) {
    if m < SERIES_LIMIT {
        // F = (π/2) Σ_{n≥2} d_n m^n with d_n = c_{n-1} (n-1)/n and
        // c_n = ((2n)! / (4^n n!²))², the Taylor coefficients of (2/π) K.
        let mut c_prev = 0.25;
        let mut mp = m;
        let mut f = 0.0;
        let mut fp = 0.0;
        for n in 2..400 {
            let nf = n as f64;
            let d = c_prev * (nf - 1.0) / nf;
            let tf = d * mp * m;
            let tfp = nf * d * mp;
            f += tf;
            fp += tfp;
            if tfp <= 1e-17 * fp {
                break;
            }
            c_prev *= ((2.0 * nf - 1.0) / (2.0 * nf)).powi(2);
            mp *= m;
        }
        (0.5 * PI * f, 0.5 * PI * fp)
    } else {
        let (k, e) = ke_complementary(m, m1);
        let f = (2.0 - m) * k - 2.0 * e;
        let fp = -k + (2.0 - m) * (e - m1 * k) / (2.0 * m * m1) - (e - k) / m;
        (f, fp)
    }
}

/// `[G, ∂_z G, ∂_r G]` at observation `(r, z)` for a source ring at `(rs, zs)`.
///
/// No argument checks: callers guarantee `r >= 0`, `rs > 0` and distinct
/// points. Coincident points return zeros.
#[inline]
pub(crate) fn ring_green_all(r: f64, z: f64, rs: f64, zs: f64) -> [f64; 3] {
    let dz = z - zs;
    let sum = r + rs;
    let diff = r - rs;
    let s = sum * sum + dz * dz;
    let near = diff * diff + dz * dz;
    if near == 0.0 || s == 0.0 {
        return [0.0; 3];
    }
    let m = 4.0 * r * rs / s;
    let m1 = near / s;
    let (f, fp) = f_and_derivative(m, m1);
    let sq = s.sqrt();
    let c = f - 2.0 * m * fp;
    [
        FRAC_1_4PI * sq * f,
        FRAC_1_4PI * dz / sq * c,
        FRAC_1_4PI * (sum * c + 4.0 * rs * fp) / sq,
    ]
}

/// Stream function only; cheaper than [`ring_green_all`] by nothing much but
/// reads better at call sites.
#[inline]
pub(crate) fn ring_green(r: f64, z: f64, rs: f64, zs: f64) -> f64 {
    ring_green_all(r, z, rs, zs)[0]
}

/// Limit of `∂_r G / r` as `r → 0`: `r'² / (2 (r'² + (z - z')²)^{3/2})`.
#[inline]
pub(crate) fn axis_speed_kernel(z: f64, rs: f64, zs: f64) -> f64 {
    let dz = z - zs;
    let d2 = rs * rs + dz * dz;
    if d2 == 0.0 {
        return 0.0;
    }
    0.5 * rs * rs / (d2 * d2.sqrt())
}

fn check_args(r: f64, z: f64, rs: f64, zs: f64) -> Result<()> {
    if !(r.is_finite() && z.is_finite() && rs.is_finite() && zs.is_finite()) {
        return Err(Error::invalid("non-finite kernel argument"));
    }
    if r < 0.0 || rs <= 0.0 {
        return Err(Error::invalid(format!(
            "ring kernel needs r >= 0 and r' > 0, got r = {r}, r' = {rs}"
        )));
    }
    if r == rs && z == zs {
        return Err(Error::KernelSingularity);
    }
    Ok(())
}

/// Ring Green's function via the elliptic-integral reduction.
pub fn kernel3d(r: f64, z: f64, rs: f64, zs: f64) -> Result<KernelValue> {
    check_args(r, z, rs, zs)?;
    let value = ring_green(r, z, rs, zs);
    Ok(KernelValue {
        value,
        method: KernelMethod::Elliptic,
        est_error: 16.0 * f64::EPSILON * value.abs(),
    })
}

/// `∂_z G` at the observation point.
pub fn kernel3d_dz(r: f64, z: f64, rs: f64, zs: f64) -> Result<f64> {
    check_args(r, z, rs, zs)?;
    Ok(ring_green_all(r, z, rs, zs)[1])
}

/// `∂_r G` at the observation point.
pub fn kernel3d_dr(r: f64, z: f64, rs: f64, zs: f64) -> Result<f64> {
    check_args(r, z, rs, zs)?;
    Ok(ring_green_all(r, z, rs, zs)[2])
}

/// The two folded ϑ-denominators `A(ϑ) = |x - y|²` and `B(ϑ)`, the
/// squared distances to the source ring element at angle ϑ and π - ϑ.
#[inline]
fn folded_distances(r: f64, dz: f64, rs: f64, theta: f64) -> (f64, f64) {
    let near = (r - rs).powi(2) + dz * dz;
    let far = (r + rs).powi(2) + dz * dz;
    let h = 4.0 * r * rs * (0.5 * theta).sin().powi(2);
    (near + h, far - h)
}

/// `G` by adaptive quadrature of the folded ϑ-integral
/// `(r r'/2π) ∫_0^{π/2} cos ϑ (A^{-1/2} - B^{-1/2}) dϑ`, rewritten so the
/// integrand is a positive quotient without cancellation.
pub fn kernel3d_quadrature(r: f64, z: f64, rs: f64, zs: f64, rel_tol: f64) -> Result<KernelValue> {
    check_args(r, z, rs, zs)?;
    if r == 0.0 {
        return Ok(KernelValue {
            value: 0.0,
            method: KernelMethod::AdaptiveQuadrature,
            est_error: 0.0,
        });
    }
    let dz = z - zs;
    let q = r * rs;
    let integrand = |t: f64| {
        let (a, b) = folded_distances(r, dz, rs, t);
        let c = t.cos();
        let (sa, sb) = (a.sqrt(), b.sqrt());
        4.0 * q * c * c / (sa * sb * (sa + sb))
    };
    let (v, e) = integrate_adaptive(integrand, 0.0, 0.5 * PI, 0.0, rel_tol)?;
    let pre = q / (2.0 * PI);
    Ok(KernelValue {
        value: pre * v,
        method: KernelMethod::AdaptiveQuadrature,
        est_error: pre * e,
    })
}

/// `∂_z G` by adaptive quadrature of
/// `-(z - z')(r r'/2π) ∫_0^{π/2} cos ϑ (A^{-3/2} - B^{-3/2}) dϑ`.
pub fn kernel3d_dz_quadrature(r: f64, z: f64, rs: f64, zs: f64, rel_tol: f64) -> Result<KernelValue> {
    check_args(r, z, rs, zs)?;
    let dz = z - zs;
    let q = r * rs;
    if q == 0.0 || dz == 0.0 {
        return Ok(KernelValue {
            value: 0.0,
            method: KernelMethod::AdaptiveQuadrature,
            est_error: 0.0,
        });
    }
    let integrand = |t: f64| {
        let (a, b) = folded_distances(r, dz, rs, t);
        let c = t.cos();
        let (sa, sb) = (a.sqrt(), b.sqrt());
        let diff32 = 4.0 * q * c * (a + sa * sb + b) / (sa + sb);
        c * diff32 / (a * sa * b * sb)
    };
    let (v, e) = integrate_adaptive(integrand, 0.0, 0.5 * PI, 0.0, rel_tol)?;
    let pre = -dz * q / (2.0 * PI);
    Ok(KernelValue {
        value: pre * v,
        method: KernelMethod::AdaptiveQuadrature,
        est_error: pre.abs() * e,
    })
}

/// `∂_r G` by adaptive quadrature of
/// `(r'/2π) ∫_0^π cos ϑ (r'² - r r' cos ϑ + (z - z')²) D^{-3/2} dϑ`, folded
/// onto `[0, π/2]`.
pub fn kernel3d_dr_quadrature(r: f64, z: f64, rs: f64, zs: f64, rel_tol: f64) -> Result<KernelValue> {
    check_args(r, z, rs, zs)?;
    let dz = z - zs;
    let q = r * rs;
    let p = rs * rs + dz * dz;
    let integrand = |t: f64| {
        let (a, b) = folded_distances(r, dz, rs, t);
        let c = t.cos();
        let (sa, sb) = (a.sqrt(), b.sqrt());
        let (a32, b32) = (a * sa, b * sb);
        let diff32 = 4.0 * q * c * (a + sa * sb + b) / (sa + sb);
        c * (p * diff32 - q * c * (a32 + b32)) / (a32 * b32)
    };
    let (v, e) = integrate_adaptive(integrand, 0.0, 0.5 * PI, 1e-300, rel_tol)?;
    let pre = rs / (2.0 * PI);
    Ok(KernelValue {
        value: pre * v,
        method: KernelMethod::AdaptiveQuadrature,
        est_error: pre * e,
    })
}
