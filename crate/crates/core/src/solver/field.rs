//! Stream function, velocity and relative stream function of a traveling
//! vortex, by quadrature of the kernels against its vorticity.

use serde::{Deserialize, Serialize};

use super::quadrature::{SupportQuadrature, DEFAULT_ORDER};
use crate::error::{Error, Result};
use crate::field::vorticity::{Geometry, TravelingVortex};
use crate::kernels::plane::plane_kernel_all;
use crate::kernels::ring::{axis_speed_kernel, ring_green_all};
use crate::point::Point;

/// Default absolute tolerance on stream values.
pub const DEFAULT_STREAM_TOLERANCE: f64 = 1e-8;

/// Below this fraction of the support scale a ring target is treated as
/// lying on the axis.
const AXIS_BAND: f64 = 1e-7;

/// Stream value with the difference against a higher-order rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamValue {
    pub value: f64,
    pub est_error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub point: Point,
    /// `ψ` for rings, `𝒢` for dipoles.
    pub stream: f64,
    /// `(v^z, v^r)` or `(u¹, u²)`.
    pub velocity: [f64; 2],
    pub relative_stream: f64,
}

/// Quadrature-backed field of one traveling vortex.
#[derive(Clone, Debug)]
pub struct FieldSolver {
    vortex: TravelingVortex,
    quad: SupportQuadrature,
    check: SupportQuadrature,
    tolerance: f64,
    scale: f64,
}

impl FieldSolver {
    pub fn new(vortex: TravelingVortex) -> Self {
        Self::with_tolerance(vortex, DEFAULT_STREAM_TOLERANCE)
    }

    pub fn with_tolerance(vortex: TravelingVortex, tolerance: f64) -> Self {
        let quad = SupportQuadrature::with_order(&vortex.vorticity, DEFAULT_ORDER);
        let check = SupportQuadrature::with_order(&vortex.vorticity, DEFAULT_ORDER + 4);
        let scale = vortex.vorticity.support_radius();
        FieldSolver {
            vortex,
            quad,
            check,
            tolerance,
            scale,
        }
    }

    pub fn vortex(&self) -> &TravelingVortex {
        &self.vortex
    }

    pub fn speed(&self) -> f64 {
        self.vortex.speed
    }

    pub fn geometry(&self) -> Geometry {
        self.vortex.geometry()
    }

    pub fn is_ring(&self) -> bool {
        self.geometry() == Geometry::Ring
    }

    /// Largest distance of the support from the origin.
    pub fn support_scale(&self) -> f64 {
        self.scale
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Same vorticity, different speed; reuses the quadrature setup.
    pub fn with_speed(&self, speed: f64) -> Result<Self> {
        let vortex = TravelingVortex::new(self.vortex.vorticity.clone(), speed)?;
        Ok(FieldSolver {
            vortex,
            ..self.clone()
        })
    }

    /// Fold a target into the upper half-plane; returns the folded point
    /// and the sign of the reflection.
    #[inline]
    fn fold(&self, p: Point) -> (Point, f64) {
        if p.radial < 0.0 {
            (p.reflected(), -1.0)
        } else {
            (p, 1.0)
        }
    }

    /// `[stream, ∂_axial stream, ∂_radial stream]` in the upper half-plane.
    fn raw(&self, q: &SupportQuadrature, t: Point) -> [f64; 3] {
        if self.is_ring() {
            q.integrate(t, |y| ring_green_all(t.radial, t.axial, y.radial, y.axial))
        } else {
            q.integrate(t, |y| plane_kernel_all(t, y))
        }
    }

    fn stream_only(&self, q: &SupportQuadrature, t: Point) -> f64 {
        if self.is_ring() {
            if t.radial == 0.0 {
                return 0.0;
            }
            q.integrate(t, |y| [ring_green_all(t.radial, t.axial, y.radial, y.axial)[0]])[0]
        } else {
            if t.radial == 0.0 {
                return 0.0;
            }
            q.integrate(t, |y| [plane_kernel_all(t, y)[0]])[0]
        }
    }

    /// Stream value without error estimate. Rings accept `r < 0` as the
    /// mirror image (`ψ` is even in `r`), dipoles use odd reflection.
    pub fn stream_value(&self, p: Point) -> f64 {
        let (t, sign) = self.fold(p);
        let v = self.stream_only(&self.quad, t);
        if self.is_ring() {
            v
        } else {
            sign * v
        }
    }

    /// Stream value with an error estimate from a higher-order rule; fails
    /// when the estimate exceeds the tolerance.
    pub fn stream(&self, p: Point) -> Result<StreamValue> {
        self.check_point(p)?;
        let (t, sign) = self.fold(p);
        let folded = self.stream_only(&self.quad, t);
        let est_error = (self.stream_only(&self.check, t) - folded).abs();
        let value = if self.is_ring() { folded } else { sign * folded };
        if est_error > self.tolerance {
            return Err(Error::QuadratureTolerance {
                estimate: value,
                achieved: est_error,
                requested: self.tolerance,
            });
        }
        Ok(StreamValue { value, est_error })
    }

    fn check_point(&self, p: Point) -> Result<()> {
        if !p.is_finite() {
            return Err(Error::invalid("non-finite evaluation point"));
        }
        if self.is_ring() && p.radial < 0.0 {
            return Err(Error::invalid(format!(
                "ring fields need r >= 0, got {}",
                p.radial
            )));
        }
        Ok(())
    }

    /// On-axis axial speed of a ring at axial position `z`.
    pub fn axis_speed(&self, z: f64) -> f64 {
        let t = Point::new(z, 0.0);
        self.quad.integrate(t, |y| [axis_speed_kernel(z, y.radial, y.axial)])[0]
    }

    /// `(stream, velocity)` at `p`; velocity is `(v^z, v^r)` or `(u¹, u²)`.
    pub fn stream_and_velocity(&self, p: Point) -> (f64, [f64; 2]) {
        let (t, sign) = self.fold(p);
        if self.is_ring() {
            let r = t.radial;
            if r <= AXIS_BAND * self.scale {
                return (0.0, [self.axis_speed(t.axial), 0.0]);
            }
            let [psi, pz, pr] = self.raw(&self.quad, t);
            // v^r is odd in r, v^z even
            (psi, [pr / r, -sign * pz / r])
        } else {
            if t.radial == 0.0 {
                let [_, _, g2] = self.raw(&self.quad, t);
                return (0.0, [g2, 0.0]);
            }
            let [g, g1, g2] = self.raw(&self.quad, t);
            // 𝒢 odd in x2: ∂2𝒢 even, ∂1𝒢 odd
            (sign * g, [g2, -sign * g1])
        }
    }

    pub fn velocity(&self, p: Point) -> [f64; 2] {
        self.stream_and_velocity(p).1
    }

    /// `ψ − W r²/2` or `𝒢 − W x₂`.
    pub fn relative_stream(&self, p: Point) -> f64 {
        self.relative(p, self.stream_value(p))
    }

    #[inline]
    pub fn relative(&self, p: Point, stream: f64) -> f64 {
        let w = self.vortex.speed;
        if self.is_ring() {
            stream - 0.5 * w * p.radial * p.radial
        } else {
            stream - w * p.radial
        }
    }

    pub fn sample(&self, p: Point) -> FieldSample {
        let (stream, velocity) = self.stream_and_velocity(p);
        FieldSample {
            point: p,
            stream,
            velocity,
            relative_stream: self.relative(p, stream),
        }
    }

    /// Velocity in the frame moving with the vortex.
    pub fn moving_velocity(&self, p: Point) -> [f64; 2] {
        let [a, r] = self.velocity(p);
        [a - self.vortex.speed, r]
    }

    /// Fluid speed at the centre: `v^z(0,0)` or `u¹(0,0)`.
    pub fn center_speed(&self) -> f64 {
        if self.is_ring() {
            self.axis_speed(0.0)
        } else {
            self.velocity(Point::ORIGIN)[0]
        }
    }

    /// Sup over the circle `|x| = R` of `|ψ/r²|` (rings, sampled where
    /// `r ≥ R/√2`) or `|𝒢/x₂|` (dipoles), for each radius.
    pub fn decay_probe(&self, radii: &[f64]) -> Result<Vec<f64>> {
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("decay probe radii must increase"));
        }
        const N: usize = 64;
        let out = radii
            .iter()
            .map(|&big_r| {
                let (lo, hi) = if self.is_ring() {
                    (std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_2)
                } else {
                    (0.0, std::f64::consts::FRAC_PI_2)
                };
                (0..=N)
                    .map(|k| {
                        // θ measured from the axis; stay off x₂ = 0 where 𝒢/x₂ is 0/0
                        let th = lo + (hi - lo) * (k as f64 + 0.5) / (N as f64 + 1.0);
                        let p = Point::new(big_r * th.cos(), big_r * th.sin());
                        let s = self.stream_value(p);
                        if self.is_ring() {
                            (s / (p.radial * p.radial)).abs()
                        } else {
                            (s / p.radial).abs()
                        }
                    })
                    .fold(0.0, f64::max)
            })
            .collect();
        Ok(out)
    }

    /// Total circulation carried by the upper half-plane.
    pub fn circulation(&self) -> f64 {
        self.quad.total()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::vorticity::VorticitySpec;
    use std::f64::consts::PI;

    fn hill() -> FieldSolver {
        FieldSolver::new(TravelingVortex::hill(1.0, 1.0).unwrap())
    }

    /// Hill's closed-form stream in the lab frame: φ + W r²/2 with
    /// φ = (3W/4) r² (1 − ρ²) inside and (W r²/2)(1/ρ³ − 1) outside.
    fn hill_psi(p: Point) -> f64 {
        let w = 2.0 / 15.0;
        let rho2 = p.axial * p.axial + p.radial * p.radial;
        let r2 = p.radial * p.radial;
        let phi = if rho2 < 1.0 {
            0.75 * w * r2 * (1.0 - rho2)
        } else {
            0.5 * w * r2 * (rho2.powf(-1.5) - 1.0)
        };
        phi + 0.5 * w * r2
    }

    #[test]
    fn hill_stream_matches_closed_form() {
        let s = hill();
        for p in [
            Point::new(0.0, 0.5),
            Point::new(0.3, 0.2),
            Point::new(-0.7, 0.7),
            Point::new(0.0, 1.0),
            Point::new(1.5, 0.4),
            Point::new(0.1, 2.0),
        ] {
            let v = s.stream(p).unwrap();
            assert!((v.value - hill_psi(p)).abs() < 1e-10, "{p:?}: {} vs {}", v.value, hill_psi(p));
        }
    }

    #[test]
    fn hill_axis_speed_is_five_halves_w() {
        // lab-frame centre speed from the closed form: ∂_rψ/r at r → 0,
        // z = 0 gives (3W/2) + W = 5W/2
        let s = hill();
        assert!((s.axis_speed(0.0) - 2.5 * 2.0 / 15.0).abs() < 1e-10);
        assert!(s.axis_speed(0.0) > s.axis_speed(0.5));
        assert!(s.axis_speed(0.5) > s.axis_speed(1.0));
    }

    #[test]
    fn hill_velocity_matches_closed_form_derivatives() {
        let s = hill();
        let h = 1e-5;
        for p in [Point::new(0.2, 0.3), Point::new(-0.4, 0.8), Point::new(1.2, 0.5)] {
            let [vz, vr] = s.velocity(p);
            let dr = (hill_psi(Point::new(p.axial, p.radial + h)) - hill_psi(Point::new(p.axial, p.radial - h))) / (2.0 * h);
            let dz = (hill_psi(Point::new(p.axial + h, p.radial)) - hill_psi(Point::new(p.axial - h, p.radial))) / (2.0 * h);
            assert!((vz - dr / p.radial).abs() < 1e-8, "{p:?}");
            assert!((vr + dz / p.radial).abs() < 1e-8, "{p:?}");
        }
    }

    #[test]
    fn ring_axis_values_vanish() {
        let s = FieldSolver::new(
            TravelingVortex::new(VorticitySpec::gaussian_ring(1.0, 1.0, 0.1).unwrap(), 0.3).unwrap(),
        );
        assert_eq!(s.stream_value(Point::new(0.4, 0.0)), 0.0);
        assert_eq!(s.relative_stream(Point::new(-2.0, 0.0)), 0.0);
    }

    #[test]
    fn dipole_stream_is_odd() {
        let s = FieldSolver::new(
            TravelingVortex::new(VorticitySpec::gaussian_pair(1.0, 1.0, 0.2).unwrap(), 0.1).unwrap(),
        );
        let p = Point::new(0.3, 0.8);
        assert_eq!(s.stream_value(p), -s.stream_value(p.reflected()));
        assert_eq!(s.stream_value(Point::new(0.7, 0.0)), 0.0);
        assert!(s.velocity(Point::new(0.0, 0.6))[1].abs() < 1e-12);
    }

    #[test]
    fn patch_pair_centre_speed_point_vortex_limit() {
        let (gamma, d) = (1.0, 1.0);
        let spec = VorticitySpec::patch_pair_with_circulation(gamma, d, d / 50.0).unwrap();
        let w = gamma / (4.0 * PI * d);
        let s = FieldSolver::new(TravelingVortex::new(spec, w).unwrap());
        // uniform disks act exactly as point vortices outside themselves
        assert!((s.center_speed() - gamma / (PI * d)).abs() < 1e-10);
    }

    #[test]
    fn lamb_center_speed_closed_form() {
        let s = FieldSolver::new(TravelingVortex::lamb(1.0, 1.0).unwrap());
        let j0 = libm::j0(crate::field::vorticity::BESSEL_J1_FIRST_ZERO);
        let exact = 1.0 - 1.0 / j0;
        assert!((s.center_speed() - exact).abs() < 1e-9, "{} vs {exact}", s.center_speed());
    }
}
