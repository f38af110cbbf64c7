//! Vorticity distributions of traveling dipoles (planar, odd in `x2`) and of
//! axisymmetric rings (relative vorticity `ξ = ω^θ / r` on the meridional
//! half-plane).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::grid::GriddedField;
use crate::error::{Error, Result};
use crate::point::{BoundingBox, Point};

/// Gaussian tails below this fraction of the peak are set to zero, which
/// makes the support literally bounded.
pub const SUPPORT_CUTOFF: f64 = 1e-14;

/// First positive zero of the Bessel function `J1`.
pub const BESSEL_J1_FIRST_ZERO: f64 = 3.831_705_970_207_512_3;

/// Radius, in units of the Gaussian width, where the profile falls to
/// [`SUPPORT_CUTOFF`].
pub fn gaussian_truncation_factor() -> f64 {
    (2.0 * (1.0 / SUPPORT_CUTOFF).ln()).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    /// Planar dipole, odd under `x2 -> -x2`.
    Dipole,
    /// Axisymmetric ring on the meridional half-plane `r >= 0`.
    Ring,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// `ξ = amplitude` on the ball of the given radius.
    HillBall { amplitude: f64, radius: f64 },
    /// Chaplygin–Lamb dipole of the given radius translating at `speed`.
    LambDipole { radius: f64, speed: f64 },
    /// Uniform disks of vorticity `±strength` centred at `(0, ±offset)`.
    PatchPair {
        strength: f64,
        offset: f64,
        patch_radius: f64,
    },
    /// Gaussian cross-section centred at `(0, ring_radius)`, normalised to
    /// the given circulation `∫ ξ r dr dz`.
    GaussianRing {
        circulation: f64,
        ring_radius: f64,
        core_width: f64,
    },
    /// Gaussian centred at `(0, offset)`, normalised to the given
    /// circulation over the upper half-plane.
    GaussianPair {
        circulation: f64,
        offset: f64,
        core_width: f64,
    },
    Gridded(GriddedField),
}

impl Profile {
    fn name(&self) -> &'static str {
        match self {
            Profile::HillBall { .. } => "hill_ball",
            Profile::LambDipole { .. } => "lamb_dipole",
            Profile::PatchPair { .. } => "patch_pair",
            Profile::GaussianRing { .. } => "gaussian_ring",
            Profile::GaussianPair { .. } => "gaussian_pair",
            Profile::Gridded(_) => "gridded",
        }
    }
}

/// Precomputed constants derived from the profile parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Prepared {
    None,
    Lamb { k: f64, coef: f64 },
    Gaussian { amplitude: f64, cutoff2: f64 },
}

/// A disk boundary across which the vorticity jumps by `jump`
/// (inside minus outside).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JumpCurve {
    pub center: Point,
    pub radius: f64,
    pub theta: (f64, f64),
    pub jump: f64,
}

/// How the support is laid out for quadrature.
#[derive(Clone, Debug, PartialEq)]
pub enum SupportLayout {
    /// Disk sector about `center`, `(ρ, θ)` with `axial = ρ cos θ`,
    /// `radial = ρ sin θ` relative to the centre.
    Polar {
        center: Point,
        rho_max: f64,
        theta: (f64, f64),
        splits: (usize, usize),
    },
    /// Rectangle split into a regular array of panels.
    Cartesian {
        bbox: BoundingBox,
        splits: (usize, usize),
    },
    /// One panel per grid cell.
    Cells { axial: Vec<f64>, radial: Vec<f64> },
}

/// Pointwise vorticity with the out-of-support flag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VorticityValue {
    pub value: f64,
    pub outside_support: bool,
}

#[derive(Serialize, Deserialize)]
struct SpecDoc {
    #[serde(flatten)]
    profile: Profile,
    geometry: Geometry,
}

/// A validated vorticity distribution together with its geometry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecDoc", into = "SpecDoc")]
pub struct VorticitySpec {
    profile: Profile,
    geometry: Geometry,
    prepared: Prepared,
}

impl TryFrom<SpecDoc> for VorticitySpec {
    type Error = Error;
    fn try_from(doc: SpecDoc) -> Result<Self> {
        VorticitySpec::new(doc.profile, doc.geometry)
    }
}

impl From<VorticitySpec> for SpecDoc {
    fn from(s: VorticitySpec) -> Self {
        SpecDoc {
            profile: s.profile,
            geometry: s.geometry,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

impl VorticitySpec {
    pub fn new(profile: Profile, geometry: Geometry) -> Result<Self> {
        let expected = match &profile {
            Profile::HillBall { .. } | Profile::GaussianRing { .. } => Some(Geometry::Ring),
            Profile::LambDipole { .. }
            | Profile::PatchPair { .. }
            | Profile::GaussianPair { .. } => Some(Geometry::Dipole),
            Profile::Gridded(_) => None,
        };
        if let Some(g) = expected {
            if g != geometry {
                return Err(Error::invalid(format!(
                    "{} requires {:?} geometry",
                    profile.name(),
                    g
                )));
            }
        }
        let trunc = gaussian_truncation_factor();
        let prepared = match &profile {
            Profile::HillBall { amplitude, radius } => {
                positive("amplitude", *amplitude)?;
                positive("radius", *radius)?;
                Prepared::None
            }
            Profile::LambDipole { radius, speed } => {
                positive("radius", *radius)?;
                positive("speed", *speed)?;
                let k = BESSEL_J1_FIRST_ZERO / radius;
                let coef = -2.0 * speed * k / libm::j0(BESSEL_J1_FIRST_ZERO);
                Prepared::Lamb { k, coef }
            }
            Profile::PatchPair {
                strength,
                offset,
                patch_radius,
            } => {
                positive("strength", *strength)?;
                positive("offset", *offset)?;
                positive("patch_radius", *patch_radius)?;
                if patch_radius > offset {
                    return Err(Error::invalid(format!(
                        "patch radius {patch_radius} exceeds offset {offset}: patches would cross the axis"
                    )));
                }
                Prepared::None
            }
            Profile::GaussianRing {
                circulation,
                ring_radius,
                core_width,
            } => {
                positive("circulation", *circulation)?;
                positive("ring_radius", *ring_radius)?;
                positive("core_width", *core_width)?;
                let (s, r0) = (*core_width, *ring_radius);
                // ∫_{-∞}^{∞} e^{-z²/2σ²} dz · ∫_0^∞ r e^{-(r-R)²/2σ²} dr
                let radial = s * s * (-r0 * r0 / (2.0 * s * s)).exp()
                    + r0 * s * (0.5 * PI).sqrt() * (1.0 + libm::erf(r0 / (2f64.sqrt() * s)));
                let norm = (2.0 * PI).sqrt() * s * radial;
                Prepared::Gaussian {
                    amplitude: circulation / norm,
                    cutoff2: (trunc * s).powi(2),
                }
            }
            Profile::GaussianPair {
                circulation,
                offset,
                core_width,
            } => {
                positive("circulation", *circulation)?;
                positive("offset", *offset)?;
                positive("core_width", *core_width)?;
                let s = *core_width;
                let norm = PI * s * s * (1.0 + libm::erf(offset / (2f64.sqrt() * s)));
                Prepared::Gaussian {
                    amplitude: circulation / norm,
                    cutoff2: (trunc * s).powi(2),
                }
            }
            Profile::Gridded(_) => Prepared::None,
        };
        Ok(VorticitySpec {
            profile,
            geometry,
            prepared,
        })
    }

    pub fn hill_ball(amplitude: f64, radius: f64) -> Result<Self> {
        Self::new(Profile::HillBall { amplitude, radius }, Geometry::Ring)
    }

    pub fn lamb_dipole(radius: f64, speed: f64) -> Result<Self> {
        Self::new(Profile::LambDipole { radius, speed }, Geometry::Dipole)
    }

    pub fn patch_pair(strength: f64, offset: f64, patch_radius: f64) -> Result<Self> {
        Self::new(
            Profile::PatchPair {
                strength,
                offset,
                patch_radius,
            },
            Geometry::Dipole,
        )
    }

    /// Patch pair whose upper patch carries circulation `circulation`.
    pub fn patch_pair_with_circulation(circulation: f64, offset: f64, patch_radius: f64) -> Result<Self> {
        Self::patch_pair(circulation / (PI * patch_radius * patch_radius), offset, patch_radius)
    }

    pub fn gaussian_ring(circulation: f64, ring_radius: f64, core_width: f64) -> Result<Self> {
        Self::new(
            Profile::GaussianRing {
                circulation,
                ring_radius,
                core_width,
            },
            Geometry::Ring,
        )
    }

    pub fn gaussian_pair(circulation: f64, offset: f64, core_width: f64) -> Result<Self> {
        Self::new(
            Profile::GaussianPair {
                circulation,
                offset,
                core_width,
            },
            Geometry::Dipole,
        )
    }

    pub fn gridded(field: GriddedField, geometry: Geometry) -> Result<Self> {
        Self::new(Profile::Gridded(field), geometry)
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn kind_name(&self) -> &'static str {
        self.profile.name()
    }

    /// Whether the profile is Steiner-symmetric by construction.
    pub fn is_steiner_primitive(&self) -> bool {
        !matches!(self.profile, Profile::Gridded(_))
    }

    /// Pointwise vorticity. Dipoles are odd-reflected below the axis.
    pub fn evaluate(&self, p: Point) -> Result<VorticityValue> {
        if !p.is_finite() {
            return Err(Error::invalid("non-finite evaluation point"));
        }
        if self.geometry == Geometry::Ring && p.radial < 0.0 {
            return Err(Error::invalid(format!(
                "ring vorticity needs r >= 0, got {}",
                p.radial
            )));
        }
        let upper = Point::new(p.axial, p.radial.abs());
        let outside_support = !self.bounding_box().contains(upper);
        Ok(VorticityValue {
            value: self.value(p),
            outside_support,
        })
    }

    /// Pointwise vorticity without argument checks.
    pub fn value(&self, p: Point) -> f64 {
        match self.geometry {
            Geometry::Ring => self.value_upper(p),
            Geometry::Dipole => {
                if p.radial > 0.0 {
                    self.value_upper(p)
                } else if p.radial < 0.0 {
                    -self.value_upper(p.reflected())
                } else {
                    0.0
                }
            }
        }
    }

    /// Value in the closed upper half-plane (no reflection).
    pub(crate) fn value_upper(&self, p: Point) -> f64 {
        match (&self.profile, self.prepared) {
            (Profile::HillBall { amplitude, radius }, _) => {
                if p.axial * p.axial + p.radial * p.radial < radius * radius {
                    *amplitude
                } else {
                    0.0
                }
            }
            (Profile::LambDipole { radius, .. }, Prepared::Lamb { k, coef }) => {
                let rho = p.norm();
                if rho < *radius {
                    coef * bessel_ratio(k, rho) * p.radial
                } else {
                    0.0
                }
            }
            (
                Profile::PatchPair {
                    strength,
                    offset,
                    patch_radius,
                },
                _,
            ) => {
                let d2 = p.axial * p.axial + (p.radial - offset).powi(2);
                if d2 < patch_radius * patch_radius {
                    *strength
                } else {
                    0.0
                }
            }
            (
                Profile::GaussianRing {
                    ring_radius: c,
                    core_width,
                    ..
                }
                | Profile::GaussianPair {
                    offset: c,
                    core_width,
                    ..
                },
                Prepared::Gaussian { amplitude, cutoff2 },
            ) => {
                let d2 = p.axial * p.axial + (p.radial - c).powi(2);
                if d2 < cutoff2 {
                    amplitude * (-d2 / (2.0 * core_width * core_width)).exp()
                } else {
                    0.0
                }
            }
            (Profile::Gridded(g), _) => g.interpolate(p).unwrap_or(0.0),
            _ => unreachable!("profile and prepared constants out of sync"),
        }
    }

    /// Gradient of the smooth part of the profile in the upper half-plane.
    /// Jumps across patch boundaries are reported by [`Self::jump_curves`].
    pub fn gradient_upper(&self, p: Point) -> [f64; 2] {
        match (&self.profile, self.prepared) {
            (Profile::HillBall { .. } | Profile::PatchPair { .. }, _) => [0.0, 0.0],
            (Profile::LambDipole { radius, .. }, Prepared::Lamb { k, coef }) => {
                let rho = p.norm();
                if rho >= *radius {
                    return [0.0, 0.0];
                }
                let g = bessel_ratio(k, rho);
                let x = k * rho;
                // g'(ρ) / ρ, so that ∇g = (g'/ρ) p
                let gp_over_rho = if x < 1e-4 {
                    -k.powi(4) / 8.0
                } else {
                    (k * libm::j0(x) - 2.0 * libm::j1(x) / rho) / (rho * rho)
                };
                [
                    coef * gp_over_rho * p.axial * p.radial,
                    coef * (gp_over_rho * p.radial * p.radial + g),
                ]
            }
            (
                Profile::GaussianRing {
                    ring_radius: c,
                    core_width,
                    ..
                }
                | Profile::GaussianPair {
                    offset: c,
                    core_width,
                    ..
                },
                _,
            ) => {
                let v = self.value_upper(p);
                let s2 = core_width * core_width;
                [-p.axial / s2 * v, -(p.radial - c) / s2 * v]
            }
            (Profile::Gridded(g), _) => g.gradient(p),
            _ => unreachable!(),
        }
    }

    pub fn jump_curves(&self) -> Vec<JumpCurve> {
        match &self.profile {
            Profile::HillBall { amplitude, radius } => vec![JumpCurve {
                center: Point::ORIGIN,
                radius: *radius,
                theta: (0.0, PI),
                jump: *amplitude,
            }],
            Profile::PatchPair {
                strength,
                offset,
                patch_radius,
            } => vec![JumpCurve {
                center: Point::new(0.0, *offset),
                radius: *patch_radius,
                theta: (-PI, PI),
                jump: *strength,
            }],
            _ => Vec::new(),
        }
    }

    /// Bounding box of the support in the upper half-plane.
    pub fn bounding_box(&self) -> BoundingBox {
        let trunc = gaussian_truncation_factor();
        match &self.profile {
            Profile::HillBall { radius, .. } | Profile::LambDipole { radius, .. } => BoundingBox {
                axial_min: -radius,
                axial_max: *radius,
                radial_min: 0.0,
                radial_max: *radius,
            },
            Profile::PatchPair {
                offset,
                patch_radius,
                ..
            } => BoundingBox {
                axial_min: -patch_radius,
                axial_max: *patch_radius,
                radial_min: offset - patch_radius,
                radial_max: offset + patch_radius,
            },
            Profile::GaussianRing {
                ring_radius: c,
                core_width,
                ..
            }
            | Profile::GaussianPair {
                offset: c,
                core_width,
                ..
            } => {
                let h = trunc * core_width;
                BoundingBox {
                    axial_min: -h,
                    axial_max: h,
                    radial_min: (c - h).max(0.0),
                    radial_max: c + h,
                }
            }
            Profile::Gridded(g) => g.bounding_box(),
        }
    }

    /// Largest distance of the support from the origin.
    pub fn support_radius(&self) -> f64 {
        self.bounding_box().outer_radius()
    }

    /// Largest vorticity magnitude, used to scale tolerances.
    pub fn peak(&self) -> f64 {
        match (&self.profile, self.prepared) {
            (Profile::HillBall { amplitude, .. }, _) => *amplitude,
            (Profile::PatchPair { strength, .. }, _) => *strength,
            (_, Prepared::Gaussian { amplitude, .. }) => amplitude,
            (Profile::LambDipole { radius, .. }, Prepared::Lamb { .. }) => {
                // |ω| peaks inside the disk; a coarse scan suffices for scaling
                let mut m: f64 = 0.0;
                for i in 0..=64 {
                    let r = radius * i as f64 / 64.0;
                    m = m.max(self.value_upper(Point::new(0.0, r)).abs());
                }
                m
            }
            (Profile::Gridded(g), _) => g.max_value(),
            _ => unreachable!(),
        }
    }

    pub fn layout(&self) -> SupportLayout {
        match &self.profile {
            Profile::HillBall { radius, .. } | Profile::LambDipole { radius, .. } => {
                SupportLayout::Polar {
                    center: Point::ORIGIN,
                    rho_max: *radius,
                    theta: (0.0, PI),
                    splits: (2, 4),
                }
            }
            Profile::PatchPair {
                offset,
                patch_radius,
                ..
            } => SupportLayout::Polar {
                center: Point::new(0.0, *offset),
                rho_max: *patch_radius,
                theta: (-PI, PI),
                splits: (2, 4),
            },
            Profile::GaussianRing { core_width, .. } | Profile::GaussianPair { core_width, .. } => {
                let bbox = self.bounding_box();
                let panel = 2.0 * core_width;
                let n = |w: f64| ((w / panel).ceil() as usize).max(1);
                SupportLayout::Cartesian {
                    bbox,
                    splits: (
                        n(bbox.axial_max - bbox.axial_min),
                        n(bbox.radial_max - bbox.radial_min),
                    ),
                }
            }
            Profile::Gridded(g) => SupportLayout::Cells {
                axial: g.axial_nodes().to_vec(),
                radial: g.radial_nodes().to_vec(),
            },
        }
    }

    /// Value of a named scalar parameter.
    pub fn parameter(&self, name: &str) -> Result<f64> {
        let v = match (&self.profile, name) {
            (Profile::HillBall { amplitude, .. }, "amplitude") => *amplitude,
            (Profile::HillBall { radius, .. }, "radius") => *radius,
            (Profile::LambDipole { radius, .. }, "radius") => *radius,
            (Profile::LambDipole { speed, .. }, "speed") => *speed,
            (Profile::PatchPair { strength, .. }, "strength") => *strength,
            (Profile::PatchPair { offset, .. }, "offset") => *offset,
            (Profile::PatchPair { patch_radius, .. }, "patch_radius") => *patch_radius,
            (Profile::GaussianRing { circulation, .. }, "circulation")
            | (Profile::GaussianPair { circulation, .. }, "circulation") => *circulation,
            (Profile::GaussianRing { ring_radius, .. }, "ring_radius") => *ring_radius,
            (Profile::GaussianPair { offset, .. }, "offset") => *offset,
            (Profile::GaussianRing { core_width, .. }, "core_width")
            | (Profile::GaussianPair { core_width, .. }, "core_width") => *core_width,
            _ => {
                return Err(Error::invalid(format!(
                    "{} has no parameter `{name}`",
                    self.kind_name()
                )))
            }
        };
        Ok(v)
    }

    /// Copy with one named scalar parameter replaced.
    pub fn with_parameter(&self, name: &str, value: f64) -> Result<Self> {
        self.parameter(name)?;
        let mut profile = self.profile.clone();
        match (&mut profile, name) {
            (Profile::HillBall { amplitude, .. }, "amplitude") => *amplitude = value,
            (Profile::HillBall { radius, .. }, "radius") => *radius = value,
            (Profile::LambDipole { radius, .. }, "radius") => *radius = value,
            (Profile::LambDipole { speed, .. }, "speed") => *speed = value,
            (Profile::PatchPair { strength, .. }, "strength") => *strength = value,
            (Profile::PatchPair { offset, .. }, "offset") => *offset = value,
            (Profile::PatchPair { patch_radius, .. }, "patch_radius") => *patch_radius = value,
            (Profile::GaussianRing { circulation, .. }, "circulation")
            | (Profile::GaussianPair { circulation, .. }, "circulation") => *circulation = value,
            (Profile::GaussianRing { ring_radius, .. }, "ring_radius") => *ring_radius = value,
            (Profile::GaussianPair { offset, .. }, "offset") => *offset = value,
            (Profile::GaussianRing { core_width, .. }, "core_width")
            | (Profile::GaussianPair { core_width, .. }, "core_width") => *core_width = value,
            _ => unreachable!(),
        }
        Self::new(profile, self.geometry)
    }

    /// Multiply the vorticity by `factor`, keeping the shape.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        positive("scale factor", factor)?;
        let mut profile = self.profile.clone();
        match &mut profile {
            Profile::HillBall { amplitude, .. } => *amplitude *= factor,
            Profile::LambDipole { speed, .. } => *speed *= factor,
            Profile::PatchPair { strength, .. } => *strength *= factor,
            Profile::GaussianRing { circulation, .. } | Profile::GaussianPair { circulation, .. } => {
                *circulation *= factor
            }
            Profile::Gridded(g) => {
                let t: Vec<[f64; 3]> = g
                    .triples()
                    .into_iter()
                    .map(|[a, r, v]| [a, r, v * factor])
                    .collect();
                *g = GriddedField::from_triples(&t)?;
            }
        }
        Self::new(profile, self.geometry)
    }
}

/// `J1(kρ) / ρ`, continuous at `ρ = 0`.
fn bessel_ratio(k: f64, rho: f64) -> f64 {
    let x = k * rho;
    if x < 1e-4 {
        k * (0.5 - x * x / 16.0)
    } else {
        libm::j1(x) / rho
    }
}

/// The pairing of a vorticity distribution with a traveling speed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TravelingVortex {
    pub vorticity: VorticitySpec,
    pub speed: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steadiness_residual: Option<f64>,
}

impl TravelingVortex {
    pub fn new(vorticity: VorticitySpec, speed: f64) -> Result<Self> {
        positive("traveling speed", speed)?;
        Ok(TravelingVortex {
            vorticity,
            speed,
            steadiness_residual: None,
        })
    }

    pub fn geometry(&self) -> Geometry {
        self.vorticity.geometry()
    }

    /// Hill's vortex with its classical speed `2 A a² / 15`.
    pub fn hill(amplitude: f64, radius: f64) -> Result<Self> {
        Self::new(
            VorticitySpec::hill_ball(amplitude, radius)?,
            2.0 * amplitude * radius * radius / 15.0,
        )
    }

    /// Chaplygin–Lamb dipole traveling at its own speed.
    pub fn lamb(radius: f64, speed: f64) -> Result<Self> {
        Self::new(VorticitySpec::lamb_dipole(radius, speed)?, speed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hill_values() {
        let s = VorticitySpec::hill_ball(1.0, 1.0).unwrap();
        assert_eq!(s.value(Point::new(0.0, 0.5)), 1.0);
        assert_eq!(s.value(Point::new(2.0, 0.0)), 0.0);
        let v = s.evaluate(Point::new(2.0, 0.0)).unwrap();
        assert!(v.outside_support);
        assert!(s.evaluate(Point::new(0.0, -0.1)).is_err());
    }

    #[test]
    fn gaussian_pair_is_odd() {
        let s = VorticitySpec::gaussian_pair(1.0, 1.0, 0.2).unwrap();
        let up = s.value(Point::new(0.0, 1.0));
        assert!(up > 0.0);
        assert_eq!(s.value(Point::new(0.0, -1.0)), -up);
        assert_eq!(s.value(Point::new(0.3, 0.0)), 0.0);
    }

    #[test]
    fn lamb_profile_vanishes_on_rim_and_is_positive_inside() {
        let s = VorticitySpec::lamb_dipole(1.0, 1.0).unwrap();
        assert!(s.value(Point::new(0.0, 0.5)) > 0.0);
        let rim = s.value(Point::new(0.0, 1.0 - 1e-12));
        assert!(rim.abs() < 1e-9);
        assert!(s.value(Point::new(0.2, -0.5)) < 0.0);
    }

    #[test]
    fn geometry_mismatch_and_bad_parameters_rejected() {
        assert!(VorticitySpec::new(
            Profile::HillBall {
                amplitude: 1.0,
                radius: 1.0
            },
            Geometry::Dipole
        )
        .is_err());
        assert!(VorticitySpec::hill_ball(f64::NAN, 1.0).is_err());
        assert!(VorticitySpec::patch_pair(1.0, 1.0, 1.5).is_err());
        assert!(VorticitySpec::gaussian_ring(1.0, 1.0, -0.1).is_err());
        assert!(TravelingVortex::new(VorticitySpec::hill_ball(1.0, 1.0).unwrap(), 0.0).is_err());
    }

    #[test]
    fn gaussian_support_is_truncated() {
        let s = VorticitySpec::gaussian_ring(1.0, 1.0, 0.05).unwrap();
        let c = gaussian_truncation_factor();
        assert!(s.value(Point::new(0.0, 1.0 + 0.999 * c * 0.05)) > 0.0);
        assert_eq!(s.value(Point::new(0.0, 1.0 + 1.001 * c * 0.05)), 0.0);
        let peak = s.value(Point::new(0.0, 1.0));
        let edge = s.value(Point::new(0.0, 1.0 + 0.999 * c * 0.05));
        assert!(edge / peak < 1.1e-14);
    }

    #[test]
    fn lamb_gradient_matches_finite_difference() {
        let s = VorticitySpec::lamb_dipole(1.0, 1.0).unwrap();
        let h = 1e-6;
        for p in [Point::new(0.3, 0.4), Point::new(-0.5, 0.1), Point::new(1e-7, 1e-7)] {
            let g = s.gradient_upper(p);
            let fa = (s.value(Point::new(p.axial + h, p.radial)) - s.value(Point::new(p.axial - h, p.radial))) / (2.0 * h);
            let fr = (s.value(Point::new(p.axial, p.radial + h)) - s.value(Point::new(p.axial, p.radial - h))) / (2.0 * h);
            assert!((g[0] - fa).abs() < 1e-6, "{p:?}");
            assert!((g[1] - fr).abs() < 1e-6, "{p:?}");
        }
    }

    #[test]
    fn json_roundtrip() {
        let s = VorticitySpec::gaussian_ring(1.0, 2f64.sqrt(), 0.1).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"kind\":\"gaussian_ring\""));
        assert!(text.contains("\"geometry\":\"ring\""));
        let back: VorticitySpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let bad = r#"{"kind":"hill_ball","amplitude":1.0,"radius":-1.0,"geometry":"ring"}"#;
        assert!(serde_json::from_str::<VorticitySpec>(bad).is_err());
    }

    #[test]
    fn parameter_substitution() {
        let s = VorticitySpec::gaussian_ring(1.0, 1.0, 0.1).unwrap();
        let t = s.with_parameter("core_width", 0.2).unwrap();
        assert_eq!(t.parameter("core_width").unwrap(), 0.2);
        assert!(s.with_parameter("offset", 1.0).is_err());
    }
}
