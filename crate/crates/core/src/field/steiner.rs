//! Sampled check of Steiner symmetry: even in the axial coordinate and
//! non-increasing in its absolute value.

use serde::{Deserialize, Serialize};

use super::vorticity::VorticitySpec;
use crate::point::Point;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteinerReport {
    pub is_symmetric: bool,
    /// Largest positive increment of the profile moving away from the
    /// symmetry line, or the largest evenness defect if that is larger.
    pub max_violation: f64,
    pub resolution: usize,
}

/// Relative tolerance on violations, in units of the profile peak.
pub const STEINER_TOLERANCE: f64 = 1e-12;

/// Samples the profile on a `resolution × resolution` grid over the upper
/// half of the support.
pub fn check_steiner(spec: &VorticitySpec, resolution: usize) -> SteinerReport {
    let n = resolution.max(2);
    let bbox = spec.bounding_box();
    // pad so that shifted grids are scanned past their own edge
    let half = bbox.axial_half_width() * 1.05;
    let (r0, r1) = (bbox.radial_min, bbox.radial_max);
    let mut worst: f64 = 0.0;
    for j in 0..=n {
        // stay off r = 0 where dipole profiles are odd-reflected to zero
        let t = (j as f64 + 0.5) / (n as f64 + 1.0);
        let r = r0 + (r1 - r0) * t;
        let mut prev = spec.value(Point::new(0.0, r));
        for i in 1..=n {
            let z = half * i as f64 / n as f64;
            let plus = spec.value(Point::new(z, r));
            let minus = spec.value(Point::new(-z, r));
            worst = worst.max(plus - prev).max((plus - minus).abs());
            prev = plus;
        }
    }
    let scale = spec.peak().abs().max(f64::MIN_POSITIVE);
    SteinerReport {
        is_symmetric: worst <= STEINER_TOLERANCE * scale,
        max_violation: worst,
        resolution: n,
    }
}
