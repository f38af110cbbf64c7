//! The symmetry axis of the cross-section: the core interval `(R₁, R₂)` and
//! the sampled profile of relative stream and axial speed along it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::vorticity::VorticitySpec;
use crate::point::Point;
use crate::roots::bisect;
use crate::solver::FieldSolver;

/// Scan density for the vorticity along the axis.
const CORE_SCAN: usize = 4000;

/// Positive interval `(R₁, R₂)` of the vorticity on the line `z = 0`
/// (`x₁ = 0` for dipoles), endpoints located by bisection.
pub fn core_axis_interval(spec: &VorticitySpec) -> Result<(f64, f64)> {
    let bbox = spec.bounding_box();
    let top = bbox.radial_max * 1.05 + f64::EPSILON;
    let tol = 1e-10 * top;
    let f = |s: f64| spec.value(Point::new(0.0, s));
    // s = 0 itself is on the axis where dipole profiles vanish by oddness
    let first = tol;
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    let mut prev_s = first;
    let mut prev_pos = f(first) > 0.0;
    let mut start = if prev_pos { Some(0.0) } else { None };
    for k in 1..=CORE_SCAN {
        let s = first + (top - first) * k as f64 / CORE_SCAN as f64;
        let pos = f(s) > 0.0;
        if pos != prev_pos {
            let edge = bisect(
                |x| if f(x) > 0.0 { 1.0 } else { -1.0 },
                prev_s,
                s,
                tol,
                "core edge on axis",
            )?;
            if pos {
                start = Some(edge);
            } else if let Some(a) = start.take() {
                intervals.push((a, edge));
            }
        }
        prev_s = s;
        prev_pos = pos;
    }
    if let Some(a) = start {
        intervals.push((a, top));
    }
    if intervals.len() != 1 {
        return Err(Error::CoreNotSimplyConnected {
            count: intervals.len(),
        });
    }
    Ok(intervals[0])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisSample {
    pub s: f64,
    pub relative_stream: f64,
    pub axial_speed: f64,
}

/// Relative stream and axial speed along the line `z = 0` (`x₁ = 0`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisProfile {
    pub samples: Vec<AxisSample>,
    pub core_interval: (f64, f64),
    pub inner_radius: Option<f64>,
    pub outer_radius: f64,
    pub level: f64,
}

/// Samples at `n` points equally spaced in `(0, top]`.
pub fn sample_axis(solver: &FieldSolver, top: f64, n: usize) -> Vec<AxisSample> {
    (1..=n)
        .map(|k| {
            let s = top * k as f64 / n as f64;
            let smp = solver.sample(Point::new(0.0, s));
            AxisSample {
                s,
                relative_stream: smp.relative_stream,
                axial_speed: smp.velocity[0],
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::vorticity::gaussian_truncation_factor;

    #[test]
    fn hill_interval() {
        let spec = VorticitySpec::hill_ball(1.0, 1.0).unwrap();
        let (a, b) = core_axis_interval(&spec).unwrap();
        assert_eq!(a, 0.0);
        assert!((b - 1.0).abs() < 1e-8);
    }

    #[test]
    fn gaussian_interval_matches_cutoff() {
        let sigma = 0.05;
        let spec = VorticitySpec::gaussian_ring(1.0, 1.0, sigma).unwrap();
        let (a, b) = core_axis_interval(&spec).unwrap();
        // exp(-d²/2σ²) = 1e-14 at d = σ sqrt(2 ln 1e14)
        let c = (2.0 * 1e14f64.ln()).sqrt();
        assert!((c - gaussian_truncation_factor()).abs() < 1e-14);
        assert!((a - (1.0 - c * sigma)).abs() < 1e-8);
        assert!((b - (1.0 + c * sigma)).abs() < 1e-8);
    }

    #[test]
    fn patch_interval() {
        let spec = VorticitySpec::patch_pair(1.0, 1.0, 0.1).unwrap();
        let (a, b) = core_axis_interval(&spec).unwrap();
        assert!((a - 0.9).abs() < 1e-8 && (b - 1.1).abs() < 1e-8);
    }

    #[test]
    fn two_intervals_rejected() {
        use crate::field::grid::GriddedField;
        use crate::field::vorticity::Geometry;
        let axial = vec![-1.0, 0.0, 1.0];
        let radial: Vec<f64> = (0..7).map(|j| j as f64 * 0.5).collect();
        let mut values = Vec::new();
        for _ in &axial {
            for j in 0..7 {
                values.push(if j == 1 || j == 4 { 1.0 } else { 0.0 });
            }
        }
        let g = GriddedField::new(axial, radial, values).unwrap();
        let spec = VorticitySpec::gridded(g, Geometry::Ring).unwrap();
        assert!(matches!(
            core_axis_interval(&spec),
            Err(Error::CoreNotSimplyConnected { count: 2 })
        ));
    }
}
