//! Escape of particles behind the vortex whose level stays below the axis
//! profile: checks the hypotheses, then confirms by tracing.

use serde::{Deserialize, Serialize};

use super::field::MovingFrameField;
use super::trace::{escape_asymptote, trace, TraceOptions, Verdict};
use crate::error::Result;
use crate::point::Point;

/// Samples of the axis condition on the open interval.
const AXIS_SAMPLES: usize = 200;
/// Allowed relative distance between the final height and the asymptote.
pub const ASYMPTOTE_TOLERANCE: f64 = 0.02;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscapeReport {
    pub seed: Point,
    pub phi_seed: f64,
    pub hypotheses_hold: bool,
    /// Hypotheses that failed, in words.
    pub failed: Vec<String>,
    pub asymptote: Option<f64>,
    pub verdict: Option<Verdict>,
    pub final_point: Option<Point>,
    pub relative_error: Option<f64>,
    pub confirmed: bool,
}

/// Checks that `seed` lies behind the vortex (`axial < 0`, `radial > 0`),
/// that `γ′ = φ(seed) < 0`, and that `φ(0,s) > γ′` on `(s*, seed.radial)`
/// where `s*` is the asymptote. If all hold, traces to `horizon` and
/// confirms escape with the final height within 2% of `s*`.
pub fn verify_escape<F: MovingFrameField + ?Sized>(
    field: &F,
    seed: Point,
    horizon: f64,
    tolerance: f64,
) -> Result<EscapeReport> {
    let phi = field.relative_stream(seed)?;
    let mut failed = Vec::new();
    if !(seed.axial < 0.0 && seed.radial > 0.0) {
        failed.push("seed not in the rear quadrant".to_string());
    }
    if !(phi < 0.0) {
        failed.push(format!("level {phi:e} is not negative"));
    }
    let asymptote = escape_asymptote(field.is_ring(), phi, field.speed());
    if let Some(a) = asymptote {
        let top = seed.radial;
        for k in 0..AXIS_SAMPLES {
            if top <= a {
                break;
            }
            let s = a + (top - a) * (k as f64 + 0.5) / AXIS_SAMPLES as f64;
            let on_axis = field.relative_stream(Point::new(0.0, s))?;
            if !(on_axis > phi) {
                failed.push(format!(
                    "axis profile {on_axis:e} at s = {s} does not exceed the level"
                ));
                break;
            }
        }
    }
    let mut report = EscapeReport {
        seed,
        phi_seed: phi,
        hypotheses_hold: failed.is_empty(),
        failed,
        asymptote,
        verdict: None,
        final_point: None,
        relative_error: None,
        confirmed: false,
    };
    if !report.hypotheses_hold {
        return Ok(report);
    }
    let a = asymptote.expect("negative level has an asymptote");
    let opts = TraceOptions {
        detect_closed_orbit: false,
        stop_on_escape: false,
        record: false,
        ..TraceOptions::new(horizon).with_tolerance(tolerance)
    };
    let tr = trace(field, seed, &opts)?;
    let rel = (tr.end.radial - a).abs() / a;
    report.verdict = Some(tr.verdict);
    report.final_point = Some(tr.end);
    report.relative_error = Some(rel);
    report.confirmed = tr.verdict == Verdict::Escaping && rel <= ASYMPTOTE_TOLERANCE;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::vorticity::TravelingVortex;
    use crate::solver::FieldSolver;
    use crate::tracer::field::QuadratureField;

    #[test]
    fn hill_interior_seed_fails_hypotheses() {
        let solver = FieldSolver::new(TravelingVortex::hill(1.0, 1.0).unwrap());
        let rep = verify_escape(&QuadratureField::new(&solver), Point::new(-0.2, 0.5), 50.0, 1e-9)
            .unwrap();
        assert!(!rep.hypotheses_hold);
        assert!(!rep.confirmed);
        assert!(rep.verdict.is_none());
    }

    #[test]
    fn lamb_rear_seed_reaches_asymptote() {
        let solver = FieldSolver::new(TravelingVortex::lamb(1.0, 1.0).unwrap());
        let field = QuadratureField::new(&solver);
        let rep = verify_escape(&field, Point::new(-1.2, 0.3), 60.0, 1e-9).unwrap();
        assert!(rep.hypotheses_hold, "{:?}", rep.failed);
        assert!(rep.confirmed, "{rep:?}");
        assert!(rep.relative_error.unwrap() < 1e-3);
    }
}
