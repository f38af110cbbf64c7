//! Adaptive integration of single particle paths with conservation
//! monitoring, escape and closed-orbit detection.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use super::field::MovingFrameField;
use super::rk45::{self, State};
use crate::error::{Error, Result};
use crate::point::Point;

/// Relative tolerance per step.
pub const DEFAULT_ODE_TOLERANCE: f64 = 1e-9;
/// Escape is declared beyond this multiple of the support radius, for
/// non-positive `φ` (the symmetry line itself carries `φ = 0`).
pub const ESCAPE_FACTOR: f64 = 5.0;
/// Closed orbits return within this fraction of the support scale.
pub const RETURN_FACTOR: f64 = 1e-4;
pub const MAX_STEPS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    pub horizon: f64,
    pub tolerance: f64,
    pub max_steps: usize,
    pub detect_closed_orbit: bool,
    /// Stop as soon as the escape criterion holds; otherwise integrate to
    /// the horizon and report the verdict at the end.
    pub stop_on_escape: bool,
    /// Keep every accepted node.
    pub record: bool,
}

impl TraceOptions {
    pub fn new(horizon: f64) -> Self {
        TraceOptions {
            horizon,
            tolerance: DEFAULT_ODE_TOLERANCE,
            max_steps: MAX_STEPS,
            detect_closed_orbit: true,
            stop_on_escape: true,
            record: true,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::invalid("trace horizon must be positive"));
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::invalid("ODE tolerance must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Bounded,
    Escaping,
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceNode {
    pub t: f64,
    pub point: Point,
    pub phi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamlineTrace {
    pub seed: Point,
    pub nodes: Vec<TraceNode>,
    pub phi_seed: f64,
    /// Largest `|φ(node) − φ(seed)| / (|φ(seed)| + W·scale²)` (`W·scale`
    /// for dipoles).
    pub max_phi_drift: f64,
    pub verdict: Verdict,
    /// `√(−2γ′/W)` (rings) or `−γ′/W` (dipoles) when `γ′ = φ(seed) < 0`.
    pub escape_asymptote: Option<f64>,
    pub closed_orbit_period: Option<f64>,
    pub final_time: f64,
    pub end: Point,
    pub steps: usize,
    pub diagnostic: Option<String>,
}

pub fn escape_asymptote(ring: bool, phi: f64, speed: f64) -> Option<f64> {
    (phi < 0.0).then(|| {
        if ring {
            (-2.0 * phi / speed).sqrt()
        } else {
            -phi / speed
        }
    })
}

/// Integrates `dp/dt = U(p)` from `seed`.
pub fn trace<F: MovingFrameField + ?Sized>(
    field: &F,
    seed: Point,
    opts: &TraceOptions,
) -> Result<StreamlineTrace> {
    integrate(field, seed, opts, 1.0, &mut |_, _| true)
}

/// Core loop. `direction = -1` integrates backwards in time; `visit` sees
/// every accepted node and stops the integration by returning `false`.
pub(crate) fn integrate<F: MovingFrameField + ?Sized>(
    field: &F,
    seed: Point,
    opts: &TraceOptions,
    direction: f64,
    visit: &mut dyn FnMut(f64, Point) -> bool,
) -> Result<StreamlineTrace> {
    opts.validate()?;
    if !seed.is_finite() || seed.radial < 0.0 {
        return Err(Error::invalid(format!(
            "seed ({}, {}) is not in the closed upper half-plane",
            seed.axial, seed.radial
        )));
    }
    let scale = field.support_scale();
    let escape_radius = ESCAPE_FACTOR * scale;
    let delta = RETURN_FACTOR * scale;
    let atol = opts.tolerance * scale;
    let norm = field.phi_scale();

    let (phi0, u0) = field.evaluate(seed)?;
    let speed0 = u0[0].hypot(u0[1]);
    let section = (speed0 > 0.0).then(|| [direction * u0[0] / speed0, direction * u0[1] / speed0]);

    let last_phi = Cell::new(phi0);
    let mut rhs = |y: State| -> Result<State> {
        let (phi, u) = field.evaluate(Point::new(y[0], y[1]))?;
        last_phi.set(phi);
        Ok([direction * u[0], direction * u[1]])
    };

    let mut nodes = Vec::new();
    if opts.record {
        nodes.push(TraceNode {
            t: 0.0,
            point: seed,
            phi: phi0,
        });
    }
    let mut y: State = [seed.axial, seed.radial];
    let mut f0: State = [direction * u0[0], direction * u0[1]];
    let mut t = 0.0;
    let mut h = if speed0 > 0.0 {
        (0.01 * scale / speed0).min(opts.horizon)
    } else {
        opts.horizon
    };
    let h_min = 1e-13 * opts.horizon;
    let mut steps = 0;
    let mut max_drift: f64 = 0.0;
    let mut escaped = false;
    let mut max_extent = seed.norm();
    let mut period = None;
    let mut diagnostic = None;
    let gap = |p: State, n: [f64; 2]| (p[0] - seed.axial) * n[0] + (p[1] - seed.radial) * n[1];

    while t < opts.horizon {
        if steps >= opts.max_steps {
            diagnostic = Some(format!("step limit {} reached at t = {t}", opts.max_steps));
            break;
        }
        let last = opts.horizon - t <= h;
        let h_try = if last { opts.horizon - t } else { h };
        let s = rk45::step(&mut rhs, y, f0, h_try)?;
        let err = rk45::error_norm(y, s.y, s.err, opts.tolerance, atol);
        if !(err <= 1.0) {
            h = h_try * if err.is_finite() { rk45::step_factor(err).min(1.0) } else { 0.2 };
            if h < h_min {
                diagnostic = Some(format!("step size underflow at t = {t}"));
                break;
            }
            continue;
        }
        let phi1 = last_phi.get();
        let t1 = if last { opts.horizon } else { t + h_try };
        steps += 1;
        max_drift = max_drift.max((phi1 - phi0).abs() / (phi0.abs() + norm));

        if let (true, Some(n)) = (opts.detect_closed_orbit, section) {
            if gap(y, n) < 0.0 && gap(s.y, n) >= 0.0 {
                let (mut lo, mut hi) = (0.0, 1.0);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if gap(rk45::hermite(y, f0, s.y, s.f, h_try, mid), n) < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let yc = rk45::hermite(y, f0, s.y, s.f, h_try, hi);
                let pc = Point::new(yc[0], yc[1]);
                if pc.dist(&seed) <= delta {
                    let tc = t + hi * h_try;
                    if opts.record {
                        let phic = field.relative_stream(pc)?;
                        max_drift = max_drift.max((phic - phi0).abs() / (phi0.abs() + norm));
                        nodes.push(TraceNode {
                            t: tc,
                            point: pc,
                            phi: phic,
                        });
                    }
                    t = tc;
                    y = yc;
                    period = Some(tc);
                    break;
                }
            }
        }

        t = t1;
        y = s.y;
        f0 = s.f;
        h = h_try * rk45::step_factor(err);
        let p = Point::new(y[0], y[1]);
        max_extent = max_extent.max(p.norm());
        if opts.record {
            nodes.push(TraceNode { t, point: p, phi: phi1 });
        }
        if !visit(t, p) {
            break;
        }
        if p.axial.abs() > escape_radius && phi1 <= 0.0 {
            escaped = true;
            if opts.stop_on_escape {
                break;
            }
        }
    }

    let verdict = if period.is_some() {
        Verdict::Bounded
    } else if escaped {
        Verdict::Escaping
    } else if diagnostic.is_some() {
        Verdict::Undecided
    } else if t >= opts.horizon && max_extent <= escape_radius {
        Verdict::Bounded
    } else if t >= opts.horizon {
        diagnostic = Some("left the bounding box without meeting the escape criterion".into());
        Verdict::Undecided
    } else {
        // stopped by the visitor
        Verdict::Undecided
    };
    Ok(StreamlineTrace {
        seed,
        nodes,
        phi_seed: phi0,
        max_phi_drift: max_drift,
        verdict,
        escape_asymptote: escape_asymptote(field.is_ring(), phi0, field.speed()),
        closed_orbit_period: period,
        final_time: t,
        end: Point::new(y[0], y[1]),
        steps,
        diagnostic,
    })
}

/// Integrates forward for `horizon`, then backward for the same elapsed time
/// and returns the distance to the seed together with the local tolerance
/// budget `atol + rtol·|seed| = tolerance · (scale + |seed|)` of the step
/// controller.
pub fn time_reversal_error<F: MovingFrameField + ?Sized>(
    field: &F,
    seed: Point,
    horizon: f64,
    tolerance: f64,
) -> Result<(f64, f64)> {
    let opts = TraceOptions {
        detect_closed_orbit: false,
        stop_on_escape: false,
        record: false,
        ..TraceOptions::new(horizon).with_tolerance(tolerance)
    };
    let fwd = integrate(field, seed, &opts, 1.0, &mut |_, _| true)?;
    if fwd.verdict == Verdict::Undecided && fwd.diagnostic.is_some() && fwd.final_time < horizon {
        return Err(Error::Precondition(format!(
            "forward trace stopped early: {}",
            fwd.diagnostic.unwrap_or_default()
        )));
    }
    let back_opts = TraceOptions {
        horizon: fwd.final_time,
        ..opts
    };
    let back = integrate(field, fwd.end, &back_opts, -1.0, &mut |_, _| true)?;
    let budget = tolerance * (field.support_scale() + seed.norm());
    Ok((back.end.dist(&seed), budget))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::vorticity::{TravelingVortex, VorticitySpec};
    use crate::solver::FieldSolver;
    use crate::tracer::field::{QuadratureField, TabulatedField};

    #[test]
    fn hill_interior_seed_closes() {
        let solver = FieldSolver::new(TravelingVortex::hill(1.0, 1.0).unwrap());
        let field = QuadratureField::new(&solver);
        let tr = trace(&field, Point::new(0.0, 0.5), &TraceOptions::new(200.0)).unwrap();
        assert_eq!(tr.verdict, Verdict::Bounded, "{:?}", tr.diagnostic);
        assert!(tr.closed_orbit_period.is_some());
        assert!(tr.max_phi_drift < 1e-6, "{}", tr.max_phi_drift);
        assert!(tr.end.dist(&tr.seed) <= RETURN_FACTOR);
    }

    #[test]
    fn hill_exterior_seed_escapes() {
        let solver = FieldSolver::new(TravelingVortex::hill(1.0, 1.0).unwrap());
        let field = TabulatedField::build(&solver, 6.0, 3.0).unwrap();
        let seed = Point::new(2.0, 0.8);
        let tr = trace(&field, seed, &TraceOptions::new(500.0)).unwrap();
        assert_eq!(tr.verdict, Verdict::Escaping);
        assert!(tr.end.axial < -5.0);
        assert!(tr.max_phi_drift < 1e-6);
        // passes over the ball: r stays above its far-field asymptote
        let a = tr.escape_asymptote.unwrap();
        assert!(tr.end.radial > a && tr.end.radial < 1.05 * a);
    }

    #[test]
    fn dipole_axis_is_invariant() {
        let solver = FieldSolver::new(TravelingVortex::lamb(1.0, 1.0).unwrap());
        let field = QuadratureField::new(&solver);
        let tr = trace(&field, Point::new(-1.5, 0.0), &TraceOptions::new(20.0)).unwrap();
        assert!(tr.nodes.iter().all(|n| n.point.radial == 0.0));
        assert_eq!(tr.verdict, Verdict::Escaping);
        // in front of the dipole the axis runs into the stagnation point
        let tr = trace(&field, Point::new(3.0, 0.0), &TraceOptions::new(20.0)).unwrap();
        assert!(tr.nodes.iter().all(|n| n.point.radial == 0.0));
        assert_eq!(tr.verdict, Verdict::Bounded);
        assert!((tr.end.axial - 1.0).abs() < 0.05, "{:?}", tr.end);
    }

    #[test]
    fn time_reversal_returns_to_seed() {
        let spec = VorticitySpec::gaussian_pair(1.0, 1.0, 0.2).unwrap();
        let solver = FieldSolver::new(TravelingVortex::new(spec, 0.1).unwrap());
        let field = QuadratureField::new(&solver);
        let (err, budget) = time_reversal_error(&field, Point::new(0.4, 1.2), 2.0, 1e-9).unwrap();
        assert!(err <= 10.0 * budget, "{err} vs {budget}");
    }

    #[test]
    fn rejects_lower_half_plane_seed() {
        let solver = FieldSolver::new(TravelingVortex::hill(1.0, 1.0).unwrap());
        let field = QuadratureField::new(&solver);
        assert!(trace(&field, Point::new(0.0, -0.1), &TraceOptions::new(1.0)).is_err());
    }
}
