//! Monte-Carlo check that the extracted domain is invariant under the
//! moving-frame flow and that its exterior stays outside.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::{MovingFrameField, TabulatedField};
use super::trace::{integrate, TraceOptions, Verdict, ESCAPE_FACTOR};
use crate::domain::{BoundaryCurve, Case, DomainResult};
use crate::error::{Error, Result};
use crate::point::Point;
use crate::solver::FieldSolver;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceOptions {
    pub particles: usize,
    /// Seeds placed in front of the vortex.
    pub ahead_particles: usize,
    pub horizon: f64,
    /// Minimum distance of seeds from the boundary. Crossing is counted
    /// when a particle is more than half of this on the wrong side.
    pub margin: f64,
    pub tolerance: f64,
    pub rng_seed: u64,
}

impl Default for InvarianceOptions {
    fn default() -> Self {
        InvarianceOptions {
            particles: 1000,
            ahead_particles: 50,
            horizon: 50.0,
            margin: 1e-3,
            tolerance: super::trace::DEFAULT_ODE_TOLERANCE,
            rng_seed: 0x5EED,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SeedTally {
    pub seeded: usize,
    /// Stayed on the side they started on for the whole horizon.
    pub kept: usize,
    /// Cut off by the step limit or step underflow before the horizon.
    pub undecided: usize,
    pub max_phi_drift: f64,
}

impl SeedTally {
    pub fn fraction(&self) -> f64 {
        if self.seeded == 0 {
            return 1.0;
        }
        self.kept as f64 / self.seeded as f64
    }

    fn add(mut self, o: SeedTally) -> SeedTally {
        self.seeded += o.seeded;
        self.kept += o.kept;
        self.undecided += o.undecided;
        self.max_phi_drift = self.max_phi_drift.max(o.max_phi_drift);
        self
    }
}

/// Seeds on the line in front of the vortex at twice its half-length.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AheadTally {
    pub seeded: usize,
    pub entered_domain: usize,
    /// Crossed `z = 0` below the inner radius (toroidal domains only).
    pub through_hole: usize,
    /// Ended behind the vortex.
    pub exited_behind: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub interior: SeedTally,
    pub exterior: SeedTally,
    pub ahead: AheadTally,
    pub horizon: f64,
    pub margin: f64,
}

impl InvarianceReport {
    pub fn interior_fraction(&self) -> f64 {
        self.interior.fraction()
    }

    pub fn exterior_fraction(&self) -> f64 {
        self.exterior.fraction()
    }
}

/// Table covering the seeding regions and the path to the escape radius.
pub fn invariance_table(solver: &FieldSolver, domain: &DomainResult) -> Result<TabulatedField> {
    let scale = solver.support_scale();
    let axial = (1.1 * ESCAPE_FACTOR * scale).max(2.5 * domain.boundary.max_l());
    let radial = 2.5 * domain.outer_radius.max(scale);
    TabulatedField::build(solver, axial, radial)
}

fn inside(b: &BoundaryCurve, p: Point, slack: f64) -> bool {
    b.contains(p, 0.0) || b.distance(p) <= slack
}

fn outside(b: &BoundaryCurve, p: Point, slack: f64) -> bool {
    !b.contains(p, 0.0) || b.distance(p) <= slack
}

fn sample_seeds(
    rng: &mut ChaCha8Rng,
    n: usize,
    bounds: ([f64; 2], [f64; 2]),
    accept: impl Fn(Point) -> bool,
) -> Result<Vec<Point>> {
    let mut out = Vec::with_capacity(n);
    let mut tries = 0usize;
    while out.len() < n {
        tries += 1;
        if tries > 1000 * n.max(1) {
            return Err(Error::Precondition(
                "seed region too thin to place Monte-Carlo particles".into(),
            ));
        }
        let p = Point::new(
            rng.gen_range(bounds.0[0]..bounds.0[1]),
            rng.gen_range(bounds.1[0]..bounds.1[1]),
        );
        if accept(p) {
            out.push(p);
        }
    }
    Ok(out)
}

fn track<F: MovingFrameField + ?Sized>(
    field: &F,
    seeds: &[Point],
    opts: &TraceOptions,
    stays: impl Fn(Point) -> bool + Sync,
) -> Result<SeedTally> {
    seeds
        .par_iter()
        .map(|&seed| {
            let mut kept = true;
            let tr = integrate(field, seed, opts, 1.0, &mut |_, p| {
                kept = stays(p);
                kept
            })?;
            let undecided = tr.verdict == Verdict::Undecided && tr.diagnostic.is_some();
            Ok(SeedTally {
                seeded: 1,
                kept: usize::from(kept && !undecided),
                undecided: usize::from(undecided),
                max_phi_drift: tr.max_phi_drift,
            })
        })
        .try_reduce(SeedTally::default, |a, b| Ok(a.add(b)))
}

/// Seeds `particles` points uniformly (in the meridional coordinates) in the
/// domain interior and as many between the boundary and twice the domain's
/// bounding box, plus a line of seeds in front of the vortex, and traces all
/// of them to the horizon.
pub fn verify_domain_invariance<F: MovingFrameField + ?Sized>(
    field: &F,
    domain: &DomainResult,
    options: &InvarianceOptions,
) -> Result<InvarianceReport> {
    let b = &domain.boundary;
    let lmax = b.max_l();
    let (s_lo, s_hi) = b.s_range();
    let margin = options.margin;
    let slack = 0.5 * margin;
    let mut rng = ChaCha8Rng::seed_from_u64(options.rng_seed);

    let interior = sample_seeds(
        &mut rng,
        options.particles,
        ([-lmax, lmax], [s_lo.max(f64::MIN_POSITIVE), s_hi]),
        |p| b.contains(p, 0.0) && b.distance(p) >= margin,
    )?;
    let exterior = sample_seeds(
        &mut rng,
        options.particles,
        ([-2.0 * lmax, 2.0 * lmax], [f64::MIN_POSITIVE, 2.0 * s_hi]),
        |p| !b.contains(p, 0.0) && b.distance(p) >= margin,
    )?;

    let opts = TraceOptions {
        detect_closed_orbit: false,
        stop_on_escape: true,
        record: false,
        ..TraceOptions::new(options.horizon).with_tolerance(options.tolerance)
    };
    let interior_tally = track(field, &interior, &opts, |p| inside(b, p, slack))?;
    let exterior_tally = track(field, &exterior, &opts, |p| outside(b, p, slack))?;

    let toroidal = domain.case == Case::II && field.is_ring();
    let top = if toroidal { 0.5 * domain.inner_radius } else { 2.0 * s_hi };
    let ahead: Vec<Point> = (0..options.ahead_particles)
        .map(|k| Point::new(2.0 * lmax, top * (k as f64 + 0.5) / options.ahead_particles as f64))
        .collect();
    let ahead_tally = ahead
        .par_iter()
        .map(|&seed| {
            let mut entered = false;
            let mut hole = false;
            let mut prev = seed;
            let tr = integrate(field, seed, &opts, 1.0, &mut |_, p| {
                if !outside(b, p, slack) {
                    entered = true;
                }
                if prev.axial > 0.0 && p.axial <= 0.0 {
                    let t = prev.axial / (prev.axial - p.axial);
                    let r = prev.radial + t * (p.radial - prev.radial);
                    hole |= toroidal && r < domain.inner_radius;
                }
                prev = p;
                true
            })?;
            Ok::<_, Error>(AheadTally {
                seeded: 1,
                entered_domain: usize::from(entered),
                through_hole: usize::from(hole),
                exited_behind: usize::from(tr.end.axial < -lmax),
            })
        })
        .try_reduce(AheadTally::default, |a, b| {
            Ok(AheadTally {
                seeded: a.seeded + b.seeded,
                entered_domain: a.entered_domain + b.entered_domain,
                through_hole: a.through_hole + b.through_hole,
                exited_behind: a.exited_behind + b.exited_behind,
            })
        })?;

    Ok(InvarianceReport {
        interior: interior_tally,
        exterior: exterior_tally,
        ahead: ahead_tally,
        horizon: options.horizon,
        margin,
    })
}
