//! Orchestration of the analyze, trace and sweep commands.

use std::time::Instant;

use rayon::prelude::*;

use super::config::{RunConfig, SpeedSetting, Tolerances};
use super::report::{
    LemniscatePoint, ReportDocument, SpeedReport, SpeedSource, StageError, SweepReport, SweepRow,
    ToolInfo, TraceSummary, Transition, SCHEMA_VERSION,
};
use crate::domain::classify::LEMNISCATE_BAND;
use crate::domain::{classify, extract_domain, Classification, DomainResult, ExtractOptions, Topology};
use crate::error::{Error, Result};
use crate::field::steiner::check_steiner;
use crate::field::vorticity::{TravelingVortex, VorticitySpec};
use crate::point::{BoundingBox, Point};
use crate::solver::{FieldSample, FieldSolver, SteadinessSamples, DEFAULT_RESOLUTION};
use crate::tracer::{
    invariance_table, trace, verify_domain_invariance, InvarianceOptions, QuadratureField,
    StreamlineTrace, TraceOptions,
};

/// Grid resolution of the Steiner scan.
pub const STEINER_RESOLUTION: usize = 64;
/// Field export grid, points per axis.
const FIELD_GRID: (usize, usize) = (41, 21);
/// Extra bisection steps allowed when looking for a lemniscate-band point.
const LEMNISCATE_SEARCH: usize = 30;

/// Solver at the configured or calibrated speed, with the steadiness
/// residual at that speed.
pub struct Prepared {
    pub solver: FieldSolver,
    pub speed: SpeedReport,
    pub residual: f64,
}

pub fn prepare(spec: &VorticitySpec, speed: SpeedSetting, tol: &Tolerances) -> Result<Prepared> {
    let provisional = speed.fixed().unwrap_or(1.0);
    let solver = FieldSolver::with_tolerance(
        TravelingVortex::new(spec.clone(), provisional)?,
        tol.quadrature,
    );
    let samples = SteadinessSamples::collect(&solver, DEFAULT_RESOLUTION);
    let (w, source) = match speed {
        SpeedSetting::Fixed(w) => (w, SpeedSource::Given),
        SpeedSetting::Keyword(_) => (samples.calibrate()?.speed, SpeedSource::Calibrated),
    };
    let residual = samples.residual(w);
    Ok(Prepared {
        solver: solver.with_speed(w)?,
        speed: SpeedReport { value: w, source },
        residual,
    })
}

fn timed<T>(timing: &mut std::collections::BTreeMap<String, f64>, stage: &str, f: impl FnOnce() -> T) -> T {
    let t = Instant::now();
    let out = f();
    timing.insert(stage.into(), t.elapsed().as_secs_f64());
    out
}

/// Region of the field export and tracing tables: twice the domain (or
/// support) extent.
pub fn export_box(solver: &FieldSolver, domain: Option<&DomainResult>) -> BoundingBox {
    let b = solver.vortex().vorticity.bounding_box();
    let (mut a, mut r) = (b.axial_half_width(), b.radial_max);
    if let Some(d) = domain {
        a = a.max(d.boundary.max_l());
        r = r.max(d.outer_radius);
    }
    BoundingBox {
        axial_min: -2.0 * a,
        axial_max: 2.0 * a,
        radial_min: 0.0,
        radial_max: 2.0 * r,
    }
}

pub fn field_samples(solver: &FieldSolver, bbox: &BoundingBox) -> Vec<FieldSample> {
    let (na, nr) = FIELD_GRID;
    let pts: Vec<Point> = (0..na)
        .flat_map(|i| {
            (0..nr).map(move |j| {
                Point::new(
                    bbox.axial_min + (bbox.axial_max - bbox.axial_min) * i as f64 / (na - 1) as f64,
                    bbox.radial_min + (bbox.radial_max - bbox.radial_min) * j as f64 / (nr - 1) as f64,
                )
            })
        })
        .collect();
    pts.par_iter().map(|&p| solver.sample(p)).collect()
}

pub fn trace_seeds(
    solver: &FieldSolver,
    seeds: &[Point],
    horizon: f64,
    tolerance: f64,
) -> Result<Vec<StreamlineTrace>> {
    let field = QuadratureField::new(solver);
    let opts = TraceOptions::new(horizon).with_tolerance(tolerance);
    seeds.par_iter().map(|&s| trace(&field, s, &opts)).collect()
}

/// Everything `analyze` produces; files are written by the caller.
pub struct AnalyzeOutput {
    pub report: ReportDocument,
    pub field: Vec<FieldSample>,
    pub traces: Vec<StreamlineTrace>,
}

pub fn run_analyze(config: &RunConfig) -> AnalyzeOutput {
    let mut report = ReportDocument::new(config.clone());
    let mut out_field = Vec::new();
    let mut out_traces = Vec::new();
    let prov = &mut report.provenance;
    for (k, v) in [
        ("steiner", "field::check_steiner"),
        ("speed", "solver::SteadinessSamples::calibrate (or the configured value)"),
        ("steadiness_residual", "solver::SteadinessSamples::residual"),
        ("classification", "domain::classify"),
        ("domain", "domain::extract_domain"),
        ("domain.measures", "domain::measures"),
        ("invariance", "tracer::verify_domain_invariance"),
        ("traces", "tracer::trace"),
        ("field.csv", "solver::FieldSolver::sample"),
    ] {
        prov.insert(k.into(), v.into());
    }
    let tol = match config.resolved_tolerances() {
        Ok(t) => t,
        Err(e) => {
            report.errors.push(StageError::new("config", &e));
            return AnalyzeOutput {
                report,
                field: out_field,
                traces: out_traces,
            };
        }
    };
    report.tolerances = Some(tol);
    let spec = &config.vortex;

    let steiner = timed(&mut report.timing, "steiner", || check_steiner(spec, STEINER_RESOLUTION));
    report.steiner = Some(steiner);
    if !steiner.is_symmetric {
        report.errors.push(StageError::precondition(
            "steiner",
            format!("profile not Steiner-symmetric (max violation {:e})", steiner.max_violation),
        ));
    }

    let prepared = timed(&mut report.timing, "speed", || prepare(spec, config.speed, &tol));
    let prepared = match prepared {
        Ok(p) => p,
        Err(e) => {
            report.errors.push(StageError::new("speed", &e));
            return AnalyzeOutput {
                report,
                field: out_field,
                traces: out_traces,
            };
        }
    };
    report.speed = Some(prepared.speed);
    report.steadiness_residual = Some(prepared.residual);
    let solver = prepared.solver;

    let class: Classification = timed(&mut report.timing, "classify", || {
        classify(&solver, Some(&steiner), Some(prepared.residual))
    });
    if prepared.residual > crate::domain::classify::STEADINESS_THRESHOLD {
        report.errors.push(StageError::precondition(
            "speed",
            format!("steadiness residual {:e} above threshold", prepared.residual),
        ));
    }
    report.classification = Some(class.clone());

    let opts = ExtractOptions {
        root_tolerance: tol.root,
        ..ExtractOptions::default()
    };
    match timed(&mut report.timing, "extract", || extract_domain(&solver, &class, &opts)) {
        Ok(d) => report.domain = Some(d),
        Err(e) => report.errors.push(StageError::new("extract", &e)),
    }

    if let (Some(inv), Some(domain)) = (config.invariance, report.domain.as_ref()) {
        let res = timed(&mut report.timing, "invariance", || {
            let table = invariance_table(&solver, domain)?;
            let opts = InvarianceOptions {
                particles: inv.particles,
                ahead_particles: inv.ahead_particles,
                horizon: inv.horizon,
                tolerance: tol.ode,
                rng_seed: inv.rng_seed,
                ..InvarianceOptions::default()
            };
            verify_domain_invariance(&table, domain, &opts)
        });
        match res {
            Ok(r) => report.invariance = Some(r),
            Err(e) => report.errors.push(StageError::new("invariance", &e)),
        }
    }

    if let Some(seeds) = &config.seed_list {
        match timed(&mut report.timing, "traces", || {
            trace_seeds(&solver, seeds, config.trace_horizon(), tol.ode)
        }) {
            Ok(t) => {
                report.traces = t.iter().map(TraceSummary::from).collect();
                out_traces = t;
            }
            Err(e) => report.errors.push(StageError::new("traces", &e)),
        }
    }

    let bbox = export_box(&solver, report.domain.as_ref());
    out_field = timed(&mut report.timing, "field", || field_samples(&solver, &bbox));
    AnalyzeOutput {
        report,
        field: out_field,
        traces: out_traces,
    }
}

/// Speed preparation and traces only.
pub fn run_trace(config: &RunConfig, seeds: &[Point]) -> (ReportDocument, Vec<StreamlineTrace>) {
    let mut report = ReportDocument::new(config.clone());
    report.provenance.insert("traces".into(), "tracer::trace".into());
    let result = (|| -> std::result::Result<Vec<StreamlineTrace>, StageError> {
        let tol = config
            .resolved_tolerances()
            .map_err(|e| StageError::new("config", &e))?;
        report.tolerances = Some(tol);
        let p = prepare(&config.vortex, config.speed, &tol).map_err(|e| StageError::new("speed", &e))?;
        report.speed = Some(p.speed);
        report.steadiness_residual = Some(p.residual);
        let t = Instant::now();
        let traces = trace_seeds(&p.solver, seeds, config.trace_horizon(), tol.ode)
            .map_err(|e| StageError::new("traces", &e))?;
        report.timing.insert("traces".into(), t.elapsed().as_secs_f64());
        Ok(traces)
    })();
    match result {
        Ok(t) => {
            report.traces = t.iter().map(TraceSummary::from).collect();
            (report, t)
        }
        Err(e) => {
            report.errors.push(e);
            (report, Vec::new())
        }
    }
}

/// Classification at one sweep value, with `(centre speed, W)`.
fn sweep_point(
    config: &RunConfig,
    tol: &Tolerances,
    name: &str,
    value: f64,
) -> Result<(SweepRow, Classification)> {
    let spec = config.vortex.with_parameter(name, value)?;
    let p = prepare(&spec, config.speed, tol)?;
    let c = classify(&p.solver, None, Some(p.residual));
    Ok((
        SweepRow {
            parameter: value,
            speed: Some(c.speed),
            center_speed: Some(c.center_speed),
            speed_ratio: Some(c.speed_ratio()),
            topology: Some(c.topology),
            case: Some(c.case),
            steadiness_residual: Some(p.residual),
            error: None,
        },
        c,
    ))
}

fn rank(t: Topology) -> u8 {
    match t {
        Topology::Toroid => 0,
        Topology::Lemniscate => 1,
        Topology::Spheroid => 2,
        Topology::Oval2D => 3,
    }
}

pub fn run_sweep(config: &RunConfig) -> SweepReport {
    let mut report = SweepReport {
        schema_version: SCHEMA_VERSION,
        tool: ToolInfo::current(),
        config: config.clone(),
        parameter: String::new(),
        rows: Vec::new(),
        sequence: Vec::new(),
        monotone: false,
        transition: None,
        notes: Vec::new(),
        errors: Vec::new(),
        timing: Default::default(),
    };
    let Some(sweep) = config.sweep.clone() else {
        report.errors.push(StageError::new(
            "config",
            &Error::invalid("sweep command needs a `sweep` block"),
        ));
        return report;
    };
    report.parameter = sweep.parameter.clone();
    let tol = match config.resolved_tolerances() {
        Ok(t) => t,
        Err(e) => {
            report.errors.push(StageError::new("config", &e));
            return report;
        }
    };
    let t0 = Instant::now();
    let results: Vec<(f64, Result<(SweepRow, Classification)>)> = sweep
        .values()
        .into_par_iter()
        .map(|v| (v, sweep_point(config, &tol, &sweep.parameter, v)))
        .collect();
    report.timing.insert("grid".into(), t0.elapsed().as_secs_f64());

    let mut classes = Vec::new();
    for (v, r) in results {
        match r {
            Ok((row, c)) => {
                report.rows.push(row);
                classes.push(Some(c));
            }
            Err(e) => {
                report.rows.push(SweepRow {
                    parameter: v,
                    speed: None,
                    center_speed: None,
                    speed_ratio: None,
                    topology: None,
                    case: None,
                    steadiness_residual: None,
                    error: Some(e.to_string()),
                });
                classes.push(None);
            }
        }
    }
    if classes.iter().any(Option::is_none) {
        report
            .errors
            .push(StageError::precondition("sweep", "some sweep points failed".into()));
        report.notes.push("failed sweep points; no bisection".into());
        return report;
    }
    let classes: Vec<Classification> = classes.into_iter().flatten().collect();
    for c in &classes {
        if report.sequence.last() != Some(&c.topology) {
            report.sequence.push(c.topology);
        }
    }
    let ranks: Vec<u8> = report.sequence.iter().map(|&t| rank(t)).collect();
    report.monotone =
        ranks.windows(2).all(|w| w[0] < w[1]) || ranks.windows(2).all(|w| w[0] > w[1]);
    if !report.monotone {
        report.notes.push(format!(
            "non-monotone class sequence {:?}; no bisection",
            report.sequence
        ));
        return report;
    }
    let sign = |c: &Classification| c.center_speed >= c.speed;
    let flips: Vec<usize> = (0..classes.len() - 1)
        .filter(|&k| sign(&classes[k]) != sign(&classes[k + 1]))
        .collect();
    let is_ring = config.vortex.geometry() == crate::field::vorticity::Geometry::Ring;
    if !is_ring || flips.is_empty() {
        report.notes.push("no change of regime in the sweep range".into());
        return report;
    }
    if flips.len() > 1 {
        report.notes.push(format!(
            "centre speed crosses W {} times; no bisection",
            flips.len()
        ));
        return report;
    }
    let k = flips[0];
    let t1 = Instant::now();
    match bisect_transition(config, &tol, &sweep.parameter, &classes, &report.rows, k, sweep.bracket) {
        Ok(t) => report.transition = Some(t),
        Err(e) => report.errors.push(StageError::new("bisection", &e)),
    }
    report.timing.insert("bisection".into(), t1.elapsed().as_secs_f64());
    report
}

fn bisect_transition(
    config: &RunConfig,
    tol: &Tolerances,
    name: &str,
    classes: &[Classification],
    rows: &[SweepRow],
    k: usize,
    width: f64,
) -> Result<Transition> {
    let f = |v: f64| -> Result<(f64, Classification)> {
        let (_, c) = sweep_point(config, tol, name, v)?;
        Ok((c.center_speed - c.speed, c))
    };
    let (mut lo, mut hi) = (rows[k].parameter, rows[k + 1].parameter);
    let lo_sign = classes[k].center_speed >= classes[k].speed;
    let mut iterations = 0;
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        let (g, _) = f(mid)?;
        iterations += 1;
        if (g >= 0.0) == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (blo, bhi) = (lo, hi);
    let mut lemniscate = None;
    for _ in 0..LEMNISCATE_SEARCH {
        let mid = 0.5 * (lo + hi);
        let (g, c) = f(mid)?;
        if g.abs() <= LEMNISCATE_BAND * c.speed {
            lemniscate = Some(LemniscatePoint {
                parameter: mid,
                speed_ratio: c.speed_ratio(),
            });
            break;
        }
        if (g >= 0.0) == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Transition {
        lower: blo,
        upper: bhi,
        width: bhi - blo,
        from: classes[k].topology,
        to: classes[k + 1].topology,
        iterations,
        lemniscate,
    })
}
