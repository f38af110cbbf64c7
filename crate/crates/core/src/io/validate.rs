//! Property suite of the `validate` command, run against the configured
//! vortex.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::RunConfig;
use super::pipeline::{prepare, STEINER_RESOLUTION};
use super::report::{PropertyResult, ToolInfo, ValidateReport, SCHEMA_VERSION};
use crate::domain::classify::STEADINESS_THRESHOLD;
use crate::domain::{classify, extract_domain, Case, DomainResult, ExtractOptions};
use crate::error::Result;
use crate::field::steiner::{check_steiner, STEINER_TOLERANCE};
use crate::kernels::{plane_kernel_oracle, ring_kernel_oracle};
use crate::point::Point;
use crate::solver::{FieldSolver, SupportQuadrature};
use crate::tracer::{time_reversal_error, trace, verify_escape, QuadratureField, TraceOptions};

const RNG_SEED: u64 = 0xA11CE;
const KERNEL_POINTS: usize = 200;
const STEINER_POINTS: usize = 500;
const CONSERVATION_SEEDS: usize = 8;
const REVERSAL_SEEDS: usize = 4;
/// Largest number of core nodes checked against the level.
const CORE_NODES: usize = 200;
pub const DECAY_RADII: [f64; 8] = [5.0, 7.0, 10.0, 14.0, 20.0, 28.0, 38.0, 50.0];
pub const RING_DECAY_SLOPE: f64 = -2.5;
pub const DIPOLE_DECAY_SLOPE: f64 = -1.5;
pub const DRIFT_LIMIT: f64 = 1e-6;
pub const AXIS_SAMPLES: usize = 50;

fn prop(name: &str, passed: bool, measured: Option<f64>, threshold: Option<f64>, detail: String) -> PropertyResult {
    PropertyResult {
        name: name.into(),
        passed,
        measured,
        threshold,
        detail,
    }
}

fn failed(name: &str, detail: String) -> PropertyResult {
    prop(name, false, None, None, detail)
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}

/// Largest value of `∂_zψ` (rings) or `∂_{x₁}𝒢` (dipoles) over random
/// points with positive axial coordinate in `(0, 2·scale] × (0, 2·scale]`;
/// strictly negative for Steiner-symmetric profiles.
pub fn strict_steiner_max(solver: &FieldSolver, points: usize, seed: u64) -> f64 {
    let s = solver.support_scale();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<Point> = (0..points)
        .map(|_| Point::new(rng.gen_range(0.005 * s..2.0 * s), rng.gen_range(0.005 * s..2.0 * s)))
        .collect();
    pts.par_iter()
        .map(|&p| {
            let v = solver.velocity(p);
            if solver.is_ring() {
                // v^r = −∂_zψ / r
                -p.radial * v[1]
            } else {
                // u² = −∂₁𝒢
                -v[1]
            }
        })
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

/// Decay probe over `DECAY_RADII · scale`: fitted slope and whether the
/// values strictly decrease.
pub fn decay_check(solver: &FieldSolver) -> Result<(f64, bool)> {
    let s = solver.support_scale();
    let radii: Vec<f64> = DECAY_RADII.iter().map(|r| r * s).collect();
    let vals = solver.decay_probe(&radii)?;
    let decreasing = vals.windows(2).all(|w| w[1] < w[0]);
    Ok((log_slope(&radii, &vals), decreasing))
}

/// Smallest `φ − γ` over quadrature nodes of the core.
pub fn core_margin(solver: &FieldSolver, domain: &DomainResult) -> f64 {
    let spec = &solver.vortex().vorticity;
    let nodes: Vec<Point> = SupportQuadrature::area_nodes(spec, 4)
        .into_iter()
        .map(|(p, _)| p)
        .filter(|&p| spec.value_upper(p) > 0.0)
        .collect();
    let stride = nodes.len().div_ceil(CORE_NODES).max(1);
    nodes
        .par_iter()
        .step_by(stride)
        .map(|&p| solver.relative_stream(p) - domain.level)
        .reduce(|| f64::INFINITY, f64::min)
}

/// Axial speed on `z = 0` at `AXIS_SAMPLES` points of `(0, L)`: whether it
/// strictly increases, and `|v^z(0,L) − W| / W`.
pub fn axis_monotone(solver: &FieldSolver, inner: f64) -> (bool, f64) {
    let v: Vec<f64> = (1..=AXIS_SAMPLES)
        .map(|k| inner * k as f64 / (AXIS_SAMPLES + 1) as f64)
        .map(|s| solver.velocity(Point::new(0.0, s))[0])
        .collect();
    let inc = v.windows(2).all(|w| w[1] > w[0]);
    let w = solver.speed();
    let at_l = solver.velocity(Point::new(0.0, inner))[0];
    (inc, (at_l - w).abs() / w)
}

/// Random seeds in the box spanned by the domain.
fn domain_seeds(domain: &DomainResult, n: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let l = domain.boundary.max_l().max(1e-3);
    let r = domain.outer_radius;
    (0..n)
        .map(|_| Point::new(rng.gen_range(-1.5 * l..1.5 * l), rng.gen_range(0.05 * r..1.5 * r)))
        .collect()
}

pub fn run_validate(config: &RunConfig) -> ValidateReport {
    let mut props = Vec::new();
    let mut timing = std::collections::BTreeMap::new();
    let t0 = Instant::now();
    let spec = &config.vortex;
    let ring = spec.geometry() == crate::field::vorticity::Geometry::Ring;

    let st = check_steiner(spec, STEINER_RESOLUTION);
    let st_tol = STEINER_TOLERANCE * spec.peak().abs();
    props.push(prop(
        "steiner_symmetry",
        st.is_symmetric,
        Some(st.max_violation),
        Some(st_tol),
        format!("{} x {} scan", st.resolution, st.resolution),
    ));

    let kernel = if ring {
        ring_kernel_oracle(KERNEL_POINTS, RNG_SEED)
    } else {
        plane_kernel_oracle(KERNEL_POINTS, RNG_SEED)
    };
    match kernel {
        Ok(k) => {
            props.push(prop(
                "kernel_oracle_values",
                k.max_relative_error <= 1e-10,
                Some(k.max_relative_error),
                Some(1e-10),
                format!("{} random pairs", k.points),
            ));
            props.push(prop(
                "kernel_oracle_derivatives",
                k.max_derivative_ratio <= 1.0,
                Some(k.max_derivative_ratio),
                Some(1.0),
                "error over max(1e-8, 1e-5 |value|)".into(),
            ));
        }
        Err(e) => props.push(failed("kernel_oracle_values", e.to_string())),
    }

    let tol = match config.resolved_tolerances() {
        Ok(t) => t,
        Err(e) => {
            props.push(failed("configuration", e.to_string()));
            return finish(config, props, timing, t0);
        }
    };
    let prepared = match prepare(spec, config.speed, &tol) {
        Ok(p) => p,
        Err(e) => {
            props.push(failed("steadiness", e.to_string()));
            return finish(config, props, timing, t0);
        }
    };
    let solver = prepared.solver;
    props.push(prop(
        "steadiness",
        prepared.residual <= STEADINESS_THRESHOLD,
        Some(prepared.residual),
        Some(STEADINESS_THRESHOLD),
        format!("speed {} ({:?})", prepared.speed.value, prepared.speed.source),
    ));

    let worst = strict_steiner_max(&solver, STEINER_POINTS, RNG_SEED);
    props.push(prop(
        "strict_steiner_stream",
        worst < 0.0,
        Some(worst),
        Some(0.0),
        format!("largest axial derivative of the stream over {STEINER_POINTS} points"),
    ));

    match decay_check(&solver) {
        Ok((slope, dec)) => {
            let bound = if ring { RING_DECAY_SLOPE } else { DIPOLE_DECAY_SLOPE };
            props.push(prop(
                "decay_probe",
                slope <= bound && dec,
                Some(slope),
                Some(bound),
                format!("log-log slope; strictly decreasing: {dec}"),
            ));
        }
        Err(e) => props.push(failed("decay_probe", e.to_string())),
    }

    let class = classify(&solver, Some(&st), Some(prepared.residual));
    if !ring {
        let ratio = class.speed_ratio();
        props.push(prop(
            "center_speed_exceeds_twice_speed",
            ratio > 2.0,
            Some(ratio),
            Some(2.0),
            "centre speed / W".into(),
        ));
    }
    timing.insert("setup".to_string(), t0.elapsed().as_secs_f64());

    let opts = ExtractOptions {
        root_tolerance: tol.root,
        ..ExtractOptions::default()
    };
    let domain = match extract_domain(&solver, &class, &opts) {
        Ok(d) => {
            props.push(prop(
                "domain_extraction",
                true,
                Some(d.outer_radius),
                None,
                format!("{:?}, case {:?}", d.topology, d.case),
            ));
            d
        }
        Err(e) => {
            props.push(failed("domain_extraction", e.to_string()));
            return finish(config, props, timing, t0);
        }
    };

    let m = core_margin(&solver, &domain);
    props.push(prop(
        "core_in_domain",
        m > 0.0,
        Some(m),
        Some(0.0),
        "smallest relative stream minus level on core nodes".into(),
    ));
    if let Some(s) = &domain.sadovskii {
        props.push(prop(
            "sadovskii_consistent",
            s.consistent,
            Some(domain.measures.ratio),
            None,
            format!("touches axis {}, empty atmosphere {}", s.touches_axis, s.empty_atmosphere),
        ));
    }
    if domain.case == Case::II {
        let (inc, rel) = axis_monotone(&solver, domain.inner_radius);
        props.push(prop(
            "axis_speed_monotone",
            inc && rel <= 1e-4,
            Some(rel),
            Some(1e-4),
            format!("strictly increasing on (0, L): {inc}"),
        ));
    }

    let t1 = Instant::now();
    let field = QuadratureField::new(&solver);
    let mut rng = ChaCha8Rng::seed_from_u64(RNG_SEED);
    let transit = solver.support_scale() / solver.speed();
    let seeds = domain_seeds(&domain, CONSERVATION_SEEDS, &mut rng);
    let opts = TraceOptions::new(2.0 * transit).with_tolerance(tol.ode);
    let drift: Result<f64> = seeds
        .par_iter()
        .map(|&s| trace(&field, s, &opts).map(|t| t.max_phi_drift))
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)));
    match drift {
        Ok(d) => props.push(prop(
            "conservation",
            d <= DRIFT_LIMIT,
            Some(d),
            Some(DRIFT_LIMIT),
            format!("{CONSERVATION_SEEDS} traces over {} time units", 2.0 * transit),
        )),
        Err(e) => props.push(failed("conservation", e.to_string())),
    }
    let seeds = domain_seeds(&domain, REVERSAL_SEEDS, &mut rng);
    let rev: Result<f64> = seeds
        .par_iter()
        .map(|&s| time_reversal_error(&field, s, transit, tol.ode).map(|(e, b)| e / b))
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)));
    match rev {
        Ok(r) => props.push(prop(
            "time_reversal",
            r <= 10.0,
            Some(r),
            Some(10.0),
            "return distance over the tolerance budget".into(),
        )),
        Err(e) => props.push(failed("time_reversal", e.to_string())),
    }
    let behind = Point::new(
        -(domain.boundary.max_l() + 0.5 * solver.support_scale()),
        0.5 * domain.outer_radius,
    );
    match verify_escape(&field, behind, 50.0 * transit, tol.ode) {
        Ok(r) => props.push(prop(
            "escape_behind_vortex",
            !r.hypotheses_hold || r.confirmed,
            r.relative_error,
            Some(crate::tracer::escape::ASYMPTOTE_TOLERANCE),
            if r.hypotheses_hold {
                r.verdict.map_or("no verdict".into(), |v| format!("verdict {v:?}"))
            } else {
                format!("hypotheses fail: {}", r.failed.join("; "))
            },
        )),
        Err(e) => props.push(failed("escape_behind_vortex", e.to_string())),
    }
    timing.insert("tracing".to_string(), t1.elapsed().as_secs_f64());
    finish(config, props, timing, t0)
}

fn finish(
    config: &RunConfig,
    properties: Vec<PropertyResult>,
    mut timing: std::collections::BTreeMap<String, f64>,
    t0: Instant,
) -> ValidateReport {
    timing.insert("total".to_string(), t0.elapsed().as_secs_f64());
    ValidateReport {
        schema_version: SCHEMA_VERSION,
        tool: ToolInfo::current(),
        config: config.clone(),
        passed: properties.iter().all(|p| p.passed),
        properties,
        timing,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-3.0)).collect();
        assert!((log_slope(&x, &y) + 3.0).abs() < 1e-12);
    }
}
