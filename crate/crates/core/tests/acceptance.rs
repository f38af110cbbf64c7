//! Acceptance criteria, one PASS/FAIL line each. Supplementary lines (S*)
//! repeat a criterion on parameters where the required regime exists.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use vortex_atmosphere::domain::{classify, extract_domain, Case, DomainResult, ExtractOptions, Topology};
use vortex_atmosphere::field::vorticity::VorticitySpec;
use vortex_atmosphere::io::config::{Spacing, SpeedKeyword, SweepConfig};
use vortex_atmosphere::io::pipeline::prepare;
use vortex_atmosphere::io::validate::{axis_monotone, log_slope, strict_steiner_max};
use vortex_atmosphere::io::{run_sweep, RunConfig, SpeedSetting, SweepReport, Tolerances};
use vortex_atmosphere::kernels::{plane_kernel_oracle, ring_kernel_oracle};
use vortex_atmosphere::solver::FieldSolver;
use vortex_atmosphere::tracer::{
    invariance_table, time_reversal_error, trace, verify_domain_invariance, InvarianceOptions,
    QuadratureField, TraceOptions, DEFAULT_ODE_TOLERANCE,
};
use vortex_atmosphere::{Point, Result};

const CALIBRATE: SpeedSetting = SpeedSetting::Keyword(SpeedKeyword::Calibrate);

struct Outcome {
    lines: Vec<(String, bool)>,
}

impl Outcome {
    fn record(&mut self, id: &str, passed: bool, detail: String) {
        let status = if passed { "PASS" } else { "FAIL" };
        println!("{status} [{id}] {detail}");
        self.lines.push((id.to_string(), passed));
    }
}

fn tolerances() -> Tolerances {
    RunConfig::from_json(r#"{"vortex": {"geometry": "ring", "kind": "hill_ball", "amplitude": 1.0, "radius": 1.0}, "speed": 1.0}"#)
        .and_then(|c| c.resolved_tolerances())
        .expect("default tolerances")
}

struct Case1 {
    solver: FieldSolver,
    domain: DomainResult,
    topology: Topology,
    ratio: f64,
}

fn analyze(spec: VorticitySpec, speed: SpeedSetting) -> Result<Case1> {
    let tol = tolerances();
    let p = prepare(&spec, speed, &tol)?;
    let c = classify(&p.solver, None, Some(p.residual));
    let domain = extract_domain(
        &p.solver,
        &c,
        &ExtractOptions {
            root_tolerance: tol.root,
            ..ExtractOptions::default()
        },
    )?;
    Ok(Case1 {
        topology: c.topology,
        ratio: c.speed_ratio(),
        solver: p.solver,
        domain,
    })
}

/// Hausdorff distance between the boundary curve and the quarter circle of
/// radius `a` in the `(s, l)` plane.
fn hausdorff_to_circle(d: &DomainResult, a: f64) -> f64 {
    let from_curve = d
        .boundary
        .points
        .iter()
        .map(|[s, l]| (s.hypot(*l) - a).abs())
        .fold(0.0, f64::max);
    let from_circle = (0..=400)
        .map(|k| {
            let th = std::f64::consts::FRAC_PI_2 * k as f64 / 400.0;
            d.boundary.distance(Point::new(a * th.cos(), a * th.sin()))
        })
        .fold(0.0, f64::max);
    from_curve.max(from_circle)
}

fn hill() -> VorticitySpec {
    VorticitySpec::hill_ball(1.0, 1.0).unwrap()
}

fn lamb() -> VorticitySpec {
    VorticitySpec::lamb_dipole(1.0, 1.0).unwrap()
}

fn ring(sigma: f64) -> VorticitySpec {
    VorticitySpec::gaussian_ring(1.0, 1.0, sigma).unwrap()
}

fn patch(eps: f64) -> VorticitySpec {
    VorticitySpec::patch_pair_with_circulation(1.0, 1.0, eps).unwrap()
}

fn criterion_1(out: &mut Outcome) {
    let t0 = Instant::now();
    match analyze(hill(), SpeedSetting::Fixed(2.0 / 15.0)) {
        Ok(c) => {
            let h = hausdorff_to_circle(&c.domain, 1.0);
            let ratio = c.domain.measures.ratio;
            let secs = t0.elapsed().as_secs_f64();
            out.record(
                "1",
                h <= 1e-2 && c.topology == Topology::Spheroid && ratio < 0.01 && secs < 60.0,
                format!("Hill: hausdorff={h:.3e} (<=1e-2), topology={:?}, atmosphere ratio={ratio:.3e} (<1e-2), {secs:.1}s (<60s)", c.topology),
            );
        }
        Err(e) => out.record("1", false, format!("Hill: {e}")),
    }
}

fn criterion_2(out: &mut Outcome) {
    match analyze(lamb(), SpeedSetting::Fixed(1.0)) {
        Ok(c) => {
            let h = hausdorff_to_circle(&c.domain, 1.0);
            let sad = c.domain.sadovskii.as_ref().is_some_and(|s| s.sadovskii);
            out.record(
                "2",
                c.topology == Topology::Oval2D && h <= 1e-2 && sad && c.ratio > 2.0,
                format!("Lamb: topology={:?}, hausdorff={h:.3e} (<=1e-2), sadovskii={sad}, centre/W={:.4} (>2)", c.topology, c.ratio),
            );
        }
        Err(e) => out.record("2", false, format!("Lamb: {e}")),
    }
}

fn criterion_3(out: &mut Outcome) {
    let tol = tolerances();
    let ratio = |eps: f64| -> Result<f64> {
        let p = prepare(&patch(eps), CALIBRATE, &tol)?;
        Ok(classify(&p.solver, None, Some(p.residual)).speed_ratio())
    };
    let sweep = [1.0 / 50.0, 1.0 / 25.0, 0.1, 0.2, 1.0 / 3.0];
    let ratios: Result<Vec<f64>> = sweep.iter().map(|&e| ratio(e)).collect();
    match ratios {
        Ok(r) => {
            let rel = (r[0] - 4.0).abs() / 4.0;
            let min = r.iter().copied().fold(f64::INFINITY, f64::min);
            out.record(
                "3",
                rel <= 0.05 && min > 2.0,
                format!("patch pair eps=d/50: centre/W={:.6} (|rel-4|={rel:.2e} <=5e-2); min over eps sweep {sweep:.3?} = {min:.4} (>2)", r[0]),
            );
        }
        Err(e) => out.record("3", false, format!("patch pair: {e}")),
    }
}

fn thin_ring(out: &mut Outcome, id: &str, sigma: f64) {
    match analyze(ring(sigma), CALIBRATE) {
        Ok(c) => {
            let d = &c.domain;
            let l = d.inner_radius;
            let toroid = c.topology == Topology::Toroid && d.case == Case::II && l > 0.0;
            let (inc, rel) = if toroid { axis_monotone(&c.solver, l) } else { (false, f64::NAN) };
            let closes = d.boundary.l_at(l).abs().max(d.boundary.l_at(d.outer_radius).abs());
            let close_tol = 1e-8 * d.outer_radius;
            out.record(
                id,
                toroid && inc && rel <= 1e-4 && closes <= close_tol,
                format!(
                    "Gaussian ring sigma={sigma}: topology={:?}, case={:?}, L={l:.4e} (>0), W={:.5}, v^z increasing={inc}, |v^z(0,L)-W|/W={rel:.2e} (<=1e-4), max(|l(L)|,|l(R)|)={closes:.1e} (<={close_tol:.0e})",
                    c.topology, d.case, c.solver.speed()
                ),
            );
        }
        Err(e) => out.record(id, false, format!("Gaussian ring sigma={sigma}: {e}")),
    }
}

fn sweep_report(range: [f64; 2], steps: usize) -> SweepReport {
    let mut config = RunConfig::from_json(
        r#"{"vortex": {"geometry": "ring", "kind": "gaussian_ring", "circulation": 1.0, "ring_radius": 1.0, "core_width": 0.1}, "speed": "calibrate"}"#,
    )
    .unwrap();
    config.sweep = Some(SweepConfig {
        parameter: "core_width".into(),
        range,
        steps,
        spacing: Spacing::Log,
        bracket: 1e-3,
    });
    run_sweep(&config)
}

fn regime_map(out: &mut Outcome, id: &str, range: [f64; 2]) {
    let rep = sweep_report(range, 12);
    let ordered = rep.sequence.first() == Some(&Topology::Toroid)
        && rep.sequence.last() == Some(&Topology::Spheroid)
        && rep.monotone;
    let (width, lem) = rep
        .transition
        .as_ref()
        .map_or((f64::NAN, false), |t| (t.width, t.lemniscate.is_some()));
    out.record(
        id,
        rep.errors.is_empty() && ordered && width <= 1e-3 && lem,
        format!(
            "sigma sweep {range:?}: sequence={:?}, monotone={}, transition width={width:.2e} (<=1e-3), lemniscate band point found={lem}, errors={}",
            rep.sequence,
            rep.monotone,
            rep.errors.len()
        ),
    );
}

fn benchmark_solvers() -> Vec<(&'static str, FieldSolver)> {
    let tol = tolerances();
    let specs = [
        ("hill", hill(), SpeedSetting::Fixed(2.0 / 15.0)),
        ("lamb", lamb(), SpeedSetting::Fixed(1.0)),
        ("patch d/50", patch(0.02), CALIBRATE),
        ("ring sigma=0.02", ring(0.02), CALIBRATE),
        ("ring sigma=0.004", ring(0.004), CALIBRATE),
    ];
    specs
        .into_iter()
        .map(|(name, spec, speed)| (name, prepare(&spec, speed, &tol).expect(name).solver))
        .collect()
}

fn criterion_6(out: &mut Outcome, solvers: &[(&str, FieldSolver)]) {
    let per = 200 / solvers.len();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut drift: f64 = 0.0;
    let mut reversal: f64 = 0.0;
    let mut traced = 0;
    let mut errors = Vec::new();
    for (name, solver) in solvers {
        let s = solver.support_scale();
        let transit = s / solver.speed();
        let field = QuadratureField::new(solver);
        let seeds: Vec<Point> = (0..per)
            .map(|_| Point::new(rng.gen_range(-2.0 * s..2.0 * s), rng.gen_range(0.02 * s..2.0 * s)))
            .collect();
        let opts = TraceOptions::new(2.0 * transit).with_tolerance(DEFAULT_ODE_TOLERANCE);
        let res: Result<f64> = seeds
            .par_iter()
            .map(|&p| trace(&field, p, &opts).map(|t| t.max_phi_drift))
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)));
        match res {
            Ok(d) => {
                drift = drift.max(d);
                traced += seeds.len();
            }
            Err(e) => errors.push(format!("{name}: {e}")),
        }
        let rev: Result<f64> = seeds[..4]
            .par_iter()
            .map(|&p| time_reversal_error(&field, p, transit, DEFAULT_ODE_TOLERANCE).map(|(e, b)| e / b))
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)));
        match rev {
            Ok(r) => reversal = reversal.max(r),
            Err(e) => errors.push(format!("{name} reversal: {e}")),
        }
    }
    out.record(
        "6",
        errors.is_empty() && traced == 200 && drift <= 1e-6 && reversal <= 10.0,
        format!(
            "{traced} traces over {} vortices: max relative phi drift={drift:.2e} (<=1e-6), time reversal / budget={reversal:.2} (<=10){}",
            solvers.len(),
            if errors.is_empty() { String::new() } else { format!(", errors: {errors:?}") }
        ),
    );
}

fn criterion_7(out: &mut Outcome, solvers: &[(&str, FieldSolver)]) {
    let radii = [5.0, 7.0, 10.0, 14.0, 20.0, 28.0, 38.0, 50.0];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, solver) in solvers.iter().filter(|(_, s)| s.is_ring()) {
        match solver.decay_probe(&radii) {
            Ok(v) => {
                let slope = log_slope(&radii, &v);
                let dec = v.windows(2).all(|w| w[1] < w[0]);
                ok &= slope <= -2.5 && dec;
                parts.push(format!("{name}: slope={slope:.3}, decreasing={dec}"));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{name}: {e}"));
            }
        }
    }
    out.record("7", ok, format!("ring |psi/r^2| over R in [5,50], slope <= -2.5: {}", parts.join("; ")));
}

fn criterion_8(out: &mut Outcome, solvers: &[(&str, FieldSolver)]) {
    let tol = tolerances();
    let pair = prepare(&VorticitySpec::gaussian_pair(1.0, 1.0, 0.2).unwrap(), CALIBRATE, &tol)
        .expect("gaussian pair")
        .solver;
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, solver) in solvers.iter().map(|(n, s)| (*n, s)).chain([("gaussian pair", &pair)]) {
        let worst = strict_steiner_max(solver, 500, 8);
        ok &= worst < 0.0;
        parts.push(format!("{name}: {worst:.2e}"));
    }
    out.record(
        "8",
        ok,
        format!("largest axial stream derivative at 500 points with axial > 0 (<0): {}", parts.join("; ")),
    );
}

fn criterion_9(out: &mut Outcome) {
    match (ring_kernel_oracle(1000, 9), plane_kernel_oracle(1000, 9)) {
        (Ok(r), Ok(p)) => out.record(
            "9",
            r.max_relative_error <= 1e-10 && r.max_derivative_ratio <= 1.0 && p.max_relative_error <= 1e-10 && p.max_derivative_ratio <= 1.0,
            format!(
                "1000 points: ring value rel err={:.2e}, plane value rel err={:.2e} (<=1e-10); derivative error / max(1e-8, 1e-5|d|): ring={:.2e}, plane={:.2e} (<=1)",
                r.max_relative_error, p.max_relative_error, r.max_derivative_ratio, p.max_derivative_ratio
            ),
        ),
        (Err(e), _) | (_, Err(e)) => out.record("9", false, format!("kernel oracle: {e}")),
    }
}

fn criterion_10(out: &mut Outcome) {
    let opts = InvarianceOptions {
        particles: 1000,
        horizon: 50.0,
        ..InvarianceOptions::default()
    };
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, spec, speed) in [
        ("hill", hill(), SpeedSetting::Fixed(2.0 / 15.0)),
        ("lamb", lamb(), SpeedSetting::Fixed(1.0)),
        ("toroidal ring sigma=0.004", ring(0.004), CALIBRATE),
    ] {
        let res = analyze(spec, speed).and_then(|c| {
            let table = invariance_table(&c.solver, &c.domain)?;
            Ok((c.topology, verify_domain_invariance(&table, &c.domain, &opts)?))
        });
        match res {
            Ok((topology, r)) => {
                let frac = r.interior_fraction();
                ok &= frac >= 0.99;
                let mut part = format!(
                    "{name}: interior kept {}/{} ({frac:.4}, undecided {})",
                    r.interior.kept, r.interior.seeded, r.interior.undecided
                );
                match topology {
                    Topology::Toroid => {
                        ok &= r.ahead.through_hole > 0;
                        part += &format!(
                            ", ahead seeds through hole {}/{} (>0), exited behind {}",
                            r.ahead.through_hole, r.ahead.seeded, r.ahead.exited_behind
                        );
                    }
                    Topology::Oval2D => {
                        let never = r.exterior.kept == r.exterior.seeded;
                        ok &= never;
                        part += &format!(", exterior never cross {}/{}", r.exterior.kept, r.exterior.seeded);
                    }
                    _ => {}
                }
                parts.push(part);
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{name}: {e}"));
            }
        }
    }
    out.record("10", ok, format!("T=50, >=99% kept: {}", parts.join("; ")));
}

fn main() {
    let t0 = Instant::now();
    let mut out = Outcome { lines: Vec::new() };
    criterion_1(&mut out);
    criterion_2(&mut out);
    criterion_3(&mut out);
    thin_ring(&mut out, "4", 0.02);
    thin_ring(&mut out, "S4", 0.004);
    regime_map(&mut out, "5", [0.02, 0.6]);
    regime_map(&mut out, "S5", [0.002, 0.6]);
    let solvers = benchmark_solvers();
    criterion_6(&mut out, &solvers);
    criterion_7(&mut out, &solvers);
    criterion_8(&mut out, &solvers);
    criterion_9(&mut out);
    criterion_10(&mut out);
    let failed: Vec<&str> = out.lines.iter().filter(|(_, p)| !p).map(|(id, _)| id.as_str()).collect();
    println!(
        "acceptance: {} passed, {} failed {failed:?} in {:.0}s",
        out.lines.len() - failed.len(),
        failed.len(),
        t0.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
