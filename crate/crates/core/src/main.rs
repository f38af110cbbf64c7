use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vortex_atmosphere::io::config::check_output_dir;
use vortex_atmosphere::io::output::{
    read_seeds_csv, write_boundary_csv, write_field_csv, write_json, write_regime_csv,
    write_traces_csv, BOUNDARY_FILE, FIELD_FILE, REGIME_FILE, REPORT_FILE, TRACE_CSV_FILE,
    TRACE_JSON_FILE, TRANSITION_FILE, VALIDATE_FILE,
};
use vortex_atmosphere::io::{run_analyze, run_sweep, run_trace, run_validate, RunConfig};
use vortex_atmosphere::Error;

#[derive(Parser)]
#[command(name = "vortex-atmosphere", version, about = "Vortex domains and atmospheres of traveling vortex pairs and rings")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` of the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Steiner check, speed, classification, domain, optional invariance and traces.
    Analyze(Common),
    /// Classification over a parameter range.
    Sweep(Common),
    /// Streamlines from a seed file.
    Trace {
        #[command(flatten)]
        common: Common,
        /// CSV with header `axial,radial`.
        #[arg(long)]
        seeds: PathBuf,
    },
    /// Property checks with measured margins.
    Validate(Common),
}

/// Error with its exit code, printed once by `main`.
struct Failure(i32, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.exit_code(), e.to_string())
    }
}

fn load(common: &Common) -> Result<(RunConfig, PathBuf), Failure> {
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| Failure(4, format!("{}: {e}", common.config.display())))?;
    // A malformed document is a precondition failure, not an I/O one.
    let config = RunConfig::from_json(&text).map_err(|e| Failure(2, format!("{}: {e}", common.config.display())))?;
    let out = common.out.clone().unwrap_or_else(|| config.output_dir.clone());
    check_output_dir(&out)?;
    Ok((config, out))
}

fn report_errors<'a>(errors: impl IntoIterator<Item = (&'a str, &'a str)>) {
    for (stage, msg) in errors {
        eprintln!("error [{stage}]: {msg}");
    }
}

fn analyze(common: &Common) -> Result<i32, Failure> {
    let (config, out) = load(common)?;
    let res = run_analyze(&config);
    write_json(&out.join(REPORT_FILE), &res.report)?;
    if let Some(d) = &res.report.domain {
        write_boundary_csv(&out.join(BOUNDARY_FILE), &d.boundary)?;
    }
    if !res.field.is_empty() {
        write_field_csv(&out.join(FIELD_FILE), &res.field)?;
    }
    if !res.traces.is_empty() {
        write_traces_csv(&out.join(TRACE_CSV_FILE), &res.traces)?;
        write_json(&out.join(TRACE_JSON_FILE), &res.traces)?;
    }
    report_errors(res.report.errors.iter().map(|e| (e.stage.as_str(), e.message.as_str())));
    if let (Some(c), Some(d)) = (&res.report.classification, &res.report.domain) {
        println!(
            "{:?} (case {:?}), W = {}, centre speed = {}, L = {}, R = {}",
            c.topology, d.case, c.speed, c.center_speed, d.inner_radius, d.outer_radius
        );
    }
    Ok(res.report.exit_code())
}

fn sweep(common: &Common) -> Result<i32, Failure> {
    let (config, out) = load(common)?;
    if config.sweep.is_none() {
        return Err(Failure(2, "config has no `sweep` section".into()));
    }
    let rep = run_sweep(&config);
    write_regime_csv(&out.join(REGIME_FILE), &rep.rows)?;
    write_json(&out.join(TRANSITION_FILE), &rep)?;
    report_errors(rep.errors.iter().map(|e| (e.stage.as_str(), e.message.as_str())));
    println!("sequence {:?}, monotone {}", rep.sequence, rep.monotone);
    if let Some(t) = &rep.transition {
        println!("transition in [{}, {}]", t.lower, t.upper);
    }
    Ok(rep.exit_code())
}

fn trace_cmd(common: &Common, seeds: &Path) -> Result<i32, Failure> {
    let (config, out) = load(common)?;
    let seeds = read_seeds_csv(seeds)?;
    let (report, traces) = run_trace(&config, &seeds);
    write_json(&out.join(REPORT_FILE), &report)?;
    write_traces_csv(&out.join(TRACE_CSV_FILE), &traces)?;
    write_json(&out.join(TRACE_JSON_FILE), &traces)?;
    report_errors(report.errors.iter().map(|e| (e.stage.as_str(), e.message.as_str())));
    for t in &report.traces {
        println!("({}, {}) -> {:?}", t.seed.axial, t.seed.radial, t.verdict);
    }
    Ok(report.exit_code())
}

fn validate(common: &Common) -> Result<i32, Failure> {
    let (config, out) = load(common)?;
    let rep = run_validate(&config);
    write_json(&out.join(VALIDATE_FILE), &rep)?;
    for p in &rep.properties {
        let status = if p.passed { "PASS" } else { "FAIL" };
        let measured = p.measured.map(|m| format!(" measured={m:e}")).unwrap_or_default();
        let threshold = p.threshold.map(|t| format!(" threshold={t:e}")).unwrap_or_default();
        println!("{status} {}{measured}{threshold} {}", p.name, p.detail);
    }
    Ok(rep.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Cmd::Analyze(c) => analyze(c),
        Cmd::Sweep(c) => sweep(c),
        Cmd::Trace { common, seeds } => trace_cmd(common, seeds),
        Cmd::Validate(c) => validate(c),
    };
    match res {
        Ok(code) => ExitCode::from(code as u8),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code as u8)
        }
    }
}
