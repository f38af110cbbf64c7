//! Report documents written by the CLI.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::{RunConfig, Tolerances};
use crate::domain::{Case, Classification, DomainResult, Topology};
use crate::error::Error;
use crate::field::steiner::SteinerReport;
use crate::point::Point;
use crate::tracer::{InvarianceReport, StreamlineTrace, Verdict};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl ToolInfo {
    pub fn current() -> Self {
        ToolInfo {
            name: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

/// A failure attributed to the pipeline stage that raised it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageError {
    pub stage: String,
    pub message: String,
    pub exit_code: i32,
}

impl StageError {
    pub fn new(stage: &str, err: &Error) -> Self {
        StageError {
            stage: stage.into(),
            message: err.to_string(),
            exit_code: err.exit_code(),
        }
    }

    pub fn precondition(stage: &str, message: String) -> Self {
        StageError {
            stage: stage.into(),
            message,
            exit_code: 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpeedSource {
    Given,
    Calibrated,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeedReport {
    pub value: f64,
    pub source: SpeedSource,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub seed: Point,
    pub verdict: Verdict,
    pub phi_seed: f64,
    pub max_phi_drift: f64,
    pub escape_asymptote: Option<f64>,
    pub closed_orbit_period: Option<f64>,
    pub final_time: f64,
    pub end: Point,
    pub steps: usize,
    pub diagnostic: Option<String>,
}

impl From<&StreamlineTrace> for TraceSummary {
    fn from(t: &StreamlineTrace) -> Self {
        TraceSummary {
            seed: t.seed,
            verdict: t.verdict,
            phi_seed: t.phi_seed,
            max_phi_drift: t.max_phi_drift,
            escape_asymptote: t.escape_asymptote,
            closed_orbit_period: t.closed_orbit_period,
            final_time: t.final_time,
            end: t.end,
            steps: t.steps,
            diagnostic: t.diagnostic.clone(),
        }
    }
}

/// Output of `analyze` and `trace`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub config: RunConfig,
    pub tolerances: Option<Tolerances>,
    pub steiner: Option<SteinerReport>,
    pub speed: Option<SpeedReport>,
    pub steadiness_residual: Option<f64>,
    pub classification: Option<Classification>,
    pub domain: Option<DomainResult>,
    pub invariance: Option<InvarianceReport>,
    pub traces: Vec<TraceSummary>,
    pub errors: Vec<StageError>,
    /// Field name to the operation that produced it.
    pub provenance: BTreeMap<String, String>,
    /// Wall-clock seconds per stage; not covered by determinism.
    pub timing: BTreeMap<String, f64>,
}

impl ReportDocument {
    pub fn new(config: RunConfig) -> Self {
        ReportDocument {
            schema_version: SCHEMA_VERSION,
            tool: ToolInfo::current(),
            config,
            tolerances: None,
            steiner: None,
            speed: None,
            steadiness_residual: None,
            classification: None,
            domain: None,
            invariance: None,
            traces: Vec::new(),
            errors: Vec::new(),
            provenance: BTreeMap::new(),
            timing: BTreeMap::new(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.errors.first().map_or(0, |e| e.exit_code)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: f64,
    pub speed: Option<f64>,
    pub center_speed: Option<f64>,
    pub speed_ratio: Option<f64>,
    pub topology: Option<Topology>,
    pub case: Option<Case>,
    pub steadiness_residual: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemniscatePoint {
    pub parameter: f64,
    pub speed_ratio: f64,
}

/// Bracket `[lower, upper]` of the parameter where `centre speed − W`
/// changes sign.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub lower: f64,
    pub upper: f64,
    pub width: f64,
    pub from: Topology,
    pub to: Topology,
    pub iterations: usize,
    /// A parameter inside the bracket classified in the lemniscate band.
    pub lemniscate: Option<LemniscatePoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub config: RunConfig,
    pub parameter: String,
    pub rows: Vec<SweepRow>,
    /// Distinct classes in parameter order, consecutive repeats collapsed.
    pub sequence: Vec<Topology>,
    pub monotone: bool,
    pub transition: Option<Transition>,
    pub notes: Vec<String>,
    pub errors: Vec<StageError>,
    pub timing: BTreeMap<String, f64>,
}

impl SweepReport {
    pub fn exit_code(&self) -> i32 {
        self.errors.first().map_or(0, |e| e.exit_code)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub name: String,
    pub passed: bool,
    pub measured: Option<f64>,
    pub threshold: Option<f64>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidateReport {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub config: RunConfig,
    pub properties: Vec<PropertyResult>,
    pub passed: bool,
    pub timing: BTreeMap<String, f64>,
}

impl ValidateReport {
    pub fn failed(&self) -> Vec<&str> {
        self.properties
            .iter()
            .filter(|p| !p.passed)
            .map(|p| p.name.as_str())
            .collect()
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            2
        }
    }
}
