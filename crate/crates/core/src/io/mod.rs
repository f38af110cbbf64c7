//! Configuration, pipelines, reports and file output for the command line.

pub mod config;
pub mod output;
pub mod pipeline;
pub mod report;
pub mod validate;

pub use config::{Command, RunConfig, SpeedSetting, Tolerances};
pub use pipeline::{run_analyze, run_sweep, run_trace, AnalyzeOutput};
pub use report::{ReportDocument, StageError, SweepReport, ValidateReport};
pub use validate::run_validate;
