//! Run configuration: JSON document, environment overrides of tolerance
//! defaults, and startup validation.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::domain::extract::DEFAULT_ROOT_TOLERANCE;
use crate::error::{Error, Result};
use crate::field::vorticity::VorticitySpec;
use crate::point::Point;
use crate::solver::DEFAULT_STREAM_TOLERANCE;
use crate::tracer::DEFAULT_ODE_TOLERANCE;

pub const ENV_TOL_QUADRATURE: &str = "VORTEX_TOL_QUADRATURE";
pub const ENV_TOL_ROOT: &str = "VORTEX_TOL_ROOT";
pub const ENV_TOL_ODE: &str = "VORTEX_TOL_ODE";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Analyze,
    Sweep,
    Trace,
    Validate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpeedKeyword {
    Calibrate,
}

/// A fixed traveling speed or `"calibrate"`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpeedSetting {
    Fixed(f64),
    Keyword(SpeedKeyword),
}

impl SpeedSetting {
    pub fn fixed(&self) -> Option<f64> {
        match self {
            SpeedSetting::Fixed(w) => Some(*w),
            SpeedSetting::Keyword(_) => None,
        }
    }
}

/// Tolerances; missing entries take the environment value, then the
/// built-in default.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ode: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub quadrature: f64,
    pub root: f64,
    pub ode: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: String,
    pub range: [f64; 2],
    pub steps: usize,
    #[serde(default)]
    pub spacing: Spacing,
    /// Target width of the transition bracket.
    #[serde(default = "default_bracket")]
    pub bracket: f64,
}

fn default_bracket() -> f64 {
    1e-3
}

impl SweepConfig {
    pub fn values(&self) -> Vec<f64> {
        let [a, b] = self.range;
        let n = self.steps;
        (0..n)
            .map(|k| {
                if k == n - 1 {
                    return b;
                }
                let t = k as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => a + (b - a) * t,
                    Spacing::Log => a * (b / a).powf(t),
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvarianceConfig {
    #[serde(default = "default_particles")]
    pub particles: usize,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_ahead")]
    pub ahead_particles: usize,
    #[serde(default = "default_rng_seed")]
    pub rng_seed: u64,
}

fn default_particles() -> usize {
    1000
}

fn default_horizon() -> f64 {
    50.0
}

fn default_ahead() -> usize {
    50
}

fn default_rng_seed() -> u64 {
    0x5EED
}

impl Default for InvarianceConfig {
    fn default() -> Self {
        InvarianceConfig {
            particles: default_particles(),
            horizon: default_horizon(),
            ahead_particles: default_ahead(),
            rng_seed: default_rng_seed(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceConfig {
    #[serde(default = "default_horizon")]
    pub horizon: f64,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            horizon: default_horizon(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    pub vortex: VorticitySpec,
    pub speed: SpeedSetting,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_list: Option<Vec<Point>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invariance: Option<InvarianceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceConfig>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn env_tolerance(name: &str) -> Result<Option<f64>> {
    match std::env::var(name) {
        Ok(v) => v
            .trim()
            .parse::<f64>()
            .map(Some)
            .map_err(|_| Error::invalid(format!("{name}={v} is not a number"))),
        Err(_) => Ok(None),
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// Config value, else environment, else default.
    pub fn resolved_tolerances(&self) -> Result<Tolerances> {
        let pick = |cfg: Option<f64>, env: &str, default: f64| -> Result<f64> {
            Ok(match cfg {
                Some(v) => v,
                None => env_tolerance(env)?.unwrap_or(default),
            })
        };
        let tol = Tolerances {
            quadrature: pick(self.tolerances.quadrature, ENV_TOL_QUADRATURE, DEFAULT_STREAM_TOLERANCE)?,
            root: pick(self.tolerances.root, ENV_TOL_ROOT, DEFAULT_ROOT_TOLERANCE)?,
            ode: pick(self.tolerances.ode, ENV_TOL_ODE, DEFAULT_ODE_TOLERANCE)?,
        };
        for (name, v) in [
            ("quadrature", tol.quadrature),
            ("root", tol.root),
            ("ode", tol.ode),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} tolerance must be positive, got {v}")));
            }
        }
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        if let SpeedSetting::Fixed(w) = self.speed {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::invalid(format!("speed must be positive, got {w}")));
            }
        }
        self.resolved_tolerances()?;
        if let Some(s) = &self.sweep {
            let [a, b] = s.range;
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::invalid(format!("sweep range [{a}, {b}] is empty")));
            }
            if s.steps < 2 {
                return Err(Error::invalid("sweep needs at least two steps"));
            }
            if s.spacing == Spacing::Log && a <= 0.0 {
                return Err(Error::invalid("logarithmic sweep needs a positive range"));
            }
            if !(s.bracket > 0.0) {
                return Err(Error::invalid("sweep bracket must be positive"));
            }
            self.vortex.parameter(&s.parameter)?;
        }
        if let Some(inv) = &self.invariance {
            if !(inv.horizon > 0.0) {
                return Err(Error::invalid("invariance horizon must be positive"));
            }
        }
        if let Some(t) = &self.trace {
            if !(t.horizon > 0.0) {
                return Err(Error::invalid("trace horizon must be positive"));
            }
        }
        Ok(())
    }

    pub fn trace_horizon(&self) -> f64 {
        self.trace.unwrap_or_default().horizon
    }
}

/// Creates `dir` if needed and confirms a file can be written there.
pub fn check_output_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let probe = dir.join(".write-probe");
    fs::write(&probe, b"")?;
    fs::remove_file(&probe)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const HILL: &str = r#"{
        "vortex": {"geometry": "ring", "kind": "hill_ball", "amplitude": 1.0, "radius": 1.0},
        "speed": 0.13333333333333333
    }"#;

    #[test]
    fn parses_minimal_config() {
        let c = RunConfig::from_json(HILL).unwrap();
        assert_eq!(c.speed.fixed(), Some(0.13333333333333333));
        assert_eq!(c.output_dir, PathBuf::from("out"));
        assert!(c.sweep.is_none());
    }

    #[test]
    fn parses_calibrate_keyword_and_sweep() {
        let text = r#"{
            "command": "sweep",
            "vortex": {"geometry": "ring", "kind": "gaussian_ring", "circulation": 1.0, "ring_radius": 1.0, "core_width": 0.05},
            "speed": "calibrate",
            "tolerances": {"root": 1e-9},
            "sweep": {"parameter": "core_width", "range": [0.01, 0.1], "steps": 3, "spacing": "log"}
        }"#;
        let c = RunConfig::from_json(text).unwrap();
        assert_eq!(c.speed, SpeedSetting::Keyword(SpeedKeyword::Calibrate));
        let v = c.sweep.as_ref().unwrap().values();
        assert!((v[1] - 0.1f64.sqrt() * 0.1f64.sqrt() * 0.1f64.sqrt()).abs() < 1e-12);
        assert_eq!(c.resolved_tolerances().unwrap().root, 1e-9);
    }

    #[test]
    fn rejects_bad_values() {
        let bad_speed = HILL.replace("0.13333333333333333", "-1");
        assert!(RunConfig::from_json(&bad_speed).is_err());
        let bad_tol = HILL.replace("\"speed\"", "\"tolerances\": {\"ode\": 0}, \"speed\"");
        assert!(RunConfig::from_json(&bad_tol).is_err());
        let bad_sweep = HILL.replace(
            "\"speed\"",
            "\"sweep\": {\"parameter\": \"radius\", \"range\": [1, 1], \"steps\": 4}, \"speed\"",
        );
        assert!(RunConfig::from_json(&bad_sweep).is_err());
        let bad_param = HILL.replace(
            "\"speed\"",
            "\"sweep\": {\"parameter\": \"nope\", \"range\": [1, 2], \"steps\": 4}, \"speed\"",
        );
        assert!(RunConfig::from_json(&bad_param).is_err());
        assert!(RunConfig::from_json(&HILL.replace("\"speed\"", "\"sped\"")).is_err());
    }

    #[test]
    fn round_trips() {
        let c = RunConfig::from_json(HILL).unwrap();
        let back = RunConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn output_dir_probe() {
        let dir = tempfile::tempdir().unwrap();
        let sub = dir.path().join("a/b");
        check_output_dir(&sub).unwrap();
        assert!(sub.is_dir());
    }
}
