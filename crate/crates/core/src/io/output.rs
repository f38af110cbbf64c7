//! JSON and CSV writers. Every CSV starts with a `# schema_version=N`
//! comment line followed by a header row.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::report::{SweepRow, SCHEMA_VERSION};
use crate::domain::BoundaryCurve;
use crate::error::{Error, Result};
use crate::point::Point;
use crate::solver::FieldSample;
use crate::tracer::StreamlineTrace;

pub const REPORT_FILE: &str = "report.json";
pub const BOUNDARY_FILE: &str = "boundary.csv";
pub const FIELD_FILE: &str = "field.csv";
pub const TRACE_CSV_FILE: &str = "traces.csv";
pub const TRACE_JSON_FILE: &str = "traces.json";
pub const REGIME_FILE: &str = "regime.csv";
pub const TRANSITION_FILE: &str = "transition.json";
pub const VALIDATE_FILE: &str = "validate.json";

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "# schema_version={SCHEMA_VERSION}")?;
    Ok(csv::Writer::from_writer(out))
}

fn finish(w: csv::Writer<BufWriter<File>>) -> Result<()> {
    let mut inner = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    inner.flush()?;
    Ok(())
}

/// Serialized name of a unit enum, empty for `None`.
fn name<T: Serialize>(v: &Option<T>) -> Result<String> {
    Ok(match v {
        Some(t) => serde_json::to_value(t)?
            .as_str()
            .unwrap_or_default()
            .to_string(),
        None => String::new(),
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `s, l` pairs of the boundary curve.
pub fn write_boundary_csv(path: &Path, boundary: &BoundaryCurve) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["s", "l"])?;
    for [s, l] in &boundary.points {
        w.write_record([s.to_string(), l.to_string()])?;
    }
    finish(w)
}

pub fn write_field_csv(path: &Path, samples: &[FieldSample]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "axial",
        "radial",
        "stream",
        "relative_stream",
        "velocity_axial",
        "velocity_radial",
    ])?;
    for s in samples {
        w.write_record([
            s.point.axial.to_string(),
            s.point.radial.to_string(),
            s.stream.to_string(),
            s.relative_stream.to_string(),
            s.velocity[0].to_string(),
            s.velocity[1].to_string(),
        ])?;
    }
    finish(w)
}

/// One row per node: `seed, t, axial, radial, phi`.
pub fn write_traces_csv(path: &Path, traces: &[StreamlineTrace]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["seed", "t", "axial", "radial", "phi"])?;
    for (k, tr) in traces.iter().enumerate() {
        for n in &tr.nodes {
            w.write_record([
                k.to_string(),
                n.t.to_string(),
                n.point.axial.to_string(),
                n.point.radial.to_string(),
                n.phi.to_string(),
            ])?;
        }
    }
    finish(w)
}

pub fn write_regime_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "parameter",
        "speed",
        "center_speed",
        "speed_ratio",
        "topology",
        "case",
        "steadiness_residual",
        "error",
    ])?;
    for r in rows {
        w.write_record([
            r.parameter.to_string(),
            opt(r.speed),
            opt(r.center_speed),
            opt(r.speed_ratio),
            name(&r.topology)?,
            name(&r.case)?,
            opt(r.steadiness_residual),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    finish(w)
}

/// Seeds from a CSV with header `axial,radial` (`#` lines are comments).
pub fn read_seeds_csv(path: &Path) -> Result<Vec<Point>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut out = Vec::new();
    for rec in rdr.deserialize::<(f64, f64)>() {
        let (a, r) = rec?;
        out.push(Point::new(a, r));
    }
    if out.is_empty() {
        return Err(Error::invalid(format!("no seeds in {}", path.display())));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("seeds.csv");
        fs::write(&p, "# seeds\naxial,radial\n0.0, 0.5\n-1.5,0.25\n").unwrap();
        let s = read_seeds_csv(&p).unwrap();
        assert_eq!(s, vec![Point::new(0.0, 0.5), Point::new(-1.5, 0.25)]);
        fs::write(&p, "axial,radial\n").unwrap();
        assert!(read_seeds_csv(&p).is_err());
    }

    #[test]
    fn boundary_csv_has_schema_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("b.csv");
        let b = BoundaryCurve {
            points: vec![[0.0, 1.0], [1.0, 0.0]],
            l0_extrapolated: None,
            l0_axis_root: None,
        };
        write_boundary_csv(&p, &b).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert_eq!(text, "# schema_version=1\ns,l\n0,1\n1,0\n");
    }
}
