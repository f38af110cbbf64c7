use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{BoundingBox, Point};

/// Vorticity sampled on a rectangular grid of the upper half-plane,
/// interpolated bilinearly between samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GriddedDoc", into = "GriddedDoc")]
pub struct GriddedField {
    axial: Vec<f64>,
    radial: Vec<f64>,
    /// Row-major, `values[i * radial.len() + j]` at `(axial[i], radial[j])`.
    values: Vec<f64>,
    source: Option<PathBuf>,
}

/// On-disk form: either a CSV path of `(z, r, value)` triples with a header
/// row, or the triples inline.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct GriddedDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    samples: Option<Vec<[f64; 3]>>,
}

impl TryFrom<GriddedDoc> for GriddedField {
    type Error = Error;

    fn try_from(doc: GriddedDoc) -> Result<Self> {
        match (doc.csv, doc.samples) {
            (Some(path), None) => GriddedField::from_csv(&path),
            (None, Some(samples)) => GriddedField::from_triples(&samples),
            _ => Err(Error::invalid(
                "gridded vorticity needs exactly one of `csv` or `samples`",
            )),
        }
    }
}

impl From<GriddedField> for GriddedDoc {
    fn from(g: GriddedField) -> Self {
        match g.source {
            Some(path) => GriddedDoc {
                csv: Some(path),
                samples: None,
            },
            None => GriddedDoc {
                csv: None,
                samples: Some(g.triples()),
            },
        }
    }
}

impl GriddedField {
    pub fn new(axial: Vec<f64>, radial: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if axial.len() < 2 || radial.len() < 2 {
            return Err(Error::invalid("gridded field needs at least 2x2 samples"));
        }
        if values.len() != axial.len() * radial.len() {
            return Err(Error::invalid(format!(
                "gridded field has {} values for a {}x{} grid",
                values.len(),
                axial.len(),
                radial.len()
            )));
        }
        let increasing = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]);
        if !increasing(&axial) || !increasing(&radial) {
            return Err(Error::invalid("grid coordinates must be strictly increasing"));
        }
        if radial[0] < 0.0 {
            return Err(Error::invalid("grid must lie in the upper half-plane"));
        }
        if values.iter().chain(&axial).chain(&radial).any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite grid sample"));
        }
        if values.iter().any(|&v| v < 0.0) {
            return Err(Error::invalid("vorticity samples must be non-negative"));
        }
        Ok(GriddedField {
            axial,
            radial,
            values,
            source: None,
        })
    }

    /// Build from unordered `(axial, radial, value)` triples covering a full
    /// rectangular grid.
    pub fn from_triples(triples: &[[f64; 3]]) -> Result<Self> {
        let mut axial: Vec<f64> = triples.iter().map(|t| t[0]).collect();
        let mut radial: Vec<f64> = triples.iter().map(|t| t[1]).collect();
        for v in [&mut axial, &mut radial] {
            v.sort_by(f64::total_cmp);
            v.dedup();
        }
        let (na, nr) = (axial.len(), radial.len());
        if na * nr != triples.len() {
            return Err(Error::invalid(format!(
                "{} samples do not form a rectangular {}x{} grid",
                triples.len(),
                na,
                nr
            )));
        }
        let mut values = vec![f64::NAN; na * nr];
        for t in triples {
            let i = axial.binary_search_by(|v| v.total_cmp(&t[0])).expect("present");
            let j = radial.binary_search_by(|v| v.total_cmp(&t[1])).expect("present");
            values[i * nr + j] = t[2];
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::invalid("duplicate grid sample"));
        }
        GriddedField::new(axial, radial, values)
    }

    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path)?;
        let mut triples = Vec::new();
        for record in reader.deserialize() {
            let (a, r, v): (f64, f64, f64) = record?;
            triples.push([a, r, v]);
        }
        let mut g = GriddedField::from_triples(&triples)?;
        g.source = Some(path.to_path_buf());
        Ok(g)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["z", "r", "value"])?;
        for t in self.triples() {
            w.serialize(t)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn triples(&self) -> Vec<[f64; 3]> {
        let nr = self.radial.len();
        let mut out = Vec::with_capacity(self.values.len());
        for (i, &a) in self.axial.iter().enumerate() {
            for (j, &r) in self.radial.iter().enumerate() {
                out.push([a, r, self.values[i * nr + j]]);
            }
        }
        out
    }

    pub fn axial_nodes(&self) -> &[f64] {
        &self.axial
    }

    pub fn radial_nodes(&self) -> &[f64] {
        &self.radial
    }

    pub fn bounding_box(&self) -> BoundingBox {
        BoundingBox {
            axial_min: self.axial[0],
            axial_max: *self.axial.last().unwrap(),
            radial_min: self.radial[0],
            radial_max: *self.radial.last().unwrap(),
        }
    }

    fn locate(nodes: &[f64], x: f64) -> Option<(usize, f64)> {
        let n = nodes.len();
        if x < nodes[0] || x > nodes[n - 1] {
            return None;
        }
        let i = match nodes.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i - 1,
        };
        Some((i, (x - nodes[i]) / (nodes[i + 1] - nodes[i])))
    }

    /// Bilinear value, `None` outside the grid.
    pub fn interpolate(&self, p: Point) -> Option<f64> {
        let (i, t) = Self::locate(&self.axial, p.axial)?;
        let (j, u) = Self::locate(&self.radial, p.radial)?;
        let nr = self.radial.len();
        let f = |a: usize, b: usize| self.values[(i + a) * nr + j + b];
        Some(
            (1.0 - t) * (1.0 - u) * f(0, 0)
                + t * (1.0 - u) * f(1, 0)
                + (1.0 - t) * u * f(0, 1)
                + t * u * f(1, 1),
        )
    }

    /// Cellwise gradient of the bilinear interpolant; zero outside the grid.
    pub fn gradient(&self, p: Point) -> [f64; 2] {
        let (Some((i, t)), Some((j, u))) = (
            Self::locate(&self.axial, p.axial),
            Self::locate(&self.radial, p.radial),
        ) else {
            return [0.0, 0.0];
        };
        let nr = self.radial.len();
        let f = |a: usize, b: usize| self.values[(i + a) * nr + j + b];
        let ha = self.axial[i + 1] - self.axial[i];
        let hr = self.radial[j + 1] - self.radial[j];
        let da = ((1.0 - u) * (f(1, 0) - f(0, 0)) + u * (f(1, 1) - f(0, 1))) / ha;
        let dr = ((1.0 - t) * (f(0, 1) - f(0, 0)) + t * (f(1, 1) - f(1, 0))) / hr;
        [da, dr]
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> GriddedField {
        let axial = vec![-1.0, 0.0, 1.0];
        let radial = vec![0.0, 1.0];
        // value = 2 + axial + 3 * radial on the nodes, reproduced exactly
        let mut values = Vec::new();
        for a in &axial {
            for r in &radial {
                values.push(2.0 + a + 3.0 * r);
            }
        }
        GriddedField::new(axial, radial, values).unwrap()
    }

    #[test]
    fn bilinear_reproduces_affine_data() {
        let g = sample();
        let v = g.interpolate(Point::new(0.25, 0.5)).unwrap();
        assert!((v - (2.0 + 0.25 + 1.5)).abs() < 1e-14);
        assert_eq!(g.gradient(Point::new(0.25, 0.5)), [1.0, 3.0]);
        assert!(g.interpolate(Point::new(1.5, 0.5)).is_none());
    }

    #[test]
    fn triples_roundtrip_through_csv() {
        let g = sample();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("grid.csv");
        g.write_csv(&path).unwrap();
        let back = GriddedField::from_csv(&path).unwrap();
        assert_eq!(back.triples(), g.triples());
    }

    #[test]
    fn rejects_ragged_grid() {
        let t = [[0.0, 0.0, 1.0], [1.0, 0.0, 1.0], [0.0, 1.0, 1.0]];
        assert!(GriddedField::from_triples(&t).is_err());
    }
}
