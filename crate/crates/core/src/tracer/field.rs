//! Velocity fields in the frame moving with the vortex.
//!
//! [`QuadratureField`] evaluates every point by quadrature. [`TabulatedField`]
//! interpolates a table built once from the same quadrature and is meant for
//! long or many traces. The table stores `q = ψ/r²` (rings) or `𝒢` (dipoles)
//! with exact first derivatives at the nodes, and the velocity is derived from
//! the interpolant itself, so the tabulated `φ` is an exact invariant of the
//! tabulated flow.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::point::Point;
use crate::solver::FieldSolver;

/// Relative stream and moving-frame velocity at a point.
pub trait MovingFrameField: Sync {
    fn is_ring(&self) -> bool;
    fn speed(&self) -> f64;
    fn support_scale(&self) -> f64;
    /// `(φ, U)` with `U = v − W e_axial`.
    fn evaluate(&self, p: Point) -> Result<(f64, [f64; 2])>;

    fn relative_stream(&self, p: Point) -> Result<f64> {
        Ok(self.evaluate(p)?.0)
    }

    fn velocity(&self, p: Point) -> Result<[f64; 2]> {
        Ok(self.evaluate(p)?.1)
    }

    /// Normalisation of `φ` drifts: `W·scale²` (rings) or `W·scale`.
    fn phi_scale(&self) -> f64 {
        let s = self.support_scale();
        if self.is_ring() {
            self.speed() * s * s
        } else {
            self.speed() * s
        }
    }
}

fn checked(p: Point, phi: f64, u: [f64; 2]) -> Result<(f64, [f64; 2])> {
    if phi.is_finite() && u[0].is_finite() && u[1].is_finite() {
        Ok((phi, u))
    } else {
        Err(Error::Inconsistent(format!(
            "non-finite velocity at ({}, {})",
            p.axial, p.radial
        )))
    }
}

/// Direct quadrature at every evaluation.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureField<'a> {
    solver: &'a FieldSolver,
}

impl<'a> QuadratureField<'a> {
    pub fn new(solver: &'a FieldSolver) -> Self {
        QuadratureField { solver }
    }
}

impl MovingFrameField for QuadratureField<'_> {
    fn is_ring(&self) -> bool {
        self.solver.is_ring()
    }

    fn speed(&self) -> f64 {
        self.solver.speed()
    }

    fn support_scale(&self) -> f64 {
        self.solver.support_scale()
    }

    fn evaluate(&self, p: Point) -> Result<(f64, [f64; 2])> {
        let (stream, v) = self.solver.stream_and_velocity(p);
        let phi = self.solver.relative(p, stream);
        checked(p, phi, [v[0] - self.solver.speed(), v[1]])
    }
}

/// Node spacing grows by this amount per unit distance from the fine window.
const GROWTH: f64 = 0.15;
/// Fine spacing is the smallest support feature divided by this.
const FINE_DIVISOR: f64 = 24.0;
/// Coarse spacing is the table extent divided by this.
const COARSE_DIVISOR: f64 = 64.0;

/// Nodes on `[0, end]`, spacing `fine` on `[lo, hi]` and growing linearly
/// with the distance from it, capped at `coarse`.
fn graded_nodes(end: f64, lo: f64, hi: f64, fine: f64, coarse: f64) -> Vec<f64> {
    let spacing = |x: f64| {
        let d = (lo - x).max(x - hi).max(0.0);
        (fine + GROWTH * d).min(coarse)
    };
    let mut nodes = vec![0.0];
    let mut x = 0.0;
    loop {
        let mut h = spacing(x);
        h = h.min(spacing(x + h));
        if x + 1.5 * h >= end {
            nodes.push(end);
            return nodes;
        }
        x += h;
        nodes.push(x);
    }
}

/// Hermite basis on `[0,1]`: values and derivatives of `h00, h01, h10, h11`.
#[inline]
fn basis(t: f64) -> ([f64; 4], [f64; 4]) {
    let t2 = t * t;
    let t3 = t2 * t;
    (
        [
            2.0 * t3 - 3.0 * t2 + 1.0,
            -2.0 * t3 + 3.0 * t2,
            t3 - 2.0 * t2 + t,
            t3 - t2,
        ],
        [
            6.0 * t2 - 6.0 * t,
            -6.0 * t2 + 6.0 * t,
            3.0 * t2 - 4.0 * t + 1.0,
            3.0 * t2 - 2.0 * t,
        ],
    )
}

/// Derivative at node `k` of samples `v` on nodes `x` by the three-point
/// formula (one-sided two-point at the far end).
fn node_derivative(x: &[f64], v: &[f64], k: usize) -> f64 {
    let n = x.len();
    if k + 1 == n {
        return (v[k] - v[k - 1]) / (x[k] - x[k - 1]);
    }
    let (h1, h2) = (x[k] - x[k - 1], x[k + 1] - x[k]);
    let (d1, d2) = ((v[k] - v[k - 1]) / h1, (v[k + 1] - v[k]) / h2);
    (h2 * d1 + h1 * d2) / (h1 + h2)
}

/// Bicubic Hermite table on the quarter plane `axial ≥ 0, radial ≥ 0`.
#[derive(Clone, Debug)]
pub struct TabulatedField {
    solver: FieldSolver,
    axial: Vec<f64>,
    radial: Vec<f64>,
    /// `[f, f_axial, f_radial, f_cross]` per node, row-major in axial.
    data: Vec<[f64; 4]>,
}

impl TabulatedField {
    /// Tabulates on `[0, axial_extent] × [0, radial_extent]`; outside the
    /// table the field falls back to quadrature.
    pub fn build(solver: &FieldSolver, axial_extent: f64, radial_extent: f64) -> Result<Self> {
        if !(axial_extent > 0.0 && radial_extent > 0.0) {
            return Err(Error::invalid("table extents must be positive"));
        }
        let b = solver.vortex().vorticity.bounding_box();
        let feature = b
            .axial_half_width()
            .min(0.5 * (b.radial_max - b.radial_min));
        let fine = feature / FINE_DIVISOR;
        let pad = 0.5 * feature;
        let axial = graded_nodes(
            axial_extent,
            0.0,
            b.axial_half_width() + pad,
            fine,
            (axial_extent / COARSE_DIVISOR).max(fine),
        );
        let radial = graded_nodes(
            radial_extent,
            (b.radial_min - pad).max(0.0),
            b.radial_max + pad,
            fine,
            (radial_extent / COARSE_DIVISOR).max(fine),
        );
        let ring = solver.is_ring();
        let (na, nr) = (axial.len(), radial.len());
        // [f, f_axial, f_radial] from quadrature
        let raw: Vec<[f64; 3]> = (0..na * nr)
            .into_par_iter()
            .map(|idx| {
                let (z, r) = (axial[idx / nr], radial[idx % nr]);
                let (stream, v) = solver.stream_and_velocity(Point::new(z, r));
                if ring {
                    if r == 0.0 {
                        [0.5 * v[0], 0.0, 0.0]
                    } else {
                        let q = stream / (r * r);
                        [q, -v[1] / r, (v[0] - 2.0 * q) / r]
                    }
                } else {
                    // 𝒢₁ = −u², 𝒢₂ = u¹
                    [stream, -v[1], v[0]]
                }
            })
            .collect();
        let mut data: Vec<[f64; 4]> = raw.iter().map(|v| [v[0], v[1], v[2], 0.0]).collect();
        if ring {
            // axial derivative on the axis row from the tabulated axis speed
            let row: Vec<f64> = (0..na).map(|i| raw[i * nr][0]).collect();
            for i in 1..na {
                data[i * nr][1] = node_derivative(&axial, &row, i);
            }
        }
        for i in 0..na {
            let col: Vec<f64> = (0..nr).map(|j| data[i * nr + j][1]).collect();
            for j in 0..nr {
                data[i * nr + j][3] = if j == 0 {
                    if ring {
                        // q_axial is even in r
                        0.0
                    } else {
                        // 𝒢₁ is odd in x₂
                        col[1] / radial[1]
                    }
                } else if i == 0 {
                    // f_axial vanishes on the symmetry line
                    0.0
                } else {
                    node_derivative(&radial, &col, j)
                };
            }
        }
        if data.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Inconsistent("non-finite value in field table".into()));
        }
        Ok(TabulatedField {
            solver: solver.clone(),
            axial,
            radial,
            data,
        })
    }

    pub fn node_count(&self) -> usize {
        self.data.len()
    }

    pub fn extent(&self) -> (f64, f64) {
        (self.axial[self.axial.len() - 1], self.radial[self.radial.len() - 1])
    }

    /// Interpolant and its two first derivatives at a folded point, or
    /// `None` outside the table.
    fn interpolate(&self, a: f64, r: f64) -> Option<[f64; 3]> {
        let (ea, er) = self.extent();
        if a > ea || r > er {
            return None;
        }
        let cell = |x: &[f64], v: f64| x.partition_point(|&n| n <= v).clamp(1, x.len() - 1) - 1;
        let (i, j) = (cell(&self.axial, a), cell(&self.radial, r));
        let (ha, hr) = (
            self.axial[i + 1] - self.axial[i],
            self.radial[j + 1] - self.radial[j],
        );
        let (ba, dba) = basis((a - self.axial[i]) / ha);
        let (br, dbr) = basis((r - self.radial[j]) / hr);
        let nr = self.radial.len();
        let mut out = [0.0; 3];
        for (ci, &ii) in [i, i + 1].iter().enumerate() {
            for (cj, &jj) in [j, j + 1].iter().enumerate() {
                let [f, fa, fr, fx] = self.data[ii * nr + jj];
                let (va, vha) = (ba[ci], ha * ba[2 + ci]);
                let (da, dha) = (dba[ci] / ha, dba[2 + ci]);
                let (vr, vhr) = (br[cj], hr * br[2 + cj]);
                let (dr, dhr) = (dbr[cj] / hr, dbr[2 + cj]);
                out[0] += f * va * vr + fa * vha * vr + fr * va * vhr + fx * vha * vhr;
                out[1] += f * da * vr + fa * dha * vr + fr * da * vhr + fx * dha * vhr;
                out[2] += f * va * dr + fa * vha * dr + fr * va * dhr + fx * vha * dhr;
            }
        }
        Some(out)
    }
}

impl MovingFrameField for TabulatedField {
    fn is_ring(&self) -> bool {
        self.solver.is_ring()
    }

    fn speed(&self) -> f64 {
        self.solver.speed()
    }

    fn support_scale(&self) -> f64 {
        self.solver.support_scale()
    }

    fn evaluate(&self, p: Point) -> Result<(f64, [f64; 2])> {
        let (a, r) = (p.axial.abs(), p.radial.abs());
        let Some([f, fa, fr]) = self.interpolate(a, r) else {
            return QuadratureField::new(&self.solver).evaluate(p);
        };
        let w = self.speed();
        let sa = if p.axial < 0.0 { -1.0 } else { 1.0 };
        let sr = if p.radial < 0.0 { -1.0 } else { 1.0 };
        let (phi, u) = if self.is_ring() {
            // q even in both coordinates
            let phi = r * r * (f - 0.5 * w);
            (phi, [2.0 * f + r * fr - w, -sr * sa * r * fa])
        } else {
            // 𝒢 even in x₁, odd in x₂
            (sr * f - w * p.radial, [fr - w, -sa * sr * fa])
        };
        checked(p, phi, u)
    }
}
