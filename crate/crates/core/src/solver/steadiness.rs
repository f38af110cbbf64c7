//! Steadiness of a (vorticity, speed) pair in the co-moving frame.
//!
//! With `U = v − W e_axial`, a traveling solution advects its vorticity
//! without change: `U·∇ξ = 0` where `ξ` is smooth and `U·n = 0` on curves
//! where `ξ` jumps. The residual is the normalised weighted L² norm
//! `sqrt(Σ w (U·∇ξ)² / Σ w |U|² |∇ξ|²)` over the core, and the analogous
//! ratio with `U·n` on jump curves; the larger of the two is reported.

use serde::{Deserialize, Serialize};

use super::field::FieldSolver;
use super::quadrature::SupportQuadrature;
use crate::error::{Error, Result};
use crate::field::vorticity::TravelingVortex;
use crate::point::Point;

/// Default tensor order per panel of the area sample set.
pub const DEFAULT_RESOLUTION: usize = 6;

#[derive(Clone, Copy, Debug)]
struct AreaSample {
    w: f64,
    v: [f64; 2],
    g: [f64; 2],
}

#[derive(Clone, Copy, Debug)]
struct LineSample {
    w: f64,
    v: [f64; 2],
    n: [f64; 2],
}

/// Velocities sampled once on the core, so that the residual can be
/// re-evaluated for any speed without further quadrature.
#[derive(Clone, Debug)]
pub struct SteadinessSamples {
    area: Vec<AreaSample>,
    line: Vec<LineSample>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub speed: f64,
    pub residual: f64,
}

impl SteadinessSamples {
    pub fn collect(solver: &FieldSolver, resolution: usize) -> Self {
        let spec = &solver.vortex().vorticity;
        let ring = solver.is_ring();
        let nodes = SupportQuadrature::area_nodes(spec, resolution.max(2));
        let grads: Vec<(Point, f64, [f64; 2])> = nodes
            .into_iter()
            .filter(|(p, _)| spec.value_upper(*p) != 0.0)
            .map(|(p, w)| (p, w, spec.gradient_upper(p)))
            .collect();
        let gmax = grads
            .iter()
            .map(|(_, _, g)| g[0].hypot(g[1]))
            .fold(0.0, f64::max);
        let area = grads
            .into_iter()
            .filter(|(_, _, g)| gmax > 0.0 && g[0].hypot(g[1]) > 1e-6 * gmax)
            .map(|(p, w, g)| AreaSample {
                w,
                v: solver.velocity(p),
                g,
            })
            .collect();

        let mut line = Vec::new();
        let (x, wq) = crate::kernels::quad1d::gauss_legendre(16);
        for curve in spec.jump_curves() {
            let pieces = 4 * resolution.max(2);
            let (t0, t1) = curve.theta;
            let h = (t1 - t0) / pieces as f64;
            for k in 0..pieces {
                for (xi, wi) in x.iter().zip(&wq) {
                    let th = t0 + h * (k as f64 + 0.5 * (xi + 1.0));
                    let (s, c) = th.sin_cos();
                    let p = Point::new(
                        curve.center.axial + curve.radius * c,
                        curve.center.radial + curve.radius * s,
                    );
                    let mut w = 0.5 * h * wi * curve.radius * curve.jump * curve.jump;
                    if ring {
                        w *= p.radial.max(0.0);
                    }
                    if w == 0.0 {
                        continue;
                    }
                    line.push(LineSample {
                        w,
                        v: solver.velocity(p),
                        n: [c, s],
                    });
                }
            }
        }
        SteadinessSamples { area, line }
    }

    pub fn residual(&self, speed: f64) -> f64 {
        let part = |num: f64, den: f64| if den > 0.0 { (num / den).sqrt() } else { 0.0 };
        let (mut an, mut ad) = (0.0, 0.0);
        for s in &self.area {
            let u = [s.v[0] - speed, s.v[1]];
            let dot = u[0] * s.g[0] + u[1] * s.g[1];
            an += s.w * dot * dot;
            ad += s.w * (u[0] * u[0] + u[1] * u[1]) * (s.g[0] * s.g[0] + s.g[1] * s.g[1]);
        }
        let (mut ln, mut ld) = (0.0, 0.0);
        for s in &self.line {
            let u = [s.v[0] - speed, s.v[1]];
            let dot = u[0] * s.n[0] + u[1] * s.n[1];
            ln += s.w * dot * dot;
            ld += s.w * (u[0] * u[0] + u[1] * u[1]);
        }
        part(an, ad).max(part(ln, ld))
    }

    fn max_axial_speed(&self) -> f64 {
        self.area
            .iter()
            .map(|s| s.v[0].abs())
            .chain(self.line.iter().map(|s| s.v[0].abs()))
            .fold(0.0, f64::max)
    }

    /// Speed minimising the residual: a logarithmic scan followed by
    /// golden-section refinement around the best scan point.
    pub fn calibrate(&self) -> Result<Calibration> {
        let top = 2.0 * self.max_axial_speed();
        if !(top > 0.0) {
            return Err(Error::Precondition(
                "no velocity samples on the core; cannot calibrate speed".into(),
            ));
        }
        const SCAN: usize = 60;
        let lo = top * 1e-4;
        let ratio = (top / lo).powf(1.0 / SCAN as f64);
        let grid: Vec<f64> = (0..=SCAN).map(|k| lo * ratio.powi(k as i32)).collect();
        let best = (0..=SCAN)
            .min_by(|&a, &b| self.residual(grid[a]).total_cmp(&self.residual(grid[b])))
            .unwrap_or(0);
        let mut a = grid[best.saturating_sub(1)];
        let mut b = grid[(best + 1).min(SCAN)];
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let (mut fc, mut fd) = (self.residual(c), self.residual(d));
        for _ in 0..200 {
            if (b - a).abs() <= 1e-13 * b {
                break;
            }
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = self.residual(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = self.residual(d);
            }
        }
        let speed = 0.5 * (a + b);
        Ok(Calibration {
            speed,
            residual: self.residual(speed),
        })
    }
}

/// Steadiness residual of a traveling vortex at its own speed.
pub fn steadiness_residual(vortex: &TravelingVortex, resolution: usize) -> f64 {
    let solver = FieldSolver::new(vortex.clone());
    SteadinessSamples::collect(&solver, resolution).residual(vortex.speed)
}

/// Calibrated speed for the vorticity of `solver` (its current speed is
/// ignored).
pub fn calibrate_speed(solver: &FieldSolver, resolution: usize) -> Result<Calibration> {
    SteadinessSamples::collect(solver, resolution).calibrate()
}
