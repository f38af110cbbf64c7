//! The vortex domain as a superlevel set of the relative stream function:
//! level and radii on the axis, the boundary curve `l(·)`, and measures.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::axis::{core_axis_interval, sample_axis, AxisProfile};
use super::classify::{Case, Classification, Topology};
use crate::error::{Error, Result};
use crate::field::vorticity::VorticitySpec;
use crate::kernels::quad1d::integrate_adaptive;
use crate::point::Point;
use crate::roots::bisect;
use crate::solver::FieldSolver;

/// Default number of Chebyshev samples of `l(·)`.
pub const DEFAULT_BOUNDARY_SAMPLES: usize = 128;
/// Atmosphere ratio below which the atmosphere counts as empty.
pub const EMPTY_ATMOSPHERE_RATIO: f64 = 0.01;
/// Relative root tolerance, in units of the support scale.
pub const DEFAULT_ROOT_TOLERANCE: f64 = 1e-10;

const OUTER_LIMIT_FACTOR: f64 = 10.0;
const Z_BRACKET_FACTOR: f64 = 3.0;
const Z_BRACKET_EXPANSIONS: usize = 5;
const SIGN_PATTERN_PROBES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractOptions {
    pub boundary_samples: usize,
    /// Root tolerance relative to the support scale.
    pub root_tolerance: f64,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            boundary_samples: DEFAULT_BOUNDARY_SAMPLES,
            root_tolerance: DEFAULT_ROOT_TOLERANCE,
        }
    }
}

/// `v^z(0, r)` (rings) or `u¹(0, x₂)` (dipoles).
fn axis_line_speed(solver: &FieldSolver, s: f64) -> f64 {
    solver.velocity(Point::new(0.0, s))[0]
}

/// Inner radius `L` of a Case II ring: root of `v^z(0, r) = W` on `(0, R₁]`.
pub fn find_inner_radius(solver: &FieldSolver, r1: f64, root_tolerance: f64) -> Result<f64> {
    let w = solver.speed();
    let tol = root_tolerance * solver.support_scale();
    bisect(
        |r| axis_line_speed(solver, r) - w,
        0.0,
        r1,
        tol,
        "v^z(0, r) - W on (0, R1]: classification inconsistent with the axis profile",
    )
}

/// Level `γ` and outer radius `R`: `γ = 0` in Case I, `γ = φ(0, L)` in
/// Case II; `R` is the root of `φ(0, ·) = γ` beyond the core.
pub fn find_level_and_outer_radius(
    solver: &FieldSolver,
    case: Case,
    inner: f64,
    core: (f64, f64),
    root_tolerance: f64,
) -> Result<(f64, f64)> {
    let gamma = match case {
        Case::I => 0.0,
        Case::II => solver.relative_stream(Point::new(0.0, inner)),
    };
    let f = |s: f64| solver.relative_stream(Point::new(0.0, s)) - gamma;
    let lo = (0.5 * (core.0 + core.1)).max(inner);
    let limit = OUTER_LIMIT_FACTOR * solver.support_scale();
    let mut hi = core.1.max(lo) * 1.1 + 1e-3 * solver.support_scale();
    while f(hi) >= 0.0 {
        hi *= 1.25;
        if hi > limit {
            return Err(Error::OuterRadiusEscape { limit });
        }
    }
    let r = bisect(f, lo, hi, root_tolerance * solver.support_scale(), "phi(0, s) - gamma beyond R2")?;
    if r < core.1 * (1.0 - 1e-9) {
        return Err(Error::Inconsistent(format!(
            "outer radius {r} inside the core interval ending at {}",
            core.1
        )));
    }
    Ok((gamma, r))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    /// `[s, l(s)]` pairs, increasing in `s`, endpoints included.
    pub points: Vec<[f64; 2]>,
    /// `l(0)` by extrapolation in `s²` (Case I only).
    pub l0_extrapolated: Option<f64>,
    /// `l(0)` as the root of the axial speed `= W` along the axis (Case I).
    pub l0_axis_root: Option<f64>,
}

impl BoundaryCurve {
    /// Linear interpolation of `l` at `s`; zero outside the sampled range.
    pub fn l_at(&self, s: f64) -> f64 {
        let pts = &self.points;
        if pts.is_empty() || s < pts[0][0] || s > pts[pts.len() - 1][0] {
            return 0.0;
        }
        let k = pts.partition_point(|p| p[0] <= s);
        if k == 0 {
            return pts[0][1];
        }
        if k == pts.len() {
            return pts[k - 1][1];
        }
        let (a, b) = (pts[k - 1], pts[k]);
        let t = if b[0] > a[0] { (s - a[0]) / (b[0] - a[0]) } else { 0.0 };
        a[1] + t * (b[1] - a[1])
    }

    /// Whether `p` lies strictly inside the curve, with `margin` subtracted
    /// from `l`.
    pub fn contains(&self, p: Point, margin: f64) -> bool {
        let s = p.radial.abs();
        let pts = &self.points;
        if pts.is_empty() || s <= pts[0][0] || s >= pts[pts.len() - 1][0] {
            return false;
        }
        p.axial.abs() < self.l_at(s) - margin
    }

    /// Euclidean distance from `p` (folded to `|axial|, |radial|`) to the
    /// sampled curve, taken as a polyline.
    pub fn distance(&self, p: Point) -> f64 {
        let (x, y) = (p.radial.abs(), p.axial.abs());
        self.points
            .windows(2)
            .map(|w| {
                let ([x0, y0], [x1, y1]) = (w[0], w[1]);
                let (dx, dy) = (x1 - x0, y1 - y0);
                let len2 = dx * dx + dy * dy;
                let t = if len2 > 0.0 {
                    (((x - x0) * dx + (y - y0) * dy) / len2).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                (x - x0 - t * dx).hypot(y - y0 - t * dy)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn s_range(&self) -> (f64, f64) {
        (self.points[0][0], self.points[self.points.len() - 1][0])
    }

    pub fn max_l(&self) -> f64 {
        self.points.iter().map(|p| p[1]).fold(0.0, f64::max)
    }
}

/// Chebyshev points of the first kind on `(a, b)`, increasing.
pub fn chebyshev_points(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let x = -(PI * (k as f64 + 0.5) / n as f64).cos();
            0.5 * (a + b) + 0.5 * (b - a) * x
        })
        .collect()
}

fn boundary_root(solver: &FieldSolver, gamma: f64, s: f64, tol: f64) -> Result<f64> {
    let f = |z: f64| solver.relative_stream(Point::new(z, s)) - gamma;
    let f0 = f(0.0);
    if f0 <= 0.0 {
        return Err(Error::SteinerViolation {
            s,
            detail: format!("phi(0, s) - gamma = {f0:e} is not positive inside (L, R)"),
        });
    }
    let mut zmax = Z_BRACKET_FACTOR * solver.vortex().vorticity.bounding_box().axial_half_width();
    let mut expansions = 0;
    while f(zmax) >= 0.0 {
        if expansions == Z_BRACKET_EXPANSIONS {
            return Err(Error::SteinerViolation {
                s,
                detail: format!("phi - gamma still non-negative at z = {zmax}"),
            });
        }
        zmax *= 2.0;
        expansions += 1;
    }
    // strict Steiner symmetry: one sign change from + to - on [0, zmax]
    let mut changes = 0;
    let mut prev = true;
    for k in 1..SIGN_PATTERN_PROBES {
        let pos = f(zmax * k as f64 / SIGN_PATTERN_PROBES as f64) > 0.0;
        if pos != prev {
            changes += 1;
        }
        prev = pos;
    }
    if prev {
        changes += 1;
    }
    if changes != 1 {
        return Err(Error::SteinerViolation {
            s,
            detail: format!("{changes} sign changes of phi - gamma on [0, {zmax}]"),
        });
    }
    bisect(f, 0.0, zmax, tol, "boundary root in z")
}

/// `l(s)` on Chebyshev points of `(L, R)` (or `(0, R)` in Case I).
pub fn boundary_curve(
    solver: &FieldSolver,
    case: Case,
    gamma: f64,
    inner: f64,
    outer: f64,
    n: usize,
    root_tolerance: f64,
) -> Result<BoundaryCurve> {
    let tol = root_tolerance * solver.support_scale();
    let lo = match case {
        Case::I => 0.0,
        Case::II => inner,
    };
    let ss = chebyshev_points(lo, outer, n.max(4));
    let ls: Vec<f64> = ss
        .par_iter()
        .map(|&s| boundary_root(solver, gamma, s, tol))
        .collect::<Result<_>>()?;
    let mut points = Vec::with_capacity(ls.len() + 2);
    let (mut l0_extrapolated, mut l0_axis_root) = (None, None);
    match case {
        Case::I => {
            let (s1, s2) = (ss[0], ss[1]);
            let (l1, l2) = (ls[0], ls[1]);
            let l0 = ((s2 * s2 * l1 - s1 * s1 * l2) / (s2 * s2 - s1 * s1)).max(0.0);
            l0_extrapolated = Some(l0);
            let w = solver.speed();
            let zmax = Z_BRACKET_FACTOR * solver.support_scale();
            l0_axis_root = bisect(
                |z| axial_speed_on_axis(solver, z) - w,
                0.0,
                zmax,
                tol,
                "axial speed = W along the axis",
            )
            .ok();
            points.push([0.0, l0]);
        }
        Case::II => points.push([inner, 0.0]),
    }
    points.extend(ss.iter().zip(&ls).map(|(&s, &l)| [s, l]));
    points.push([outer, 0.0]);
    Ok(BoundaryCurve {
        points,
        l0_extrapolated,
        l0_axis_root,
    })
}

/// `v^z(z, 0)` or `u¹(x₁, 0)`.
pub fn axial_speed_on_axis(solver: &FieldSolver, z: f64) -> f64 {
    if solver.is_ring() {
        solver.axis_speed(z)
    } else {
        solver.velocity(Point::new(z, 0.0))[0]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measures {
    /// Area (dipoles, both half-planes) or volume (rings).
    pub core: f64,
    pub domain: f64,
    pub atmosphere: f64,
    pub ratio: f64,
    /// Ratio before clamping small negative rounding to zero.
    pub ratio_raw: f64,
}

/// Half-width `h(s)` of the core at height `s`.
fn core_half_width(spec: &VorticitySpec, s: f64) -> f64 {
    let top = spec.bounding_box().axial_half_width() * 1.01 + f64::EPSILON;
    if spec.value(Point::new(0.0, s)) <= 0.0 {
        return 0.0;
    }
    if spec.value(Point::new(top, s)) > 0.0 {
        return top;
    }
    bisect(
        |z| if spec.value(Point::new(z, s)) > 0.0 { 1.0 } else { -1.0 },
        0.0,
        top,
        1e-13 * top,
        "core half-width",
    )
    .unwrap_or(0.0)
}

/// Core measure by adaptive quadrature of the support indicator.
pub fn core_measure(spec: &VorticitySpec, core: (f64, f64)) -> Result<f64> {
    let ring = spec.geometry() == crate::field::vorticity::Geometry::Ring;
    let (v, _) = integrate_adaptive(
        |s| {
            let h = core_half_width(spec, s);
            if ring {
                2.0 * PI * s * 2.0 * h
            } else {
                2.0 * 2.0 * h
            }
        },
        core.0,
        core.1,
        0.0,
        1e-10,
    )?;
    Ok(v)
}

pub fn measures(spec: &VorticitySpec, core: (f64, f64), boundary: &BoundaryCurve) -> Result<Measures> {
    let ring = spec.geometry() == crate::field::vorticity::Geometry::Ring;
    let weight = |s: f64, l: f64| if ring { 2.0 * PI * s * 2.0 * l } else { 2.0 * 2.0 * l };
    let domain: f64 = boundary
        .points
        .windows(2)
        .map(|w| 0.5 * (w[1][0] - w[0][0]) * (weight(w[0][0], w[0][1]) + weight(w[1][0], w[1][1])))
        .sum();
    let core = core_measure(spec, core)?;
    let atmosphere = domain - core;
    let ratio_raw = atmosphere / core;
    if ratio_raw < -1e-3 {
        return Err(Error::Inconsistent(format!(
            "domain measure {domain} below core measure {core}"
        )));
    }
    Ok(Measures {
        core,
        domain,
        atmosphere: atmosphere.max(0.0),
        ratio: ratio_raw.max(0.0),
        ratio_raw,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SadovskiiReport {
    pub sadovskii: bool,
    pub touches_axis: bool,
    pub empty_atmosphere: bool,
    /// Whether "core touches the axis" and "atmosphere is empty" agree.
    pub consistent: bool,
}

pub fn sadovskii_test(core: (f64, f64), ratio: f64, scale: f64) -> SadovskiiReport {
    let touches_axis = core.0 <= 1e-8 * scale;
    let empty_atmosphere = ratio < EMPTY_ATMOSPHERE_RATIO;
    SadovskiiReport {
        sadovskii: touches_axis && empty_atmosphere,
        touches_axis,
        empty_atmosphere,
        consistent: touches_axis == empty_atmosphere,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainResult {
    pub topology: Topology,
    pub case: Case,
    pub level: f64,
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub core_interval: (f64, f64),
    pub boundary: BoundaryCurve,
    pub measures: Measures,
    pub sadovskii: Option<SadovskiiReport>,
    pub axis_profile: AxisProfile,
}

/// Runs the full extraction for a classified vortex.
pub fn extract_domain(
    solver: &FieldSolver,
    classification: &Classification,
    options: &ExtractOptions,
) -> Result<DomainResult> {
    let spec = &solver.vortex().vorticity;
    let core = core_axis_interval(spec)?;
    let case = classification.case;
    let inner = match case {
        Case::I => 0.0,
        Case::II => find_inner_radius(solver, core.0, options.root_tolerance)?,
    };
    let (level, outer) = find_level_and_outer_radius(solver, case, inner, core, options.root_tolerance)?;
    let boundary = boundary_curve(
        solver,
        case,
        level,
        inner,
        outer,
        options.boundary_samples,
        options.root_tolerance,
    )?;
    let measures = measures(spec, core, &boundary)?;
    let sadovskii = (!solver.is_ring())
        .then(|| sadovskii_test(core, measures.ratio, solver.support_scale()));
    let axis_profile = AxisProfile {
        samples: sample_axis(solver, 1.5 * outer, 48),
        core_interval: core,
        inner_radius: (case == Case::II).then_some(inner),
        outer_radius: outer,
        level,
    };
    Ok(DomainResult {
        topology: classification.topology,
        case,
        level,
        inner_radius: inner,
        outer_radius: outer,
        core_interval: core,
        boundary,
        measures,
        sadovskii,
        axis_profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::classify::classify;
    use crate::field::vorticity::TravelingVortex;

    #[test]
    fn chebyshev_points_are_interior_and_increasing() {
        let p = chebyshev_points(1.0, 2.0, 16);
        assert!(p.windows(2).all(|w| w[1] > w[0]));
        assert!(p[0] > 1.0 && p[15] < 2.0);
    }

    #[test]
    fn hill_level_and_radius() {
        let s = FieldSolver::new(TravelingVortex::hill(1.0, 1.0).unwrap());
        let (g, r) = find_level_and_outer_radius(&s, Case::I, 0.0, (0.0, 1.0), 1e-10).unwrap();
        assert_eq!(g, 0.0);
        assert!((r - 1.0).abs() < 1e-6, "{r}");
    }

    #[test]
    fn hill_boundary_is_unit_circle() {
        let s = FieldSolver::new(TravelingVortex::hill(1.0, 1.0).unwrap());
        let b = boundary_curve(&s, Case::I, 0.0, 0.0, 1.0, 32, 1e-10).unwrap();
        for p in &b.points {
            let exact = (1.0 - p[0] * p[0]).max(0.0).sqrt();
            assert!((p[1] - exact).abs() < 1e-6, "{p:?}");
        }
        assert!((b.l0_axis_root.unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn core_measures_of_disks() {
        let hill = VorticitySpec::hill_ball(1.0, 1.0).unwrap();
        let v = core_measure(&hill, (0.0, 1.0)).unwrap();
        assert!((v - 4.0 * PI / 3.0).abs() < 1e-8);
        let patch = VorticitySpec::patch_pair(1.0, 1.0, 0.1).unwrap();
        let a = core_measure(&patch, (0.9, 1.1)).unwrap();
        assert!((a - 2.0 * PI * 0.01).abs() < 1e-10);
    }

    #[test]
    fn toroidal_pair_has_hole() {
        // thin ring at roughly its calibrated speed, above the centre speed
        let spec = VorticitySpec::gaussian_ring(1.0, 1.0, 0.008).unwrap();
        let s = FieldSolver::new(TravelingVortex::new(spec, 0.5157).unwrap());
        let c = classify(&s, None, None);
        assert_eq!(c.topology, Topology::Toroid);
        let d = extract_domain(&s, &c, &ExtractOptions { boundary_samples: 24, ..Default::default() }).unwrap();
        assert!(d.level < 0.0);
        assert!(d.inner_radius > 0.0 && d.inner_radius <= d.core_interval.0);
        assert!(d.outer_radius > d.core_interval.1);
        let first = d.boundary.points[0];
        let last = d.boundary.points[d.boundary.points.len() - 1];
        assert_eq!(first, [d.inner_radius, 0.0]);
        assert_eq!(last, [d.outer_radius, 0.0]);
        let vz = s.velocity(Point::new(0.0, d.inner_radius))[0];
        assert!((vz - 0.5157).abs() < 1e-6);
    }
}
