//! Panel quadrature of kernels against the vorticity over its support.
//!
//! The support is covered by panels in a parameter plane (Cartesian, or
//! polar about a centre so that disk boundaries are panel edges). Far from
//! the target each panel uses a cached tensor Gauss–Legendre rule. Panels
//! close to the target are subdivided, and a panel whose closure contains
//! the target is split at the target and integrated with Duffy triangles,
//! which absorbs the logarithmic (or `1/|x - y|`) singularity.

use std::f64::consts::PI;

use crate::field::vorticity::{Geometry, SupportLayout, VorticitySpec};
use crate::kernels::quad1d::gauss_legendre;
use crate::point::Point;

/// Default tensor order of the panel rule.
pub const DEFAULT_ORDER: usize = 10;
/// Order of the cell rule for gridded data (bilinear density).
const CELL_ORDER: usize = 4;
/// A panel is treated as far when the target lies beyond this many panel
/// radii from the panel centre.
const FAR_FACTOR: f64 = 2.0;
const MAX_DEPTH: usize = 48;
const UNRESOLVED: f64 = 16.0 * f64::EPSILON;
/// Geometric grading of the Duffy radial variable.
const DUFFY_RATIO: f64 = 0.3;
const DUFFY_LEVELS: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Map {
    Cartesian,
    Polar { center: Point, full_turn: bool },
}

impl Map {
    #[inline]
    fn point(&self, u: f64, v: f64) -> Point {
        match *self {
            Map::Cartesian => Point::new(u, v),
            Map::Polar { center, .. } => {
                let (s, c) = v.sin_cos();
                Point::new(center.axial + u * c, center.radial + u * s)
            }
        }
    }

    #[inline]
    fn jacobian(&self, u: f64) -> f64 {
        match self {
            Map::Cartesian => 1.0,
            Map::Polar { .. } => u,
        }
    }

    /// Parameter-space images of a physical point (two for a full polar
    /// turn near the seam).
    fn preimages(&self, p: Point) -> Vec<(f64, f64)> {
        match *self {
            Map::Cartesian => vec![(p.axial, p.radial)],
            Map::Polar { center, full_turn } => {
                let da = p.axial - center.axial;
                let dr = p.radial - center.radial;
                let rho = da.hypot(dr);
                let theta = if rho == 0.0 { 0.0 } else { dr.atan2(da) };
                let mut out = vec![(rho, theta)];
                if full_turn {
                    out.push((rho, theta + 2.0 * PI));
                    out.push((rho, theta - 2.0 * PI));
                }
                out
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Rect {
    u0: f64,
    u1: f64,
    v0: f64,
    v1: f64,
}

impl Rect {
    fn contains_closed(&self, (u, v): (f64, f64)) -> bool {
        let eu = 1e-13 * (self.u1 - self.u0).abs().max(self.u1.abs());
        let ev = 1e-13 * (self.v1 - self.v0).abs().max(self.v1.abs());
        u >= self.u0 - eu && u <= self.u1 + eu && v >= self.v0 - ev && v <= self.v1 + ev
    }
}

#[derive(Clone, Copy, Debug)]
struct Node {
    p: Point,
    w: f64,
}

#[derive(Clone, Debug)]
struct Panel {
    rect: Rect,
    center: Point,
    radius: f64,
    nodes: Vec<Node>,
}

/// Gauss–Legendre rule on `[0, 1]`.
#[derive(Clone, Debug)]
struct Rule {
    x: Vec<f64>,
    w: Vec<f64>,
}

impl Rule {
    fn new(n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        Rule {
            x: x.iter().map(|t| 0.5 * (t + 1.0)).collect(),
            w: w.iter().map(|t| 0.5 * t).collect(),
        }
    }
}

/// Quadrature engine bound to one vorticity distribution.
#[derive(Clone, Debug)]
pub struct SupportQuadrature {
    spec: VorticitySpec,
    ring: bool,
    map: Map,
    rule: Rule,
    /// Rule for subdivided and singular pieces.
    fine: Rule,
    panels: Vec<Panel>,
    order: usize,
}

impl SupportQuadrature {
    pub fn new(spec: &VorticitySpec) -> Self {
        Self::with_order(spec, DEFAULT_ORDER)
    }

    pub fn with_order(spec: &VorticitySpec, order: usize) -> Self {
        let ring = spec.geometry() == Geometry::Ring;
        let (map, rects, order) = match spec.layout() {
            SupportLayout::Polar {
                center,
                rho_max,
                theta,
                splits,
            } => {
                let full_turn = theta.1 - theta.0 >= 2.0 * PI - 1e-12;
                let mut rects = Vec::new();
                for i in 0..splits.0 {
                    for j in 0..splits.1 {
                        rects.push(Rect {
                            u0: rho_max * i as f64 / splits.0 as f64,
                            u1: rho_max * (i + 1) as f64 / splits.0 as f64,
                            v0: theta.0 + (theta.1 - theta.0) * j as f64 / splits.1 as f64,
                            v1: theta.0 + (theta.1 - theta.0) * (j + 1) as f64 / splits.1 as f64,
                        });
                    }
                }
                (Map::Polar { center, full_turn }, rects, order)
            }
            SupportLayout::Cartesian { bbox, splits } => {
                let mut rects = Vec::new();
                let da = (bbox.axial_max - bbox.axial_min) / splits.0 as f64;
                let dr = (bbox.radial_max - bbox.radial_min) / splits.1 as f64;
                for i in 0..splits.0 {
                    for j in 0..splits.1 {
                        rects.push(Rect {
                            u0: bbox.axial_min + da * i as f64,
                            u1: bbox.axial_min + da * (i + 1) as f64,
                            v0: bbox.radial_min + dr * j as f64,
                            v1: bbox.radial_min + dr * (j + 1) as f64,
                        });
                    }
                }
                (Map::Cartesian, rects, order)
            }
            SupportLayout::Cells { axial, radial } => {
                let mut rects = Vec::new();
                for i in 0..axial.len() - 1 {
                    for j in 0..radial.len() - 1 {
                        rects.push(Rect {
                            u0: axial[i],
                            u1: axial[i + 1],
                            v0: radial[j],
                            v1: radial[j + 1],
                        });
                    }
                }
                (Map::Cartesian, rects, order.clamp(2, CELL_ORDER))
            }
        };
        let mut q = SupportQuadrature {
            spec: spec.clone(),
            ring,
            map,
            rule: Rule::new(order),
            fine: Rule::new(order.max(DEFAULT_ORDER)),
            panels: Vec::new(),
            order,
        };
        let panels = rects
            .into_iter()
            .filter_map(|rect| {
                let (center, radius) = q.extent(&rect);
                let mut nodes = Vec::new();
                q.for_each_node(&q.rule, &rect, |p, w| nodes.push(Node { p, w }));
                (!nodes.is_empty()).then_some(Panel {
                    rect,
                    center,
                    radius,
                    nodes,
                })
            })
            .collect();
        q.panels = panels;
        q
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Source density: vorticity, times `r'` for rings.
    #[inline]
    fn density(&self, p: Point) -> f64 {
        let v = self.spec.value_upper(p);
        if self.ring {
            v * p.radial
        } else {
            v
        }
    }

    /// Physical centre and a covering radius of a parameter rectangle.
    fn extent(&self, r: &Rect) -> (Point, f64) {
        let um = 0.5 * (r.u0 + r.u1);
        let vm = 0.5 * (r.v0 + r.v1);
        let c = self.map.point(um, vm);
        let mut rad: f64 = 0.0;
        for u in [r.u0, um, r.u1] {
            for v in [r.v0, vm, r.v1] {
                rad = rad.max(c.dist(&self.map.point(u, v)));
            }
        }
        // chord sampling underestimates arcs slightly
        let pad = if matches!(self.map, Map::Polar { .. }) { 1.1 } else { 1.0 };
        (c, rad * pad)
    }

    /// Physical side lengths `(along u, along v)`.
    fn sides(&self, r: &Rect) -> (f64, f64) {
        match self.map {
            Map::Cartesian => (r.u1 - r.u0, r.v1 - r.v0),
            Map::Polar { .. } => (r.u1 - r.u0, r.u1.abs().max(r.u0.abs()) * (r.v1 - r.v0)),
        }
    }

    fn for_each_node(&self, rule: &Rule, r: &Rect, mut f: impl FnMut(Point, f64)) {
        let du = r.u1 - r.u0;
        let dv = r.v1 - r.v0;
        for (xi, wi) in rule.x.iter().zip(&rule.w) {
            let u = r.u0 + du * xi;
            let ju = self.map.jacobian(u) * du * dv * wi;
            for (xj, wj) in rule.x.iter().zip(&rule.w) {
                let v = r.v0 + dv * xj;
                let p = self.map.point(u, v);
                let d = self.density(p);
                if d != 0.0 {
                    f(p, ju * wj * d);
                }
            }
        }
    }

    /// Nodes of the layout at the given order with area weights (times `r`
    /// for rings) and no density factor; used for residual diagnostics.
    pub fn area_nodes(spec: &VorticitySpec, order: usize) -> Vec<(Point, f64)> {
        let q = SupportQuadrature::with_order(spec, order);
        let mut out = Vec::new();
        for panel in &q.panels {
            let r = &panel.rect;
            let du = r.u1 - r.u0;
            let dv = r.v1 - r.v0;
            for (xi, wi) in q.rule.x.iter().zip(&q.rule.w) {
                let u = r.u0 + du * xi;
                for (xj, wj) in q.rule.x.iter().zip(&q.rule.w) {
                    let v = r.v0 + dv * xj;
                    let p = q.map.point(u, v);
                    let mut w = q.map.jacobian(u) * du * dv * wi * wj;
                    if q.ring {
                        w *= p.radial;
                    }
                    out.push((p, w));
                }
            }
        }
        out
    }

    /// `∫ kern(y) · density(y) dy` for a target `t`. `kern` may be singular
    /// at `y = t`.
    pub fn integrate<const N: usize>(&self, t: Point, kern: impl Fn(Point) -> [f64; N]) -> [f64; N] {
        let mut acc = [0.0; N];
        let pre = self.map.preimages(t);
        for panel in &self.panels {
            if t.dist(&panel.center) >= FAR_FACTOR * panel.radius {
                for n in &panel.nodes {
                    let k = kern(n.p);
                    for (a, kv) in acc.iter_mut().zip(k) {
                        *a += n.w * kv;
                    }
                }
            } else {
                self.near(&panel.rect, t, &pre, &kern, 0, &mut acc);
            }
        }
        acc
    }

    /// Integral of the density alone (total circulation).
    pub fn total(&self) -> f64 {
        self.panels
            .iter()
            .flat_map(|p| p.nodes.iter())
            .map(|n| n.w)
            .sum()
    }

    fn plain<const N: usize>(&self, r: &Rect, kern: &impl Fn(Point) -> [f64; N], acc: &mut [f64; N]) {
        self.for_each_node(&self.fine, r, |p, w| {
            let k = kern(p);
            for (a, kv) in acc.iter_mut().zip(k) {
                *a += w * kv;
            }
        });
    }

    fn near<const N: usize>(
        &self,
        r: &Rect,
        t: Point,
        pre: &[(f64, f64)],
        kern: &impl Fn(Point) -> [f64; N],
        depth: usize,
        acc: &mut [f64; N],
    ) {
        if let Map::Polar { center, .. } = self.map {
            if r.u0 == 0.0 && t.dist(&center) <= 1e-12 * r.u1 {
                self.centre_graded(r, kern, acc);
                return;
            }
        }
        if let Some(&s) = pre.iter().find(|s| r.contains_closed(**s)) {
            self.singular(r, s, kern, acc);
            return;
        }
        let (c, rad) = self.extent(r);
        if rad <= UNRESOLVED * t.norm() {
            // Below the spacing of representable points around the target:
            // distances are rounding noise and the integrable singularity
            // contributes O(rad) at most.
            return;
        }
        if depth >= MAX_DEPTH || t.dist(&c) >= FAR_FACTOR * rad {
            self.plain(r, kern, acc);
            return;
        }
        let (lu, lv) = self.sides(r);
        let um = 0.5 * (r.u0 + r.u1);
        let vm = 0.5 * (r.v0 + r.v1);
        let halves: Vec<Rect> = if lu > 2.0 * lv {
            vec![Rect { u1: um, ..*r }, Rect { u0: um, ..*r }]
        } else if lv > 2.0 * lu {
            vec![Rect { v1: vm, ..*r }, Rect { v0: vm, ..*r }]
        } else {
            vec![
                Rect { u1: um, v1: vm, ..*r },
                Rect { u0: um, v1: vm, ..*r },
                Rect { u1: um, v0: vm, ..*r },
                Rect { u0: um, v0: vm, ..*r },
            ]
        };
        for h in &halves {
            self.near(h, t, pre, kern, depth + 1, acc);
        }
    }

    /// Split at the singular preimage `s` into rectangles having `s` as a
    /// corner.
    fn singular<const N: usize>(
        &self,
        r: &Rect,
        s: (f64, f64),
        kern: &impl Fn(Point) -> [f64; N],
        acc: &mut [f64; N],
    ) {
        let su = s.0.clamp(r.u0, r.u1);
        let sv = s.1.clamp(r.v0, r.v1);
        for (ua, ub) in [(su, r.u0), (su, r.u1)] {
            for (va, vb) in [(sv, r.v0), (sv, r.v1)] {
                if ua != ub && va != vb {
                    self.corner(ua, ub, va, vb, kern, acc);
                }
            }
        }
    }

    /// Rectangle with corner `(ua, va)` singular and opposite corner
    /// `(ub, vb)`. Elongated rectangles are cut so that the Duffy part is
    /// roughly square and the remainder is handled by subdivision.
    fn corner<const N: usize>(
        &self,
        ua: f64,
        ub: f64,
        va: f64,
        vb: f64,
        kern: &impl Fn(Point) -> [f64; N],
        acc: &mut [f64; N],
    ) {
        let rect = Rect {
            u0: ua.min(ub),
            u1: ua.max(ub),
            v0: va.min(vb),
            v1: va.max(vb),
        };
        // side lengths seen from the singular corner
        let lu = (ub - ua).abs();
        let lv = match self.map {
            Map::Cartesian => (vb - va).abs(),
            Map::Polar { .. } => ua.abs() * (vb - va).abs(),
        };
        let t = self.map.point(ua, va);
        if lu > 2.0 * lv && lv > 0.0 {
            let cut = ua + (ub - ua) * (lv / lu);
            self.duffy(ua, cut, va, vb, kern, acc);
            let rest = Rect {
                u0: cut.min(ub),
                u1: cut.max(ub),
                ..rect
            };
            self.near(&rest, t, &[], kern, 0, acc);
        } else if lv > 2.0 * lu && lu > 0.0 {
            let cut = va + (vb - va) * (lu / lv);
            self.duffy(ua, ub, va, cut, kern, acc);
            let rest = Rect {
                v0: cut.min(vb),
                v1: cut.max(vb),
                ..rect
            };
            self.near(&rest, t, &[], kern, 0, acc);
        } else {
            self.duffy(ua, ub, va, vb, kern, acc);
        }
    }

    /// Polar rectangle touching the centre when the target is the centre:
    /// the integrand is singular along the whole edge `u = 0`, so grade in
    /// `u` only.
    fn centre_graded<const N: usize>(&self, r: &Rect, kern: &impl Fn(Point) -> [f64; N], acc: &mut [f64; N]) {
        let mut hi = r.u1;
        for level in 0..=DUFFY_LEVELS {
            let lo = if level == DUFFY_LEVELS { 0.0 } else { hi * DUFFY_RATIO };
            self.plain(&Rect { u0: lo, u1: hi, ..*r }, kern, acc);
            hi = lo;
        }
    }

    /// Two Duffy triangles with apex at `(ua, va)`.
    fn duffy<const N: usize>(
        &self,
        ua: f64,
        ub: f64,
        va: f64,
        vb: f64,
        kern: &impl Fn(Point) -> [f64; N],
        acc: &mut [f64; N],
    ) {
        let apex = (ua, va);
        let tris = [((ub, va), (ub, vb)), ((ub, vb), (ua, vb))];
        for (p1, p2) in tris {
            let e1 = (p1.0 - apex.0, p1.1 - apex.1);
            let e2 = (p2.0 - p1.0, p2.1 - p1.1);
            let det = (e1.0 * e2.1 - e1.1 * e2.0).abs();
            if det == 0.0 {
                continue;
            }
            let mut hi = 1.0;
            for level in 0..=DUFFY_LEVELS {
                let lo = if level == DUFFY_LEVELS { 0.0 } else { hi * DUFFY_RATIO };
                let ds = hi - lo;
                for (xs, ws) in self.fine.x.iter().zip(&self.fine.w) {
                    let sv = lo + ds * xs;
                    for (xt, wt) in self.fine.x.iter().zip(&self.fine.w) {
                        let u = apex.0 + sv * (e1.0 + xt * e2.0);
                        let v = apex.1 + sv * (e1.1 + xt * e2.1);
                        let p = self.map.point(u, v);
                        let d = self.density(p);
                        if d == 0.0 {
                            continue;
                        }
                        let w = ds * ws * wt * sv * det * self.map.jacobian(u) * d;
                        let k = kern(p);
                        for (a, kv) in acc.iter_mut().zip(k) {
                            *a += w * kv;
                        }
                    }
                }
                hi = lo;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hill_ball_total_matches_area() {
        // ∫ r dA over the unit half disk is 2/3
        let spec = VorticitySpec::hill_ball(1.0, 1.0).unwrap();
        let q = SupportQuadrature::new(&spec);
        assert!((q.total() - 2.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn patch_pair_total_is_circulation() {
        let spec = VorticitySpec::patch_pair_with_circulation(1.0, 1.0, 0.1).unwrap();
        let q = SupportQuadrature::new(&spec);
        assert!((q.total() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn gaussian_totals_match_circulation() {
        for spec in [
            VorticitySpec::gaussian_ring(1.3, 1.0, 0.1).unwrap(),
            VorticitySpec::gaussian_ring(1.3, 0.5, 0.4).unwrap(),
            VorticitySpec::gaussian_pair(0.7, 1.0, 0.3).unwrap(),
        ] {
            let q = SupportQuadrature::new(&spec);
            let c = spec.parameter("circulation").unwrap();
            assert!((q.total() - c).abs() < 1e-10 * c, "{} vs {c}", q.total());
        }
    }

    #[test]
    fn singular_log_integral_over_disk() {
        // ∫_{|y-c|<1} log|t - y| dy for |t - c| = ρ < 1 equals
        // π (ρ² - 1) / 2 (mean value of log over circles)
        let spec = VorticitySpec::patch_pair(1.0, 2.0, 1.0).unwrap();
        let q = SupportQuadrature::new(&spec);
        for (da, dr) in [(0.0, 0.0), (0.3, 0.1), (-0.5, 0.49999), (0.0, 1.0 - 1e-9)] {
            let t = Point::new(da, 2.0 + dr);
            let [v] = q.integrate(t, |y| [t.dist(&y).ln()]);
            let rho = t.dist(&Point::new(0.0, 2.0));
            let exact = PI * (rho * rho - 1.0) / 2.0;
            assert!((v - exact).abs() < 1e-11, "{da} {dr}: {v} vs {exact}");
        }
    }

    #[test]
    fn inverse_distance_integral_over_square() {
        // ∫_{[-1,1]²} 1/|y| dy = 8 asinh(1)
        let grid = crate::field::grid::GriddedField::new(
            vec![-1.0, 0.0, 1.0],
            vec![4.0, 5.0, 6.0],
            vec![1.0; 9],
        )
        .unwrap();
        let spec = VorticitySpec::gridded(grid, Geometry::Dipole).unwrap();
        let q = SupportQuadrature::new(&spec);
        let t = Point::new(0.3, 5.2);
        let [v] = q.integrate(t, |y| [1.0 / t.dist(&y)]);
        // shifted square: split into four rectangles with corner at t
        let f = |a: f64, b: f64| a * (b / a).asinh() + b * (a / b).asinh();
        let exact = f(1.3, 1.2) + f(0.7, 1.2) + f(1.3, 0.8) + f(0.7, 0.8);
        assert!((v - exact).abs() < 1e-10 * exact, "{v} vs {exact}");
    }
}
