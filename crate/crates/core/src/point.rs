use serde::{Deserialize, Serialize};

/// A point of the meridional half-plane (rings: `(z, r)`) or of the plane
/// (dipoles: `(x1, x2)`). `axial` is the propagation direction, `radial` the
/// distance from the symmetry axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub axial: f64,
    pub radial: f64,
}

impl Point {
    pub const ORIGIN: Point = Point {
        axial: 0.0,
        radial: 0.0,
    };

    pub const fn new(axial: f64, radial: f64) -> Self {
        Point { axial, radial }
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.axial - other.axial).hypot(self.radial - other.radial)
    }

    pub fn norm(&self) -> f64 {
        self.axial.hypot(self.radial)
    }

    /// Mirror image across the symmetry axis.
    pub fn reflected(&self) -> Point {
        Point::new(self.axial, -self.radial)
    }

    pub fn is_finite(&self) -> bool {
        self.axial.is_finite() && self.radial.is_finite()
    }
}

impl From<[f64; 2]> for Point {
    fn from(v: [f64; 2]) -> Self {
        Point::new(v[0], v[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.axial, p.radial]
    }
}

/// Axis-aligned rectangle in the half-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub axial_min: f64,
    pub axial_max: f64,
    pub radial_min: f64,
    pub radial_max: f64,
}

impl BoundingBox {
    pub fn contains(&self, p: Point) -> bool {
        p.axial >= self.axial_min
            && p.axial <= self.axial_max
            && p.radial >= self.radial_min
            && p.radial <= self.radial_max
    }

    pub fn distance(&self, p: Point) -> f64 {
        let da = (self.axial_min - p.axial).max(p.axial - self.axial_max).max(0.0);
        let dr = (self.radial_min - p.radial)
            .max(p.radial - self.radial_max)
            .max(0.0);
        da.hypot(dr)
    }

    pub fn diameter(&self) -> f64 {
        (self.axial_max - self.axial_min).hypot(self.radial_max - self.radial_min)
    }

    /// Largest distance from the origin of any corner.
    pub fn outer_radius(&self) -> f64 {
        let a = self.axial_min.abs().max(self.axial_max.abs());
        let r = self.radial_min.abs().max(self.radial_max.abs());
        a.hypot(r)
    }

    pub fn axial_half_width(&self) -> f64 {
        self.axial_min.abs().max(self.axial_max.abs())
    }
}
