//! Planar geometry for the positioning layer.
//!
//! Opponent positions are triangulated (Bowyer–Watson) and the Voronoi
//! diagram is recovered as the dual of that triangulation, clipped to the
//! field rectangle. Voronoi nodes are the points locally furthest from every
//! opponent, which is what the task filter and target refinement consume.

mod delaunay;
mod voronoi;

use core::ops::{Add, Mul, Neg, Sub};

pub use delaunay::{delaunay_triangulate, Triangulation};
pub use voronoi::{
    nearest_node, region_of, voronoi_diagram, voronoi_from_delaunay, NodeKind, VoronoiDiagram,
    VoronoiEdge, VoronoiNode,
};

/// Distance / equidistance tolerance in meters.
pub const EPS_GEOM: f64 = 1e-9;
/// Sites closer than this are merged before triangulating.
pub const EPS_DUP: f64 = 0.01;
/// Triangles with an area at or below this (m²) have no usable circumcenter.
pub const EPS_AREA: f64 = 1e-12;
/// Extra room around the field used when clipping the diagram.
pub const FIELD_MARGIN: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("triangle is degenerate (area {area:e} m²)")]
    DegenerateTriangle { area: f64 },
    #[error("need at least 3 distinct sites, got {0}")]
    TooFewSites(usize),
    #[error("all sites are collinear")]
    AllCollinear,
    #[error("diagram has no nodes")]
    EmptyDiagram,
}

/// A point (or displacement) in the field frame, meters.
///
/// Origin at the field center, +x toward the opponent goal.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        libm::hypot(self.x, self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn distance_squared(self, other: Point2) -> f64 {
        (self - other).norm_squared()
    }

    pub fn midpoint(self, other: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    /// Counter-clockwise quarter turn.
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Moves `fraction` of the way from `self` toward `target`.
    pub fn lerp(self, target: Point2, fraction: f64) -> Point2 {
        self + (target - self) * fraction
    }

    fn coord(self) -> robust::Coord<f64> {
        robust::Coord { x: self.x, y: self.y }
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// Playing field, centered on the origin with the own goal at `-x`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct Field {
    pub length: f64,
    pub width: f64,
}

impl Default for Field {
    fn default() -> Self {
        Field {
            length: 9.0,
            width: 6.0,
        }
    }
}

impl Field {
    pub fn half_length(&self) -> f64 {
        0.5 * self.length
    }

    pub fn half_width(&self) -> f64 {
        0.5 * self.width
    }

    /// The field lines themselves.
    pub fn bounds(&self) -> Bounds {
        Bounds::field(self.length, self.width, 0.0)
    }

    /// The field grown by [`FIELD_MARGIN`], used to clip Voronoi diagrams.
    pub fn clip_bounds(&self) -> Bounds {
        Bounds::field(self.length, self.width, FIELD_MARGIN)
    }

    pub fn own_goal(&self) -> Point2 {
        Point2::new(-self.half_length(), 0.0)
    }

    pub fn opponent_goal(&self) -> Point2 {
        Point2::new(self.half_length(), 0.0)
    }
}

/// Axis-aligned clipping rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Bounds {
    pub min: Point2,
    pub max: Point2,
}

impl Bounds {
    pub fn new(min: Point2, max: Point2) -> Self {
        Bounds { min, max }
    }

    /// Field rectangle centered on the origin, grown by `margin` on every side.
    pub fn field(length: f64, width: f64, margin: f64) -> Self {
        let hx = 0.5 * length + margin;
        let hy = 0.5 * width + margin;
        Bounds::new(Point2::new(-hx, -hy), Point2::new(hx, hy))
    }

    pub fn center(&self) -> Point2 {
        self.min.midpoint(self.max)
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn clamp(&self, p: Point2) -> Point2 {
        Point2::new(
            p.x.clamp(self.min.x, self.max.x),
            p.y.clamp(self.min.y, self.max.y),
        )
    }

    pub fn translated(&self, by: Point2) -> Bounds {
        Bounds::new(self.min + by, self.max + by)
    }

    /// Corners in counter-clockwise order starting at `min`.
    pub fn corners(&self) -> [Point2; 4] {
        [
            self.min,
            Point2::new(self.max.x, self.min.y),
            self.max,
            Point2::new(self.min.x, self.max.y),
        ]
    }

    /// Parametric clip of `origin + t·dir` for `t` in `[t_min, t_max]`
    /// (Liang–Barsky). Returns the surviving parameter interval.
    pub(crate) fn clip_parametric(
        &self,
        origin: Point2,
        dir: Point2,
        mut t_min: f64,
        mut t_max: f64,
    ) -> Option<(f64, f64)> {
        let checks = [
            (-dir.x, origin.x - self.min.x),
            (dir.x, self.max.x - origin.x),
            (-dir.y, origin.y - self.min.y),
            (dir.y, self.max.y - origin.y),
        ];
        for (p, q) in checks {
            if p == 0.0 {
                if q < 0.0 {
                    return None;
                }
                continue;
            }
            let r = q / p;
            if p < 0.0 {
                if r > t_max {
                    return None;
                }
                if r > t_min {
                    t_min = r;
                }
            } else {
                if r < t_min {
                    return None;
                }
                if r < t_max {
                    t_max = r;
                }
            }
        }
        Some((t_min, t_max))
    }
}

/// Twice the signed area of `(a, b, c)`; positive when counter-clockwise.
/// Exact sign.
pub fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    robust::orient2d(a.coord(), b.coord(), c.coord())
}

/// Positive when `d` lies strictly inside the circumcircle of the
/// counter-clockwise triangle `(a, b, c)`, zero when cocircular. Exact sign.
pub fn in_circle(a: Point2, b: Point2, c: Point2, d: Point2) -> f64 {
    robust::incircle(a.coord(), b.coord(), c.coord(), d.coord())
}

pub fn triangle_area(a: Point2, b: Point2, c: Point2) -> f64 {
    0.5 * (b - a).cross(c - a).abs()
}

/// Center of the circle through `a`, `b` and `c`.
pub fn circumcenter(a: Point2, b: Point2, c: Point2) -> Result<Point2, GeometryError> {
    let area = triangle_area(a, b, c);
    if area <= EPS_AREA {
        return Err(GeometryError::DegenerateTriangle { area });
    }
    // Solve relative to `a` to keep the magnitudes small.
    let ab = b - a;
    let ac = c - a;
    let d = 2.0 * ab.cross(ac);
    let ab2 = ab.norm_squared();
    let ac2 = ac.norm_squared();
    let ux = (ac.y * ab2 - ab.y * ac2) / d;
    let uy = (ab.x * ac2 - ac.x * ab2) / d;
    Ok(a + Point2::new(ux, uy))
}
