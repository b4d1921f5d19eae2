//! Exact planar geometry: hulls, alpha shapes and polygon metrics.
//!
//! All constructions take a validated [`PointSet`] and are pure. Orientation
//! and in-circle decisions go through the adaptive predicates in
//! [`predicates`]; lengths, areas and circumradii are plain `f64`.

mod alpha;
mod concave;
mod convex;
mod metrics;
pub mod predicates;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use alpha::{alpha_edges_bruteforce, alpha_shape, AlphaShape, ALPHA_BRUTEFORCE_LIMIT};
pub use concave::{concave_hull, largest_component_hull, ComponentHull};
pub use convex::{convex_hull_bruteforce, convex_hull_jarvis, CONVEX_BRUTEFORCE_LIMIT};
pub use metrics::{polygon_metrics, HullMetrics};

use predicates::{orient, Orientation};

/// Default minimum separation between two points of a [`PointSet`].
pub const DEFAULT_MIN_SEPARATION: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("point set is empty")]
    EmptyPointSet,
    #[error("point {index} has a non-finite coordinate")]
    NonFinite { index: usize },
    #[error("points {first} and {second} are {distance:e} apart, closer than the minimum separation")]
    TooClose {
        first: usize,
        second: usize,
        distance: f64,
    },
    #[error("point set has {size} points, the limit for this operation is {limit}")]
    SizeLimit { size: usize, limit: usize },
    #[error("operation needs at least {needed} points, got {size}")]
    TooFewPoints { size: usize, needed: usize },
    #[error("all points are collinear")]
    Collinear,
    #[error("carving radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("DISCONNECTED: alpha shape splits the point set into {components} components")]
    Disconnected { components: usize },
    #[error("DEGENERATE: no triangle survives at this carving radius")]
    Degenerate,
    #[error("DEGENERATE: hull boundary pinches at point {vertex}")]
    NonManifold { vertex: usize },
    #[error("invalid polygon: {0}")]
    InvalidPolygon(&'static str),
    #[error("operation needs a non-degenerate polygon")]
    DegeneratePolygon,
    #[error("sampling step must be positive and finite, got {0}")]
    InvalidSamplingStep(f64),
}

/// A point of the plane in world units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.distance_squared(other).sqrt()
    }

    pub fn distance_squared(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    /// Lexicographic order on `(x, y)`.
    pub fn lex_cmp(&self, other: &Point) -> Ordering {
        self.x
            .total_cmp(&other.x)
            .then_with(|| self.y.total_cmp(&other.y))
    }

    pub fn scaled(&self, factor: f64) -> Point {
        Point::new(self.x * factor, self.y * factor)
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point::new(x, y)
    }
}

/// The planar data set `P`.
///
/// Construction rejects empty sets, non-finite coordinates and pairs of
/// points closer than the minimum separation.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<Point>,
    id: Option<String>,
}

impl PointSet {
    pub fn new(points: Vec<Point>) -> Result<Self, GeometryError> {
        Self::with_min_separation(points, DEFAULT_MIN_SEPARATION)
    }

    pub fn with_min_separation(points: Vec<Point>, min_sep: f64) -> Result<Self, GeometryError> {
        if points.is_empty() {
            return Err(GeometryError::EmptyPointSet);
        }
        if let Some(index) = points.iter().position(|p| !p.is_finite()) {
            return Err(GeometryError::NonFinite { index });
        }
        // Sweep along x so only nearby pairs are compared.
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points[a].lex_cmp(&points[b]));
        for (k, &i) in order.iter().enumerate() {
            for &j in &order[k + 1..] {
                if points[j].x - points[i].x >= min_sep {
                    break;
                }
                let d = points[i].distance(&points[j]);
                if d < min_sep {
                    let (first, second) = (i.min(j), i.max(j));
                    return Err(GeometryError::TooClose {
                        first,
                        second,
                        distance: d,
                    });
                }
            }
        }
        Ok(Self { points, id: None })
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = Some(id.into());
        self
    }

    pub fn id(&self) -> Option<&str> {
        self.id.as_deref()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, index: usize) -> Point {
        self.points[index]
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[i + 1..] {
                best = best.max(p.distance_squared(q));
            }
        }
        best.sqrt()
    }

    /// Smallest pairwise distance, `None` for a single point.
    pub fn min_pairwise_distance(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[i + 1..] {
                let d = p.distance_squared(q);
                best = Some(best.map_or(d, |b: f64| b.min(d)));
            }
        }
        best.map(f64::sqrt)
    }

    /// Axis-aligned bounding box as `(min, max)`.
    pub fn bounds(&self) -> (Point, Point) {
        let mut lo = self.points[0];
        let mut hi = self.points[0];
        for p in &self.points[1..] {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    /// True when every point lies on one line (including the 1- and 2-point sets).
    pub fn is_collinear(&self) -> bool {
        let pts = &self.points;
        if pts.len() < 3 {
            return true;
        }
        let a = pts[0];
        let b = pts[1];
        pts[2..]
            .iter()
            .all(|c| orient(a, b, *c) == Orientation::Collinear)
    }

    /// Index of the lexicographically smallest point.
    pub fn lex_min_index(&self) -> usize {
        (0..self.points.len())
            .min_by(|&a, &b| self.points[a].lex_cmp(&self.points[b]))
            .unwrap_or(0)
    }

    pub fn map(&self, f: impl Fn(Point) -> Point) -> Result<PointSet, GeometryError> {
        let mut out = PointSet::new(self.points.iter().copied().map(f).collect())?;
        out.id = self.id.clone();
        Ok(out)
    }
}

/// A closed vertex cycle.
///
/// A non-degenerate polygon has at least three vertices, is simple, strictly
/// counter-clockwise, and has no three consecutive collinear vertices. A
/// degenerate polygon holds one point or one segment.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
    degenerate: bool,
}

impl Polygon {
    /// Validates and wraps a vertex cycle.
    pub fn new(vertices: Vec<Point>) -> Result<Self, GeometryError> {
        match vertices.len() {
            0 => Err(GeometryError::InvalidPolygon("no vertices")),
            1 | 2 => {
                if vertices.iter().any(|p| !p.is_finite()) {
                    return Err(GeometryError::InvalidPolygon("non-finite vertex"));
                }
                Ok(Self {
                    vertices,
                    degenerate: true,
                })
            }
            _ => {
                let poly = Self {
                    vertices,
                    degenerate: false,
                };
                poly.validate()?;
                Ok(poly)
            }
        }
    }

    pub(crate) fn from_parts(vertices: Vec<Point>, degenerate: bool) -> Self {
        Self {
            vertices,
            degenerate,
        }
    }

    fn validate(&self) -> Result<(), GeometryError> {
        let v = &self.vertices;
        let n = v.len();
        if v.iter().any(|p| !p.is_finite()) {
            return Err(GeometryError::InvalidPolygon("non-finite vertex"));
        }
        for i in 0..n {
            let (a, b, c) = (v[i], v[(i + 1) % n], v[(i + 2) % n]);
            if orient(a, b, c) == Orientation::Collinear {
                return Err(GeometryError::InvalidPolygon(
                    "three consecutive collinear vertices",
                ));
            }
        }
        if !self.is_simple() {
            return Err(GeometryError::InvalidPolygon("self-intersecting"));
        }
        if self.signed_area() <= 0.0 {
            return Err(GeometryError::InvalidPolygon("not counter-clockwise"));
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Closed edge list `(v[i], v[i+1 mod n])`.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Shoelace area, positive for counter-clockwise cycles.
    pub fn signed_area(&self) -> f64 {
        if self.vertices.len() < 3 {
            return 0.0;
        }
        let sum: f64 = self.edges().map(|(a, b)| a.x * b.y - b.x * a.y).sum();
        0.5 * sum
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    /// Length of the closed boundary. A segment counts both ways.
    pub fn perimeter(&self) -> f64 {
        match self.vertices.len() {
            0 | 1 => 0.0,
            _ => self.edges().map(|(a, b)| a.distance(&b)).sum(),
        }
    }

    /// The same cycle rotated to start at its lexicographically smallest vertex.
    pub fn canonical(&self) -> Polygon {
        let start = (0..self.vertices.len())
            .min_by(|&a, &b| self.vertices[a].lex_cmp(&self.vertices[b]))
            .unwrap_or(0);
        let mut vertices = self.vertices.clone();
        vertices.rotate_left(start);
        Polygon {
            vertices,
            degenerate: self.degenerate,
        }
    }

    /// Inside-or-on test. Boundary points count as contained.
    pub fn contains(&self, p: Point) -> bool {
        match self.vertices.len() {
            0 => false,
            1 => self.vertices[0] == p,
            2 => on_segment(self.vertices[0], self.vertices[1], p),
            _ => {
                if self.edges().any(|(a, b)| on_segment(a, b, p)) {
                    return true;
                }
                winding_number(&self.vertices, p) != 0
            }
        }
    }

    /// No two non-adjacent edges meet and adjacent edges share only their vertex.
    pub fn is_simple(&self) -> bool {
        let v = &self.vertices;
        let n = v.len();
        if n < 3 {
            return true;
        }
        for i in 0..n {
            let (a, b) = (v[i], v[(i + 1) % n]);
            for j in i + 1..n {
                let (c, d) = (v[j], v[(j + 1) % n]);
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    // Shared vertex only; a fold-back shows up as overlap.
                    let (shared, other_a, other_b) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                    if orient(other_a, shared, other_b) == Orientation::Collinear {
                        let u = (other_a.x - shared.x, other_a.y - shared.y);
                        let w = (other_b.x - shared.x, other_b.y - shared.y);
                        if u.0 * w.0 + u.1 * w.1 > 0.0 {
                            return false;
                        }
                    }
                    continue;
                }
                if segments_intersect(a, b, c, d) {
                    return false;
                }
            }
        }
        true
    }
}

/// `p` on the closed segment `ab`.
pub(crate) fn on_segment(a: Point, b: Point, p: Point) -> bool {
    orient(a, b, p) == Orientation::Collinear
        && p.x >= a.x.min(b.x)
        && p.x <= a.x.max(b.x)
        && p.y >= a.y.min(b.y)
        && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test with exact orientation.
pub(crate) fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 != o2
        && o3 != o4
        && o1 != Orientation::Collinear
        && o2 != Orientation::Collinear
        && o3 != Orientation::Collinear
        && o4 != Orientation::Collinear
    {
        return true;
    }
    on_segment(a, b, c) || on_segment(a, b, d) || on_segment(c, d, a) || on_segment(c, d, b)
}

fn winding_number(vertices: &[Point], p: Point) -> i32 {
    let n = vertices.len();
    let mut wn = 0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        if a.y <= p.y {
            if b.y > p.y && orient(a, b, p) == Orientation::CounterClockwise {
                wn += 1;
            }
        } else if b.y <= p.y && orient(a, b, p) == Orientation::Clockwise {
            wn -= 1;
        }
    }
    wn
}
