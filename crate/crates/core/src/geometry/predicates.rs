//! Adaptive-precision orientation and in-circle tests.
//!
//! Thin wrappers over the `robust` crate (Shewchuk's predicates) so the rest
//! of the geometry code never compares raw floating-point determinants.

use std::cmp::Ordering;

use super::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
    Collinear,
}

fn coord(p: Point) -> robust::Coord<f64> {
    robust::Coord { x: p.x, y: p.y }
}

/// Exact sign of the turn a → b → c.
pub fn orient(a: Point, b: Point, c: Point) -> Orientation {
    let det = robust::orient2d(coord(a), coord(b), coord(c));
    match det.partial_cmp(&0.0) {
        Some(Ordering::Greater) => Orientation::CounterClockwise,
        Some(Ordering::Less) => Orientation::Clockwise,
        _ => Orientation::Collinear,
    }
}

/// Exact position of `d` relative to the circle through `a`, `b`, `c`.
///
/// Returns `Greater` when `d` is strictly inside, `Less` when strictly
/// outside and `Equal` when cocircular. The triple may have either
/// orientation; a collinear triple returns `Equal`.
pub fn in_circle(a: Point, b: Point, c: Point, d: Point) -> Ordering {
    let sign = match orient(a, b, c) {
        Orientation::CounterClockwise => 1.0,
        Orientation::Clockwise => -1.0,
        Orientation::Collinear => return Ordering::Equal,
    };
    let det = robust::incircle(coord(a), coord(b), coord(c), coord(d)) * sign;
    det.partial_cmp(&0.0).unwrap_or(Ordering::Equal)
}

/// Circumradius of a triangle; infinite for a collinear triple.
pub fn circumradius(a: Point, b: Point, c: Point) -> f64 {
    let ab = a.distance(&b);
    let bc = b.distance(&c);
    let ca = c.distance(&a);
    let twice_area = ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)).abs();
    if twice_area == 0.0 {
        return f64::INFINITY;
    }
    ab * bc * ca / (2.0 * twice_area)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orientation_signs() {
        let a = Point::new(0.0, 0.0);
        let b = Point::new(1.0, 0.0);
        assert_eq!(orient(a, b, Point::new(0.0, 1.0)), Orientation::CounterClockwise);
        assert_eq!(orient(a, b, Point::new(0.0, -1.0)), Orientation::Clockwise);
        assert_eq!(orient(a, b, Point::new(7.0, 0.0)), Orientation::Collinear);
    }

    #[test]
    fn orientation_near_degenerate_is_exact() {
        // Naive evaluation of this classic case gives inconsistent signs.
        let a = Point::new(0.5, 0.5);
        let b = Point::new(12.0, 12.0);
        let c = Point::new(24.0, 24.0);
        let eps = f64::EPSILON;
        assert_eq!(orient(a, b, c), Orientation::Collinear);
        let c_up = Point::new(24.0, 24.0 + 24.0 * eps);
        assert_eq!(orient(a, b, c_up), Orientation::CounterClockwise);
    }

    #[test]
    fn in_circle_either_orientation() {
        let a = Point::new(0.0, 0.0);
        let b = Point::new(1.0, 0.0);
        let c = Point::new(0.0, 1.0);
        let inside = Point::new(0.5, 0.5);
        let outside = Point::new(2.0, 2.0);
        let on = Point::new(1.0, 1.0);
        assert_eq!(in_circle(a, b, c, inside), Ordering::Greater);
        assert_eq!(in_circle(a, c, b, inside), Ordering::Greater);
        assert_eq!(in_circle(a, b, c, outside), Ordering::Less);
        assert_eq!(in_circle(a, b, c, on), Ordering::Equal);
    }

    #[test]
    fn circumradius_of_right_triangle() {
        let r = circumradius(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0));
        assert!((r - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(circumradius(Point::new(0.0, 0.0), Point::new(1.0, 1.0), Point::new(2.0, 2.0)).is_infinite());
    }
}
