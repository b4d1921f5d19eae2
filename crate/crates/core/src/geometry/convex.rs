use super::predicates::{orient, Orientation};
use super::{on_segment, GeometryError, PointSet, Polygon};

/// Size guard for the cubic oracle.
pub const CONVEX_BRUTEFORCE_LIMIT: usize = 512;

/// Gift wrapping from the lexicographically smallest point, counter-clockwise.
///
/// Angular ties go to the farthest candidate, so points in the interior of a
/// hull edge never become vertices.
pub fn convex_hull_jarvis(ps: &PointSet) -> Polygon {
    let pts = ps.points();
    let n = pts.len();
    let start = ps.lex_min_index();
    if n == 1 {
        return Polygon::from_parts(vec![pts[0]], true);
    }
    let mut hull = vec![start];
    let mut current = start;
    loop {
        let mut candidate = if current == 0 { 1 } else { 0 };
        for r in 0..n {
            if r == current || r == candidate {
                continue;
            }
            match orient(pts[current], pts[candidate], pts[r]) {
                Orientation::Clockwise => candidate = r,
                Orientation::Collinear => {
                    if pts[current].distance_squared(&pts[r])
                        > pts[current].distance_squared(&pts[candidate])
                    {
                        candidate = r;
                    }
                }
                Orientation::CounterClockwise => {}
            }
        }
        if candidate == start || hull.len() > n {
            break;
        }
        hull.push(candidate);
        current = candidate;
    }
    let degenerate = hull.len() < 3;
    Polygon::from_parts(hull.into_iter().map(|i| pts[i]).collect(), degenerate)
}

/// Exhaustive hull: a directed pair (p, q) is a hull edge iff every other
/// point lies strictly left of p→q or on the closed segment pq.
pub fn convex_hull_bruteforce(ps: &PointSet) -> Result<Polygon, GeometryError> {
    let pts = ps.points();
    let n = pts.len();
    if n > CONVEX_BRUTEFORCE_LIMIT {
        return Err(GeometryError::SizeLimit {
            size: n,
            limit: CONVEX_BRUTEFORCE_LIMIT,
        });
    }
    let start = ps.lex_min_index();
    if n == 1 {
        return Ok(Polygon::from_parts(vec![pts[0]], true));
    }
    if ps.is_collinear() {
        let end = (0..n)
            .max_by(|&a, &b| pts[a].lex_cmp(&pts[b]))
            .unwrap_or(start);
        return Ok(Polygon::from_parts(vec![pts[start], pts[end]], true));
    }

    let mut next = vec![None; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let is_edge = (0..n).filter(|&r| r != i && r != j).all(|r| {
                match orient(pts[i], pts[j], pts[r]) {
                    Orientation::CounterClockwise => true,
                    Orientation::Collinear => on_segment(pts[i], pts[j], pts[r]),
                    Orientation::Clockwise => false,
                }
            });
            if is_edge {
                next[i] = Some(j);
            }
        }
    }

    let mut cycle = vec![start];
    let mut current = start;
    while let Some(j) = next[current] {
        if j == start || cycle.len() > n {
            break;
        }
        cycle.push(j);
        current = j;
    }
    Ok(Polygon::from_parts(
        cycle.into_iter().map(|i| pts[i]).collect(),
        false,
    ))
}
