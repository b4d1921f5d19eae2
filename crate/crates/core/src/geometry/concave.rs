use std::collections::{BTreeMap, BTreeSet};

use super::alpha::alpha_shape;
use super::predicates::{orient, Orientation};
use super::{GeometryError, Point, PointSet, Polygon};

/// Hull of one triangle region of an α-shape, as returned by
/// [`largest_component_hull`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentHull {
    pub polygon: Polygon,
    /// Indices of the points covered by the chosen region.
    pub members: Vec<usize>,
    /// Number of regions the α-shape splits the point set into, counting
    /// points covered by no kept triangle as their own region.
    pub components: usize,
}

/// The filled outer boundary of the α-shape.
///
/// Succeeds only when the kept triangles form one edge-connected region that
/// covers every point of the set. A split set is reported as
/// [`GeometryError::Disconnected`] so the caller can retry with a larger
/// radius; no surviving triangle is [`GeometryError::Degenerate`].
pub fn concave_hull(ps: &PointSet, carving_radius: f64) -> Result<Polygon, GeometryError> {
    let hull = largest_component_hull(ps, carving_radius)?;
    if hull.components > 1 {
        return Err(GeometryError::Disconnected {
            components: hull.components,
        });
    }
    Ok(hull.polygon)
}

/// Like [`concave_hull`] but returns the best region even when the set is
/// split. Regions are ranked by point count, then area, then smallest vertex.
pub fn largest_component_hull(
    ps: &PointSet,
    carving_radius: f64,
) -> Result<ComponentHull, GeometryError> {
    let shape = alpha_shape(ps, carving_radius)?;
    if shape.kept_triangles.is_empty() {
        return Err(GeometryError::Degenerate);
    }
    let pts = ps.points();
    let triangles: Vec<[usize; 3]> = shape.kept_triangles.iter().copied().collect();
    let regions = triangle_regions(&triangles);

    let mut covered = vec![false; pts.len()];
    for t in &triangles {
        for &v in t {
            covered[v] = true;
        }
    }
    let uncovered = covered.iter().filter(|c| !**c).count();

    let best = regions
        .iter()
        .map(|region| {
            let members: BTreeSet<usize> =
                region.iter().flat_map(|&t| triangles[t]).collect();
            let area: f64 = region
                .iter()
                .map(|&t| triangle_area(pts, triangles[t]))
                .sum();
            let min_vertex = members
                .iter()
                .map(|&i| pts[i])
                .min_by(|a, b| a.lex_cmp(b))
                .expect("region has vertices");
            (region, members, area, min_vertex)
        })
        .max_by(|a, b| {
            a.1.len()
                .cmp(&b.1.len())
                .then(a.2.total_cmp(&b.2))
                .then(b.3.lex_cmp(&a.3))
        })
        .expect("at least one region");

    let region_triangles: Vec<[usize; 3]> = best.0.iter().map(|&t| triangles[t]).collect();
    let polygon = outer_boundary(pts, &region_triangles)?;
    Ok(ComponentHull {
        polygon,
        members: best.1.into_iter().collect(),
        components: regions.len() + uncovered,
    })
}

fn triangle_area(pts: &[Point], t: [usize; 3]) -> f64 {
    let (a, b, c) = (pts[t[0]], pts[t[1]], pts[t[2]]);
    0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)).abs()
}

/// Groups triangles that share an edge.
fn triangle_regions(triangles: &[[usize; 3]]) -> Vec<Vec<usize>> {
    let mut by_edge: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (k, t) in triangles.iter().enumerate() {
        for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])] {
            by_edge.entry((a, b)).or_default().push(k);
        }
    }
    let links = by_edge
        .values()
        .filter(|tris| tris.len() == 2)
        .map(|tris| (tris[0], tris[1]));
    let mut parent: Vec<usize> = (0..triangles.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (a, b) in links {
        let ra = find(&mut parent, a);
        let rb = find(&mut parent, b);
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for k in 0..triangles.len() {
        let root = find(&mut parent, k);
        groups.entry(root).or_default().push(k);
    }
    groups.into_values().collect()
}

/// Outer boundary loop of an edge-connected triangle region, holes dropped.
fn outer_boundary(pts: &[Point], triangles: &[[usize; 3]]) -> Result<Polygon, GeometryError> {
    let mut directed: BTreeSet<(usize, usize)> = BTreeSet::new();
    for t in triangles {
        let [a, mut b, mut c] = *t;
        if orient(pts[a], pts[b], pts[c]) == Orientation::Clockwise {
            std::mem::swap(&mut b, &mut c);
        }
        directed.insert((a, b));
        directed.insert((b, c));
        directed.insert((c, a));
    }
    let mut next: BTreeMap<usize, usize> = BTreeMap::new();
    for &(a, b) in &directed {
        if directed.contains(&(b, a)) {
            continue;
        }
        if next.insert(a, b).is_some() {
            return Err(GeometryError::NonManifold { vertex: a });
        }
    }

    // Split boundary edges into loops; the outer loop is the only CCW one.
    let mut seen = BTreeSet::new();
    let mut outer: Option<(f64, Vec<usize>)> = None;
    for &start in next.keys() {
        if seen.contains(&start) {
            continue;
        }
        let mut ring = vec![start];
        seen.insert(start);
        let mut v = next[&start];
        while v != start {
            ring.push(v);
            seen.insert(v);
            v = next[&v];
        }
        let area = ring_signed_area(pts, &ring);
        if outer.as_ref().is_none_or(|(best, _)| area > *best) {
            outer = Some((area, ring));
        }
    }
    let (_, ring) = outer.expect("a triangle region has a boundary");

    let n = ring.len();
    let vertices: Vec<Point> = (0..n)
        .filter(|&i| {
            let prev = pts[ring[(i + n - 1) % n]];
            let next = pts[ring[(i + 1) % n]];
            orient(prev, pts[ring[i]], next) != Orientation::Collinear
        })
        .map(|i| pts[ring[i]])
        .collect();
    let poly = Polygon::from_parts(vertices, false);
    debug_assert!(Polygon::new(poly.vertices().to_vec()).is_ok());
    Ok(poly.canonical())
}

fn ring_signed_area(pts: &[Point], ring: &[usize]) -> f64 {
    let n = ring.len();
    0.5 * (0..n)
        .map(|i| {
            let a = pts[ring[i]];
            let b = pts[ring[(i + 1) % n]];
            a.x * b.y - b.x * a.y
        })
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::convex_hull_jarvis;
    use proptest::prelude::*;

    fn set(coords: &[(f64, f64)]) -> PointSet {
        PointSet::new(coords.iter().map(|&c| Point::from(c)).collect()).unwrap()
    }

    #[test]
    fn convex_configuration_gives_convex_hull() {
        let ps = set(&[(0.0, 0.0), (6.0, -7.0), (14.0, -3.0), (13.0, 6.0), (4.0, 8.0)]);
        let hull = concave_hull(&ps, 100.0).unwrap();
        assert_eq!(hull, convex_hull_jarvis(&ps));
    }

    #[test]
    fn inward_curve_loses_area() {
        let ps = set(&[
            (0.0, 0.0),
            (2.0, 0.0),
            (4.0, 0.0),
            (4.0, 2.0),
            (4.0, 4.0),
            (2.0, 4.0),
            (0.0, 4.0),
            (1.6, 2.0),
        ]);
        let hull = concave_hull(&ps, 2.0).unwrap();
        let convex = convex_hull_jarvis(&ps);
        assert!(hull.area() < convex.area());
        for p in ps.points() {
            assert!(hull.contains(*p));
        }
    }

    #[test]
    fn square_at_small_radius_is_degenerate() {
        let ps = set(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        assert_eq!(concave_hull(&ps, 0.4), Err(GeometryError::Degenerate));
    }

    #[test]
    fn two_clusters_are_disconnected() {
        let ps = set(&[
            (0.0, 0.0),
            (1.0, 0.0),
            (0.0, 1.0),
            (10.0, 0.0),
            (11.0, 0.0),
            (10.0, 1.0),
            (10.0, 5.0),
        ]);
        assert_eq!(
            concave_hull(&ps, 1.0),
            Err(GeometryError::Disconnected { components: 3 })
        );
        let best = largest_component_hull(&ps, 1.0).unwrap();
        assert_eq!(best.members.len(), 3);
        // Equal size and area: the region with the smaller vertex wins.
        assert_eq!(best.polygon.vertices()[0], Point::new(0.0, 0.0));
    }

    #[test]
    fn hole_is_filled() {
        // Two interleaved rings of twelve points around an empty centre.
        let mut pts = Vec::new();
        for k in 0..12 {
            let t = (k as f64) * std::f64::consts::PI / 6.0;
            pts.push(Point::new(5.0 * t.cos(), 5.0 * t.sin()));
            let s = t + std::f64::consts::PI / 12.0;
            pts.push(Point::new(3.5 * s.cos(), 3.5 * s.sin()));
        }
        let ps = PointSet::new(pts).unwrap();
        let shape = alpha_shape(&ps, 2.0).unwrap();
        assert_eq!(shape.components, 1);
        assert_eq!(shape.holes, 1);
        let hull = concave_hull(&ps, 2.0).unwrap();
        assert_eq!(hull.len(), 12);
        assert!((hull.area() - 75.0).abs() < 1e-9);
    }

    #[test]
    fn corner_triangles_touching_at_vertices_are_split() {
        let ps = set(&[
            (0.0, 0.0),
            (1.0, 0.0),
            (2.0, 0.0),
            (2.0, 1.0),
            (2.0, 2.0),
            (1.0, 2.0),
            (0.0, 2.0),
            (0.0, 1.0),
        ]);
        assert_eq!(
            concave_hull(&ps, 0.8),
            Err(GeometryError::Disconnected { components: 4 })
        );
    }

    fn arb_set() -> impl Strategy<Value = PointSet> {
        prop::collection::vec((0.0f64..10.0, 0.0f64..10.0), 4..=24).prop_filter_map(
            "degenerate",
            |raw| {
                let ps = PointSet::new(raw.into_iter().map(Point::from).collect()).ok()?;
                (!ps.is_collinear()).then_some(ps)
            },
        )
    }

    proptest! {
        #[test]
        fn hull_is_simple_ccw_and_covers_points(ps in arb_set(), r in 1.0f64..20.0) {
            if let Ok(hull) = concave_hull(&ps, r) {
                prop_assert!(Polygon::new(hull.vertices().to_vec()).is_ok());
                for p in ps.points() {
                    prop_assert!(hull.contains(*p));
                }
            }
        }

        #[test]
        fn hull_grows_with_radius(ps in arb_set(), r1 in 1.0f64..10.0, dr in 0.0f64..10.0) {
            let r2 = r1 + dr;
            if let (Ok(h1), Ok(h2)) = (concave_hull(&ps, r1), concave_hull(&ps, r2)) {
                for v in h1.vertices() {
                    prop_assert!(h2.contains(*v));
                }
                prop_assert!(h1.area() <= h2.area() + 1e-9);
            }
        }
    }
}
