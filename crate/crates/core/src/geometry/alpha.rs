use std::collections::{BTreeMap, BTreeSet};

use spade::{DelaunayTriangulation, HasPosition, Point2, Triangulation};

use super::predicates::circumradius;
use super::{GeometryError, PointSet};

/// Size guard for the brute-force edge oracle.
pub const ALPHA_BRUTEFORCE_LIMIT: usize = 64;

/// The α-complex of a point set at one carving radius (α = 1 / carving_radius).
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaShape {
    pub carving_radius: f64,
    /// Boundary edges of the kept-triangle union plus isolated short edges,
    /// as sorted index pairs.
    pub kept_edges: BTreeSet<(usize, usize)>,
    /// Delaunay triangles with circumradius below the carving radius, as
    /// sorted index triples.
    pub kept_triangles: BTreeSet<[usize; 3]>,
    /// Connected components over all points, isolated points included.
    pub components: usize,
    /// Bounded holes in the union of kept simplices.
    pub holes: usize,
}

impl AlphaShape {
    /// Every edge of the complex: triangle sides plus the kept edges.
    pub fn complex_edges(&self) -> BTreeSet<(usize, usize)> {
        let mut edges = self.kept_edges.clone();
        for t in &self.kept_triangles {
            edges.extend(triangle_edges(*t));
        }
        edges
    }
}

struct Site {
    position: Point2<f64>,
    index: usize,
}

impl HasPosition for Site {
    type Scalar = f64;

    fn position(&self) -> Point2<f64> {
        self.position
    }
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

fn triangle_edges(t: [usize; 3]) -> [(usize, usize); 3] {
    [
        edge_key(t[0], t[1]),
        edge_key(t[1], t[2]),
        edge_key(t[0], t[2]),
    ]
}

fn check_radius(r: f64) -> Result<(), GeometryError> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(GeometryError::InvalidRadius(r))
    }
}

/// Delaunay edges and triangles of `ps` as index sets.
pub(crate) fn delaunay(ps: &PointSet) -> (BTreeSet<(usize, usize)>, Vec<[usize; 3]>) {
    let sites: Vec<Site> = ps
        .points()
        .iter()
        .enumerate()
        .map(|(index, p)| Site {
            position: Point2::new(p.x, p.y),
            index,
        })
        .collect();
    let dt: DelaunayTriangulation<Site> =
        DelaunayTriangulation::bulk_load_stable(sites).expect("validated point set");
    let edges = dt
        .undirected_edges()
        .map(|e| {
            let [a, b] = e.vertices();
            edge_key(a.data().index, b.data().index)
        })
        .collect();
    let triangles = dt
        .inner_faces()
        .map(|f| {
            let [a, b, c] = f.vertices();
            let mut t = [a.data().index, b.data().index, c.data().index];
            t.sort_unstable();
            t
        })
        .collect();
    (edges, triangles)
}

/// Builds the α-complex from the Delaunay triangulation.
pub fn alpha_shape(ps: &PointSet, carving_radius: f64) -> Result<AlphaShape, GeometryError> {
    check_radius(carving_radius)?;
    if ps.len() < 3 {
        return Err(GeometryError::TooFewPoints {
            size: ps.len(),
            needed: 3,
        });
    }
    if ps.is_collinear() {
        return Err(GeometryError::Collinear);
    }
    let pts = ps.points();
    let (edges, triangles) = delaunay(ps);

    let kept_triangles: BTreeSet<[usize; 3]> = triangles
        .into_iter()
        .filter(|t| circumradius(pts[t[0]], pts[t[1]], pts[t[2]]) < carving_radius)
        .collect();

    let mut incidence: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for t in &kept_triangles {
        for e in triangle_edges(*t) {
            *incidence.entry(e).or_default() += 1;
        }
    }

    let mut kept_edges = BTreeSet::new();
    for &(a, b) in &edges {
        match incidence.get(&(a, b)) {
            Some(1) => {
                kept_edges.insert((a, b));
            }
            Some(_) => {}
            None => {
                // Isolated edge: needs an empty diametral disc smaller than the radius.
                let half = 0.5 * pts[a].distance(&pts[b]);
                if half < carving_radius && is_gabriel(ps, a, b) {
                    kept_edges.insert((a, b));
                }
            }
        }
    }

    let mut shape = AlphaShape {
        carving_radius,
        kept_edges,
        kept_triangles,
        components: 0,
        holes: 0,
    };
    let complex_edges = shape.complex_edges();
    let components = count_components(ps.len(), complex_edges.iter().copied());
    // Euler characteristic of a planar complex: V - E + F = components - holes.
    let chi = ps.len() as i64 - complex_edges.len() as i64 + shape.kept_triangles.len() as i64;
    shape.components = components;
    shape.holes = (components as i64 - chi).max(0) as usize;
    Ok(shape)
}

fn is_gabriel(ps: &PointSet, a: usize, b: usize) -> bool {
    let pts = ps.points();
    let (p, q) = (pts[a], pts[b]);
    // r strictly inside the diametral disc iff angle prq is obtuse.
    pts.iter().enumerate().all(|(k, r)| {
        if k == a || k == b {
            return true;
        }
        (p.x - r.x) * (q.x - r.x) + (p.y - r.y) * (q.y - r.y) >= 0.0
    })
}

pub(crate) fn count_components(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut count = n;
    for (a, b) in edges {
        let ra = find(&mut parent, a);
        let rb = find(&mut parent, b);
        if ra != rb {
            parent[ra] = rb;
            count -= 1;
        }
    }
    count
}

/// Independent O(n³) oracle: (p, q) is kept iff |pq| ≤ 2r and one of the two
/// radius-r discs through p and q has no other point in its interior.
pub fn alpha_edges_bruteforce(
    ps: &PointSet,
    carving_radius: f64,
) -> Result<BTreeSet<(usize, usize)>, GeometryError> {
    check_radius(carving_radius)?;
    let pts = ps.points();
    let n = pts.len();
    if n > ALPHA_BRUTEFORCE_LIMIT {
        return Err(GeometryError::SizeLimit {
            size: n,
            limit: ALPHA_BRUTEFORCE_LIMIT,
        });
    }
    let r = carving_radius;
    let mut out = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            let (p, q) = (pts[i], pts[j]);
            let d = p.distance(&q);
            if d > 2.0 * r {
                continue;
            }
            let mx = 0.5 * (p.x + q.x);
            let my = 0.5 * (p.y + q.y);
            let h = (r * r - 0.25 * d * d).max(0.0).sqrt();
            let nx = -(q.y - p.y) / d;
            let ny = (q.x - p.x) / d;
            let empty = |cx: f64, cy: f64| {
                (0..n).filter(|&k| k != i && k != j).all(|k| {
                    let dx = pts[k].x - cx;
                    let dy = pts[k].y - cy;
                    (dx * dx + dy * dy).sqrt() >= r
                })
            };
            if empty(mx + h * nx, my + h * ny) || empty(mx - h * nx, my - h * ny) {
                out.insert((i, j));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use proptest::prelude::*;

    fn set(coords: &[(f64, f64)]) -> PointSet {
        PointSet::new(coords.iter().map(|&c| Point::from(c)).collect()).unwrap()
    }

    fn unit_square() -> PointSet {
        set(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
    }

    #[test]
    fn large_radius_keeps_the_convex_hull() {
        let shape = alpha_shape(&unit_square(), 100.0).unwrap();
        assert_eq!(shape.kept_triangles.len(), 2);
        let hull: BTreeSet<_> = [(0, 1), (1, 2), (2, 3), (0, 3)].into_iter().collect();
        assert_eq!(shape.kept_edges, hull);
        assert_eq!(shape.components, 1);
        assert_eq!(shape.holes, 0);
    }

    #[test]
    fn small_radius_keeps_nothing() {
        let shape = alpha_shape(&unit_square(), 0.4).unwrap();
        assert!(shape.kept_triangles.is_empty());
        assert!(shape.kept_edges.is_empty());
        assert_eq!(shape.components, 4);
    }

    #[test]
    fn radius_between_half_side_and_circumradius_keeps_the_sides() {
        let shape = alpha_shape(&unit_square(), 0.6).unwrap();
        assert!(shape.kept_triangles.is_empty());
        assert_eq!(shape.kept_edges.len(), 4);
        assert_eq!(shape.components, 1);
        assert_eq!(shape.holes, 1);
        assert_eq!(shape.kept_edges, alpha_edges_bruteforce(&unit_square(), 0.6).unwrap());
    }

    #[test]
    fn preconditions() {
        assert_eq!(alpha_shape(&unit_square(), 0.0), Err(GeometryError::InvalidRadius(0.0)));
        assert_eq!(
            alpha_shape(&set(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]), 1.0),
            Err(GeometryError::Collinear)
        );
        assert!(matches!(
            alpha_shape(&set(&[(0.0, 0.0), (1.0, 1.0)]), 1.0),
            Err(GeometryError::TooFewPoints { size: 2, needed: 3 })
        ));
    }

    #[test]
    fn bruteforce_two_points() {
        let two = set(&[(0.0, 0.0), (1.0, 0.0)]);
        let e = alpha_edges_bruteforce(&two, 0.6).unwrap();
        assert_eq!(e.into_iter().collect::<Vec<_>>(), vec![(0, 1)]);
        assert!(alpha_edges_bruteforce(&two, 0.4).unwrap().is_empty());
    }

    #[test]
    fn crescent_matches_oracle() {
        // Twelve points on an arc of radius 10 opening to the right, inner
        // arc of radius 6.
        let mut pts = Vec::new();
        for k in 0..6 {
            let t = std::f64::consts::PI * (0.5 + k as f64 / 5.0);
            pts.push(Point::new(10.0 * t.cos(), 10.0 * t.sin()));
            pts.push(Point::new(6.0 * t.cos() + 1.0, 6.0 * t.sin()));
        }
        let ps = PointSet::new(pts).unwrap();
        for r in [2.0, 3.5, 5.0] {
            let shape = alpha_shape(&ps, r).unwrap();
            assert_eq!(shape.kept_edges, alpha_edges_bruteforce(&ps, r).unwrap(), "r = {r}");
        }
    }

    #[test]
    fn bruteforce_size_guard() {
        let pts: Vec<Point> = (0..65).map(|i| Point::new(i as f64, (i * i) as f64)).collect();
        let ps = PointSet::new(pts).unwrap();
        assert!(matches!(
            alpha_edges_bruteforce(&ps, 1.0),
            Err(GeometryError::SizeLimit { size: 65, limit: 64 })
        ));
    }

    fn arb_set() -> impl Strategy<Value = PointSet> {
        prop::collection::vec((0.0f64..10.0, 0.0f64..10.0), 3..=12).prop_filter_map(
            "degenerate",
            |raw| {
                let ps = PointSet::new(raw.into_iter().map(Point::from).collect()).ok()?;
                (!ps.is_collinear()).then_some(ps)
            },
        )
    }

    proptest! {
        #[test]
        fn delaunay_complex_matches_oracle(ps in arb_set(), r in 0.2f64..20.0) {
            let shape = alpha_shape(&ps, r).unwrap();
            prop_assert_eq!(&shape.kept_edges, &alpha_edges_bruteforce(&ps, r).unwrap());
            // Each kept edge borders at most one kept triangle.
            for &(a, b) in &shape.kept_edges {
                let n = shape.kept_triangles.iter()
                    .filter(|t| triangle_edges(**t).contains(&(a, b)))
                    .count();
                prop_assert!(n <= 1);
            }
        }
    }
}
