use serde::{Deserialize, Serialize};

use super::{GeometryError, Point, Polygon};

/// Agreement between two polygons.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HullMetrics {
    pub hausdorff: f64,
    pub area_jaccard: f64,
    pub perimeter_a: f64,
    pub perimeter_b: f64,
}

/// Boundary Hausdorff distance, area Jaccard index and exact perimeters.
///
/// Boundaries are sampled every `sampling_step` of arc length (or closer) and
/// each sample is measured exactly against the other boundary's segments.
/// Areas are integrated along horizontal scanlines spaced at most
/// `sampling_step` apart with exact interval arithmetic along each line.
pub fn polygon_metrics(
    a: &Polygon,
    b: &Polygon,
    sampling_step: f64,
) -> Result<HullMetrics, GeometryError> {
    if a.is_degenerate() || b.is_degenerate() || a.len() < 3 || b.len() < 3 {
        return Err(GeometryError::DegeneratePolygon);
    }
    if !(sampling_step > 0.0 && sampling_step.is_finite()) {
        return Err(GeometryError::InvalidSamplingStep(sampling_step));
    }
    let hausdorff = directed_hausdorff(a, b, sampling_step)
        .max(directed_hausdorff(b, a, sampling_step));
    Ok(HullMetrics {
        hausdorff,
        area_jaccard: area_jaccard(a, b, sampling_step),
        perimeter_a: a.perimeter(),
        perimeter_b: b.perimeter(),
    })
}

fn boundary_samples(poly: &Polygon, step: f64) -> Vec<Point> {
    let mut out = Vec::new();
    for (p, q) in poly.edges() {
        let pieces = (p.distance(&q) / step).ceil().max(1.0) as usize;
        for k in 0..pieces {
            let t = k as f64 / pieces as f64;
            out.push(Point::new(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)));
        }
    }
    out
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0)
    };
    p.distance(&Point::new(a.x + t * dx, a.y + t * dy))
}

fn directed_hausdorff(from: &Polygon, to: &Polygon, step: f64) -> f64 {
    boundary_samples(from, step)
        .into_iter()
        .map(|s| {
            to.edges()
                .map(|(a, b)| segment_distance(s, a, b))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Sorted x-intervals where the horizontal line at `y` is inside `poly`.
fn scanline_intervals(poly: &Polygon, y: f64) -> Vec<(f64, f64)> {
    let mut xs: Vec<f64> = poly
        .edges()
        .filter(|(a, b)| (a.y <= y) != (b.y <= y))
        .map(|(a, b)| a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y))
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.chunks_exact(2).map(|c| (c[0], c[1])).collect()
}

fn interval_overlap(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let (mut i, mut j) = (0, 0);
    let mut total = 0.0;
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if hi > lo {
            total += hi - lo;
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    total
}

fn interval_length(v: &[(f64, f64)]) -> f64 {
    v.iter().map(|(lo, hi)| hi - lo).sum()
}

fn area_jaccard(a: &Polygon, b: &Polygon, step: f64) -> f64 {
    let ys = a.vertices().iter().chain(b.vertices()).map(|p| p.y);
    let y_min = ys.clone().fold(f64::INFINITY, f64::min);
    let y_max = ys.fold(f64::NEG_INFINITY, f64::max);
    let rows = ((y_max - y_min) / step).ceil().max(1.0) as usize;
    let h = (y_max - y_min) / rows as f64;
    let (mut inter, mut union) = (0.0, 0.0);
    for k in 0..rows {
        let y = y_min + (k as f64 + 0.5) * h;
        let ia = scanline_intervals(a, y);
        let ib = scanline_intervals(b, y);
        let both = interval_overlap(&ia, &ib);
        inter += both;
        union += interval_length(&ia) + interval_length(&ib) - both;
    }
    if union <= 0.0 {
        0.0
    } else {
        (inter / union).clamp(0.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(x0: f64, y0: f64, side: f64) -> Polygon {
        Polygon::new(vec![
            Point::new(x0, y0),
            Point::new(x0 + side, y0),
            Point::new(x0 + side, y0 + side),
            Point::new(x0, y0 + side),
        ])
        .unwrap()
    }

    #[test]
    fn identical_polygons() {
        let a = square(0.0, 0.0, 1.0);
        let m = polygon_metrics(&a, &a, 0.01).unwrap();
        assert!(m.hausdorff < 1e-12);
        assert_eq!(m.area_jaccard, 1.0);
        assert_eq!(m.perimeter_a, 4.0);
        assert_eq!(m.perimeter_b, 4.0);
    }

    #[test]
    fn dilated_square() {
        // Mitred outward offset by 0.1: corners move by 0.1·√2.
        let a = square(0.0, 0.0, 1.0);
        let b = square(-0.1, -0.1, 1.2);
        let m = polygon_metrics(&a, &b, 0.01).unwrap();
        assert!((m.hausdorff - 0.1 * 2f64.sqrt()).abs() < 1e-9, "{}", m.hausdorff);
        assert!((m.area_jaccard - 1.0 / 1.44).abs() < 1e-9);
        assert!((m.perimeter_b - 4.8).abs() < 1e-12);
    }

    #[test]
    fn disjoint_polygons() {
        let m = polygon_metrics(&square(0.0, 0.0, 1.0), &square(5.0, 0.0, 1.0), 0.05).unwrap();
        assert_eq!(m.area_jaccard, 0.0);
        assert!((m.hausdorff - 5.0).abs() < 1e-9);
    }

    #[test]
    fn triangle_overlap_is_close_to_exact() {
        let t = Polygon::new(vec![Point::new(0.0, 0.0), Point::new(2.0, 0.0), Point::new(0.0, 2.0)]).unwrap();
        let s = square(0.0, 0.0, 1.0);
        // Square lies inside the triangle: |S| / |T| = 1 / 2.
        let m = polygon_metrics(&t, &s, 0.01).unwrap();
        assert!((m.area_jaccard - 0.5).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_inputs() {
        let seg = Polygon::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)]).unwrap();
        let sq = square(0.0, 0.0, 1.0);
        assert_eq!(polygon_metrics(&seg, &sq, 0.1), Err(GeometryError::DegeneratePolygon));
        assert!(matches!(
            polygon_metrics(&sq, &sq, 0.0),
            Err(GeometryError::InvalidSamplingStep(_))
        ));
    }
}
