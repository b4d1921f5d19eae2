//! Seeded point-set generators.

use std::f64::consts::PI;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{GeometryError, Point, PointSet};

/// Minimum distance between generated points, in world units.
pub const GEN_MIN_SEPARATION: f64 = 1.0;
const MAX_ATTEMPTS: usize = 10_000;

type Sampler = Box<dyn Fn(&mut ChaCha8Rng, usize) -> Point>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenShape {
    Uniform,
    Crescent,
    Ring,
    Grid,
}

impl FromStr for GenShape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "crescent" => Ok(Self::Crescent),
            "ring" => Ok(Self::Ring),
            "grid" => Ok(Self::Grid),
            other => Err(format!(
                "unknown shape '{other}' (expected uniform, crescent, ring or grid)"
            )),
        }
    }
}

impl GenShape {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Uniform => "uniform",
            Self::Crescent => "crescent",
            Self::Ring => "ring",
            Self::Grid => "grid",
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenError {
    #[error("need at least 3 points, got {0}")]
    TooFew(usize),
    #[error("could not place {wanted} points at minimum separation {GEN_MIN_SEPARATION}")]
    Crowded { wanted: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Deterministic point set for `(shape, n, seed)`, shifted so its bounding
/// box starts at the origin.
pub fn generate(shape: GenShape, n: usize, seed: u64) -> Result<PointSet, GenError> {
    if n < 3 {
        return Err(GenError::TooFew(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nf = n as f64;
    let sample: Sampler = match shape {
        GenShape::Uniform => {
            let side = 4.0 * nf.sqrt() + 10.0;
            Box::new(move |rng, _| Point::new(rng.random_range(0.0..side), rng.random_range(0.0..side)))
        }
        GenShape::Crescent => {
            // A C opening to the right: outer and inner arcs over 240°.
            let outer = (1.5 * nf).max(8.0);
            let inner = 0.6 * outer;
            Box::new(move |rng, k| {
                let on_outer = k % 2 == 0;
                let t = PI / 3.0 + 4.0 * PI / 3.0 * rng.random::<f64>();
                let r = if on_outer { outer } else { inner } + rng.random_range(-0.5..0.5);
                Point::new(r * t.cos(), r * t.sin())
            })
        }
        GenShape::Ring => {
            let radius = (0.5 * nf).max(5.0);
            Box::new(move |rng, _| {
                let t = 2.0 * PI * rng.random::<f64>();
                let r = radius + rng.random_range(-0.25..0.25);
                Point::new(r * t.cos(), r * t.sin())
            })
        }
        GenShape::Grid => {
            let cols = (nf.sqrt().ceil()) as usize;
            Box::new(move |rng, k| {
                let (i, j) = (k % cols, k / cols);
                Point::new(
                    2.0 * i as f64 + rng.random_range(-0.2..0.2),
                    2.0 * j as f64 + rng.random_range(-0.2..0.2),
                )
            })
        }
    };

    let mut points: Vec<Point> = Vec::with_capacity(n);
    let mut attempts = 0;
    while points.len() < n {
        attempts += 1;
        if attempts > MAX_ATTEMPTS * n {
            return Err(GenError::Crowded { wanted: n });
        }
        let p = sample(&mut rng, points.len());
        if points.iter().all(|q| q.distance(&p) >= GEN_MIN_SEPARATION) {
            points.push(p);
        }
    }
    let min_x = points.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    let min_y = points.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    Ok(PointSet::new(
        points.iter().map(|p| p.translated(-min_x, -min_y)).collect(),
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{concave_hull, convex_hull_jarvis};

    #[test]
    fn deterministic_per_seed() {
        for shape in [GenShape::Uniform, GenShape::Crescent, GenShape::Ring, GenShape::Grid] {
            let a = generate(shape, 12, 7).unwrap();
            let b = generate(shape, 12, 7).unwrap();
            assert_eq!(a, b);
            assert_ne!(a, generate(shape, 12, 8).unwrap());
            assert!(a.min_pairwise_distance().unwrap() >= GEN_MIN_SEPARATION);
        }
    }

    #[test]
    fn too_few_points() {
        assert_eq!(generate(GenShape::Uniform, 2, 1), Err(GenError::TooFew(2)));
    }

    #[test]
    fn crescent_is_concave_at_moderate_radius() {
        let ps = generate(GenShape::Crescent, 8, 1).unwrap();
        let convex = convex_hull_jarvis(&ps).area();
        let found = (1..40).map(|k| k as f64).any(|r| {
            concave_hull(&ps, r).is_ok_and(|h| h.area() < convex)
        });
        assert!(found);
    }
}
