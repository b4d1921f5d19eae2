//! Excitability landscape: attractant gradient η, φ = φ₀ − η/2 and the
//! repellent obstacle mask.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Point, PointSet};

/// Minimum grid side in cells.
pub const MIN_GRID_CELLS: usize = 32;
/// Cells of clearance required between a data point and the grid edge.
pub const POINT_MARGIN_CELLS: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("grid must be at least {MIN_GRID_CELLS}x{MIN_GRID_CELLS} cells, got {width}x{height}")]
    GridTooSmall { width: usize, height: usize },
    #[error("grid spacing must be positive and finite, got {0}")]
    InvalidSpacing(f64),
    #[error("point {index} at {point} lies within {POINT_MARGIN_CELLS} cells of the grid edge")]
    PointOutsideMargin { index: usize, point: Point },
    #[error("invalid field config: {0}")]
    InvalidConfig(String),
    #[error("field has a non-finite value at cell ({x}, {y})")]
    NonFinite { x: usize, y: usize },
}

/// Uniform square grid. Cell `(i, j)` has its centre at
/// `origin + (i·dx, j·dx)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub width: usize,
    pub height: usize,
    pub dx: f64,
    pub origin: Point,
}

impl Grid {
    pub fn new(width: usize, height: usize, dx: f64, origin: Point) -> Result<Self, FieldError> {
        if width < MIN_GRID_CELLS || height < MIN_GRID_CELLS {
            return Err(FieldError::GridTooSmall { width, height });
        }
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(FieldError::InvalidSpacing(dx));
        }
        if !origin.is_finite() {
            return Err(FieldError::InvalidConfig("grid origin must be finite".into()));
        }
        Ok(Self {
            width,
            height,
            dx,
            origin,
        })
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    pub fn coords(&self, index: usize) -> (usize, usize) {
        (index % self.width, index / self.width)
    }

    pub fn cell_center(&self, x: usize, y: usize) -> Point {
        Point::new(
            self.origin.x + x as f64 * self.dx,
            self.origin.y + y as f64 * self.dx,
        )
    }

    /// Continuous cell coordinates of a world point.
    pub fn to_cell_coords(&self, p: Point) -> (f64, f64) {
        ((p.x - self.origin.x) / self.dx, (p.y - self.origin.y) / self.dx)
    }

    /// The cell whose centre is nearest to `p`, if it lies on the grid.
    pub fn cell_of(&self, p: Point) -> Option<(usize, usize)> {
        let (cx, cy) = self.to_cell_coords(p);
        let (x, y) = (cx.round(), cy.round());
        if x < 0.0 || y < 0.0 || x >= self.width as f64 || y >= self.height as f64 {
            return None;
        }
        Some((x as usize, y as usize))
    }

    /// True when `p` is at least `margin` cells inside every edge.
    pub fn contains_with_margin(&self, p: Point, margin: f64) -> bool {
        let (cx, cy) = self.to_cell_coords(p);
        cx >= margin
            && cy >= margin
            && cx <= (self.width - 1) as f64 - margin
            && cy <= (self.height - 1) as f64 - margin
    }

    /// World-space length of the grid diagonal.
    pub fn diagonal(&self) -> f64 {
        let w = (self.width - 1) as f64 * self.dx;
        let h = (self.height - 1) as f64 * self.dx;
        w.hypot(h)
    }
}

/// One real value per grid cell, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn constant(grid: Grid, value: f64) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for y in 0..grid.height {
            for x in 0..grid.width {
                values.push(f(x, y));
            }
        }
        Self { grid, values }
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[self.grid.index(x, y)]
    }

    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        let i = self.grid.index(x, y);
        self.values[i] = value;
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn check_finite(&self) -> Result<(), FieldError> {
        match self.values.iter().position(|v| !v.is_finite()) {
            Some(i) => {
                let (x, y) = self.grid.coords(i);
                Err(FieldError::NonFinite { x, y })
            }
            None => Ok(()),
        }
    }
}

/// Cells made impassable by repellents.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstacleMask {
    pub grid: Grid,
    pub blocked: Vec<bool>,
}

impl ObstacleMask {
    pub fn empty(grid: Grid) -> Self {
        Self {
            grid,
            blocked: vec![false; grid.len()],
        }
    }

    pub fn is_blocked(&self, x: usize, y: usize) -> bool {
        self.blocked[self.grid.index(x, y)]
    }

    pub fn count(&self) -> usize {
        self.blocked.iter().filter(|b| **b).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GradientProfile {
    Linear,
    Exponential,
}

impl std::str::FromStr for GradientProfile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear" => Ok(Self::Linear),
            "exponential" => Ok(Self::Exponential),
            other => Err(format!("unknown gradient profile '{other}'")),
        }
    }
}

impl GradientProfile {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Linear => "linear",
            Self::Exponential => "exponential",
        }
    }
}

/// Attractant and repellent parameters.
///
/// `gradient_amplitude` is the slope of η in φ-units per world unit. The
/// linear profile is `η = A·max(0, L − d)` and the exponential profile is
/// `η = A·L·exp(−d/L)`, with `L = gradient_length_scale` and `d` the distance
/// to the nearest data point, so both peak at `A·L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldConfig {
    pub gradient_amplitude: f64,
    pub gradient_profile: GradientProfile,
    pub gradient_length_scale: f64,
    pub repellent_radius: f64,
    pub phi0: f64,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self {
            gradient_amplitude: 0.0011109,
            gradient_profile: GradientProfile::Linear,
            gradient_length_scale: 38.0,
            repellent_radius: 0.0,
            phi0: 0.0866,
        }
    }
}

impl FieldConfig {
    /// Largest η the profile can produce.
    pub fn peak_eta(&self) -> f64 {
        self.gradient_amplitude * self.gradient_length_scale
    }

    pub fn eta_at_distance(&self, d: f64) -> f64 {
        let (a, l) = (self.gradient_amplitude, self.gradient_length_scale);
        match self.gradient_profile {
            GradientProfile::Linear => a * (l - d).max(0.0),
            GradientProfile::Exponential => a * l * (-d / l).exp(),
        }
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        let bad = |msg: &str| Err(FieldError::InvalidConfig(msg.to_string()));
        let all_finite = [
            self.gradient_amplitude,
            self.gradient_length_scale,
            self.repellent_radius,
            self.phi0,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !all_finite {
            return bad("parameters must be finite");
        }
        if self.gradient_amplitude <= 0.0 {
            return bad("gradient_amplitude must be positive");
        }
        if self.gradient_length_scale <= 0.0 {
            return bad("gradient_length_scale must be positive");
        }
        if self.repellent_radius < 0.0 {
            return bad("repellent_radius must be non-negative");
        }
        if self.phi0 <= 0.0 {
            return bad("phi0 must be positive");
        }
        if self.peak_eta() >= 2.0 * self.phi0 {
            return bad("peak eta (gradient_amplitude * gradient_length_scale) must stay below 2 * phi0");
        }
        Ok(())
    }

    /// Config checks that depend on the point set.
    pub fn validate_for(&self, ps: &PointSet) -> Result<(), FieldError> {
        self.validate()?;
        if let Some(min_d) = ps.min_pairwise_distance() {
            if self.repellent_radius > 0.0 && self.repellent_radius >= 0.5 * min_d {
                return Err(FieldError::InvalidConfig(format!(
                    "repellent_radius {} must be below half the minimum point spacing {}",
                    self.repellent_radius,
                    0.5 * min_d
                )));
            }
        }
        Ok(())
    }
}

fn check_margin(ps: &PointSet, grid: &Grid) -> Result<(), FieldError> {
    for (index, p) in ps.points().iter().enumerate() {
        if !grid.contains_with_margin(*p, POINT_MARGIN_CELLS) {
            return Err(FieldError::PointOutsideMargin { index, point: *p });
        }
    }
    Ok(())
}

fn nearest_distance(ps: &PointSet, c: Point) -> f64 {
    ps.points()
        .iter()
        .map(|p| p.distance_squared(&c))
        .fold(f64::INFINITY, f64::min)
        .sqrt()
}

/// Attractant concentration η emitted by the data points.
pub fn build_attractant(
    ps: &PointSet,
    grid: &Grid,
    cfg: &FieldConfig,
) -> Result<ScalarField, FieldError> {
    cfg.validate()?;
    check_margin(ps, grid)?;
    Ok(ScalarField::from_fn(*grid, |x, y| {
        cfg.eta_at_distance(nearest_distance(ps, grid.cell_center(x, y)))
    }))
}

/// Excitability φ = φ₀ − η/2.
pub fn build_phi(eta: &ScalarField, cfg: &FieldConfig) -> Result<ScalarField, FieldError> {
    eta.check_finite()?;
    Ok(ScalarField {
        grid: eta.grid,
        values: eta.values.iter().map(|e| cfg.phi0 - 0.5 * e).collect(),
    })
}

/// Cells whose centre lies within `repellent_radius` of a data point.
pub fn build_obstacles(
    ps: &PointSet,
    grid: &Grid,
    cfg: &FieldConfig,
) -> Result<ObstacleMask, FieldError> {
    let r = cfg.repellent_radius;
    if !(r >= 0.0 && r.is_finite()) {
        return Err(FieldError::InvalidConfig(
            "repellent_radius must be non-negative".into(),
        ));
    }
    let mut mask = ObstacleMask::empty(*grid);
    if r == 0.0 {
        return Ok(mask);
    }
    let r2 = r * r;
    for p in ps.points() {
        let (cx, cy) = grid.to_cell_coords(*p);
        let reach = r / grid.dx + 1.0;
        let x0 = (cx - reach).floor().max(0.0) as usize;
        let y0 = (cy - reach).floor().max(0.0) as usize;
        let x1 = ((cx + reach).ceil().max(0.0) as usize).min(grid.width - 1);
        let y1 = ((cy + reach).ceil().max(0.0) as usize).min(grid.height - 1);
        for y in y0..=y1 {
            for x in x0..=x1 {
                if grid.cell_center(x, y).distance_squared(p) <= r2 {
                    let i = grid.index(x, y);
                    mask.blocked[i] = true;
                }
            }
        }
    }
    Ok(mask)
}
