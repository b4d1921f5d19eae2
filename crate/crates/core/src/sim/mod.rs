//! Two-variable Oregonator on a grid: explicit Euler, five-point Laplacian,
//! trail recording and halting.

mod kernel;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{
    build_attractant, build_obstacles, build_phi, FieldConfig, FieldError, Grid, ObstacleMask,
    ScalarField,
};
use crate::geometry::{PointSet, Polygon};
use crate::shape::{enclosure_check, outer_contour, thin_to_network, BinaryImage, TubeNetwork};

pub use kernel::{kinetics, laplacian5, steady_state, step, step_sequential, BLOWUP_LIMIT};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("NUMERIC_BLOWUP: value {value} at cell ({x}, {y}) on step {step}")]
    NumericBlowup {
        step: u64,
        x: usize,
        y: usize,
        value: f64,
    },
    #[error("NUMERIC_BLOWUP: non-finite kinetics at u={u}, v={v}, phi={phi}")]
    NonFiniteKinetics { u: f64, v: f64, phi: f64 },
    #[error("inoculation block at ({x}, {y}) of size {size} does not fit in the {width}x{height} grid")]
    InoculationOutOfBounds {
        x: usize,
        y: usize,
        size: usize,
        width: usize,
        height: usize,
    },
    #[error("inoculation block overlaps the obstacle at cell ({x}, {y})")]
    InoculationBlocked { x: usize, y: usize },
}

/// Integration, inoculation and halting parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub epsilon: f64,
    pub f: f64,
    pub q: f64,
    pub du: f64,
    pub threshold: f64,
    /// Cell at the centre of the inoculation block.
    pub inoculation_center: (usize, usize),
    pub inoculation_size: usize,
    pub max_steps: u64,
    /// Steps without trail growth before the run counts as halted.
    pub quiet_window: u64,
    /// Steps between enclosure checks of the trail.
    pub envelope_interval: u64,
    /// Reserved; the model is deterministic.
    pub rng_seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 5e-3,
            epsilon: 0.03,
            f: 1.4,
            q: 0.022,
            du: 1.0,
            threshold: 0.1,
            inoculation_center: (0, 0),
            inoculation_size: 11,
            max_steps: 50_000,
            quiet_window: 2000,
            envelope_interval: 25,
            rng_seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self, grid: &Grid) -> Result<(), SimError> {
        let bad = |msg: String| Err(SimError::InvalidConfig(msg));
        let reals = [self.dt, self.epsilon, self.f, self.q, self.du, self.threshold];
        if reals.iter().any(|v| !v.is_finite()) {
            return bad("parameters must be finite".into());
        }
        if self.dt <= 0.0 {
            return bad("dt must be positive".into());
        }
        if self.epsilon <= 0.0 {
            return bad("epsilon must be positive".into());
        }
        if self.q <= 0.0 {
            return bad("q must be positive".into());
        }
        if self.du < 0.0 {
            return bad("du must be non-negative".into());
        }
        let limit = grid.dx * grid.dx / (4.0 * self.du);
        if self.dt > limit {
            return bad(format!(
                "dt {} exceeds the explicit stability limit dx^2/(4 du) = {}",
                self.dt, limit
            ));
        }
        if self.inoculation_size == 0 {
            return bad("inoculation_size must be at least 1".into());
        }
        if self.quiet_window == 0 {
            return bad("quiet_window must be at least 1".into());
        }
        if self.envelope_interval == 0 {
            return bad("envelope_interval must be at least 1".into());
        }
        self.inoculation_block(grid).map(|_| ())
    }

    /// Inclusive cell ranges `(x0, x1, y0, y1)` of the inoculation block.
    pub fn inoculation_block(&self, grid: &Grid) -> Result<(usize, usize, usize, usize), SimError> {
        let (cx, cy) = self.inoculation_center;
        let s = self.inoculation_size;
        let half = s / 2;
        let out = SimError::InoculationOutOfBounds {
            x: cx,
            y: cy,
            size: s,
            width: grid.width,
            height: grid.height,
        };
        if cx < half || cy < half || s == 0 {
            return Err(out);
        }
        let (x0, y0) = (cx - half, cy - half);
        let (x1, y1) = (x0 + s - 1, y0 + s - 1);
        if x1 >= grid.width || y1 >= grid.height {
            return Err(out);
        }
        Ok((x0, x1, y0, y1))
    }
}

/// Fields and trail at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub u: ScalarField,
    pub v: ScalarField,
    pub trail: BinaryImage,
    pub step: u64,
    pub active_count: usize,
}

impl SimState {
    /// Everything at zero.
    pub fn zero(grid: Grid) -> Self {
        Self {
            u: ScalarField::constant(grid, 0.0),
            v: ScalarField::constant(grid, 0.0),
            trail: BinaryImage::empty(grid),
            step: 0,
            active_count: 0,
        }
    }

    /// Each open cell at the homogeneous steady state of its own φ.
    pub fn steady(phi: &ScalarField, mask: &ObstacleMask, cfg: &SimConfig) -> Self {
        let grid = phi.grid;
        let mut cache: std::collections::HashMap<u64, f64> = std::collections::HashMap::new();
        let values: Vec<f64> = phi
            .values
            .iter()
            .zip(&mask.blocked)
            .map(|(&p, &blocked)| {
                if blocked {
                    0.0
                } else {
                    *cache
                        .entry(p.to_bits())
                        .or_insert_with(|| steady_state(p, cfg))
                }
            })
            .collect();
        let active_count = values.iter().filter(|&&u| u > cfg.threshold).count();
        let trail = BinaryImage {
            grid,
            bits: values.iter().map(|&u| u > cfg.threshold).collect(),
        };
        Self {
            u: ScalarField {
                grid,
                values: values.clone(),
            },
            v: ScalarField { grid, values },
            trail,
            step: 0,
            active_count,
        }
    }
}

/// Sets `u = 1` on the inoculation block and marks it in the trail.
pub fn inoculate(
    state: &SimState,
    mask: &ObstacleMask,
    cfg: &SimConfig,
) -> Result<SimState, SimError> {
    let grid = state.u.grid;
    let (x0, x1, y0, y1) = cfg.inoculation_block(&grid)?;
    for y in y0..=y1 {
        for x in x0..=x1 {
            if mask.is_blocked(x, y) {
                return Err(SimError::InoculationBlocked { x, y });
            }
        }
    }
    let mut next = state.clone();
    for y in y0..=y1 {
        for x in x0..=x1 {
            next.u.set(x, y, 1.0);
            if cfg.threshold < 1.0 {
                next.trail.set(x, y, true);
            }
        }
    }
    next.active_count = next
        .u
        .values
        .iter()
        .filter(|&&u| u > cfg.threshold)
        .count();
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HaltReason {
    Quiescent,
    TrailStable,
    MaxSteps,
}

impl HaltReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Quiescent => "quiescent",
            Self::TrailStable => "trail_stable",
            Self::MaxSteps => "max_steps",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HaltReport {
    pub reason: HaltReason,
    pub steps_taken: u64,
    /// First checked step at which the filled trail contains every data point.
    pub envelop_step: Option<u64>,
}

/// Final state of a run plus everything derived from it.
#[derive(Debug, Clone)]
pub struct SimResult {
    pub state: SimState,
    pub report: HaltReport,
    pub phi: ScalarField,
    pub mask: ObstacleMask,
    pub network: Option<TubeNetwork>,
    /// Outer contour of the trail, `None` when it cannot form a polygon.
    pub hull: Option<Polygon>,
}

/// Builds the fields, inoculates and integrates until a halting condition.
pub fn run(
    ps: &PointSet,
    grid: &Grid,
    fcfg: &FieldConfig,
    scfg: &SimConfig,
) -> Result<SimResult, SimError> {
    run_observed(ps, grid, fcfg, scfg, 0, |_, _| {})
}

/// [`run`] with a callback on the initial state and then every `every` steps.
/// `every = 0` disables the callback.
pub fn run_observed(
    ps: &PointSet,
    grid: &Grid,
    fcfg: &FieldConfig,
    scfg: &SimConfig,
    every: u64,
    mut observer: impl FnMut(&SimState, &ObstacleMask),
) -> Result<SimResult, SimError> {
    fcfg.validate_for(ps)?;
    scfg.validate(grid)?;
    let eta = build_attractant(ps, grid, fcfg)?;
    let phi = build_phi(&eta, fcfg)?;
    let mask = build_obstacles(ps, grid, fcfg)?;
    let mut state = inoculate(&SimState::steady(&phi, &mask, scfg), &mask, scfg)?;

    let mut envelop_step = None;
    let mut trail_dirty = true;
    let mut check_envelope = |state: &SimState, dirty: &mut bool| {
        if envelop_step.is_none() && *dirty && state.step.is_multiple_of(scfg.envelope_interval) {
            *dirty = false;
            if enclosure_check(&state.trail, ps) {
                envelop_step = Some(state.step);
            }
        }
    };
    check_envelope(&state, &mut trail_dirty);
    if every > 0 {
        observer(&state, &mask);
    }

    let (mut su, mut sv) = (Vec::new(), Vec::new());
    let mut quiet = 0u64;
    let reason = loop {
        if state.active_count == 0 {
            break HaltReason::Quiescent;
        }
        if quiet >= scfg.quiet_window {
            break HaltReason::TrailStable;
        }
        if state.step >= scfg.max_steps {
            break HaltReason::MaxSteps;
        }
        let summary = kernel::advance(&mut state, &phi, &mask, scfg, &mut su, &mut sv, true)?;
        if summary.trail_added > 0 {
            quiet = 0;
            trail_dirty = true;
        } else {
            quiet += 1;
        }
        check_envelope(&state, &mut trail_dirty);
        if every > 0 && state.step % every == 0 {
            observer(&state, &mask);
        }
    };

    let network = thin_to_network(&state.trail).ok();
    let hull = outer_contour(&state.trail).ok();
    Ok(SimResult {
        report: HaltReport {
            reason,
            steps_taken: state.step,
            envelop_step,
        },
        state,
        phi,
        mask,
        network,
        hull,
    })
}
