use rayon::prelude::*;

use super::{SimConfig, SimError, SimState};
use crate::field::{ObstacleMask, ScalarField};

/// Magnitude beyond which `u` or `v` counts as diverged.
pub const BLOWUP_LIMIT: f64 = 1e3;

/// Oregonator reaction terms `(du/dt, dv/dt)` without diffusion.
pub fn kinetics(u: f64, v: f64, phi: f64, cfg: &SimConfig) -> Result<(f64, f64), SimError> {
    let du = reaction_u(u, v, phi, cfg);
    let dv = u - v;
    if du.is_finite() && dv.is_finite() {
        Ok((du, dv))
    } else {
        Err(SimError::NonFiniteKinetics { u, v, phi })
    }
}

#[inline]
fn reaction_u(u: f64, v: f64, phi: f64, cfg: &SimConfig) -> f64 {
    (u - u * u - (cfg.f * v + phi) * (u - cfg.q) / (u + cfg.q)) / cfg.epsilon
}

/// Homogeneous steady state `u* = v*` for a given φ.
///
/// On the nullcline `v = u` the reaction reduces to
/// `g(u) = u − u² − (f·u + φ)(u − q)/(u + q)`, which is positive at `u = q`
/// and negative at `u = 1`, so the root is bracketed by `(q, 1)`.
pub fn steady_state(phi: f64, cfg: &SimConfig) -> f64 {
    let g = |u: f64| u - u * u - (cfg.f * u + phi) * (u - cfg.q) / (u + cfg.q);
    let (mut lo, mut hi) = (cfg.q, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Five-point Laplacian at `(x, y)`. Off-grid and blocked neighbours mirror
/// the centre value.
pub fn laplacian5(field: &ScalarField, x: usize, y: usize, mask: &ObstacleMask) -> f64 {
    let g = &field.grid;
    let c = field.get(x, y);
    let sample = |nx: Option<usize>, ny: Option<usize>| match (nx, ny) {
        (Some(nx), Some(ny)) if nx < g.width && ny < g.height && !mask.is_blocked(nx, ny) => {
            field.get(nx, ny)
        }
        _ => c,
    };
    let n = sample(Some(x), y.checked_sub(1));
    let s = sample(Some(x), Some(y + 1));
    let w = sample(x.checked_sub(1), Some(y));
    let e = sample(Some(x + 1), Some(y));
    (n + s + w + e - 4.0 * c) / (g.dx * g.dx)
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct RowStats {
    pub active: usize,
    pub trail_added: usize,
    pub blowup: Option<(usize, f64)>,
}

struct StepInputs<'a> {
    u: &'a [f64],
    v: &'a [f64],
    phi: &'a [f64],
    blocked: &'a [bool],
    width: usize,
    height: usize,
    inv_dx2: f64,
    cfg: &'a SimConfig,
}

impl StepInputs<'_> {
    /// Updates one row. Every cell reads only the old state.
    fn row(&self, y: usize, out_u: &mut [f64], out_v: &mut [f64], trail: &mut [bool]) -> RowStats {
        let w = self.width;
        let cfg = self.cfg;
        let mut stats = RowStats::default();
        for x in 0..w {
            let i = y * w + x;
            if self.blocked[i] {
                out_u[x] = 0.0;
                out_v[x] = 0.0;
                continue;
            }
            let c = self.u[i];
            let nb = |j: usize| if self.blocked[j] { c } else { self.u[j] };
            let n = if y > 0 { nb(i - w) } else { c };
            let s = if y + 1 < self.height { nb(i + w) } else { c };
            let west = if x > 0 { nb(i - 1) } else { c };
            let east = if x + 1 < w { nb(i + 1) } else { c };
            let lap = (n + s + west + east - 4.0 * c) * self.inv_dx2;
            let vi = self.v[i];
            let nu = c + cfg.dt * (reaction_u(c, vi, self.phi[i], cfg) + cfg.du * lap);
            let nv = vi + cfg.dt * (c - vi);
            out_u[x] = nu;
            out_v[x] = nv;
            if !(nu.abs() <= BLOWUP_LIMIT && nv.abs() <= BLOWUP_LIMIT) && stats.blowup.is_none() {
                stats.blowup = Some((x, if nu.abs() > nv.abs() || nu.is_nan() { nu } else { nv }));
            }
            if nu > cfg.threshold {
                stats.active += 1;
                if !trail[x] {
                    trail[x] = true;
                    stats.trail_added += 1;
                }
            }
        }
        stats
    }
}

/// Outcome of one synchronous update.
#[derive(Debug, Clone, Copy)]
pub(crate) struct StepSummary {
    pub trail_added: usize,
}

/// Advances `state` in place using `scratch_u`/`scratch_v` as the write buffers.
pub(crate) fn advance(
    state: &mut SimState,
    phi: &ScalarField,
    mask: &ObstacleMask,
    cfg: &SimConfig,
    scratch_u: &mut Vec<f64>,
    scratch_v: &mut Vec<f64>,
    parallel: bool,
) -> Result<StepSummary, SimError> {
    let grid = state.u.grid;
    let (w, h) = (grid.width, grid.height);
    scratch_u.resize(grid.len(), 0.0);
    scratch_v.resize(grid.len(), 0.0);
    let inputs = StepInputs {
        u: &state.u.values,
        v: &state.v.values,
        phi: &phi.values,
        blocked: &mask.blocked,
        width: w,
        height: h,
        inv_dx2: 1.0 / (grid.dx * grid.dx),
        cfg,
    };
    let trail = &mut state.trail.bits;
    let rows: Vec<RowStats> = if parallel {
        scratch_u
            .par_chunks_mut(w)
            .zip(scratch_v.par_chunks_mut(w))
            .zip(trail.par_chunks_mut(w))
            .enumerate()
            .map(|(y, ((ou, ov), tr))| inputs.row(y, ou, ov, tr))
            .collect()
    } else {
        scratch_u
            .chunks_mut(w)
            .zip(scratch_v.chunks_mut(w))
            .zip(trail.chunks_mut(w))
            .enumerate()
            .map(|(y, ((ou, ov), tr))| inputs.row(y, ou, ov, tr))
            .collect()
    };

    let next_step = state.step + 1;
    for (y, r) in rows.iter().enumerate() {
        if let Some((x, value)) = r.blowup {
            return Err(SimError::NumericBlowup {
                step: next_step,
                x,
                y,
                value,
            });
        }
    }
    std::mem::swap(&mut state.u.values, scratch_u);
    std::mem::swap(&mut state.v.values, scratch_v);
    state.step = next_step;
    state.active_count = rows.iter().map(|r| r.active).sum();
    Ok(StepSummary {
        trail_added: rows.iter().map(|r| r.trail_added).sum(),
    })
}

/// One synchronous explicit Euler step, parallel over rows.
pub fn step(
    state: &SimState,
    phi: &ScalarField,
    mask: &ObstacleMask,
    cfg: &SimConfig,
) -> Result<SimState, SimError> {
    step_with(state, phi, mask, cfg, true)
}

/// The same update as [`step`] computed by a plain sequential sweep.
pub fn step_sequential(
    state: &SimState,
    phi: &ScalarField,
    mask: &ObstacleMask,
    cfg: &SimConfig,
) -> Result<SimState, SimError> {
    step_with(state, phi, mask, cfg, false)
}

fn step_with(
    state: &SimState,
    phi: &ScalarField,
    mask: &ObstacleMask,
    cfg: &SimConfig,
    parallel: bool,
) -> Result<SimState, SimError> {
    let mut next = state.clone();
    let (mut su, mut sv) = (Vec::new(), Vec::new());
    advance(&mut next, phi, mask, cfg, &mut su, &mut sv, parallel)?;
    Ok(next)
}
