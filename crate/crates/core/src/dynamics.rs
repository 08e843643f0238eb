//! Trajectory integration under either guidance law.
//!
//! Classical RK4 on a fixed base grid. A base step is subdivided by halving
//! when a substep moves the particle farther than `max_step` or when any stage
//! lands below the node floor; after an accepted substep the step doubles
//! back toward `dt_base`. Recorded samples always sit on the base grid.

use serde::{Deserialize, Serialize};

use crate::error::{QtrajError, Result};
use crate::sampling::{InitialCondition, Theory};
use crate::wavefield::{self, DoubleSlitParams, RevisedField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationSchedule {
    pub t0: f64,
    pub t_final: f64,
    pub dt_base: f64,
    /// Record every `record_stride` base steps.
    pub record_stride: usize,
    /// Give up on a trajectory once halving drives the step below this.
    pub dt_min: f64,
    /// Largest displacement accepted from one substep, nm.
    pub max_step: f64,
    /// Trajectories leaving |x| <= domain_bound are stopped as exited.
    pub domain_bound: f64,
}

impl IntegrationSchedule {
    /// Defaults scaled to the slit geometry: `max_step = σ/10`,
    /// `domain_bound = X + 40σ`, `dt_min = dt_base·2⁻³⁰`, recording every 10 steps.
    pub fn for_params(params: &DoubleSlitParams, t0: f64, t_final: f64, dt_base: f64) -> Self {
        IntegrationSchedule {
            t0,
            t_final,
            dt_base,
            record_stride: 10,
            dt_min: dt_base * (-30.0f64).exp2(),
            max_step: params.sigma / 10.0,
            domain_bound: params.x_half + 40.0 * params.sigma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t0.is_finite() && self.t_final.is_finite() && self.t_final > self.t0) {
            return Err(QtrajError::config("t_final_ps", "must exceed t0_ps"));
        }
        if !(self.dt_base > 0.0 && self.dt_min > 0.0 && self.dt_min <= self.dt_base) {
            return Err(QtrajError::config("dt_ps", "need 0 < dt_min <= dt_base"));
        }
        if self.record_stride == 0 {
            return Err(QtrajError::config("record_stride", "must be at least 1"));
        }
        if !(self.max_step > 0.0 && self.domain_bound > 0.0) {
            return Err(QtrajError::config("dt_ps", "max_step and domain_bound must be positive"));
        }
        Ok(())
    }

    /// Number of base steps: the span is cut into equal steps no longer than `dt_base`.
    pub fn base_steps(&self) -> usize {
        let n = ((self.t_final - self.t0) / self.dt_base - 1e-9).ceil();
        (n as usize).max(1)
    }

    /// k-th point of the base grid, computed without accumulating round-off.
    pub fn grid_time(&self, k: usize) -> f64 {
        let n = self.base_steps();
        if k >= n {
            self.t_final
        } else {
            self.t0 + (self.t_final - self.t0) * k as f64 / n as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryStatus {
    Completed,
    ExitedDomain,
    NodeStalled,
}

impl TrajectoryStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            TrajectoryStatus::Completed => "completed",
            TrajectoryStatus::ExitedDomain => "exited_domain",
            TrajectoryStatus::NodeStalled => "node_stalled",
        }
    }
}

impl std::fmt::Display for TrajectoryStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub status: TrajectoryStatus,
    pub ic: InitialCondition,
}

impl Trajectory {
    /// Time of the last recorded sample.
    pub fn end_time(&self) -> f64 {
        self.samples.last().map_or(self.ic.t0, |s| s.t)
    }
}

/// Momentum field of one trajectory, with the initial-point terms cached.
#[derive(Debug, Clone, Copy)]
enum Guide<'a> {
    Bohm(&'a DoubleSlitParams),
    Revised(RevisedField<'a>),
}

impl<'a> Guide<'a> {
    fn new(theory: Theory, ic: &InitialCondition, params: &'a DoubleSlitParams) -> Self {
        match theory {
            Theory::Dbb => Guide::Bohm(params),
            Theory::Revised => Guide::Revised(RevisedField::new(ic, params)),
        }
    }

    fn momentum(&self, x: f64, t: f64) -> Result<f64> {
        match self {
            Guide::Bohm(params) => wavefield::p_bb(x, t, params),
            Guide::Revised(field) => field.momentum(x, t),
        }
    }
}

/// p/m of the selected guidance law.
pub fn guidance_velocity(
    theory: Theory,
    ic: &InitialCondition,
    x: f64,
    t: f64,
    params: &DoubleSlitParams,
) -> Result<f64> {
    Ok(Guide::new(theory, ic, params).momentum(x, t)? / params.units.mass)
}

fn rk4_step(guide: &Guide<'_>, mass: f64, x: f64, t: f64, h: f64) -> Result<f64> {
    let v = |xx: f64, tt: f64| -> Result<f64> { Ok(guide.momentum(xx, tt)? / mass) };
    let k1 = v(x, t)?;
    let k2 = v(x + 0.5 * h * k1, t + 0.5 * h)?;
    let k3 = v(x + 0.5 * h * k2, t + 0.5 * h)?;
    let k4 = v(x + h * k3, t + h)?;
    Ok(x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
}

pub fn integrate(
    ic: &InitialCondition,
    schedule: &IntegrationSchedule,
    params: &DoubleSlitParams,
) -> Trajectory {
    let guide = Guide::new(ic.theory, ic, params);
    let mass = params.units.mass;
    let mut samples = Vec::with_capacity(schedule.base_steps() / schedule.record_stride + 2);

    // The revised field equals p0 at the anchor by construction; store it exactly.
    let p_start = match guide.momentum(ic.x0, ic.t0) {
        Ok(_) if ic.theory == Theory::Revised => ic.p0,
        Ok(p) => p,
        Err(_) => {
            return Trajectory {
                samples,
                status: TrajectoryStatus::NodeStalled,
                ic: *ic,
            }
        }
    };
    samples.push(Sample {
        t: ic.t0,
        x: ic.x0,
        p: p_start,
    });

    let n_base = schedule.base_steps();
    let mut x = ic.x0;
    let mut t = ic.t0;
    let dt_grid = (schedule.t_final - schedule.t0) / n_base as f64;
    let mut dt = dt_grid;
    let mut last_move = 0.0;
    let mut status = TrajectoryStatus::Completed;

    'base: for k in 1..=n_base {
        let t_end = schedule.grid_time(k);
        while t < t_end {
            let remaining = t_end - t;
            let h = if remaining <= dt * (1.0 + 1e-9) { remaining } else { dt };
            match rk4_step(&guide, mass, x, t, h) {
                Ok(x_new) if (x_new - x).abs() <= schedule.max_step => {
                    last_move = x_new - x;
                    x = x_new;
                    t = if h == remaining { t_end } else { t + h };
                    dt = (2.0 * h).min(dt_grid);
                    if x.abs() > schedule.domain_bound {
                        status = TrajectoryStatus::ExitedDomain;
                        break 'base;
                    }
                }
                _ => {
                    dt = 0.5 * h;
                    if dt < schedule.dt_min {
                        status = classify_stall(&guide, x, t, last_move, params);
                        break 'base;
                    }
                }
            }
        }
        if k % schedule.record_stride == 0 || k == n_base {
            match guide.momentum(x, t) {
                Ok(p) => samples.push(Sample { t, x, p }),
                Err(_) => {
                    status = classify_stall(&guide, x, t, last_move, params);
                    break 'base;
                }
            }
        }
    }

    if status != TrajectoryStatus::Completed {
        let last_t = samples.last().map_or(f64::NEG_INFINITY, |s| s.t);
        if t > last_t {
            if let Ok(p) = guide.momentum(x, t) {
                samples.push(Sample { t, x, p });
            }
        }
    }

    Trajectory {
        samples,
        status,
        ic: *ic,
    }
}

/// A stall outside both slit centres while moving outward is a runaway into
/// the density tail, which reaches |x| = ∞ in finite time; it is reported as
/// an exit. Anything else is a genuine stall.
fn classify_stall(
    guide: &Guide<'_>,
    x: f64,
    t: f64,
    last_move: f64,
    params: &DoubleSlitParams,
) -> TrajectoryStatus {
    let direction = guide.momentum(x, t).unwrap_or(last_move);
    if x.abs() > params.x_half && x * direction > 0.0 {
        TrajectoryStatus::ExitedDomain
    } else {
        TrajectoryStatus::NodeStalled
    }
}

/// Guidance momentum re-evaluated at every recorded (t, x).
pub fn momentum_along(
    trajectory: &Trajectory,
    theory: Theory,
    ic: &InitialCondition,
    params: &DoubleSlitParams,
) -> Result<Vec<f64>> {
    let guide = Guide::new(theory, ic, params);
    trajectory
        .samples
        .iter()
        .map(|s| guide.momentum(s.x, s.t))
        .collect()
}
