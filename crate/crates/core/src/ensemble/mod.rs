//! Trajectory ensembles, time slices, and their comparison with the analytic
//! position and momentum densities.

mod histogram;
pub mod oracle;
mod stats;

pub use histogram::{build_histogram, central_dip_metric, DipReport, Histogram, HistogramSpec};
pub use stats::{ks_coefficient, ks_test, KsResult};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::{integrate, IntegrationSchedule, Trajectory, TrajectoryStatus};
use crate::error::{QtrajError, Result};
use crate::sampling::{make_initial_conditions, InitialCondition, Theory};
use crate::wavefield::{self, DoubleSlitParams, RevisedField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Observable {
    Position,
    Momentum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub n_traj: usize,
    pub theory: Theory,
    pub master_seed: u64,
    pub schedule: IntegrationSchedule,
    pub slice_times: Vec<f64>,
    pub position_bins: HistogramSpec,
    pub momentum_bins: HistogramSpec,
    /// Keep stalled trajectories in slices after the stall, frozen at their
    /// last recorded sample. Exited trajectories are always dropped.
    pub include_stalled: bool,
}

impl EnsembleConfig {
    /// 40000 revised trajectories over 0..5 ps, slices at 0, 3.5 and 5 ps.
    pub fn defaults(params: &DoubleSlitParams) -> Self {
        let t_final = 5.0;
        let bins = 200;
        EnsembleConfig {
            n_traj: 40_000,
            theory: Theory::Revised,
            master_seed: 1,
            schedule: IntegrationSchedule::for_params(params, 0.0, t_final, 0.01),
            slice_times: vec![0.0, 3.5, t_final],
            position_bins: HistogramSpec::symmetric(bins, params.x_half + 6.0 * params.width(t_final)),
            momentum_bins: HistogramSpec::symmetric(bins, 6.0 * params.sigma_p()),
            include_stalled: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_traj == 0 {
            return Err(QtrajError::config("n_traj", "must be at least 1"));
        }
        self.schedule.validate()?;
        let (t0, t1) = (self.schedule.t0, self.schedule.t_final);
        if let Some(&t) = self.slice_times.iter().find(|&&t| !(t >= t0 && t <= t1)) {
            return Err(QtrajError::config(
                "slices_ps",
                format!("slice {t} outside [{t0}, {t1}]"),
            ));
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON of the configuration and physical parameters.
    pub fn digest(&self, params: &DoubleSlitParams) -> String {
        let canonical = serde_json::json!({
            "config": self,
            "x_half": params.x_half,
            "sigma": params.sigma,
            "hbar": params.units.hbar,
            "mass": params.units.mass,
        });
        hex_digest(canonical.to_string().as_bytes())
    }
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusCounts {
    pub completed: usize,
    pub exited_domain: usize,
    pub node_stalled: usize,
}

#[derive(Debug, Clone)]
pub struct EnsembleResult {
    pub params: DoubleSlitParams,
    pub config: EnsembleConfig,
    pub config_digest: String,
    pub trajectories: Vec<Trajectory>,
}

impl EnsembleResult {
    pub fn status_counts(&self) -> StatusCounts {
        let mut counts = StatusCounts::default();
        for traj in &self.trajectories {
            match traj.status {
                TrajectoryStatus::Completed => counts.completed += 1,
                TrajectoryStatus::ExitedDomain => counts.exited_domain += 1,
                TrajectoryStatus::NodeStalled => counts.node_stalled += 1,
            }
        }
        counts
    }

    /// SHA-256 over every recorded sample and status, bit for bit.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.config_digest.as_bytes());
        for traj in &self.trajectories {
            hasher.update([traj.status as u8]);
            for s in &traj.samples {
                hasher.update(s.t.to_bits().to_le_bytes());
                hasher.update(s.x.to_bits().to_le_bytes());
                hasher.update(s.p.to_bits().to_le_bytes());
            }
        }
        hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Integrate one trajectory per initial condition, in parallel, preserving order.
pub fn run_from_initial_conditions(
    ics: &[InitialCondition],
    config: &EnsembleConfig,
    params: &DoubleSlitParams,
) -> EnsembleResult {
    let trajectories = ics
        .par_iter()
        .map(|ic| integrate(ic, &config.schedule, params))
        .collect();
    EnsembleResult {
        params: *params,
        config: config.clone(),
        config_digest: config.digest(params),
        trajectories,
    }
}

pub fn run_ensemble(config: &EnsembleConfig, params: &DoubleSlitParams) -> Result<EnsembleResult> {
    config.validate()?;
    let ics = make_initial_conditions(
        config.n_traj,
        config.master_seed,
        params,
        config.schedule.t0,
        config.theory,
    )?;
    Ok(run_from_initial_conditions(&ics, config, params))
}

/// Values of one observable across the ensemble at a common time.
#[derive(Debug, Clone, PartialEq)]
pub struct Slice {
    pub t: f64,
    pub observable: Observable,
    pub values: Vec<f64>,
    /// Trajectories that no longer cover `t` (exited, stalled, or undefined field).
    pub excluded: usize,
}

fn momentum_at(ic: &InitialCondition, x: f64, t: f64, params: &DoubleSlitParams) -> Result<f64> {
    match ic.theory {
        Theory::Dbb => wavefield::p_bb(x, t, params),
        Theory::Revised => RevisedField::new(ic, params).momentum(x, t),
    }
}

fn slice_one(
    traj: &Trajectory,
    t: f64,
    observable: Observable,
    include_stalled: bool,
    params: &DoubleSlitParams,
) -> Option<f64> {
    let samples = &traj.samples;
    let last = samples.last()?;
    if t > last.t {
        if include_stalled && traj.status == TrajectoryStatus::NodeStalled {
            return Some(match observable {
                Observable::Position => last.x,
                Observable::Momentum => last.p,
            });
        }
        return None;
    }
    let hi = samples.partition_point(|s| s.t < t);
    let upper = samples.get(hi)?;
    if upper.t == t {
        return Some(match observable {
            Observable::Position => upper.x,
            Observable::Momentum => upper.p,
        });
    }
    if hi == 0 {
        return None;
    }
    let lower = &samples[hi - 1];
    let frac = (t - lower.t) / (upper.t - lower.t);
    let x = lower.x + frac * (upper.x - lower.x);
    match observable {
        Observable::Position => Some(x),
        Observable::Momentum => momentum_at(&traj.ic, x, t, params).ok(),
    }
}

/// Position or momentum of every contributing trajectory at time `t`.
///
/// Positions are interpolated linearly between recorded samples; momenta are
/// the guidance field evaluated at the interpolated point.
pub fn slice_values(result: &EnsembleResult, t: f64, observable: Observable) -> Result<Slice> {
    let schedule = &result.config.schedule;
    if !(t >= schedule.t0 && t <= schedule.t_final) {
        return Err(QtrajError::SliceOutOfRange {
            t,
            t0: schedule.t0,
            t_final: schedule.t_final,
        });
    }
    let picked: Vec<Option<f64>> = result
        .trajectories
        .par_iter()
        .map(|traj| slice_one(traj, t, observable, result.config.include_stalled, &result.params))
        .collect();
    let excluded = picked.iter().filter(|v| v.is_none()).count();
    Ok(Slice {
        t,
        observable,
        values: picked.into_iter().flatten().collect(),
        excluded,
    })
}

/// Histogram, oracle curve and test statistics for one slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceReport {
    pub theory: Theory,
    pub t: f64,
    pub observable: Observable,
    pub contributing: usize,
    pub excluded: usize,
    pub histogram: Histogram,
    /// Analytic density at the bin centres.
    pub oracle_density: Vec<f64>,
    pub ks: KsResult,
    /// Momentum slices only.
    pub dip: Option<DipReport>,
}

pub const KS_ALPHA: f64 = 0.01;

pub fn slice_report(result: &EnsembleResult, t: f64, observable: Observable) -> Result<SliceReport> {
    let params = &result.params;
    let slice = slice_values(result, t, observable)?;
    let (spec, ks, oracle_density, dip) = match observable {
        Observable::Position => {
            let spec = result.config.position_bins;
            let cdf = oracle::position_cdf(params, t);
            let ks = ks_test(&slice.values, |x| cdf.eval(x), KS_ALPHA);
            let hist = build_histogram(&slice.values, &spec);
            let curve = hist.centers().iter().map(|&x| wavefield::rho(x, t, params)).collect();
            (hist, ks, curve, None)
        }
        Observable::Momentum => {
            let spec = result.config.momentum_bins;
            let cdf = oracle::momentum_cdf(params);
            let ks = ks_test(&slice.values, |p| cdf.eval(p), KS_ALPHA);
            let hist = build_histogram(&slice.values, &spec);
            let curve: Vec<f64> = hist
                .centers()
                .iter()
                .map(|&p| wavefield::momentum_density(p, params))
                .collect();
            let dip = central_dip_metric(&hist, |p| wavefield::momentum_density(p, params), params.sigma_p());
            (hist, ks, curve, Some(dip))
        }
    };
    Ok(SliceReport {
        theory: result.config.theory,
        t,
        observable,
        contributing: slice.values.len(),
        excluded: slice.excluded,
        histogram: spec,
        oracle_density,
        ks,
        dip,
    })
}

/// Position and momentum reports at every configured slice time.
pub fn all_slice_reports(result: &EnsembleResult) -> Result<Vec<SliceReport>> {
    let mut reports = Vec::new();
    for &t in &result.config.slice_times {
        reports.push(slice_report(result, t, Observable::Position)?);
        reports.push(slice_report(result, t, Observable::Momentum)?);
    }
    Ok(reports)
}
