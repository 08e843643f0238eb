//! Initial conditions drawn from the quantum mechanical position and momentum
//! densities by exact rejection sampling.
//!
//! Every trajectory owns two ChaCha20 streams keyed by the run's master seed:
//! stream `i` for its position and stream `MOMENTUM_STREAM | i` for its
//! momentum. Ensembles therefore do not depend on thread count or on the
//! order in which trajectories are generated.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QtrajError, Result};
use crate::wavefield::{self, norm_constant, DoubleSlitParams, GuidanceField};

/// Top bit of the stream index marks momentum streams.
pub const MOMENTUM_STREAM: u64 = 1 << 63;

/// Tolerance for rounding in the envelope comparison.
const ENVELOPE_SLACK: f64 = 1.0e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theory {
    Dbb,
    Revised,
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theory::Dbb => "dbb",
            Theory::Revised => "revised",
        })
    }
}

impl FromStr for Theory {
    type Err = QtrajError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "dbb" => Ok(Theory::Dbb),
            "revised" => Ok(Theory::Revised),
            other => Err(QtrajError::config(
                "theory",
                format!("expected `dbb` or `revised`, got `{other}`"),
            )),
        }
    }
}

/// Everything needed to integrate one trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialCondition {
    pub x0: f64,
    pub p0: f64,
    pub t0: f64,
    pub theory: Theory,
}

impl InitialCondition {
    pub fn field(&self) -> GuidanceField<'_> {
        match self.theory {
            Theory::Dbb => GuidanceField::Bohm,
            Theory::Revised => GuidanceField::Revised(self),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeededStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl SeededStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        SeededStream {
            master_seed,
            stream_index,
        }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }

    pub fn position_stream(master_seed: u64, trajectory: u64) -> Self {
        Self::new(master_seed, trajectory & !MOMENTUM_STREAM)
    }

    pub fn momentum_stream(master_seed: u64, trajectory: u64) -> Self {
        Self::new(master_seed, trajectory | MOMENTUM_STREAM)
    }
}

fn normal_pdf(x: f64, width: f64) -> f64 {
    (-0.5 * (x / width).powi(2)).exp() / ((2.0 * PI).sqrt() * width)
}

/// One draw from ρ(·, t0).
///
/// Proposal: equal-weight mixture of the two packet envelopes |ψ_l|², |ψ_r|²,
/// each a normal of width |s(t0)| about ±X. Since |a + b|² ≤ 2(|a|² + |b|²),
/// ρ ≤ (4/N)·mixture everywhere.
pub fn sample_position<R: Rng + ?Sized>(
    rng: &mut R,
    params: &DoubleSlitParams,
    t0: f64,
) -> Result<f64> {
    let width = params.width(t0);
    let scale = 4.0 / norm_constant(params);
    let x_half = params.x_half;
    loop {
        let center = if rng.random::<bool>() { x_half } else { -x_half };
        let z: f64 = rng.sample(StandardNormal);
        let x = center + width * z;
        let proposal = 0.5 * (normal_pdf(x + x_half, width) + normal_pdf(x - x_half, width));
        let envelope = scale * proposal;
        let target = wavefield::rho(x, t0, params);
        if target > envelope * (1.0 + ENVELOPE_SLACK) {
            return Err(QtrajError::EnvelopeViolation {
                at: x,
                target,
                envelope,
            });
        }
        if rng.random::<f64>() * envelope < target {
            return Ok(x);
        }
    }
}

/// One draw from the momentum density: Gaussian of width σ_p thinned by cos²(Xp/ħ).
pub fn sample_momentum<R: Rng + ?Sized>(rng: &mut R, params: &DoubleSlitParams) -> Result<f64> {
    let sp = params.sigma_p();
    let k = params.x_half / params.units.hbar;
    let overlap = (-2.0 * (sp * params.x_half / params.units.hbar).powi(2)).exp();
    let scale = 2.0 / (1.0 + overlap);
    loop {
        let z: f64 = rng.sample(StandardNormal);
        let p = sp * z;
        let envelope = scale * normal_pdf(p, sp);
        let target = wavefield::momentum_density(p, params);
        if target > envelope * (1.0 + ENVELOPE_SLACK) {
            return Err(QtrajError::EnvelopeViolation {
                at: p,
                target,
                envelope,
            });
        }
        let c = (k * p).cos();
        if rng.random::<f64>() < c * c {
            return Ok(p);
        }
    }
}

pub fn sample_positions(
    n: usize,
    stream: SeededStream,
    params: &DoubleSlitParams,
    t0: f64,
) -> Result<Vec<f64>> {
    let mut rng = stream.rng();
    (0..n).map(|_| sample_position(&mut rng, params, t0)).collect()
}

pub fn sample_momenta(n: usize, stream: SeededStream, params: &DoubleSlitParams) -> Result<Vec<f64>> {
    let mut rng = stream.rng();
    (0..n).map(|_| sample_momentum(&mut rng, params)).collect()
}

/// Initial condition of trajectory `index` in a run keyed by `master_seed`.
///
/// Positions below the node floor are redrawn. Bohmian trajectories take
/// p0 = p_bb(x0, t0); revised ones draw p0 independently of x0.
pub fn initial_condition(
    index: u64,
    master_seed: u64,
    params: &DoubleSlitParams,
    t0: f64,
    theory: Theory,
) -> Result<InitialCondition> {
    let mut rng = SeededStream::position_stream(master_seed, index).rng();
    let floor = params.node_floor(t0);
    let x0 = loop {
        let x = sample_position(&mut rng, params, t0)?;
        if wavefield::rho(x, t0, params) > floor {
            break x;
        }
    };
    let p0 = match theory {
        Theory::Dbb => wavefield::p_bb(x0, t0, params)?,
        Theory::Revised => {
            let mut rng = SeededStream::momentum_stream(master_seed, index).rng();
            sample_momentum(&mut rng, params)?
        }
    };
    Ok(InitialCondition { x0, p0, t0, theory })
}

pub fn make_initial_conditions(
    n: usize,
    master_seed: u64,
    params: &DoubleSlitParams,
    t0: f64,
    theory: Theory,
) -> Result<Vec<InitialCondition>> {
    (0..n as u64)
        .into_par_iter()
        .map(|i| initial_condition(i, master_seed, params, t0, theory))
        .collect()
}
