//! Analytic self-checks run by `qtraj verify`.

use rand::Rng;
use rand_chacha::ChaCha20Rng;

use crate::quadrature::GaussLegendre;
use crate::sampling::{InitialCondition, SeededStream, Theory};
use crate::wavefield::{self, DoubleSlitParams, GuidanceField};

/// Finite-difference steps used by the residual checks, relative to σ and 2mσ²/ħ.
pub const FD_STEP_X: f64 = 1.0 / 200.0;
pub const FD_STEP_T: f64 = FD_STEP_X * FD_STEP_X;

pub const SCHRODINGER_TOL: f64 = 1.0e-4;
pub const CONTINUITY_BUDGET_FACTOR: f64 = 10.0;
pub const NORM_TOL: f64 = 1.0e-6;
pub const ANCHOR_TOL: f64 = 1.0e-12;

/// Points with ρ below this fraction of the envelope maximum are not "interior".
pub const INTERIOR_REL: f64 = 1.0e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    /// Worst observed value (residual, error, ...).
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {}: worst {:.3e} (limit {:.3e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.threshold
        )
    }
}

pub fn fd_steps(params: &DoubleSlitParams) -> (f64, f64) {
    (FD_STEP_X * params.sigma, FD_STEP_T * params.characteristic_time())
}

/// Random (x, t) with t in [t_lo, t_hi] and ρ(x,t) above the interior threshold.
pub fn interior_point(rng: &mut ChaCha20Rng, params: &DoubleSlitParams, t_lo: f64, t_hi: f64) -> (f64, f64) {
    loop {
        let t = rng.random_range(t_lo..=t_hi);
        let half = params.x_half + 3.0 * params.width(t);
        let x = rng.random_range(-half..=half);
        if wavefield::rho(x, t, params) > INTERIOR_REL * params.rho_max_bound(t) {
            return (x, t);
        }
    }
}

pub fn check_schrodinger(params: &DoubleSlitParams, points: usize, t_final: f64, seed: u64) -> CheckOutcome {
    let (h_x, h_t) = fd_steps(params);
    let mut rng = SeededStream::new(seed, 0).rng();
    let worst = (0..points)
        .map(|_| {
            let (x, t) = interior_point(&mut rng, params, 0.0, t_final);
            wavefield::schrodinger_residual(x, t, params, h_x, h_t).norm()
        })
        .fold(0.0, f64::max);
    CheckOutcome {
        name: "schrodinger residual".into(),
        value: worst,
        threshold: SCHRODINGER_TOL,
        passed: worst < SCHRODINGER_TOL,
    }
}

/// Revised initial conditions with x0 from ρ(·,0) and p0 from the momentum density.
pub fn random_revised_ics(params: &DoubleSlitParams, count: usize, seed: u64) -> Vec<InitialCondition> {
    (0..count as u64)
        .map(|i| {
            crate::sampling::initial_condition(i, seed, params, 0.0, Theory::Revised)
                .expect("sampler envelopes are exact")
        })
        .collect()
}

/// Worst ratio of continuity residual to its analytic budget.
///
/// The Bohmian field is checked at every point; each point also checks one of
/// `revised_fields` randomly drawn revised fields in rotation.
pub fn check_continuity(
    params: &DoubleSlitParams,
    points: usize,
    revised_fields: usize,
    t_final: f64,
    seed: u64,
) -> CheckOutcome {
    let (h_x, h_t) = fd_steps(params);
    let ics = random_revised_ics(params, revised_fields.max(1), seed ^ 0x5eed);
    let mut rng = SeededStream::new(seed, 1).rng();
    let mut worst: f64 = 0.0;
    let mut failures = 0usize;
    for i in 0..points {
        // keep t - h_t inside the analytic domain of interest
        let (x, t) = interior_point(&mut rng, params, h_t, t_final);
        let fields = [GuidanceField::Bohm, GuidanceField::Revised(&ics[i % ics.len()])];
        for field in fields {
            let speed = match field.momentum(x, t, params) {
                Ok(p) => p.abs() / params.units.mass,
                Err(_) => {
                    failures += 1;
                    continue;
                }
            };
            match wavefield::continuity_residual(x, t, field, params, h_x, h_t) {
                Ok(r) => {
                    let budget = wavefield::continuity_budget(x, t, params, h_x, h_t, speed);
                    worst = worst.max(r.abs() / budget);
                }
                Err(_) => failures += 1,
            }
        }
    }
    CheckOutcome {
        name: format!("continuity residual / budget (bohm + {revised_fields} revised fields)"),
        value: if failures > 0 { f64::INFINITY } else { worst },
        threshold: CONTINUITY_BUDGET_FACTOR,
        passed: failures == 0 && worst < CONTINUITY_BUDGET_FACTOR,
    }
}

pub fn position_norm(params: &DoubleSlitParams, t: f64) -> f64 {
    let half = params.x_half + 12.0 * params.sigma + 4.0 * params.spread(t);
    GaussLegendre::new(20).integrate_composite(|x| wavefield::rho(x, t, params), -half, half, 400)
}

pub fn momentum_norm(params: &DoubleSlitParams) -> f64 {
    let half = 10.0 * params.sigma_p();
    GaussLegendre::new(20).integrate_composite(|p| wavefield::momentum_density(p, params), -half, half, 400)
}

pub fn check_normalization(params: &DoubleSlitParams, times: &[f64]) -> CheckOutcome {
    let worst = times
        .iter()
        .map(|&t| (position_norm(params, t) - 1.0).abs())
        .chain(std::iter::once((momentum_norm(params) - 1.0).abs()))
        .fold(0.0, f64::max);
    CheckOutcome {
        name: format!("normalisation of rho at {times:?} ps and of the momentum density"),
        value: worst,
        threshold: NORM_TOL,
        passed: worst < NORM_TOL,
    }
}

pub fn check_anchoring(params: &DoubleSlitParams, count: usize, seed: u64) -> CheckOutcome {
    let worst = random_revised_ics(params, count, seed)
        .iter()
        .map(|ic| match wavefield::p_revised(ic.x0, ic.t0, ic, params) {
            Ok(p) => (p - ic.p0).abs(),
            Err(_) => f64::INFINITY,
        })
        .fold(0.0, f64::max);
    CheckOutcome {
        name: "revised field anchoring |p_r(x0,t0) - p0|".into(),
        value: worst,
        threshold: ANCHOR_TOL,
        passed: worst < ANCHOR_TOL,
    }
}

/// Every check at the sizes used by the acceptance suite.
pub fn run_all(params: &DoubleSlitParams, t_final: f64, seed: u64) -> Vec<CheckOutcome> {
    let mut times = vec![0.0, 1.0, 3.5, 5.0];
    if !times.contains(&t_final) {
        times.push(t_final);
    }
    vec![
        check_schrodinger(params, 10_000, t_final, seed),
        check_continuity(params, 10_000, 100, t_final, seed),
        check_normalization(params, &times),
        check_anchoring(params, 1_000, seed),
    ]
}
