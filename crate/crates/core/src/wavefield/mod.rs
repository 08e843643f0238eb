//! Closed-form double-slit wave function and the guidance fields built on it.
//!
//! Internal units: lengths in nm, times in ps, masses in electron masses.
//! In these units ħ is [`HBAR_OVER_ME`] (m_e·nm²/ps), so a packet of width
//! 10 nm and a few ps of free flight are both order-one numbers.
//!
//! Each slit contributes a free Gaussian packet
//!
//! ```text
//! ψ_k(x,t) = (2π)^(-1/4) s(t)^(-1/2) exp(-(x - c_k)² / (4σ s(t))),   s(t) = σ + iħt/(2mσ)
//! ```
//!
//! with the left slit centred at `c = -X` and the right slit at `c = +X`.
//! The superposition is `(ψ_l + ψ_r)/√N`, `N = 2 + 2 exp(-X²/(2σ²))`.

mod residual;

pub use residual::{
    continuity_budget, continuity_residual, continuity_residual_with, schrodinger_residual,
};

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{QtrajError, Result};
use crate::sampling::InitialCondition;

/// Complex wave-function value or derivative.
pub type ComplexAmplitude = Complex64;

/// Reduced Planck constant, J·s (exact since the 2019 SI redefinition).
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Electron rest mass, kg (CODATA 2018).
pub const ELECTRON_MASS_SI: f64 = 9.109_383_701_5e-31;
/// ħ/m_e expressed in nm²/ps, i.e. ħ in units of m_e·nm²/ps.
pub const HBAR_OVER_ME: f64 = HBAR_SI / ELECTRON_MASS_SI * 1.0e6;

/// Relative density threshold below which the guidance fields are undefined.
pub const NODE_FLOOR_REL: f64 = 1.0e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    /// ħ in m_e·nm²/ps.
    pub hbar: f64,
    /// Particle mass in electron masses.
    pub mass: f64,
}

impl UnitSystem {
    pub fn electron() -> Self {
        UnitSystem {
            hbar: HBAR_OVER_ME,
            mass: 1.0,
        }
    }

    pub fn with_mass(mass_me: f64) -> Result<Self> {
        if !(mass_me.is_finite() && mass_me > 0.0) {
            return Err(QtrajError::config("mass_me", "must be a positive finite number"));
        }
        Ok(UnitSystem {
            hbar: HBAR_OVER_ME,
            mass: mass_me,
        })
    }

    /// ħ/m in nm²/ps.
    pub fn hbar_over_mass(&self) -> f64 {
        self.hbar / self.mass
    }
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self::electron()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slit {
    /// Centred at x = -X.
    Left,
    /// Centred at x = +X.
    Right,
}

impl Slit {
    pub fn center(self, params: &DoubleSlitParams) -> f64 {
        match self {
            Slit::Left => -params.x_half,
            Slit::Right => params.x_half,
        }
    }
}

/// Physical configuration of the double slit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleSlitParams {
    /// Half the slit separation, nm.
    pub x_half: f64,
    /// Slit width, nm.
    pub sigma: f64,
    pub units: UnitSystem,
}

impl DoubleSlitParams {
    pub fn new(x_half: f64, sigma: f64, units: UnitSystem) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(QtrajError::config("sigma_nm", "must be a positive finite number"));
        }
        if !(x_half.is_finite() && x_half >= 0.0) {
            return Err(QtrajError::config("x_half_nm", "must be a finite number >= 0"));
        }
        if !(units.hbar > 0.0 && units.mass > 0.0) {
            return Err(QtrajError::config("mass_me", "hbar and mass must be positive"));
        }
        Ok(DoubleSlitParams {
            x_half,
            sigma,
            units,
        })
    }

    /// 2X = 100 nm, σ = 10 nm, electron mass.
    pub fn jonsson() -> Self {
        DoubleSlitParams {
            x_half: 50.0,
            sigma: 10.0,
            units: UnitSystem::electron(),
        }
    }

    /// Momentum width ħ/(2σ) of a single slit packet.
    pub fn sigma_p(&self) -> f64 {
        self.units.hbar / (2.0 * self.sigma)
    }

    /// Imaginary part of the complex width: ħt/(2mσ).
    pub fn spread(&self, t: f64) -> f64 {
        self.units.hbar_over_mass() * t / (2.0 * self.sigma)
    }

    /// Complex width s(t) = σ + iħt/(2mσ).
    pub fn complex_width(&self, t: f64) -> Complex64 {
        Complex64::new(self.sigma, self.spread(t))
    }

    /// Position standard deviation of one packet at time t, |s(t)|.
    pub fn width(&self, t: f64) -> f64 {
        self.sigma.hypot(self.spread(t))
    }

    /// 2mσ²/ħ, the time over which a packet doubles its variance.
    pub fn characteristic_time(&self) -> f64 {
        2.0 * self.sigma * self.sigma / self.units.hbar_over_mass()
    }

    /// ħ²/(2mσ²).
    pub fn characteristic_energy(&self) -> f64 {
        self.units.hbar * self.units.hbar / (2.0 * self.units.mass * self.sigma * self.sigma)
    }

    /// Upper bound on max_x ρ(x,t) from the packet envelopes.
    pub fn rho_max_bound(&self, t: f64) -> f64 {
        4.0 / (norm_constant(self) * (2.0 * PI).sqrt() * self.width(t))
    }

    /// Density below which the guidance fields are treated as undefined at time t.
    pub fn node_floor(&self, t: f64) -> f64 {
        NODE_FLOOR_REL * self.rho_max_bound(t)
    }
}

impl Default for DoubleSlitParams {
    fn default() -> Self {
        Self::jonsson()
    }
}

/// Normalisation constant N of the two-slit superposition.
pub fn norm_constant(params: &DoubleSlitParams) -> f64 {
    let ratio = params.x_half / params.sigma;
    2.0 + 2.0 * (-0.5 * ratio * ratio).exp()
}

fn log_prefactor(s: Complex64) -> Complex64 {
    Complex64::new(-0.25 * (2.0 * PI).ln(), 0.0) - 0.5 * s.ln()
}

/// Exponent -(x - c)²/(4σ s) of one packet.
fn packet_exponent(x: f64, center: f64, s: Complex64, sigma: f64) -> Complex64 {
    let u = x - center;
    -(u * u) / (4.0 * sigma * s)
}

pub fn packet_amplitude(slit: Slit, x: f64, t: f64, params: &DoubleSlitParams) -> ComplexAmplitude {
    let s = params.complex_width(t);
    (log_prefactor(s) + packet_exponent(x, slit.center(params), s, params.sigma)).exp()
}

/// ∂ψ_k/∂x in closed form.
pub fn packet_amplitude_dx(
    slit: Slit,
    x: f64,
    t: f64,
    params: &DoubleSlitParams,
) -> ComplexAmplitude {
    let s = params.complex_width(t);
    let c = slit.center(params);
    packet_amplitude(slit, x, t, params) * (-(x - c) / (2.0 * params.sigma * s))
}

pub fn psi(x: f64, t: f64, params: &DoubleSlitParams) -> ComplexAmplitude {
    (packet_amplitude(Slit::Left, x, t, params) + packet_amplitude(Slit::Right, x, t, params))
        / norm_constant(params).sqrt()
}

pub fn psi_dx(x: f64, t: f64, params: &DoubleSlitParams) -> ComplexAmplitude {
    (packet_amplitude_dx(Slit::Left, x, t, params) + packet_amplitude_dx(Slit::Right, x, t, params))
        / norm_constant(params).sqrt()
}

pub fn rho(x: f64, t: f64, params: &DoubleSlitParams) -> f64 {
    psi(x, t, params).norm_sqr()
}

/// Density and logarithmic derivative (∂ψ/∂x)/ψ evaluated together.
///
/// The ratio is formed from exponent-shifted packet weights so it stays
/// accurate far into the tails, where the amplitudes themselves underflow.
#[derive(Debug, Clone, Copy)]
pub struct LocalField {
    pub rho: f64,
    pub log_derivative: Complex64,
}

pub fn local_field(x: f64, t: f64, params: &DoubleSlitParams) -> LocalField {
    let s = params.complex_width(t);
    let sigma = params.sigma;
    let a_l = packet_exponent(x, -params.x_half, s, sigma);
    let a_r = packet_exponent(x, params.x_half, s, sigma);
    let shift = a_l.re.max(a_r.re);
    let w_l = (a_l - shift).exp();
    let w_r = (a_r - shift).exp();
    let d_l = -(x + params.x_half) / (2.0 * sigma * s);
    let d_r = -(x - params.x_half) / (2.0 * sigma * s);
    let sum = w_l + w_r;
    let pref = log_prefactor(s);
    let rho = (2.0 * (pref.re + shift)).exp() * sum.norm_sqr() / norm_constant(params);
    LocalField {
        rho,
        log_derivative: (w_l * d_l + w_r * d_r) / sum,
    }
}

fn checked_field(x: f64, t: f64, params: &DoubleSlitParams) -> Result<LocalField> {
    let field = local_field(x, t, params);
    if field.rho.is_nan() || field.rho < params.node_floor(t) || !field.log_derivative.is_finite() {
        return Err(QtrajError::NodeSingularity { x, t });
    }
    Ok(field)
}

/// de Broglie–Bohm momentum ħ·Im[(∂ψ/∂x)/ψ].
pub fn p_bb(x: f64, t: f64, params: &DoubleSlitParams) -> Result<f64> {
    Ok(params.units.hbar * checked_field(x, t, params)?.log_derivative.im)
}

/// Revised momentum field anchored at the initial condition.
pub fn p_revised(x: f64, t: f64, ic: &InitialCondition, params: &DoubleSlitParams) -> Result<f64> {
    RevisedField::new(ic, params).momentum(x, t)
}

/// Revised field with the initial-point quantities evaluated once.
///
/// `p(x,t) = p_bb(x,t) + [p0 - p_bb(x0,t0)]·ρ(x0,t)/ρ(x,t)`
#[derive(Debug, Clone, Copy)]
pub struct RevisedField<'a> {
    params: &'a DoubleSlitParams,
    x0: f64,
    excess: f64,
}

impl<'a> RevisedField<'a> {
    pub fn new(ic: &InitialCondition, params: &'a DoubleSlitParams) -> Self {
        let bb_start = params.units.hbar * local_field(ic.x0, ic.t0, params).log_derivative.im;
        RevisedField {
            params,
            x0: ic.x0,
            excess: ic.p0 - bb_start,
        }
    }

    /// p0 - p_bb(x0, t0).
    pub fn excess(&self) -> f64 {
        self.excess
    }

    pub fn momentum(&self, x: f64, t: f64) -> Result<f64> {
        let here = checked_field(x, t, self.params)?;
        let bb_here = self.params.units.hbar * here.log_derivative.im;
        let rho_start = local_field(self.x0, t, self.params).rho;
        Ok(bb_here + self.excess * rho_start / here.rho)
    }
}

/// Quantum mechanical momentum density of the double-slit state.
pub fn momentum_density(p: f64, params: &DoubleSlitParams) -> f64 {
    let sp = params.sigma_p();
    let hbar = params.units.hbar;
    let x = params.x_half;
    let overlap = (-2.0 * sp * sp * x * x / (hbar * hbar)).exp();
    let cos = (x * p / hbar).cos();
    (2.0 / PI).sqrt() / sp / (1.0 + overlap) * (-(p * p) / (2.0 * sp * sp)).exp() * cos * cos
}

/// Which momentum field steers a trajectory.
#[derive(Debug, Clone, Copy)]
pub enum GuidanceField<'a> {
    Bohm,
    Revised(&'a InitialCondition),
}

impl GuidanceField<'_> {
    pub fn momentum(&self, x: f64, t: f64, params: &DoubleSlitParams) -> Result<f64> {
        match self {
            GuidanceField::Bohm => p_bb(x, t, params),
            GuidanceField::Revised(ic) => p_revised(x, t, ic, params),
        }
    }
}
