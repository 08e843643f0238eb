//! Finite-difference residuals used to check that the closed forms solve the
//! free Schrödinger equation and that both guidance fields satisfy continuity.
//! These are test instruments; the production path never differentiates
//! numerically.

use num_complex::Complex64;

use super::{psi, rho, DoubleSlitParams, GuidanceField};
use crate::error::Result;

/// iħ∂ψ/∂t + (ħ²/2m)∂²ψ/∂x² by central differences, in units of |ψ|·ħ²/(2mσ²).
pub fn schrodinger_residual(
    x: f64,
    t: f64,
    params: &DoubleSlitParams,
    h_x: f64,
    h_t: f64,
) -> Complex64 {
    let hbar = params.units.hbar;
    let mass = params.units.mass;
    let centre = psi(x, t, params);
    let dt = (psi(x, t + h_t, params) - psi(x, t - h_t, params)) / (2.0 * h_t);
    let dxx = (psi(x + h_x, t, params) - 2.0 * centre + psi(x - h_x, t, params)) / (h_x * h_x);
    let residual = Complex64::i() * hbar * dt + hbar * hbar / (2.0 * mass) * dxx;
    residual / (centre.norm() * params.characteristic_energy())
}

/// ∂ρ/∂t + ∂(ρ p/m)/∂x for an arbitrary momentum field, normalised by ρ/τ
/// with τ = 2mσ²/ħ.
pub fn continuity_residual_with<F>(
    x: f64,
    t: f64,
    params: &DoubleSlitParams,
    h_x: f64,
    h_t: f64,
    momentum: F,
) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let mass = params.units.mass;
    let drho_dt = (rho(x, t + h_t, params) - rho(x, t - h_t, params)) / (2.0 * h_t);
    let flux = |xx: f64| -> Result<f64> { Ok(rho(xx, t, params) * momentum(xx, t)? / mass) };
    let dflux_dx = (flux(x + h_x)? - flux(x - h_x)?) / (2.0 * h_x);
    Ok((drho_dt + dflux_dx) * params.characteristic_time() / rho(x, t, params))
}

pub fn continuity_residual(
    x: f64,
    t: f64,
    field: GuidanceField<'_>,
    params: &DoubleSlitParams,
    h_x: f64,
    h_t: f64,
) -> Result<f64> {
    continuity_residual_with(x, t, params, h_x, h_t, |xx, tt| field.momentum(xx, tt, params))
}

/// Analytic truncation-plus-roundoff bound for [`continuity_residual`].
///
/// Every packet varies on the local wavenumber scale
/// `κ = (|x| + X)/(2σw) + 1/w`, w = |s(t)|, so ∂ₓᵏ ≲ κᵏ and, through the free
/// dispersion relation, ∂ₜᵏ ≲ (ħκ²/2m)ᵏ. Central differences then leave
/// `h²/6` times the third derivative. `speed` is |p|/m of the field at the point;
/// it sets the size of the flux whose roundoff the x-difference amplifies.
pub fn continuity_budget(
    x: f64,
    t: f64,
    params: &DoubleSlitParams,
    h_x: f64,
    h_t: f64,
    speed: f64,
) -> f64 {
    let w = params.width(t);
    let kappa = (x.abs() + params.x_half) / (2.0 * params.sigma * w) + 1.0 / w;
    let hbar_m = params.units.hbar_over_mass();
    let omega = 0.5 * hbar_m * kappa * kappa;
    let v = hbar_m * kappa + speed;
    let tau = params.characteristic_time();
    let truncation = tau / 6.0 * (h_t * h_t * omega.powi(3) + h_x * h_x * kappa.powi(3) * v);
    let roundoff = 64.0 * f64::EPSILON * tau * (1.0 / h_t + v / h_x);
    truncation + roundoff
}
