//! Quadrature CDFs of the analytic densities, used as KS references.

use crate::quadrature::TabulatedCdf;
use crate::wavefield::{self, DoubleSlitParams};

/// CDF of ρ(·, t), tabulated over ±(X + 14 w(t)).
pub fn position_cdf(params: &DoubleSlitParams, t: f64) -> TabulatedCdf {
    let half = params.x_half + 14.0 * params.width(t);
    let p = *params;
    TabulatedCdf::new(move |x| wavefield::rho(x, t, &p), -half, half, 4000)
}

/// CDF of the momentum density, tabulated over ±14σ_p.
pub fn momentum_cdf(params: &DoubleSlitParams) -> TabulatedCdf {
    let half = 14.0 * params.sigma_p();
    let p = *params;
    TabulatedCdf::new(move |q| wavefield::momentum_density(q, &p), -half, half, 4000)
}
