use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub n: usize,
    pub critical_at_alpha: f64,
    pub passed: bool,
}

/// Asymptotic Kolmogorov coefficient c(α) with the usual tabulated values
/// at α = 0.01 and 0.05.
pub fn ks_coefficient(alpha: f64) -> f64 {
    if (alpha - 0.01).abs() < 1e-12 {
        1.63
    } else if (alpha - 0.05).abs() < 1e-12 {
        1.36
    } else {
        (-(0.5 * alpha).ln() / 2.0).sqrt()
    }
}

/// One-sample Kolmogorov–Smirnov test against a continuous CDF.
pub fn ks_test<F: Fn(f64) -> f64>(values: &[f64], cdf: F, alpha: f64) -> KsResult {
    let n = values.len();
    if n == 0 {
        return KsResult {
            statistic: 0.0,
            n,
            critical_at_alpha: f64::INFINITY,
            passed: true,
        };
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let nf = n as f64;
    let statistic = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (((i + 1) as f64 / nf) - f).max(f - i as f64 / nf)
        })
        .fold(0.0, f64::max);
    let critical_at_alpha = ks_coefficient(alpha) / nf.sqrt();
    KsResult {
        statistic,
        n,
        critical_at_alpha,
        passed: statistic < critical_at_alpha,
    }
}
