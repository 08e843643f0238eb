use serde::{Deserialize, Serialize};

/// Binning of one observable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramSpec {
    pub n_bins: usize,
    pub lo: f64,
    pub hi: f64,
}

impl HistogramSpec {
    pub fn new(n_bins: usize, lo: f64, hi: f64) -> Self {
        assert!(n_bins >= 1 && hi > lo, "histogram range must be nonempty");
        HistogramSpec { n_bins, lo, hi }
    }

    pub fn symmetric(n_bins: usize, half_width: f64) -> Self {
        Self::new(n_bins, -half_width, half_width)
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.n_bins as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Counts divided by (in-range total × bin width); all zero when nothing landed in range.
    pub density: Vec<f64>,
    pub underflow: u64,
    pub overflow: u64,
}

impl Histogram {
    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn in_range(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn bin_width(&self, i: usize) -> f64 {
        self.edges[i + 1] - self.edges[i]
    }
}

pub fn build_histogram(values: &[f64], spec: &HistogramSpec) -> Histogram {
    let width = spec.bin_width();
    let edges: Vec<f64> = (0..=spec.n_bins)
        .map(|i| {
            if i == spec.n_bins {
                spec.hi
            } else {
                spec.lo + width * i as f64
            }
        })
        .collect();
    let mut counts = vec![0u64; spec.n_bins];
    let mut underflow = 0;
    let mut overflow = 0;
    for &v in values {
        if v < spec.lo || v.is_nan() {
            underflow += 1;
        } else if v > spec.hi {
            overflow += 1;
        } else {
            let i = (((v - spec.lo) / width) as usize).min(spec.n_bins - 1);
            // keep bin membership consistent with the stored edges
            let i = if v < edges[i] { i - 1 } else if v >= edges[i + 1] && i + 1 < spec.n_bins { i + 1 } else { i };
            counts[i] += 1;
        }
    }
    let total: u64 = counts.iter().sum();
    let density = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(&c, w)| {
            if total == 0 {
                0.0
            } else {
                c as f64 / (total as f64 * (w[1] - w[0]))
            }
        })
        .collect();
    Histogram {
        edges,
        counts,
        density,
        underflow,
        overflow,
    }
}

/// Central-band versus side-band comparison of a momentum histogram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipReport {
    /// Mean density over |p| < σ_p/2 divided by mean density over σ_p/2 < |p| < 3σ_p/2.
    /// Below one means a central minimum.
    pub ratio: f64,
    /// Same ratio for the oracle density sampled at the same bin centres.
    pub oracle_ratio: f64,
    /// Largest histogram density inside the side bands.
    pub side_peak: f64,
    /// Mean histogram density over the central band divided by `side_peak`.
    /// Below one means the centre sits under the highest nearby bin.
    pub peak_ratio: f64,
}

/// Band membership is decided by bin centre.
pub fn central_dip_metric<F: Fn(f64) -> f64>(histogram: &Histogram, oracle: F, sigma_p: f64) -> DipReport {
    let mut central = (0.0, 0.0, 0usize);
    let mut side = (0.0, 0.0, 0usize);
    let mut side_peak: f64 = 0.0;
    for (c, &d) in histogram.centers().into_iter().zip(&histogram.density) {
        let a = c.abs();
        if a < 0.5 * sigma_p {
            central.0 += d;
            central.1 += oracle(c);
            central.2 += 1;
        } else if a > 0.5 * sigma_p && a < 1.5 * sigma_p {
            side.0 += d;
            side.1 += oracle(c);
            side.2 += 1;
            side_peak = side_peak.max(d);
        }
    }
    let mean = |sum: f64, n: usize| if n == 0 { f64::NAN } else { sum / n as f64 };
    DipReport {
        ratio: mean(central.0, central.2) / mean(side.0, side.2),
        oracle_ratio: mean(central.1, central.2) / mean(side.1, side.2),
        side_peak,
        peak_ratio: mean(central.0, central.2) / side_peak,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_gives_zero_counts() {
        let h = build_histogram(&[], &HistogramSpec::symmetric(4, 2.0));
        assert_eq!(h.counts, vec![0; 4]);
        assert!(h.density.iter().all(|&d| d == 0.0));
        assert_eq!(h.edges.len(), 5);
    }

    #[test]
    fn single_bin_collects_everything() {
        let values = vec![0.3; 17];
        let h = build_histogram(&values, &HistogramSpec::new(5, 0.0, 1.0));
        assert_eq!(h.counts, vec![0, 17, 0, 0, 0]);
        assert!((h.density[1] * h.bin_width(1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_values_are_tallied() {
        let h = build_histogram(&[-3.0, -1.0, 0.0, 1.0, 2.5], &HistogramSpec::symmetric(2, 1.0));
        assert_eq!(h.underflow, 1);
        assert_eq!(h.overflow, 1);
        // upper edge is inclusive
        assert_eq!(h.counts, vec![1, 2]);
    }

    #[test]
    fn density_integrates_to_one() {
        let values: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 / 10.0 - 5.0).collect();
        let h = build_histogram(&values, &HistogramSpec::symmetric(13, 5.0));
        let integral: f64 = (0..13).map(|i| h.density[i] * h.bin_width(i)).sum();
        assert!((integral - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dip_metric_sees_a_hole() {
        // two bumps at ±1 with nothing at 0
        let mut values = Vec::new();
        for i in 0..200 {
            let off = (i as f64 / 200.0 - 0.5) * 0.4;
            values.push(1.0 + off);
            values.push(-1.0 + off);
        }
        let h = build_histogram(&values, &HistogramSpec::symmetric(60, 3.0));
        let report = central_dip_metric(&h, |p: f64| (-p * p).exp(), 1.0);
        assert_eq!(report.ratio, 0.0);
        assert!(report.oracle_ratio > 1.0);
        assert!(report.side_peak > 0.0);
        assert_eq!(report.peak_ratio, 0.0);
    }
}
