//! Composite Gauss–Legendre quadrature and a tabulated cumulative distribution.

use std::f64::consts::PI;
use std::sync::Arc;

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, z);
                dp = d;
                let step = p / d;
                z -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, z);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&z, &w)| w * f(mid + half * z))
            .sum::<f64>()
            * half
    }

    /// Composite rule over `panels` equal sub-intervals.
    pub fn integrate_composite<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|k| {
                let lo = a + h * k as f64;
                self.integrate(&f, lo, lo + h)
            })
            .sum()
    }
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// CDF of a density on [lo, hi], tabulated at panel edges and completed
/// inside a panel with one more Gauss–Legendre pass.
///
/// Mass outside [lo, hi] is treated as zero; the table is not renormalised,
/// so an under-covered support shows up as a final value below one.
#[derive(Clone)]
pub struct TabulatedCdf {
    lo: f64,
    hi: f64,
    step: f64,
    cumulative: Vec<f64>,
    density: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    rule: GaussLegendre,
}

impl TabulatedCdf {
    pub fn new<F>(density: F, lo: f64, hi: f64, panels: usize) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        assert!(hi > lo && panels >= 1);
        let rule = GaussLegendre::new(16);
        let step = (hi - lo) / panels as f64;
        let mut cumulative = Vec::with_capacity(panels + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for k in 0..panels {
            let a = lo + step * k as f64;
            acc += rule.integrate(&density, a, a + step);
            cumulative.push(acc);
        }
        TabulatedCdf {
            lo,
            hi,
            step,
            cumulative,
            density: Arc::new(density),
            rule,
        }
    }

    pub fn total(&self) -> f64 {
        *self.cumulative.last().expect("table is never empty")
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.lo {
            return 0.0;
        }
        if x >= self.hi {
            return self.total();
        }
        let k = (((x - self.lo) / self.step) as usize).min(self.cumulative.len() - 2);
        let edge = self.lo + self.step * k as f64;
        self.cumulative[k] + self.rule.integrate(&*self.density, edge, x)
    }
}

impl std::fmt::Debug for TabulatedCdf {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TabulatedCdf")
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .field("panels", &(self.cumulative.len() - 1))
            .finish()
    }
}
