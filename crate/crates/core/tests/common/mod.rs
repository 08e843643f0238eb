//! Test-only oracles, deliberately independent of the library's quadrature.
#![allow(dead_code)]

/// Adaptive Simpson with Richardson correction.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    // split first so narrow features cannot hide between the initial nodes
    let pieces = 64;
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|k| {
            let lo = a + h * k as f64;
            let hi = lo + h;
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let whole = h / 6.0 * (fa + 4.0 * fm + fb);
            rec(f, lo, hi, fa, fm, fb, whole, tol / pieces as f64, 40)
        })
        .sum()
}

/// CDF tabulated with adaptive Simpson on a fine grid, linearly interpolated.
pub struct SimpsonCdf {
    lo: f64,
    step: f64,
    table: Vec<f64>,
}

impl SimpsonCdf {
    pub fn new<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, cells: usize) -> Self {
        let step = (hi - lo) / cells as f64;
        let mut table = vec![0.0];
        let mut acc = 0.0;
        for k in 0..cells {
            let a = lo + step * k as f64;
            acc += simpson(&f, a, a + step, 1e-13);
            table.push(acc);
        }
        SimpsonCdf { lo, step, table }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let pos = (x - self.lo) / self.step;
        if pos <= 0.0 {
            return 0.0;
        }
        let k = pos.floor() as usize;
        if k + 1 >= self.table.len() {
            return *self.table.last().unwrap();
        }
        let frac = pos - k as f64;
        self.table[k] + frac * (self.table[k + 1] - self.table[k])
    }

    /// Quantile by bisection on the interpolated table.
    pub fn quantile(&self, u: f64) -> f64 {
        let (mut a, mut b) = (self.lo, self.lo + self.step * (self.table.len() - 1) as f64);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if self.eval(m) < u {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn variance(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() as f64 - 1.0)
}

/// Least-squares slope of log(y) against log(x).
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = mean(&lx);
    let my = mean(&ly);
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    num / den
}

#[test]
fn simpson_oracle_is_sound() {
    let v = simpson(&|x: f64| (-x * x).exp(), -10.0, 10.0, 1e-13);
    assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-12);
}
