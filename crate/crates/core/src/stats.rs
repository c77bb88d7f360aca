//! Binomial tails, interval estimates and log-domain helpers.

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

/// `ln P(Bin(n, p) = k)`.
pub fn binomial_ln_pmf(n: u64, p: f64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if p <= 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if p >= 1.0 {
        return if k == n { 0.0 } else { f64::NEG_INFINITY };
    }
    ln_binomial(n, k) + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p()
}

/// `P(Bin(n, p) < x)` for a real threshold `x` (strict).
pub fn binomial_below(n: u64, p: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let last = (x.ceil() as u64).saturating_sub(1).min(n);
    if (last as f64) >= n as f64 {
        return 1.0;
    }
    sum_pmf(n, p, 0, last)
}

/// `P(Bin(n, p) > x)` for a real threshold `x` (strict).
pub fn binomial_above(n: u64, p: f64, x: f64) -> f64 {
    if x < 0.0 {
        return 1.0;
    }
    let first = x.floor() as u64 + 1;
    if first > n {
        return 0.0;
    }
    sum_pmf(n, p, first, n)
}

fn sum_pmf(n: u64, p: f64, lo: u64, hi: u64) -> f64 {
    let terms: Vec<f64> = (lo..=hi).map(|k| binomial_ln_pmf(n, p, k)).collect();
    log_sum_exp(&terms).exp().min(1.0)
}

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// A rate with its Wilson 95% score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateCi {
    pub rate: f64,
    pub lo: f64,
    pub hi: f64,
}

pub fn wilson(successes: u64, trials: u64) -> RateCi {
    if trials == 0 {
        return RateCi {
            rate: 0.0,
            lo: 0.0,
            hi: 1.0,
        };
    }
    let z = 1.959_963_984_540_054_f64;
    let n = trials as f64;
    let ph = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = (ph + z * z / (2.0 * n)) / denom;
    let half = z * (ph * (1.0 - ph) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    RateCi {
        rate: ph,
        lo: if successes == 0 { 0.0 } else { (center - half).max(0.0) },
        hi: if successes == trials { 1.0 } else { (center + half).min(1.0) },
    }
}

/// Sample mean with a normal-approximation 95% half width.
pub fn mean_ci(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (0.0, f64::INFINITY);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, 1.959_963_984_540_054 * (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn tails_complement() {
        for &x in &[0.0, 2.5, 3.0, 7.9, 20.0] {
            let below = binomial_below(20, 0.3, x);
            let above = binomial_above(20, 0.3, x);
            let at = if x.fract() == 0.0 {
                binomial_ln_pmf(20, 0.3, x as u64).exp()
            } else {
                0.0
            };
            assert_abs_diff_eq!(below + above + at, 1.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(binomial_below(4, 0.5, 1.0), 1.0 / 16.0, epsilon = 1e-15);
        assert_abs_diff_eq!(binomial_above(4, 0.5, 3.0), 1.0 / 16.0, epsilon = 1e-15);
    }

    #[test]
    fn wilson_contains_rate() {
        let ci = wilson(3, 200);
        assert!(ci.lo < 0.015 && ci.hi > 0.015);
        let z = wilson(0, 200);
        assert_eq!(z.lo, 0.0);
        assert!(z.hi > 0.0 && z.hi < 0.03);
    }
}
