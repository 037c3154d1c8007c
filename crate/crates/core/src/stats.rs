//! Estimates with standard errors and 95% intervals.

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub ci95: (f64, f64),
    pub samples: u64,
    pub seed: u64,
    /// Set when the value was computed exactly.
    pub exact: Option<BigRational>,
}

impl Estimate {
    pub fn exact(value: BigRational, samples: u64) -> Self {
        let v = ratio_to_f64(&value);
        Self {
            value: v,
            stderr: 0.0,
            ci95: (v, v),
            samples,
            seed: 0,
            exact: Some(value),
        }
    }

    /// Bernoulli proportion with a Wilson interval.
    ///
    /// At 0 or `samples` successes the plug-in standard error vanishes; the
    /// Wilson half-width divided by the normal quantile is reported instead.
    pub fn proportion(successes: u64, samples: u64, seed: u64) -> Self {
        assert!(samples > 0 && successes <= samples);
        let n = samples as f64;
        let p = successes as f64 / n;
        let ci95 = wilson(successes, samples, Z95);
        let stderr = if successes == 0 || successes == samples {
            (ci95.1 - ci95.0) / (2.0 * Z95)
        } else {
            (p * (1.0 - p) / n).sqrt()
        };
        Self {
            value: p,
            stderr,
            ci95,
            samples,
            seed,
            exact: None,
        }
    }

    /// Sample mean of values in `[0, 1]` given their sum and sum of squares.
    pub fn mean_of_unit(sum: f64, sum_sq: f64, samples: u64, seed: u64) -> Self {
        assert!(samples > 0);
        let n = samples as f64;
        let mean = sum / n;
        let var = if samples > 1 {
            ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.25
        };
        // Never report zero spread for a sampled value.
        let stderr = (var / n).sqrt().max(0.5 / n);
        let half = Z95 * stderr;
        Self {
            value: mean,
            stderr,
            ci95: ((mean - half).max(0.0), (mean + half).min(1.0)),
            samples,
            seed,
            exact: None,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 {
        0.0
    } else {
        (centre - half).max(0.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (lo, hi)
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_known_values() {
        // 50/100: centre 0.5, half-width 0.0961 (textbook value).
        let (lo, hi) = wilson(50, 100, Z95);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
        let (lo, hi) = wilson(10, 10, Z95);
        assert_eq!(hi, 1.0);
        assert!(lo > 0.65 && lo < 0.75);
        assert_eq!(wilson(0, 10, Z95).0, 0.0);
    }

    #[test]
    fn proportion_never_has_zero_stderr() {
        let e = Estimate::proportion(1000, 1000, 1);
        assert_eq!(e.value, 1.0);
        assert!(e.stderr > 0.0);
        assert_eq!(e.ci95.1, 1.0);
        let e = Estimate::proportion(0, 1000, 1);
        assert!(e.stderr > 0.0);
    }

    #[test]
    fn exact_collapses_interval() {
        let e = Estimate::exact(BigRational::new(3.into(), 7.into()), 1);
        assert_eq!(e.stderr, 0.0);
        assert_eq!(e.ci95, (e.value, e.value));
        assert!((e.value - 3.0 / 7.0).abs() < 1e-15);
    }
}
