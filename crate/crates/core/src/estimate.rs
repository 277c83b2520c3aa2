//! Sample means and ratio-of-means estimators with standard errors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    pub value: f64,
    /// Zero when `n_samples < 2` (no spread can be measured).
    pub std_error: f64,
    pub n_samples: usize,
}

impl RatioEstimate {
    /// Distance from `target` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.value - target) / self.std_error
    }

    pub fn within(&self, target: f64, sigmas: f64) -> bool {
        (self.value - target).abs() <= sigmas * self.std_error
    }
}

/// Mean of `samples` with the standard error of the mean.
pub fn mean_estimate(samples: &[f64]) -> Result<RatioEstimate> {
    let n = samples.len();
    if n == 0 {
        return Err(Error::Estimation("no samples".into()));
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let std_error = if n > 1 {
        let ss: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum();
        (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt()
    } else {
        0.0
    };
    Ok(RatioEstimate { value: mean, std_error, n_samples: n })
}

/// Ratio of the means of paired samples, `mean(num) / mean(den)`.
///
/// The standard error is the first-order (delta-method) propagation of the
/// per-sample residuals `num_i - R den_i`, which accounts for the covariance
/// between numerator and denominator.
pub fn ratio_of_means(num: &[f64], den: &[f64]) -> Result<RatioEstimate> {
    if num.len() != den.len() {
        return Err(Error::Estimation(format!(
            "paired samples differ in length ({} vs {})",
            num.len(),
            den.len()
        )));
    }
    let n = num.len();
    if n == 0 {
        return Err(Error::Estimation("no samples".into()));
    }
    let num_mean = num.iter().sum::<f64>() / n as f64;
    let den_mean = den.iter().sum::<f64>() / n as f64;
    if den_mean == 0.0 {
        return Err(Error::Estimation("denominator mean is zero".into()));
    }
    let ratio = num_mean / den_mean;
    let std_error = if n > 1 {
        let ss: f64 = num
            .iter()
            .zip(den)
            .map(|(a, b)| {
                let r = a - ratio * b;
                r * r
            })
            .sum();
        (ss / (n - 1) as f64).sqrt() / den_mean / (n as f64).sqrt()
    } else {
        0.0
    };
    Ok(RatioEstimate { value: ratio, std_error, n_samples: n })
}

/// `na / nb` with first-order Poisson error `(na/nb) sqrt(1/na + 1/nb)`.
pub fn poisson_ratio(na: u64, nb: u64) -> Result<RatioEstimate> {
    if nb == 0 {
        return Err(Error::Estimation("zero denominator count".into()));
    }
    let (a, b) = (na as f64, nb as f64);
    let value = a / b;
    let std_error = if na == 0 { 0.0 } else { value * (1.0 / a + 1.0 / b).sqrt() };
    Ok(RatioEstimate { value, std_error, n_samples: 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn mean_and_standard_error() {
        let e = mean_estimate(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(e.value, 2.5);
        // sample sd = sqrt(5/3), se = sd / 2
        assert_abs_diff_eq!(e.std_error, (5.0f64 / 3.0).sqrt() / 2.0, epsilon = 1e-15);
        assert_eq!(e.n_samples, 4);
        assert_eq!(mean_estimate(&[7.0]).unwrap().std_error, 0.0);
        assert!(mean_estimate(&[]).is_err());
    }

    #[test]
    fn ratio_with_unit_denominator_is_the_plain_mean() {
        let x = [0.81, 0.83, 0.79, 0.84, 0.80];
        let ones = [1.0; 5];
        assert_eq!(ratio_of_means(&x, &ones).unwrap(), mean_estimate(&x).unwrap());
    }

    #[test]
    fn ratio_errors() {
        assert!(ratio_of_means(&[1.0], &[1.0, 2.0]).is_err());
        assert!(ratio_of_means(&[1.0, 2.0], &[0.0, 0.0]).is_err());
        assert!(ratio_of_means(&[], &[]).is_err());
    }

    #[test]
    fn perfectly_proportional_pairs_have_no_ratio_error() {
        let den = [1.0, 2.0, 3.0, 5.0];
        let num: Vec<f64> = den.iter().map(|d| 0.25 * d).collect();
        let e = ratio_of_means(&num, &den).unwrap();
        assert_eq!(e.value, 0.25);
        assert_abs_diff_eq!(e.std_error, 0.0, epsilon = 1e-16);
    }

    #[test]
    fn poisson_cross_check() {
        let e = poisson_ratio(8100, 10000).unwrap();
        assert_abs_diff_eq!(e.value, 0.81, epsilon = 1e-15);
        assert_abs_diff_eq!(e.std_error, 0.81 * (1.0 / 8100.0 + 1.0 / 10000.0f64).sqrt(), epsilon = 1e-15);
        assert!(poisson_ratio(1, 0).is_err());
    }

    proptest! {
        #[test]
        fn ratio_is_scale_invariant(
            pairs in proptest::collection::vec((0.1..10.0f64, 0.1..10.0f64), 2..50), k in 0.1..10.0f64,
        ) {
            let (num, den): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let base = ratio_of_means(&num, &den).unwrap();
            let scaled: Vec<f64> = den.iter().map(|d| d * k).collect();
            let s = ratio_of_means(&num, &scaled).unwrap();
            prop_assert!((s.value * k - base.value).abs() <= 1e-9 * base.value.abs().max(1.0));
            prop_assert!((s.std_error * k - base.std_error).abs() <= 1e-9 * base.std_error.max(1.0));
        }
    }
}
