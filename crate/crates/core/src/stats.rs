//! Small statistical helpers for Monte-Carlo checks.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ChiSquared, ContinuousCDF};

/// Empirical frequency `successes / trials` with its binomial standard error
/// under a reference probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinomialCheck {
    pub successes: u64,
    pub trials: u64,
    pub expected_p: f64,
    pub frequency: f64,
    pub sigma: f64,
    /// `(frequency - expected_p) / sigma`; 0 when `sigma` is 0 and the
    /// frequency matches exactly.
    pub z: f64,
}

impl BinomialCheck {
    pub fn new(successes: u64, trials: u64, expected_p: f64) -> Self {
        assert!(trials > 0, "binomial check needs at least one trial");
        let frequency = successes as f64 / trials as f64;
        let sigma = (expected_p * (1.0 - expected_p) / trials as f64).sqrt();
        let diff = frequency - expected_p;
        let z = if sigma > 0.0 {
            diff / sigma
        } else if diff.abs() < 1e-15 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        };
        Self {
            successes,
            trials,
            expected_p,
            frequency,
            sigma,
            z,
        }
    }

    pub fn within(&self, k_sigma: f64) -> bool {
        self.z.abs() <= k_sigma
    }

    /// One-sided: frequency does not exceed the reference by more than `k_sigma`.
    pub fn not_above(&self, k_sigma: f64) -> bool {
        self.z <= k_sigma
    }
}

/// Two-sided Clopper–Pearson interval for a binomial proportion.
pub fn clopper_pearson(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    assert!(trials > 0 && successes <= trials);
    let alpha = 1.0 - confidence;
    let (k, n) = (successes as f64, trials as f64);
    let lower = if successes == 0 {
        0.0
    } else {
        Beta::new(k, n - k + 1.0)
            .expect("valid beta")
            .inverse_cdf(alpha / 2.0)
    };
    let upper = if successes == trials {
        1.0
    } else {
        Beta::new(k + 1.0, n - k)
            .expect("valid beta")
            .inverse_cdf(1.0 - alpha / 2.0)
    };
    (lower, upper)
}

/// Upper-tail probability of a χ² statistic.
pub fn chi_squared_p_value(statistic: f64, dof: u64) -> f64 {
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    1.0 - dist.cdf(statistic)
}

/// Pearson χ² statistic of observed counts against expected counts.
pub fn chi_squared_statistic(observed: &[u64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum()
}

/// χ² test of homogeneity between two samples over the same categories.
/// Returns `(statistic, p_value)`. Categories empty in both samples are dropped.
pub fn chi_squared_homogeneity(a: &[u64], b: &[u64]) -> (f64, f64) {
    assert_eq!(a.len(), b.len());
    let total_a: u64 = a.iter().sum();
    let total_b: u64 = b.iter().sum();
    let total = (total_a + total_b) as f64;
    let mut stat = 0.0;
    let mut categories = 0;
    for (&x, &y) in a.iter().zip(b) {
        let col = (x + y) as f64;
        if col == 0.0 {
            continue;
        }
        categories += 1;
        let ea = col * total_a as f64 / total;
        let eb = col * total_b as f64 / total;
        stat += (x as f64 - ea).powi(2) / ea + (y as f64 - eb).powi(2) / eb;
    }
    let dof = (categories as u64).saturating_sub(1).max(1);
    (stat, chi_squared_p_value(stat, dof))
}

/// Sample mean and unbiased variance.
pub fn mean_variance(samples: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = samples.into_iter().collect();
    let n = v.len() as f64;
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 {
        v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clopper_pearson_known_values() {
        // 0/10 at 95%: upper = 1 - 0.025^(1/10)
        let (lo, hi) = clopper_pearson(0, 10, 0.95);
        assert_eq!(lo, 0.0);
        assert!((hi - (1.0 - 0.025f64.powf(0.1))).abs() < 1e-6);
        let (lo, hi) = clopper_pearson(10, 10, 0.95);
        assert!((lo - 0.025f64.powf(0.1)).abs() < 1e-6);
        assert_eq!(hi, 1.0);
        let (lo, hi) = clopper_pearson(50, 100, 0.95);
        assert!(lo < 0.5 && hi > 0.5);
        assert!((lo - 0.398_321_1).abs() < 1e-4 && (hi - 0.601_678_9).abs() < 1e-4);
    }

    #[test]
    fn chi_squared_tail() {
        // P(χ²₁ > 3.841) ≈ 0.05
        assert!((chi_squared_p_value(3.841_458_8, 1) - 0.05).abs() < 1e-6);
    }

    #[test]
    fn homogeneity_identical_samples() {
        let (stat, p) = chi_squared_homogeneity(&[10, 20, 30], &[10, 20, 30]);
        assert!(stat.abs() < 1e-12);
        assert!(p > 0.99);
        let (_, p) = chi_squared_homogeneity(&[100, 0], &[0, 100]);
        assert!(p < 1e-6);
    }

    #[test]
    fn binomial_check_z() {
        let c = BinomialCheck::new(60, 100, 0.5);
        assert!((c.z - 2.0).abs() < 1e-12);
        assert!(c.within(2.0) && !c.within(1.9));
        assert!(BinomialCheck::new(5, 5, 1.0).within(0.0));
        assert!(!BinomialCheck::new(4, 5, 1.0).within(3.0));
    }
}
