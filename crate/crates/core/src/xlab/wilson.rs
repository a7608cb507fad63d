//! Wilson score interval for a binomial proportion.

use statrs::distribution::{ContinuousCDF, Normal};

/// Two-sided standard normal quantile for `confidence` in `(0, 1)`.
pub fn z_value(confidence: f64) -> f64 {
    assert!(confidence > 0.0 && confidence < 1.0, "confidence must be in (0, 1)");
    Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(0.5 + confidence / 2.0)
}

/// Wilson interval `(low, high)` for `successes` out of `trials`.
/// Always contains `successes / trials`; pinned to 0 or 1 at the extremes.
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    assert!(trials > 0 && successes <= trials);
    let z = z_value(confidence);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let low = if successes == 0 { 0.0 } else { (center - half).clamp(0.0, p) };
    let high = if successes == trials { 1.0 } else { (center + half).clamp(p, 1.0) };
    (low, high)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_at_95() {
        assert!((z_value(0.95) - 1.959_963_984_540_054).abs() < 1e-9);
    }

    #[test]
    fn reference_values() {
        // 40/100 at 95%: 0.3094013 .. 0.4979974
        let (lo, hi) = wilson_interval(40, 100, 0.95);
        assert!((lo - 0.309_401_3).abs() < 1e-6, "{lo}");
        assert!((hi - 0.497_997_4).abs() < 1e-6, "{hi}");
    }

    #[test]
    fn extremes() {
        let (lo, hi) = wilson_interval(0, 1, 0.95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.7 && hi < 1.0);
        let (lo, hi) = wilson_interval(1, 1, 0.95);
        assert_eq!(hi, 1.0);
        assert!(lo > 0.0 && lo < 0.3);
        let (lo, hi) = wilson_interval(0, 10_000, 0.95);
        assert_eq!(lo, 0.0);
        assert!(hi < 5e-4);
    }

    #[test]
    fn contains_estimate() {
        for n in [1u64, 2, 7, 50, 999] {
            for s in 0..=n {
                let (lo, hi) = wilson_interval(s, n, 0.95);
                let p = s as f64 / n as f64;
                assert!(lo <= p && p <= hi && 0.0 <= lo && hi <= 1.0);
            }
        }
    }
}
