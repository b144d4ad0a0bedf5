//! Seed derivation, interval estimates and compensated summation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

/// Confidence level used for every reported interval.
pub const CONFIDENCE: f64 = 0.99;

/// Derives an independent seed for sub-run `index` of a run seeded with
/// `seed` (splitmix64 finaliser over the pair).
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream `stream` of the generator keyed by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Two-sided standard normal quantile for `confidence`.
pub fn z_value(confidence: f64) -> f64 {
    Normal::standard().inverse_cdf(0.5 + confidence / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.low <= x && x <= self.high
    }

    pub fn width(&self) -> f64 {
        self.high - self.low
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.low <= other.high && other.low <= self.high
    }
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> Interval {
    if trials == 0 {
        return Interval { low: 0.0, high: 1.0 };
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z = z_value(confidence);
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z / denom * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    // The bound at an observed extreme is exact; rounding would pull it inside.
    let low = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let high = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    Interval { low, high }
}

/// Sample mean with a normal-approximation interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub ci: Interval,
    pub samples: u64,
}

pub fn mean_estimate(values: &[f64], confidence: f64) -> MeanEstimate {
    let n = values.len();
    if n == 0 {
        return MeanEstimate { mean: f64::NAN, ci: Interval { low: f64::NAN, high: f64::NAN }, samples: 0 };
    }
    let mean = neumaier_sum(values.iter().copied()) / n as f64;
    let half = if n > 1 {
        let var = neumaier_sum(values.iter().map(|v| (v - mean).powi(2))) / (n - 1) as f64;
        z_value(confidence) * (var / n as f64).sqrt()
    } else {
        0.0
    };
    MeanEstimate { mean, ci: Interval { low: mean - half, high: mean + half }, samples: n as u64 }
}

/// Compensated (Neumaier) summation.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = NeumaierSum::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.compensation += (self.sum - t) + v;
        } else {
            self.compensation += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn wilson_reaches_the_ends_at_extreme_counts() {
        assert_eq!(wilson_interval(200, 200, 0.99).high, 1.0);
        assert_eq!(wilson_interval(0, 200, 0.99).low, 0.0);
        let mid = wilson_interval(100, 200, 0.99);
        assert!(mid.low > 0.0 && mid.high < 1.0);
    }

    #[test]
    fn z_for_99_percent() {
        assert!((z_value(0.99) - 2.5758293035489).abs() < 1e-9);
    }

    #[test]
    fn wilson_known_value() {
        // 95%: 8/10 -> (0.4902, 0.9433), the textbook example.
        let ci = wilson_interval(8, 10, 0.95);
        assert!((ci.low - 0.4902).abs() < 1e-4, "{ci:?}");
        assert!((ci.high - 0.9433).abs() < 1e-4, "{ci:?}");
    }

    #[test]
    fn wilson_extremes() {
        let all = wilson_interval(100, 100, CONFIDENCE);
        assert_eq!(all.high, 1.0);
        assert!(all.low > 0.9);
        let none = wilson_interval(0, 100, CONFIDENCE);
        assert_eq!(none.low, 0.0);
    }

    #[test]
    fn wilson_width_scales_with_inverse_root_trials() {
        let base = wilson_interval(30_000, 100_000, CONFIDENCE).width();
        let doubled = wilson_interval(60_000, 200_000, CONFIDENCE).width();
        let quadrupled = wilson_interval(120_000, 400_000, CONFIDENCE).width();
        assert!((doubled / base - std::f64::consts::FRAC_1_SQRT_2).abs() < 0.1 * std::f64::consts::FRAC_1_SQRT_2);
        assert!((quadrupled / base - 0.5).abs() < 0.05);
    }

    #[test]
    fn mixed_seeds_are_distinct() {
        let mut seen = std::collections::HashSet::new();
        for s in 0..4 {
            for i in 0..10_000 {
                assert!(seen.insert(mix_seed(s, i)));
            }
        }
    }

    #[test]
    fn streams_are_independent_and_reproducible() {
        let a: Vec<u64> = (0..4).map(|_| 0).scan(stream_rng(5, 0), |r, _: u64| Some(r.random())).collect();
        let b: Vec<u64> = (0..4).map(|_| 0).scan(stream_rng(5, 0), |r, _: u64| Some(r.random())).collect();
        let c: Vec<u64> = (0..4).map(|_| 0).scan(stream_rng(5, 1), |r, _: u64| Some(r.random())).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let values = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(neumaier_sum(values), 2.0);
    }

    #[test]
    fn mean_estimate_basic() {
        let m = mean_estimate(&[1.0, 2.0, 3.0, 4.0], 0.99);
        assert_eq!(m.mean, 2.5);
        assert!(m.ci.contains(2.5));
        assert_eq!(m.samples, 4);
    }
}
