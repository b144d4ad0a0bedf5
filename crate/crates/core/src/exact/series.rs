use serde::{Deserialize, Serialize};

use super::{ExactError, FewerThan};
use crate::distribution::TailDistribution;
use crate::stats::NeumaierSum;

/// Partial sums of `P(B_i)` on the line and two summaries of their growth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SeriesDiagnostics {
    pub i_min: u64,
    pub i_max: u64,
    /// `P(B_i)` for `i` in `i_min..=i_max`.
    pub probabilities: Vec<f64>,
    /// `S(n) = sum_{i=i_min}^{n} P(B_i)`, same indexing.
    pub partial_sums: Vec<f64>,
    /// `S(2n) / S(n)` at the largest `n` with `2n <= i_max`.
    pub growth_ratio: Option<f64>,
    /// Least-squares slope of `ln P(B_i)` on `ln i` over `[i_max/2, i_max]`.
    pub decay_exponent: Option<f64>,
}

/// Evaluates `P(B_i)` for every `i <= i_max` with threshold `k`. Sites share
/// their candidate lists (site `i + 1` adds the source at displacement `i`),
/// so one incremental recursion serves the whole range in `O(i_max * k)`.
pub fn series_diagnostics(p: f64, dist: &TailDistribution, k: u32, i_min: u64, i_max: u64) -> Result<SeriesDiagnostics, ExactError> {
    if !(1 <= i_min && i_min < i_max) {
        return Err(ExactError::Precondition(format!("need 1 <= i_min < i_max, got {i_min}..{i_max}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(ExactError::Precondition(format!("p must lie in [0,1], got {p}")));
    }
    let mut acc = FewerThan::new(k);
    let mut probabilities = Vec::with_capacity((i_max - i_min + 1) as usize);
    for i in 1..=i_max {
        acc.push(p * dist.tail(i - 1));
        if i >= i_min {
            probabilities.push(acc.probability());
        }
    }
    let mut sum = NeumaierSum::default();
    let partial_sums = probabilities
        .iter()
        .map(|&v| {
            sum.add(v);
            sum.value()
        })
        .collect();
    let mut diag = SeriesDiagnostics { i_min, i_max, probabilities, partial_sums, growth_ratio: None, decay_exponent: None };
    diag.growth_ratio = diag.growth_ratio_at(i_max / 2);
    diag.decay_exponent = diag.decay_exponent_over(i_max / 2, i_max);
    Ok(diag)
}

impl SeriesDiagnostics {
    pub fn probability(&self, i: u64) -> Option<f64> {
        self.slot(i).map(|s| self.probabilities[s])
    }

    pub fn partial_sum(&self, n: u64) -> Option<f64> {
        self.slot(n).map(|s| self.partial_sums[s])
    }

    fn slot(&self, i: u64) -> Option<usize> {
        (self.i_min..=self.i_max).contains(&i).then(|| (i - self.i_min) as usize)
    }

    /// `S(2n) / S(n)`, when both ends lie in range and `S(n) > 0`.
    pub fn growth_ratio_at(&self, n: u64) -> Option<f64> {
        let lower = self.partial_sum(n)?;
        let upper = self.partial_sum(2 * n)?;
        (lower > 0.0).then(|| upper / lower)
    }

    /// Log-log regression slope over `lo..=hi` (clipped to the range).
    /// `None` if fewer than two points or any probability is zero.
    pub fn decay_exponent_over(&self, lo: u64, hi: u64) -> Option<f64> {
        let lo = lo.max(self.i_min);
        let hi = hi.min(self.i_max);
        if hi <= lo {
            return None;
        }
        let mut points = Vec::with_capacity((hi - lo + 1) as usize);
        for i in lo..=hi {
            let v = self.probability(i)?;
            if v <= 0.0 {
                return None;
            }
            points.push(((i as f64).ln(), v.ln()));
        }
        let n = points.len() as f64;
        let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
        let my = points.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = points.iter().map(|(x, _)| (x - mx).powi(2)).sum();
        (sxx > 0.0).then(|| sxy / sxx)
    }
}
