use serde::{Deserialize, Serialize};

use super::{coverage_field, realize, CoverageField, LatticeConfig, LatticeError, Realization, Site};
use crate::exec::map_indexed;
use crate::stats::{mix_seed, wilson_interval, Interval, CONFIDENCE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SiteEstimate {
    pub site: Site,
    pub under_covered: u64,
    pub trials: u64,
    pub frequency: f64,
    pub ci: Interval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct UnderCoverageEstimate {
    pub sites: Vec<SiteEstimate>,
    /// Radii clamped to the simulated window, summed over trials.
    pub clamp_count: u64,
}

/// What one trial hands back to the aggregator.
pub struct TrialOutcome<T> {
    pub value: T,
    pub clamp_count: u64,
}

/// Runs `trials` independent realizations of `config`, trial `t` seeded
/// with `mix_seed(config.seed, t)`, and applies `observe` to each coverage
/// field. Results come back in trial order whatever `workers` is.
pub fn run_trials<T, F>(config: &LatticeConfig, trials: u64, workers: Option<usize>, observe: F) -> Result<Vec<TrialOutcome<T>>, LatticeError>
where
    T: Send,
    F: Fn(u64, &Realization, &CoverageField) -> T + Sync + Send,
{
    config.validate()?;
    let outcomes = map_indexed(trials, workers, |t| {
        let trial_config = LatticeConfig { seed: mix_seed(config.seed, t), ..config.clone() };
        let realization = realize(&trial_config)?;
        let field = coverage_field(&realization);
        Ok(TrialOutcome { value: observe(t, &realization, &field), clamp_count: realization.clamp_count() })
    });
    outcomes.into_iter().collect()
}

/// Frequency with which each site has fewer than `config.k` covers, with a
/// 99% Wilson interval.
pub fn estimate_under_coverage(
    config: &LatticeConfig,
    sites: &[Site],
    trials: u64,
    workers: Option<usize>,
) -> Result<UnderCoverageEstimate, LatticeError> {
    if trials == 0 {
        return Err(LatticeError::InvalidConfig("trials must be at least 1".into()));
    }
    if let Some(&bad) = sites.iter().find(|&&s| !config.contains_site(s)) {
        return Err(LatticeError::SiteOutsideWindow(bad));
    }
    let k = config.k;
    let outcomes = run_trials(config, trials, workers, |_, _, field| {
        sites.iter().map(|&s| field.under_covered(s, k).unwrap_or(false)).collect::<Vec<bool>>()
    })?;

    let mut hits = vec![0u64; sites.len()];
    let mut clamp_count = 0u64;
    for outcome in &outcomes {
        clamp_count += outcome.clamp_count;
        for (h, &under) in hits.iter_mut().zip(&outcome.value) {
            *h += under as u64;
        }
    }
    let sites = sites
        .iter()
        .zip(hits)
        .map(|(&site, under_covered)| SiteEstimate {
            site,
            under_covered,
            trials,
            frequency: under_covered as f64 / trials as f64,
            ci: wilson_interval(under_covered, trials, CONFIDENCE),
        })
        .collect();
    Ok(UnderCoverageEstimate { sites, clamp_count })
}
