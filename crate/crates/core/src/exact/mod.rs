//! Exact under-coverage probabilities for the firework process.
//!
//! A site `x` has fewer than `k` covers exactly when a Poisson-binomial sum
//! over its candidate sources stays below `k`; the source at displacement
//! `t` covers `x` with probability `p G(t)`. Closed forms exist for `k = 1`
//! (a product) and `k = 2` on the line; everything else goes through the
//! [`FewerThan`] dynamic programme. [`enumeration_oracle`] checks all of
//! them by brute force on small queries.

mod one_dim;
mod oracle;
mod poisson_binomial;
mod series;
mod two_dim;

use serde::{Deserialize, Serialize};

use crate::distribution::TailDistribution;
use crate::lattice::{Dimension, Site};

pub use one_dim::{uncovered_prob_1d, undercovered_prob_1d, undercovered_prob_1d_closed_form};
pub use oracle::enumeration_oracle;
pub use poisson_binomial::{poisson_binomial_fewer_than, FewerThan};
pub use series::{series_diagnostics, SeriesDiagnostics};
pub use two_dim::{shell_multiplicity_2d, uncovered_prob_2d, undercovered_prob_2d_exact, undercovered_prob_2d_paper};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExactError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("division by zero: g_p({t}) = 0 because p * G({t}) = 1")]
    DivisionByZero { t: u64 },
    #[error("enumeration bound exceeded: {candidates} candidate sources with {states} states each")]
    EnumerationBound { candidates: usize, states: u64 },
    #[error("radius cap {cap} is lossy: G({next}) > 0 while displacements up to {needed} matter", next = cap + 1)]
    LossyTruncation { cap: u64, needed: u64 },
}

/// A single-site probability question.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExactQuery {
    pub site: Site,
    pub p: f64,
    pub k: u32,
    pub dist: TailDistribution,
    pub include_initiators: bool,
}

impl ExactQuery {
    pub fn new(site: Site, p: f64, k: u32, dist: TailDistribution) -> Self {
        ExactQuery { site, p, k, dist, include_initiators: false }
    }

    pub fn dimension(&self) -> Dimension {
        self.site.dimension()
    }

    pub fn validate(&self) -> Result<(), ExactError> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(ExactError::Precondition(format!("p must lie in [0,1], got {}", self.p)));
        }
        let ok = match self.site {
            Site::Line(i) => i >= 1,
            Site::Grid(i, j) => i >= 1 && j >= 1,
        };
        if !ok {
            return Err(ExactError::Precondition(format!("site {} must have coordinates >= 1", self.site)));
        }
        Ok(())
    }

    /// Covering probabilities of the two initiators, `[G(m + 1), G(m)]`
    /// where `m` is the largest coordinate of the site.
    fn initiator_probs(&self) -> Option<[f64; 2]> {
        let m = match self.site {
            Site::Line(i) => i,
            Site::Grid(i, j) => i.max(j),
        } as u64;
        self.include_initiators.then(|| [self.dist.tail(m + 1), self.dist.tail(m)])
    }
}

/// Sum of `mult * ln(1 - q)` terms with an exact-zero short circuit.
#[derive(Debug, Default)]
struct LogProduct {
    log: f64,
    zero: bool,
}

impl LogProduct {
    /// Multiplies by `(1 - q)^mult`, with `ln_1p` for accuracy at small `q`.
    fn mul_complement(&mut self, q: f64, mult: u64) {
        if mult == 0 || q == 0.0 {
            return;
        }
        if q >= 1.0 {
            self.zero = true;
        } else {
            self.log += mult as f64 * (-q).ln_1p();
        }
    }

    fn value(&self) -> f64 {
        if self.zero {
            0.0
        } else {
            self.log.exp()
        }
    }
}
