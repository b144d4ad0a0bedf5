//! Firework and reverse-firework processes on `N` and `N^2`.
//!
//! A [`Realization`] holds the Bernoulli activation of every simulated site
//! and the radius of every open one. [`firework_counts`] and
//! [`reverse_membership`] turn it into a [`CoverageField`] over the reported
//! window, and [`estimate_under_coverage`] aggregates many seeded trials.

mod estimate;
mod field;
mod firework;
mod reverse;

use std::fmt;

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::TailDistribution;
use crate::stats::stream_rng;

pub use estimate::{estimate_under_coverage, run_trials, SiteEstimate, TrialOutcome, UnderCoverageEstimate};
pub use field::{last_under_covered, CoverageField, FieldKind, Region};
pub use firework::firework_counts;
pub use reverse::reverse_membership;

/// Marker for a closed site in [`Realization`] storage.
const CLOSED: u32 = u32::MAX;

/// Largest simulated site count (all axes together) a realization may hold.
pub const MAX_SITES: u64 = u32::MAX as u64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LatticeError {
    #[error("invalid lattice configuration: {0}")]
    InvalidConfig(String),
    #[error("simulated window of {extent} sites per axis in {dimension}D exceeds the addressable size")]
    WindowOverflow { extent: u128, dimension: u8 },
    #[error("site {0} lies outside the reported window")]
    SiteOutsideWindow(Site),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Dimension {
    One,
    Two,
}

impl Dimension {
    pub fn get(self) -> u8 {
        match self {
            Dimension::One => 1,
            Dimension::Two => 2,
        }
    }
}

impl TryFrom<u8> for Dimension {
    type Error = String;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        match value {
            1 => Ok(Dimension::One),
            2 => Ok(Dimension::Two),
            other => Err(format!("dimension must be 1 or 2, got {other}")),
        }
    }
}

impl From<Dimension> for u8 {
    fn from(d: Dimension) -> u8 {
        d.get()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Firework,
    Reverse,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Firework => "firework",
            Model::Reverse => "reverse",
        })
    }
}

/// A lattice site: `x` on the line, `(i, j)` on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Site {
    Line(i64),
    Grid(i64, i64),
}

impl Site {
    pub fn dimension(self) -> Dimension {
        match self {
            Site::Line(_) => Dimension::One,
            Site::Grid(..) => Dimension::Two,
        }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Line(x) => write!(f, "{x}"),
            Site::Grid(i, j) => write!(f, "({i},{j})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LatticeConfig {
    pub dimension: Dimension,
    pub model: Model,
    pub p: f64,
    /// Scepticism threshold: a site needs `k` distinct sources.
    pub k: u32,
    /// Reported sites per axis (`1..=n`).
    pub n: u64,
    /// Reverse model only: the simulation extends to `n * cushion` per axis.
    pub cushion: u64,
    /// Adds the always-open initiators at `-1` and `0`.
    pub include_initiators: bool,
    pub dist: TailDistribution,
    pub seed: u64,
}

impl LatticeConfig {
    pub fn new(dimension: Dimension, model: Model, dist: TailDistribution) -> Self {
        LatticeConfig { dimension, model, p: 0.5, k: 2, n: 100, cushion: 10, include_initiators: false, dist, seed: 0 }
    }

    pub fn validate(&self) -> Result<(), LatticeError> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(LatticeError::InvalidConfig(format!("p must lie in [0,1], got {}", self.p)));
        }
        if self.n == 0 {
            return Err(LatticeError::InvalidConfig("n must be at least 1".into()));
        }
        if self.cushion == 0 {
            return Err(LatticeError::InvalidConfig("cushion must be at least 1".into()));
        }
        self.simulated_extent().map(|_| ())
    }

    /// Simulated sites per axis.
    pub fn simulated_extent(&self) -> Result<u64, LatticeError> {
        let dimension = self.dimension.get();
        let extent = match self.model {
            Model::Firework => self.n as u128,
            Model::Reverse => self.n as u128 * self.cushion as u128,
        };
        let total = extent.checked_pow(dimension as u32);
        match total {
            Some(t) if t <= MAX_SITES as u128 && extent < (u32::MAX - 2) as u128 => Ok(extent as u64),
            _ => Err(LatticeError::WindowOverflow { extent, dimension }),
        }
    }

    /// Lowest reported coordinate per axis. The reverse model reports the
    /// origin too when initiators are present, since its region lives on
    /// the closed half-line.
    pub fn origin(&self) -> i64 {
        match (self.model, self.include_initiators) {
            (Model::Reverse, true) => 0,
            _ => 1,
        }
    }

    pub fn contains_site(&self, site: Site) -> bool {
        let lo = self.origin();
        let hi = self.n as i64;
        match (self.dimension, site) {
            (Dimension::One, Site::Line(x)) => (lo..=hi).contains(&x),
            (Dimension::Two, Site::Grid(i, j)) => (lo..=hi).contains(&i) && (lo..=hi).contains(&j),
            _ => false,
        }
    }
}

/// One sampled configuration of activation bits and radii.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    config: LatticeConfig,
    extent: usize,
    /// Row-major over sites `1..=extent` per axis; `CLOSED` marks closed sites.
    radii: Vec<u32>,
    initiators: Option<[u32; 2]>,
    clamped: u64,
}

/// Samples a realization. Every site consumes two uniforms from stream 0
/// (activation, then radius) whether or not it is open, so realizations at
/// different `p` with the same seed are coupled. Initiator radii come from
/// stream 1 and do not perturb the lattice draws.
pub fn realize(config: &LatticeConfig) -> Result<Realization, LatticeError> {
    config.validate()?;
    let extent = config.simulated_extent()? as usize;
    let sites = extent.pow(config.dimension.get() as u32);
    // Radii beyond extent + 1 reach past every simulated site in either
    // direction, so nothing observable is lost by clamping there.
    let cap = extent as u64 + 1;
    let mut clamped = 0u64;
    let mut clamp = |r: u64| -> u32 {
        if r > cap {
            clamped += 1;
            cap as u32
        } else {
            r as u32
        }
    };

    let mut rng = stream_rng(config.seed, 0);
    let mut radii = Vec::with_capacity(sites);
    for _ in 0..sites {
        let activation: f64 = rng.random();
        let u: f64 = rng.sample(Open01);
        if activation < config.p {
            radii.push(clamp(config.dist.quantile(u)));
        } else {
            radii.push(CLOSED);
        }
    }

    let initiators = if config.include_initiators {
        let mut rng = stream_rng(config.seed, 1);
        let first = clamp(config.dist.sample(&mut rng));
        let second = clamp(config.dist.sample(&mut rng));
        Some([first, second])
    } else {
        None
    };

    Ok(Realization { config: config.clone(), extent, radii, initiators, clamped })
}

impl Realization {
    pub fn config(&self) -> &LatticeConfig {
        &self.config
    }

    /// Simulated sites per axis.
    pub fn extent(&self) -> usize {
        self.extent
    }

    /// Number of radii that were clamped to `extent + 1`.
    pub fn clamp_count(&self) -> u64 {
        self.clamped
    }

    /// Radii of the initiators at `-1` and `0`, when present.
    pub fn initiator_radii(&self) -> Option<[u32; 2]> {
        self.initiators
    }

    fn index(&self, site: Site) -> Option<usize> {
        let e = self.extent as i64;
        match site {
            Site::Line(x) if (1..=e).contains(&x) => Some((x - 1) as usize),
            Site::Grid(i, j) if (1..=e).contains(&i) && (1..=e).contains(&j) => Some(((i - 1) * e + (j - 1)) as usize),
            _ => None,
        }
    }

    /// Radius at `site` if it is open; initiators included.
    pub fn radius(&self, site: Site) -> Option<u32> {
        let initiator = |c: i64| -> Option<u32> { self.initiators.map(|r| r[(c + 1) as usize]) };
        match site {
            Site::Line(x) if x == -1 || x == 0 => initiator(x),
            Site::Grid(i, j) if i == j && (i == -1 || i == 0) => initiator(i),
            _ => self.index(site).map(|ix| self.radii[ix]).filter(|&r| r != CLOSED),
        }
    }

    pub fn is_open(&self, site: Site) -> bool {
        self.radius(site).is_some()
    }

    /// Open lattice sites (initiators excluded).
    pub fn open_count(&self) -> usize {
        self.radii.iter().filter(|&&r| r != CLOSED).count()
    }

    pub(crate) fn raw(&self) -> &[u32] {
        &self.radii
    }

    /// Builds a realization from explicit radii. `radii[idx]` is `None` for a
    /// closed site; layout is row-major over `1..=extent` per axis.
    pub fn from_parts(config: LatticeConfig, radii: Vec<Option<u32>>, initiators: Option<[u32; 2]>) -> Result<Self, LatticeError> {
        config.validate()?;
        let extent = config.simulated_extent()? as usize;
        if radii.len() != extent.pow(config.dimension.get() as u32) {
            return Err(LatticeError::InvalidConfig(format!(
                "expected {} site entries, got {}",
                extent.pow(config.dimension.get() as u32),
                radii.len()
            )));
        }
        if initiators.is_some() != config.include_initiators {
            return Err(LatticeError::InvalidConfig("initiator radii must match include_initiators".into()));
        }
        let radii = radii.into_iter().map(|r| r.map_or(CLOSED, |v| v.min(CLOSED - 1))).collect();
        Ok(Realization { config, extent, radii, initiators, clamped: 0 })
    }
}

/// Computes the coverage field appropriate to the configured model:
/// firework counts, or reverse membership at the configured `k`.
pub fn coverage_field(realization: &Realization) -> CoverageField {
    match realization.config.model {
        Model::Firework => firework_counts(realization),
        Model::Reverse => reverse_membership(realization, realization.config.k),
    }
}
