//! Reproducible experiments: a serialisable [`ExperimentSpec`], the runners
//! that turn it into an [`ExperimentResult`], and CSV/JSON/SVG emitters.
//!
//! Everything random is derived from `spec.seed`, and the worker count never
//! enters the spec, so a spec echo reproduces its outputs byte for byte.

mod emit;
mod run;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::continuum::{ContinuousRadius, ContinuumError, ContinuumTrial};
use crate::distribution::TailDistribution;
use crate::exact::ExactError;
use crate::lattice::{Dimension, LatticeError, Model, Site};

pub use emit::{csv_header, to_csv, to_json, to_svg, write_outputs, OutputFormats};
pub use run::run;

/// Version stamped into every result.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Tolerance for disagreement between exact methods on the same query.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Continuum(#[from] ContinuumError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl ExperimentError {
    /// Process exit code: 2 for invalid input, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Io { .. } => 4,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Subcommand {
    Exact,
    Simulate,
    Scan,
    Diagnose,
    Continuum,
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Subcommand::Exact => "exact",
            Subcommand::Simulate => "simulate",
            Subcommand::Scan => "scan",
            Subcommand::Diagnose => "diagnose",
            Subcommand::Continuum => "continuum",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ExactMethod {
    ClosedForm,
    Dp,
    PaperEq11,
    Oracle,
}

impl ExactMethod {
    pub fn name(self) -> &'static str {
        match self {
            ExactMethod::ClosedForm => "closedForm",
            ExactMethod::Dp => "dp",
            ExactMethod::PaperEq11 => "paperEq11",
            ExactMethod::Oracle => "oracle",
        }
    }
}

impl fmt::Display for ExactMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExactMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [ExactMethod::ClosedForm, ExactMethod::Dp, ExactMethod::PaperEq11, ExactMethod::Oracle]
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method `{s}` (expected closedForm, dp, paperEq11 or oracle)"))
    }
}

/// Per-grid-point statistic of a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ScanStat {
    /// Mean of `lastUnderCovered / n` (0 when nothing is under-covered).
    LastUnderCovered,
    /// Mean share of window sites from `from` on with fewer than `k` covers.
    DeficientFraction,
    /// One minus the deficient fraction.
    MembershipFraction,
    /// Membership share along the grid diagonal from `from` on.
    DiagonalMembership,
    /// Exact `S(2m)/S(m)` over `from..=n`.
    GrowthRatio,
}

impl ScanStat {
    pub fn name(self) -> &'static str {
        match self {
            ScanStat::LastUnderCovered => "lastUnderCovered",
            ScanStat::DeficientFraction => "deficientFraction",
            ScanStat::MembershipFraction => "membershipFraction",
            ScanStat::DiagonalMembership => "diagonalMembership",
            ScanStat::GrowthRatio => "growthRatio",
        }
    }
}

impl FromStr for ScanStat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            ScanStat::LastUnderCovered,
            ScanStat::DeficientFraction,
            ScanStat::MembershipFraction,
            ScanStat::DiagonalMembership,
            ScanStat::GrowthRatio,
        ]
        .into_iter()
        .find(|m| m.name() == s)
        .ok_or_else(|| format!("unknown statistic `{s}`"))
    }
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentSpec {
    pub subcommand: Subcommand,
    pub dimension: Dimension,
    pub model: Model,
    pub dist: TailDistribution,
    pub p: f64,
    pub k: u32,
    pub n: u64,
    pub cushion: u64,
    pub trials: u64,
    pub sites: Vec<Site>,
    pub seed: u64,
    pub include_initiators: bool,
    pub methods: Vec<ExactMethod>,
    pub allow_paper_formula_divergence: bool,
    /// Radius cap for the enumeration oracle; derived from the query if unset.
    pub oracle_cap: Option<u64>,
    /// Lower end of summary regions and of the diagnose range.
    pub from: u64,
    pub stat: Option<ScanStat>,
    pub grid_p: Vec<f64>,
    pub grid_dist: Vec<TailDistribution>,
    pub grid_lambda: Vec<f64>,
    pub lambda: f64,
    pub window_t: f64,
    pub resolution: f64,
    pub radius_law: ContinuousRadius,
}

impl ExperimentSpec {
    pub fn new(subcommand: Subcommand) -> Self {
        ExperimentSpec {
            subcommand,
            dimension: Dimension::One,
            model: Model::Firework,
            dist: TailDistribution::pareto(4.0).expect("valid default"),
            p: 0.5,
            k: 2,
            n: 100,
            cushion: 10,
            trials: 1000,
            sites: Vec::new(),
            seed: 0,
            include_initiators: false,
            methods: vec![ExactMethod::Dp],
            allow_paper_formula_divergence: false,
            oracle_cap: None,
            from: 1,
            stat: None,
            grid_p: Vec::new(),
            grid_dist: Vec::new(),
            grid_lambda: Vec::new(),
            lambda: 1.0,
            window_t: 1000.0,
            resolution: 1.0,
            radius_law: ContinuousRadius::ParetoCont { alpha: 4.0 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExactRow {
    pub site: Site,
    pub p: f64,
    pub k: u32,
    pub prob: f64,
    pub method: ExactMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SiteRow {
    pub site: Site,
    pub freq_under_covered: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TrialRow {
    pub trial: u64,
    pub seed: u64,
    pub last_under_covered: Option<i64>,
    pub deficient_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScanRow {
    /// `p`, `dist` or `lambda`.
    pub param: String,
    pub value: String,
    pub statistic: String,
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DiagnoseRow {
    pub n: u64,
    pub partial_sum: f64,
    pub growth_ratio: Option<f64>,
    pub decay_exponent: Option<f64>,
}

/// Row schema, fixed per subcommand (simulate has a per-site and a
/// per-trial form, chosen by whether sites were given).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Rows {
    Exact(Vec<ExactRow>),
    Sites(Vec<SiteRow>),
    Trials(Vec<TrialRow>),
    Scan(Vec<ScanRow>),
    Diagnose(Vec<DiagnoseRow>),
    Continuum(Vec<ContinuumTrial>),
}

impl Rows {
    pub fn len(&self) -> usize {
        match self {
            Rows::Exact(r) => r.len(),
            Rows::Sites(r) => r.len(),
            Rows::Trials(r) => r.len(),
            Rows::Scan(r) => r.len(),
            Rows::Diagnose(r) => r.len(),
            Rows::Continuum(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn from_value(spec: &ExperimentSpec, value: serde_json::Value) -> serde_json::Result<Rows> {
        use serde_json::from_value;
        Ok(match spec.subcommand {
            Subcommand::Exact => Rows::Exact(from_value(value)?),
            Subcommand::Simulate if spec.sites.is_empty() => Rows::Trials(from_value(value)?),
            Subcommand::Simulate => Rows::Sites(from_value(value)?),
            Subcommand::Scan => Rows::Scan(from_value(value)?),
            Subcommand::Diagnose => Rows::Diagnose(from_value(value)?),
            Subcommand::Continuum => Rows::Continuum(from_value(value)?),
        })
    }
}

/// Exact methods that disagreed on one site by more than
/// [`DIVERGENCE_TOLERANCE`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Divergence {
    pub site: Site,
    pub methods: Vec<ExactMethod>,
    pub values: Vec<f64>,
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub version: String,
    pub rows: Rows,
    pub clamp_count: u64,
    /// Only filled when timing is requested, so outputs stay reproducible.
    pub wall_time_ms: Option<u64>,
    pub divergences: Vec<Divergence>,
    /// Subcommand-specific aggregates.
    pub summary: serde_json::Value,
}

impl ExperimentResult {
    /// Divergences that should fail the run.
    pub fn blocking_divergence(&self) -> bool {
        !self.divergences.is_empty() && !self.spec.allow_paper_formula_divergence
    }
}

impl<'de> Deserialize<'de> for ExperimentResult {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(rename_all = "camelCase")]
        struct Raw {
            spec: ExperimentSpec,
            version: String,
            rows: serde_json::Value,
            clamp_count: u64,
            wall_time_ms: Option<u64>,
            divergences: Vec<Divergence>,
            summary: serde_json::Value,
        }
        let raw = Raw::deserialize(deserializer)?;
        let rows = Rows::from_value(&raw.spec, raw.rows).map_err(serde::de::Error::custom)?;
        Ok(ExperimentResult {
            spec: raw.spec,
            version: raw.version,
            rows,
            clamp_count: raw.clamp_count,
            wall_time_ms: raw.wall_time_ms,
            divergences: raw.divergences,
            summary: raw.summary,
        })
    }
}

/// Parses a site list. On the line: comma-separated integers and inclusive
/// ranges `a..b`, e.g. `1..4,10`. On the grid: `i,j` pairs separated by `;`.
pub fn parse_sites(dimension: Dimension, s: &str) -> Result<Vec<Site>, String> {
    let int = |t: &str| t.trim().parse::<i64>().map_err(|_| format!("bad coordinate `{}` in site list", t.trim()));
    let mut out = Vec::new();
    match dimension {
        Dimension::One => {
            for part in s.split(',').filter(|t| !t.trim().is_empty()) {
                if let Some((a, b)) = part.split_once("..") {
                    let (a, b) = (int(a)?, int(b)?);
                    if b < a {
                        return Err(format!("empty range `{}`", part.trim()));
                    }
                    out.extend((a..=b).map(Site::Line));
                } else {
                    out.push(Site::Line(int(part)?));
                }
            }
        }
        Dimension::Two => {
            for part in s.split(';').filter(|t| !t.trim().is_empty()) {
                let (i, j) = part.split_once(',').ok_or_else(|| format!("expected `i,j` in site list, got `{}`", part.trim()))?;
                out.push(Site::Grid(int(i)?, int(j)?));
            }
        }
    }
    if out.is_empty() {
        return Err("site list is empty".into());
    }
    Ok(out)
}

/// Execution knobs that do not change results.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub workers: Option<usize>,
    pub timing: bool,
}
