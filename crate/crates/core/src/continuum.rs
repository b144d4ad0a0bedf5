//! Poisson Boolean model on `R_+` and `R_+^2`.
//!
//! Points of a Poisson process of intensity `lambda` in `[0, T]^d` each carry
//! a block `x + [0, rho)^d`. The line is handled by an exact endpoint sweep,
//! the plane by rasterising onto pixel centres.

use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::distribution::{float_param, parse_err, DistError};
use crate::exec::map_indexed;
use crate::lattice::Dimension;
use crate::stats::{mean_estimate, mix_seed, stream_rng, MeanEstimate, CONFIDENCE};

/// Largest pixel grid [`k_cover_deficit_2d`] will allocate.
pub const MAX_PIXELS: u64 = 1 << 28;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ContinuumError {
    #[error("invalid continuum configuration: {0}")]
    InvalidConfig(String),
    #[error("raster of {per_axis} x {per_axis} pixels exceeds the limit of {MAX_PIXELS}")]
    PixelOverflow { per_axis: u64 },
}

/// A radius law on the positive reals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContinuousRadius {
    /// `P(rho > x) = min(1, alpha / x)`.
    ParetoCont { alpha: f64 },
    /// `P(rho > x) = min(1, x^-beta)`.
    PowerCont { beta: f64 },
    ConstCont { r: f64 },
}

impl ContinuousRadius {
    pub fn validate(&self) -> Result<(), DistError> {
        let (name, v) = match *self {
            ContinuousRadius::ParetoCont { alpha } => ("alpha", alpha),
            ContinuousRadius::PowerCont { beta } => ("beta", beta),
            ContinuousRadius::ConstCont { r } => ("r", r),
        };
        if v.is_finite() && v > 0.0 {
            Ok(())
        } else {
            Err(DistError::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
        }
    }

    pub fn survival(&self, x: f64) -> f64 {
        match *self {
            ContinuousRadius::ParetoCont { alpha } => (alpha / x).min(1.0),
            ContinuousRadius::PowerCont { beta } => x.powf(-beta).min(1.0),
            ContinuousRadius::ConstCont { r } => (x < r) as u8 as f64,
        }
    }

    /// Inverse transform: the radius whose survival equals `u` in `(0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            ContinuousRadius::ParetoCont { alpha } => alpha / u,
            ContinuousRadius::PowerCont { beta } => u.powf(-1.0 / beta),
            ContinuousRadius::ConstCont { r } => r,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.sample(Open01);
        self.quantile(u)
    }
}

impl fmt::Display for ContinuousRadius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContinuousRadius::ParetoCont { alpha } => write!(f, "pareto:alpha={alpha}"),
            ContinuousRadius::PowerCont { beta } => write!(f, "power:beta={beta}"),
            ContinuousRadius::ConstCont { r } => write!(f, "const:r={r}"),
        }
    }
}

impl FromStr for ContinuousRadius {
    type Err = DistError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (family, param) = s.split_once(':').ok_or_else(|| parse_err(s, "expected `<family>:<param>=<value>`"))?;
        let law = match family {
            "pareto" => ContinuousRadius::ParetoCont { alpha: float_param(param, "alpha")? },
            "power" => ContinuousRadius::PowerCont { beta: float_param(param, "beta")? },
            "const" => ContinuousRadius::ConstCont { r: float_param(param, "r")? },
            other => return Err(parse_err(other, "unknown family (expected pareto, power or const)")),
        };
        law.validate().map_err(|e| parse_err(param, e.to_string()))?;
        Ok(law)
    }
}

impl Serialize for ContinuousRadius {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ContinuousRadius {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ContinuumConfig {
    pub dimension: Dimension,
    pub lambda: f64,
    pub window_t: f64,
    pub radius_law: ContinuousRadius,
    pub k: u32,
    pub resolution: f64,
    pub seed: u64,
}

impl ContinuumConfig {
    pub fn new(dimension: Dimension, lambda: f64, window_t: f64, radius_law: ContinuousRadius) -> Self {
        ContinuumConfig { dimension, lambda, window_t, radius_law, k: 2, resolution: 1.0, seed: 0 }
    }

    pub fn validate(&self) -> Result<(), ContinuumError> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ContinuumError::InvalidConfig(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("lambda", self.lambda)?;
        positive("windowT", self.window_t)?;
        positive("resolution", self.resolution)?;
        if self.k == 0 {
            return Err(ContinuumError::InvalidConfig("k must be at least 1".into()));
        }
        self.radius_law.validate().map_err(|e| ContinuumError::InvalidConfig(e.to_string()))
    }

    /// Expected point count `lambda * T^d`.
    pub fn mean_count(&self) -> f64 {
        self.lambda * self.window_t.powi(self.dimension.get() as i32)
    }
}

/// A point with its block radius. `y` is 0 on the line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PointSet {
    pub dimension: Dimension,
    pub window_t: f64,
    pub points: Vec<Point>,
}

impl PointSet {
    pub fn new(dimension: Dimension, window_t: f64, points: Vec<Point>) -> Self {
        PointSet { dimension, window_t, points }
    }

    /// Points whose block reaches past the window on some axis.
    pub fn clamp_count(&self) -> u64 {
        self.points.iter().filter(|p| p.radius > self.window_t).count() as u64
    }
}

/// Draws `N ~ Poisson(lambda T^d)` points, uniform in the window, with
/// independent radii. Deterministic in `config.seed`.
pub fn sample_ppp(config: &ContinuumConfig) -> Result<PointSet, ContinuumError> {
    config.validate()?;
    let mut rng = stream_rng(config.seed, 0);
    let poisson = Poisson::new(config.mean_count()).map_err(|e| ContinuumError::InvalidConfig(format!("point intensity: {e}")))?;
    let n = poisson.sample(&mut rng) as u64;
    let t = config.window_t;
    let two_d = config.dimension == Dimension::Two;
    let points = (0..n)
        .map(|_| {
            let x = rng.random::<f64>() * t;
            let y = if two_d { rng.random::<f64>() * t } else { 0.0 };
            Point { x, y, radius: config.radius_law.sample(&mut rng) }
        })
        .collect();
    Ok(PointSet::new(config.dimension, t, points))
}

/// Result of the exact sweep on `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LastGap {
    /// Supremum of `{x in [0, T] : count(x) < k}`, `None` if that set is empty.
    pub last_deficient: Option<f64>,
    pub deficient_length: f64,
    /// Maximal deficient intervals.
    pub components: u64,
}

/// Sweeps the interval endpoints `x` and `x + rho` (clipped to `[0, T]`,
/// each interval half-open) and reports where coverage stays below `k`.
pub fn k_cover_last_gap_1d(points: &PointSet, k: u32, t: f64) -> LastGap {
    let mut events: Vec<(f64, i32)> = Vec::with_capacity(2 * points.points.len());
    for p in &points.points {
        if p.x >= t || p.radius <= 0.0 {
            continue;
        }
        let start = p.x.max(0.0);
        let end = p.x + p.radius;
        if end <= start {
            continue;
        }
        events.push((start, 1));
        if end < t {
            events.push((end, -1));
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));

    let k = k as i64;
    let mut count = 0i64;
    let mut pos = 0.0;
    let mut out = LastGap { last_deficient: None, deficient_length: 0.0, components: 0 };
    let mut in_gap = false;
    let mut close_segment = |from: f64, to: f64, count: i64, out: &mut LastGap| {
        if to <= from {
            return;
        }
        if count < k {
            out.deficient_length += to - from;
            out.last_deficient = Some(to);
            if !in_gap {
                out.components += 1;
                in_gap = true;
            }
        } else {
            in_gap = false;
        }
    };
    let mut idx = 0;
    while idx < events.len() {
        let at = events[idx].0;
        close_segment(pos, at, count, &mut out);
        while idx < events.len() && events[idx].0 == at {
            count += events[idx].1 as i64;
            idx += 1;
        }
        pos = at;
    }
    close_segment(pos, t, count, &mut out);
    // The closed right end: T itself is deficient iff the last segment is.
    if pos >= t && count < k {
        out.last_deficient = Some(t);
    }
    out
}

/// Pixel index range `[lo, hi)` whose centres `(m + 1/2) res` fall in
/// `[a, b)`, clipped to `0..cells`.
fn pixel_span(a: f64, b: f64, res: f64, cells: u64) -> (usize, usize) {
    let clip = |v: f64| v.clamp(0.0, cells as f64) as usize;
    (clip((a / res - 0.5).ceil()), clip((b / res - 0.5).ceil()))
}

fn cells_per_axis(t: f64, res: f64) -> Result<u64, ContinuumError> {
    if !(t > 0.0 && res > 0.0) {
        return Err(ContinuumError::InvalidConfig(format!("window {t} and resolution {res} must be positive")));
    }
    let cells = (t / res).ceil();
    if cells > MAX_PIXELS as f64 {
        return Err(ContinuumError::PixelOverflow { per_axis: u64::MAX });
    }
    Ok(cells as u64)
}

/// Deficient length of the 1D raster: pixels of width `res` whose centre has
/// fewer than `k` covering intervals, times `res`.
pub fn k_cover_deficit_1d_raster(points: &PointSet, k: u32, t: f64, res: f64) -> Result<f64, ContinuumError> {
    let cells = cells_per_axis(t, res)?;
    let mut diff = vec![0i64; cells as usize + 1];
    for p in &points.points {
        let (lo, hi) = pixel_span(p.x, p.x + p.radius, res, cells);
        if lo < hi {
            diff[lo] += 1;
            diff[hi] -= 1;
        }
    }
    let mut count = 0;
    let mut deficient = 0u64;
    for d in &diff[..cells as usize] {
        count += d;
        deficient += (count < k as i64) as u64;
    }
    Ok(deficient as f64 * res)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Deficit2D {
    /// Share of pixels whose centre has fewer than `k` covering squares.
    pub fraction: f64,
    /// Centre of the deficient pixel with the largest smaller coordinate
    /// (ties broken by the larger one), `None` if nothing is deficient.
    pub witness: Option<[f64; 2]>,
    pub pixels_per_axis: u64,
}

/// Rasterises the squares `x + [0, rho)^2` onto pixel centres with a 2D
/// difference array. The discretisation moves each square edge by at most
/// half a pixel, so the fraction is biased by `O(res)` times the boundary
/// length per unit area.
pub fn k_cover_deficit_2d(points: &PointSet, k: u32, t: f64, res: f64) -> Result<Deficit2D, ContinuumError> {
    let cells = cells_per_axis(t, res)?;
    if cells.saturating_mul(cells) > MAX_PIXELS {
        return Err(ContinuumError::PixelOverflow { per_axis: cells });
    }
    let m = cells as usize;
    let w = m + 1;
    let mut diff = vec![0i32; w * w];
    for p in &points.points {
        let (x0, x1) = pixel_span(p.x, p.x + p.radius, res, cells);
        let (y0, y1) = pixel_span(p.y, p.y + p.radius, res, cells);
        if x0 < x1 && y0 < y1 {
            diff[x0 * w + y0] += 1;
            diff[x1 * w + y0] -= 1;
            diff[x0 * w + y1] -= 1;
            diff[x1 * w + y1] += 1;
        }
    }
    // Prefix sums along y, then along x.
    for a in 0..m {
        for b in 1..m {
            diff[a * w + b] += diff[a * w + b - 1];
        }
    }
    let mut deficient = 0u64;
    let mut best: Option<((usize, usize), (usize, usize))> = None;
    for a in 0..m {
        for b in 0..m {
            if a > 0 {
                diff[a * w + b] += diff[(a - 1) * w + b];
            }
            if diff[a * w + b] < k as i32 {
                deficient += 1;
                let key = (a.min(b), a.max(b));
                if best.is_none_or(|(bk, _)| key >= bk) {
                    best = Some((key, (a, b)));
                }
            }
        }
    }
    let witness = best.map(|(_, (a, b))| [(a as f64 + 0.5) * res, (b as f64 + 0.5) * res]);
    Ok(Deficit2D { fraction: deficient as f64 / (cells * cells) as f64, witness, pixels_per_axis: cells })
}

/// One seeded realisation and its summary statistic: `lastDeficient / T`
/// (0 when fully covered) on the line, the deficient fraction in the plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ContinuumTrial {
    pub lambda: f64,
    pub trial: u64,
    pub seed: u64,
    pub points: u64,
    pub statistic: f64,
    pub clamp_count: u64,
}

/// Name of the per-trial statistic for a dimension.
pub fn statistic_name(dimension: Dimension) -> &'static str {
    match dimension {
        Dimension::One => "lastGapOverT",
        Dimension::Two => "deficitFraction",
    }
}

pub fn evaluate(config: &ContinuumConfig) -> Result<(f64, PointSet), ContinuumError> {
    let points = sample_ppp(config)?;
    let stat = match config.dimension {
        Dimension::One => k_cover_last_gap_1d(&points, config.k, config.window_t).last_deficient.unwrap_or(0.0) / config.window_t,
        Dimension::Two => k_cover_deficit_2d(&points, config.k, config.window_t, config.resolution)?.fraction,
    };
    Ok((stat, points))
}

/// Seed of trial `trial` at grid position `lambda_index`.
pub fn trial_seed(seed: u64, lambda_index: u64, trial: u64) -> u64 {
    mix_seed(mix_seed(seed, lambda_index), trial)
}

/// Runs `trials` realisations at each intensity. Trials at different
/// intensities use unrelated seeds, so monotonicity in `lambda` holds in
/// expectation only.
pub fn continuum_trials(
    template: &ContinuumConfig,
    lambdas: &[f64],
    trials: u64,
    workers: Option<usize>,
) -> Result<Vec<ContinuumTrial>, ContinuumError> {
    template.validate()?;
    if lambdas.is_empty() || trials == 0 {
        return Err(ContinuumError::InvalidConfig("need at least one intensity and one trial".into()));
    }
    if lambdas.windows(2).any(|w| w[0] > w[1]) {
        return Err(ContinuumError::InvalidConfig("intensities must be sorted ascending".into()));
    }
    for &l in lambdas {
        ContinuumConfig { lambda: l, ..template.clone() }.validate()?;
    }
    map_indexed(lambdas.len() as u64 * trials, workers, |flat| {
        let (li, trial) = (flat / trials, flat % trials);
        let lambda = lambdas[li as usize];
        let seed = trial_seed(template.seed, li, trial);
        let config = ContinuumConfig { lambda, seed, ..template.clone() };
        let (statistic, points) = evaluate(&config)?;
        Ok(ContinuumTrial { lambda, trial, seed, points: points.points.len() as u64, statistic, clamp_count: points.clamp_count() })
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LambdaSummary {
    pub lambda: f64,
    pub statistic: String,
    pub estimate: MeanEstimate,
    pub clamp_count: u64,
}

/// Mean statistic per intensity with a 99% interval, one entry per `lambda`.
pub fn scan_lambda(template: &ContinuumConfig, lambdas: &[f64], trials: u64, workers: Option<usize>) -> Result<Vec<LambdaSummary>, ContinuumError> {
    let runs = continuum_trials(template, lambdas, trials, workers)?;
    Ok(runs
        .chunks(trials as usize)
        .map(|chunk| {
            let values: Vec<f64> = chunk.iter().map(|r| r.statistic).collect();
            LambdaSummary {
                lambda: chunk[0].lambda,
                statistic: statistic_name(template.dimension).to_string(),
                estimate: mean_estimate(&values, CONFIDENCE),
                clamp_count: chunk.iter().map(|r| r.clamp_count).sum(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line(points: &[(f64, f64)]) -> PointSet {
        PointSet::new(Dimension::One, 0.0, points.iter().map(|&(x, radius)| Point { x, y: 0.0, radius }).collect())
    }

    fn plane(points: &[(f64, f64, f64)]) -> PointSet {
        PointSet::new(Dimension::Two, 0.0, points.iter().map(|&(x, y, radius)| Point { x, y, radius }).collect())
    }

    #[test]
    fn sweep_examples() {
        assert_eq!(k_cover_last_gap_1d(&line(&[(0.0, 10.0)]), 1, 5.0).last_deficient, None);
        assert_eq!(k_cover_last_gap_1d(&line(&[(0.0, 10.0)]), 2, 5.0).last_deficient, Some(5.0));
        let g = k_cover_last_gap_1d(&line(&[(0.0, 10.0), (1.0, 10.0)]), 2, 5.0);
        assert_eq!(g.last_deficient, Some(1.0));
        assert_eq!(g.deficient_length, 1.0);
        assert_eq!(g.components, 1);
        assert_eq!(k_cover_last_gap_1d(&line(&[]), 1, 3.0).last_deficient, Some(3.0));
    }

    #[test]
    fn sweep_half_open_ends() {
        // [0, 2) and [2, 5): the point 2 is covered once, nothing is missing.
        let g = k_cover_last_gap_1d(&line(&[(0.0, 2.0), (2.0, 3.0)]), 1, 4.0);
        assert_eq!(g.last_deficient, None);
        // A gap [2, 3).
        let g = k_cover_last_gap_1d(&line(&[(0.0, 2.0), (3.0, 3.0)]), 1, 4.0);
        assert_eq!(g.last_deficient, Some(3.0));
        assert_eq!(g.components, 1);
    }

    #[test]
    fn raster_examples() {
        assert_eq!(k_cover_deficit_2d(&plane(&[]), 1, 1.0, 0.25).unwrap().fraction, 1.0);
        assert_eq!(k_cover_deficit_2d(&plane(&[(0.0, 0.0, 2.0)]), 1, 1.0, 0.25).unwrap().fraction, 0.0);
        let two = plane(&[(0.0, 0.0, 1.0), (0.5, 0.5, 1.0)]);
        let d = k_cover_deficit_2d(&two, 2, 1.0, 0.25).unwrap();
        assert_eq!(d.fraction, 0.75);
        assert_eq!(d.pixels_per_axis, 4);
        assert_eq!(d.witness, Some([0.875, 0.375]));
        assert!(matches!(k_cover_deficit_2d(&two, 2, 1.0, 1e-6), Err(ContinuumError::PixelOverflow { .. })));
    }

    #[test]
    fn radius_laws() {
        let p = ContinuousRadius::ParetoCont { alpha: 4.0 };
        assert_eq!(p.survival(2.0), 1.0);
        assert_eq!(p.survival(8.0), 0.5);
        assert_eq!(p.quantile(0.5), 8.0);
        let q = ContinuousRadius::PowerCont { beta: 2.0 };
        assert!((q.survival(q.quantile(0.3)) - 0.3).abs() < 1e-12);
        for s in ["pareto:alpha=4", "power:beta=1.5", "const:r=2.5"] {
            let law: ContinuousRadius = s.parse().unwrap();
            assert_eq!(law.to_string(), s);
        }
        assert!("pareto:alpha=-1".parse::<ContinuousRadius>().is_err());
        assert!("geom:q=0.5".parse::<ContinuousRadius>().is_err());
    }

    #[test]
    fn poisson_counts() {
        let law = ContinuousRadius::ConstCont { r: 1.0 };
        let mut config = ContinuumConfig::new(Dimension::One, 2.0, 10.0, law);
        let trials = 10_000u64;
        let mut total = 0u64;
        for s in 0..trials {
            config.seed = s;
            let ps = sample_ppp(&config).unwrap();
            assert!(ps.points.iter().all(|p| (0.0..=10.0).contains(&p.x) && p.y == 0.0));
            total += ps.points.len() as u64;
        }
        let mean = total as f64 / trials as f64;
        assert!((mean - 20.0).abs() < 3.0 * (20.0 / trials as f64).sqrt(), "{mean}");

        let mut sparse = ContinuumConfig::new(Dimension::One, 1e-9, 1.0, law);
        let mut total = 0u64;
        for s in 0..100_000 {
            sparse.seed = s;
            total += sample_ppp(&sparse).unwrap().points.len() as u64;
        }
        let mean = total as f64 / 1e5;
        assert!((mean - 1e-9).abs() < 3.0 * (1e-9f64 / 1e5).sqrt());

        let mut square = ContinuumConfig::new(Dimension::Two, 1.0, 5.0, law);
        square.seed = 3;
        assert_eq!(sample_ppp(&square).unwrap(), sample_ppp(&square).unwrap());
        assert!(sample_ppp(&square).unwrap().points.iter().all(|p| (0.0..=5.0).contains(&p.x) && (0.0..=5.0).contains(&p.y)));
    }

    #[test]
    fn scan_shape_and_determinism() {
        let template = ContinuumConfig::new(Dimension::One, 1.0, 100.0, ContinuousRadius::ParetoCont { alpha: 4.0 });
        let lambdas = [0.05, 0.5, 2.0];
        let a = scan_lambda(&template, &lambdas, 8, Some(1)).unwrap();
        assert_eq!(a.len(), 3);
        assert_eq!(a, scan_lambda(&template, &lambdas, 8, Some(3)).unwrap());
        assert!(scan_lambda(&template, &[2.0, 1.0], 8, None).is_err());
        assert!(scan_lambda(&template, &[], 8, None).is_err());
    }

    fn point_sets() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((0.0f64..50.0, 0.1f64..15.0), 0..40)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn sweep_matches_raster(pts in point_sets(), k in 1u32..4) {
            let ps = line(&pts);
            let res = 0.01;
            let sweep = k_cover_last_gap_1d(&ps, k, 50.0);
            let raster = k_cover_deficit_1d_raster(&ps, k, 50.0, res).unwrap();
            let tol = res * (sweep.components.max(1) as f64) + 1e-9;
            prop_assert!((sweep.deficient_length - raster).abs() <= tol, "{} vs {}", sweep.deficient_length, raster);
        }

        #[test]
        fn deficit_monotone_in_k_and_points(pts in prop::collection::vec((0.0f64..10.0, 0.0f64..10.0, 0.1f64..6.0), 0..25), extra in (0.0f64..10.0, 0.0f64..10.0, 0.1f64..6.0), k in 1u32..4) {
            let ps = plane(&pts);
            let a = k_cover_deficit_2d(&ps, k, 10.0, 0.1).unwrap().fraction;
            prop_assert!(k_cover_deficit_2d(&ps, k + 1, 10.0, 0.1).unwrap().fraction >= a);
            let mut more = pts.clone();
            more.push(extra);
            prop_assert!(k_cover_deficit_2d(&plane(&more), k, 10.0, 0.1).unwrap().fraction <= a);
            let ls = line(&pts.iter().map(|p| (p.0, p.2)).collect::<Vec<_>>());
            let g = k_cover_last_gap_1d(&ls, k, 10.0);
            prop_assert!(k_cover_last_gap_1d(&ls, k + 1, 10.0).deficient_length >= g.deficient_length - 1e-12);
        }
    }
}
