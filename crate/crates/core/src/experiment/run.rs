use std::time::Instant;

use serde_json::json;

use super::{
    DiagnoseRow, Divergence, ExactMethod, ExactRow, ExperimentError, ExperimentResult, ExperimentSpec, Rows, RunOptions, ScanRow, ScanStat, SiteRow,
    Subcommand, TrialRow, DIVERGENCE_TOLERANCE, TOOL_VERSION,
};
use crate::continuum::{continuum_trials, scan_lambda, statistic_name, ContinuumConfig};
use crate::exact::{
    enumeration_oracle, series_diagnostics, uncovered_prob_2d, undercovered_prob_1d, undercovered_prob_1d_closed_form, undercovered_prob_2d_exact,
    undercovered_prob_2d_paper, ExactQuery,
};
use crate::lattice::{estimate_under_coverage, last_under_covered, run_trials, Dimension, LatticeConfig, Model, Region, Site};
use crate::stats::{mean_estimate, mix_seed, MeanEstimate, CONFIDENCE};

struct Output {
    rows: Rows,
    clamp_count: u64,
    divergences: Vec<super::Divergence>,
    summary: serde_json::Value,
}

fn invalid(msg: impl Into<String>) -> ExperimentError {
    ExperimentError::Invalid(msg.into())
}

/// Executes `spec`. Numeric divergences between exact methods are reported
/// in the result rather than as an error; see
/// [`ExperimentResult::blocking_divergence`].
pub fn run(spec: &ExperimentSpec, opts: &RunOptions) -> Result<ExperimentResult, ExperimentError> {
    let start = Instant::now();
    let out = match spec.subcommand {
        Subcommand::Exact => run_exact(spec)?,
        Subcommand::Simulate => run_simulate(spec, opts)?,
        Subcommand::Scan => run_scan(spec, opts)?,
        Subcommand::Diagnose => run_diagnose(spec)?,
        Subcommand::Continuum => run_continuum(spec, opts)?,
    };
    if out.rows.is_empty() {
        return Err(invalid("the run produced no rows"));
    }
    Ok(ExperimentResult {
        spec: spec.clone(),
        version: TOOL_VERSION.to_string(),
        rows: out.rows,
        clamp_count: out.clamp_count,
        wall_time_ms: opts.timing.then(|| start.elapsed().as_millis() as u64),
        divergences: out.divergences,
        summary: out.summary,
    })
}

fn estimate_json(e: &MeanEstimate) -> serde_json::Value {
    json!({ "mean": e.mean, "ciLow": e.ci.low, "ciHigh": e.ci.high })
}

fn check_sites(spec: &ExperimentSpec) -> Result<(), ExperimentError> {
    match spec.sites.iter().find(|s| s.dimension() != spec.dimension) {
        Some(s) => Err(invalid(format!("site {s} does not match --dim {}", spec.dimension.get()))),
        None => Ok(()),
    }
}

/// Smallest lossless oracle cap: the largest displacement that matters, or
/// the end of the law's support if that comes first.
fn default_oracle_cap(q: &ExactQuery) -> u64 {
    let m = match q.site {
        Site::Line(i) => i,
        Site::Grid(i, j) => i.max(j),
    } as u64;
    let needed = if q.include_initiators { m + 1 } else { m.saturating_sub(1) };
    q.dist.support_bound().map_or(needed, |b| b.min(needed))
}

fn exact_value(method: ExactMethod, q: &ExactQuery, cap: Option<u64>) -> Result<f64, ExperimentError> {
    let two_d = q.dimension() == Dimension::Two;
    Ok(match method {
        ExactMethod::Dp if two_d => undercovered_prob_2d_exact(q)?,
        ExactMethod::Dp => undercovered_prob_1d(q)?,
        ExactMethod::ClosedForm if two_d && q.k == 1 => uncovered_prob_2d(q)?,
        ExactMethod::ClosedForm if two_d => return Err(invalid("closedForm on the grid exists only for k = 1")),
        ExactMethod::ClosedForm => undercovered_prob_1d_closed_form(q)?,
        ExactMethod::PaperEq11 if two_d => undercovered_prob_2d_paper(q)?,
        ExactMethod::PaperEq11 => return Err(invalid("paperEq11 is a grid formula; use --dim 2")),
        ExactMethod::Oracle => enumeration_oracle(q, cap.unwrap_or_else(|| default_oracle_cap(q)))?,
    })
}

fn run_exact(spec: &ExperimentSpec) -> Result<Output, ExperimentError> {
    if spec.sites.is_empty() {
        return Err(invalid("exact needs at least one site (--sites)"));
    }
    check_sites(spec)?;
    // The DP is always evaluated as the reference for divergence checks.
    let mut methods: Vec<ExactMethod> = Vec::new();
    for &m in spec.methods.iter().chain([ExactMethod::Dp].iter()) {
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    let mut rows = Vec::new();
    let mut divergences = Vec::new();
    for &site in &spec.sites {
        let q = ExactQuery { site, p: spec.p, k: spec.k, dist: spec.dist.clone(), include_initiators: spec.include_initiators };
        let values = methods.iter().map(|&m| exact_value(m, &q, spec.oracle_cap)).collect::<Result<Vec<f64>, _>>()?;
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi - lo > DIVERGENCE_TOLERANCE {
            divergences.push(Divergence { site, methods: methods.clone(), values: values.clone(), spread: hi - lo });
        }
        rows.extend(methods.iter().zip(values).map(|(&method, prob)| ExactRow { site, p: spec.p, k: spec.k, prob, method }));
    }
    let summary = json!({ "methods": methods, "divergentSites": divergences.len() });
    Ok(Output { rows: Rows::Exact(rows), clamp_count: 0, divergences, summary })
}

fn lattice_config(spec: &ExperimentSpec) -> Result<LatticeConfig, ExperimentError> {
    if spec.trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    let config = LatticeConfig {
        dimension: spec.dimension,
        model: spec.model,
        p: spec.p,
        k: spec.k,
        n: spec.n,
        cushion: spec.cushion,
        include_initiators: spec.include_initiators,
        dist: spec.dist.clone(),
        seed: spec.seed,
    };
    config.validate()?;
    Ok(config)
}

fn run_simulate(spec: &ExperimentSpec, opts: &RunOptions) -> Result<Output, ExperimentError> {
    check_sites(spec)?;
    let config = lattice_config(spec)?;
    let (k, from, n) = (spec.k, spec.from as i64, spec.n as f64);
    let outcomes = run_trials(&config, spec.trials, opts.workers, |_, _, field| {
        (last_under_covered(field, k), field.deficient_fraction(k, Region::Window { from }))
    })?;
    let clamp_count = outcomes.iter().map(|o| o.clamp_count).sum();
    let fractions: Vec<f64> = outcomes.iter().map(|o| o.value.1).collect();
    let lasts: Vec<f64> = outcomes.iter().map(|o| o.value.0.map_or(0.0, |x| x as f64 / n)).collect();
    let summary = json!({
        "trials": spec.trials,
        "deficientFraction": estimate_json(&mean_estimate(&fractions, CONFIDENCE)),
        "lastUnderCoveredOverN": estimate_json(&mean_estimate(&lasts, CONFIDENCE)),
        "lastUnderCoveredMax": outcomes.iter().filter_map(|o| o.value.0).max(),
        "fullyCoveredTrials": outcomes.iter().filter(|o| o.value.0.is_none()).count(),
    });

    let rows = if spec.sites.is_empty() {
        Rows::Trials(
            outcomes
                .iter()
                .enumerate()
                .map(|(t, o)| TrialRow { trial: t as u64, seed: mix_seed(spec.seed, t as u64), last_under_covered: o.value.0, deficient_fraction: o.value.1 })
                .collect(),
        )
    } else {
        // Same seeds, so these agree with the per-trial summary above.
        let est = estimate_under_coverage(&config, &spec.sites, spec.trials, opts.workers)?;
        Rows::Sites(
            est.sites
                .iter()
                .map(|s| SiteRow { site: s.site, freq_under_covered: s.frequency, ci_low: s.ci.low, ci_high: s.ci.high })
                .collect(),
        )
    };
    Ok(Output { rows, clamp_count, divergences: Vec::new(), summary })
}

fn continuum_template(spec: &ExperimentSpec) -> ContinuumConfig {
    ContinuumConfig {
        dimension: spec.dimension,
        lambda: spec.lambda,
        window_t: spec.window_t,
        radius_law: spec.radius_law,
        k: spec.k,
        resolution: spec.resolution,
        seed: spec.seed,
    }
}

fn run_scan(spec: &ExperimentSpec, opts: &RunOptions) -> Result<Output, ExperimentError> {
    let grids = [!spec.grid_p.is_empty(), !spec.grid_dist.is_empty(), !spec.grid_lambda.is_empty()];
    match grids.iter().filter(|&&g| g).count() {
        0 => return Err(invalid("scan needs a non-empty grid (--grid-p, --grid-dist or --grid-lambda)")),
        1 => {}
        _ => return Err(invalid("scan takes exactly one grid")),
    }

    if !spec.grid_lambda.is_empty() {
        if spec.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        let summaries = scan_lambda(&continuum_template(spec), &spec.grid_lambda, spec.trials, opts.workers)?;
        let rows = summaries
            .iter()
            .map(|s| ScanRow {
                param: "lambda".into(),
                value: s.lambda.to_string(),
                statistic: s.statistic.clone(),
                mean: s.estimate.mean,
                ci_low: s.estimate.ci.low,
                ci_high: s.estimate.ci.high,
            })
            .collect();
        let clamp_count = summaries.iter().map(|s| s.clamp_count).sum();
        let summary = json!({ "param": "lambda", "statistic": statistic_name(spec.dimension), "trialsPerPoint": spec.trials });
        return Ok(Output { rows: Rows::Scan(rows), clamp_count, divergences: Vec::new(), summary });
    }

    let stat = spec.stat.unwrap_or(match spec.model {
        Model::Firework => ScanStat::LastUnderCovered,
        Model::Reverse => ScanStat::MembershipFraction,
    });
    if stat == ScanStat::DiagonalMembership && spec.dimension != Dimension::Two {
        return Err(invalid("diagonalMembership needs --dim 2"));
    }
    let points: Vec<(String, ExperimentSpec)> = if spec.grid_p.is_empty() {
        spec.grid_dist.iter().map(|d| (d.to_string(), ExperimentSpec { dist: d.clone(), ..spec.clone() })).collect()
    } else {
        spec.grid_p.iter().map(|&p| (p.to_string(), ExperimentSpec { p, ..spec.clone() })).collect()
    };
    let param = if spec.grid_p.is_empty() { "dist" } else { "p" };

    let mut rows = Vec::new();
    let mut clamp_count = 0;
    for (value, point) in points {
        let (mean, low, high) = if stat == ScanStat::GrowthRatio {
            if spec.dimension != Dimension::One {
                return Err(invalid("growthRatio is defined on the line; use --dim 1"));
            }
            let diag = series_diagnostics(point.p, &point.dist, point.k, point.from, point.n)?;
            let ratio = diag.growth_ratio.ok_or_else(|| invalid(format!("growth ratio undefined at {param}={value}: partial sum is zero")))?;
            (ratio, ratio, ratio)
        } else {
            let config = lattice_config(&point)?;
            let (k, from, n) = (point.k, point.from as i64, point.n as f64);
            let outcomes = run_trials(&config, point.trials, opts.workers, |_, _, field| match stat {
                ScanStat::LastUnderCovered => last_under_covered(field, k).map_or(0.0, |x| x as f64 / n),
                ScanStat::DeficientFraction => field.deficient_fraction(k, Region::Window { from }),
                ScanStat::MembershipFraction => 1.0 - field.deficient_fraction(k, Region::Window { from }),
                ScanStat::DiagonalMembership => 1.0 - field.deficient_fraction(k, Region::Diagonal { from }),
                ScanStat::GrowthRatio => unreachable!("handled above"),
            })?;
            clamp_count += outcomes.iter().map(|o| o.clamp_count).sum::<u64>();
            let values: Vec<f64> = outcomes.iter().map(|o| o.value).collect();
            let e = mean_estimate(&values, CONFIDENCE);
            (e.mean, e.ci.low, e.ci.high)
        };
        rows.push(ScanRow { param: param.into(), value, statistic: stat.name().into(), mean, ci_low: low, ci_high: high });
    }
    let summary = json!({ "param": param, "statistic": stat.name(), "trialsPerPoint": spec.trials });
    Ok(Output { rows: Rows::Scan(rows), clamp_count, divergences: Vec::new(), summary })
}

/// Checkpoints `from, 2 from, 4 from, ...` below `n`, then `n`.
fn checkpoints(from: u64, n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut c = from;
    while c < n {
        out.push(c);
        c = c.saturating_mul(2);
    }
    out.push(n);
    out
}

fn run_diagnose(spec: &ExperimentSpec) -> Result<Output, ExperimentError> {
    if spec.dimension != Dimension::One {
        return Err(invalid("diagnose runs on the line; use --dim 1"));
    }
    let diag = series_diagnostics(spec.p, &spec.dist, spec.k, spec.from, spec.n)?;
    let rows = checkpoints(spec.from, spec.n)
        .into_iter()
        .map(|m| DiagnoseRow {
            n: m,
            partial_sum: diag.partial_sum(m).expect("checkpoint in range"),
            growth_ratio: (m / 2 >= spec.from).then(|| diag.growth_ratio_at(m / 2)).flatten(),
            decay_exponent: diag.decay_exponent_over(m / 2, m),
        })
        .collect();
    let summary = json!({
        "iMin": diag.i_min,
        "iMax": diag.i_max,
        "growthRatio": diag.growth_ratio,
        "decayExponent": diag.decay_exponent,
        "lastProbability": diag.probability(spec.n),
    });
    Ok(Output { rows: Rows::Diagnose(rows), clamp_count: 0, divergences: Vec::new(), summary })
}

fn run_continuum(spec: &ExperimentSpec, opts: &RunOptions) -> Result<Output, ExperimentError> {
    let trials = continuum_trials(&continuum_template(spec), &[spec.lambda], spec.trials, opts.workers)?;
    let values: Vec<f64> = trials.iter().map(|t| t.statistic).collect();
    let e = mean_estimate(&values, CONFIDENCE);
    let summary = json!({
        "statistic": statistic_name(spec.dimension),
        "estimate": estimate_json(&e),
        "meanPoints": trials.iter().map(|t| t.points as f64).sum::<f64>() / trials.len() as f64,
    });
    let clamp_count = trials.iter().map(|t| t.clamp_count).sum();
    Ok(Output { rows: Rows::Continuum(trials), clamp_count, divergences: Vec::new(), summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::TailDistribution;

    fn exact_spec(dim: Dimension, sites: Vec<Site>) -> ExperimentSpec {
        ExperimentSpec { dimension: dim, sites, dist: TailDistribution::constant(1), p: 0.5, k: 2, ..ExperimentSpec::new(Subcommand::Exact) }
    }

    #[test]
    fn exact_line_example() {
        let r = run(&exact_spec(Dimension::One, vec![Site::Line(3)]), &RunOptions::default()).unwrap();
        let Rows::Exact(rows) = &r.rows else { panic!() };
        assert_eq!(rows.len(), 1);
        assert_eq!((rows[0].prob, rows[0].method), (0.75, ExactMethod::Dp));
        assert!(r.divergences.is_empty());
    }

    #[test]
    fn exact_grid_divergence_is_flagged() {
        let spec = ExperimentSpec { methods: vec![ExactMethod::PaperEq11], ..exact_spec(Dimension::Two, vec![Site::Grid(2, 2)]) };
        let r = run(&spec, &RunOptions::default()).unwrap();
        let Rows::Exact(rows) = &r.rows else { panic!() };
        assert_eq!(rows.iter().map(|r| r.prob).collect::<Vec<_>>(), vec![0.1875, 0.3125]);
        assert_eq!(r.divergences.len(), 1);
        assert!(r.blocking_divergence());
        let allowed = ExperimentSpec { allow_paper_formula_divergence: true, ..spec };
        assert!(!run(&allowed, &RunOptions::default()).unwrap().blocking_divergence());
    }

    #[test]
    fn exact_all_methods_agree_on_small_sites() {
        let spec = ExperimentSpec {
            methods: vec![ExactMethod::ClosedForm, ExactMethod::Oracle],
            dist: TailDistribution::truncated(TailDistribution::geometric(0.5).unwrap(), 6),
            ..exact_spec(Dimension::One, (1..=6).map(Site::Line).collect())
        };
        let r = run(&spec, &RunOptions::default()).unwrap();
        assert!(r.divergences.is_empty(), "{:?}", r.divergences);
        assert_eq!(r.rows.len(), 18);
    }

    #[test]
    fn exact_p_zero_is_certain_under_coverage() {
        let spec = ExperimentSpec { p: 0.0, ..exact_spec(Dimension::Two, vec![Site::Grid(3, 5), Site::Grid(1, 1)]) };
        let r = run(&spec, &RunOptions::default()).unwrap();
        let Rows::Exact(rows) = &r.rows else { panic!() };
        assert!(rows.iter().all(|r| r.prob == 1.0));
    }

    #[test]
    fn exact_rejects_mismatched_sites_and_methods() {
        assert!(run(&exact_spec(Dimension::One, vec![Site::Grid(1, 1)]), &RunOptions::default()).is_err());
        assert!(run(&exact_spec(Dimension::One, vec![]), &RunOptions::default()).is_err());
        let spec = ExperimentSpec { methods: vec![ExactMethod::PaperEq11], ..exact_spec(Dimension::One, vec![Site::Line(2)]) };
        assert_eq!(run(&spec, &RunOptions::default()).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn simulate_full_cover() {
        let spec = ExperimentSpec { p: 1.0, k: 1, n: 50, trials: 20, dist: TailDistribution::constant(2), ..ExperimentSpec::new(Subcommand::Simulate) };
        let r = run(&spec, &RunOptions::default()).unwrap();
        let Rows::Trials(rows) = &r.rows else { panic!() };
        assert_eq!(rows.len(), 20);
        assert!(rows.iter().all(|t| t.last_under_covered.is_none()));
    }

    #[test]
    fn scan_checks_grids() {
        let base = ExperimentSpec { n: 50, trials: 10, ..ExperimentSpec::new(Subcommand::Scan) };
        assert!(run(&base, &RunOptions::default()).is_err());
        let one = ExperimentSpec { grid_p: vec![0.5], ..base.clone() };
        assert_eq!(run(&one, &RunOptions::default()).unwrap().rows.len(), 1);
        let two = ExperimentSpec { grid_lambda: vec![1.0], ..one };
        assert!(run(&two, &RunOptions::default()).is_err());
    }

    #[test]
    fn diagnose_rows_end_at_n() {
        let spec = ExperimentSpec { p: 0.5, k: 1, n: 1000, ..ExperimentSpec::new(Subcommand::Diagnose) };
        let r = run(&spec, &RunOptions::default()).unwrap();
        let Rows::Diagnose(rows) = &r.rows else { panic!() };
        assert_eq!(rows.first().unwrap().n, 1);
        assert_eq!(rows.last().unwrap().n, 1000);
        assert_eq!(rows.len(), 11);
    }

    #[test]
    fn checkpoint_layout() {
        assert_eq!(checkpoints(1, 10), vec![1, 2, 4, 8, 10]);
        assert_eq!(checkpoints(3, 12), vec![3, 6, 12]);
    }
}
