//! Python bindings: radius laws, exact probabilities, lattice Monte Carlo,
//! the continuum model and the experiment runner.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use rumourlab::continuum::{self, ContinuousRadius, ContinuumConfig, Point, PointSet};
use rumourlab::exact::{self, ExactQuery};
use rumourlab::experiment::{self, ExperimentSpec, RunOptions};
use rumourlab::lattice::{self, coverage_field, realize};
use rumourlab::{Dimension, ExtendedReal, LatticeConfig, Model, Site};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn dimension(d: u8) -> PyResult<Dimension> {
    Dimension::try_from(d).map_err(value_error)
}

fn model(name: &str) -> PyResult<Model> {
    match name {
        "firework" => Ok(Model::Firework),
        "reverse" => Ok(Model::Reverse),
        other => Err(value_error(format!("unknown model `{other}` (expected firework or reverse)"))),
    }
}

/// An int is a site on the line, an `(i, j)` tuple a grid site.
fn parse_site(obj: &Bound<'_, PyAny>) -> PyResult<Site> {
    if let Ok(x) = obj.extract::<i64>() {
        return Ok(Site::Line(x));
    }
    let (i, j) = obj.extract::<(i64, i64)>().map_err(|_| value_error("a site is an int or an (i, j) tuple"))?;
    Ok(Site::Grid(i, j))
}

fn site_object<'py>(py: Python<'py>, s: Site) -> PyResult<Bound<'py, PyAny>> {
    match s {
        Site::Line(x) => Ok(x.into_pyobject(py)?.into_any()),
        Site::Grid(i, j) => Ok((i, j).into_pyobject(py)?.into_any()),
    }
}

fn extended(v: ExtendedReal) -> f64 {
    match v {
        ExtendedReal::Finite(x) => x,
        ExtendedReal::Infinity => f64::INFINITY,
    }
}

/// Integer radius law, built from its string form (`pareto:alpha=4`,
/// `power:beta=1.5`, `geom:q=0.5`, `const:r=2`, `trunc:<law>:cap=6`).
#[pyclass(name = "TailDistribution", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyTailDistribution(rumourlab::TailDistribution);

#[pymethods]
impl PyTailDistribution {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        spec.parse().map(PyTailDistribution).map_err(value_error)
    }

    #[staticmethod]
    fn pareto(alpha: f64) -> PyResult<Self> {
        rumourlab::TailDistribution::pareto(alpha).map(PyTailDistribution).map_err(value_error)
    }

    #[staticmethod]
    fn power(beta: f64) -> PyResult<Self> {
        rumourlab::TailDistribution::power(beta).map(PyTailDistribution).map_err(value_error)
    }

    #[staticmethod]
    fn geometric(q: f64) -> PyResult<Self> {
        rumourlab::TailDistribution::geometric(q).map(PyTailDistribution).map_err(value_error)
    }

    #[staticmethod]
    fn constant(r: u64) -> Self {
        PyTailDistribution(rumourlab::TailDistribution::constant(r))
    }

    #[staticmethod]
    fn truncated(base: &PyTailDistribution, cap: u64) -> Self {
        PyTailDistribution(rumourlab::TailDistribution::truncated(base.0.clone(), cap))
    }

    /// `P(rho >= j)`.
    fn tail(&self, j: u64) -> f64 {
        self.0.tail(j)
    }

    /// `1 - p P(rho >= j)`.
    fn survival_complement(&self, p: f64, j: u64) -> f64 {
        self.0.survival_complement(p, j)
    }

    fn mass(&self, j: u64) -> f64 {
        self.0.mass(j)
    }

    fn quantile(&self, u: f64) -> u64 {
        self.0.quantile(u)
    }

    fn support_bound(&self) -> Option<u64> {
        self.0.support_bound()
    }

    /// `count` seeded draws.
    fn sample(&self, count: usize, seed: u64) -> Vec<u64> {
        let mut rng = rumourlab::stats::stream_rng(seed, 0);
        (0..count).map(|_| self.0.sample(&mut rng)).collect()
    }

    /// `(liminf j G(j), limsup j G(j))`, infinite values as `inf`.
    fn tail_functionals(&self) -> PyResult<(f64, f64)> {
        let f = self.0.tail_functionals().map_err(value_error)?;
        Ok((extended(f.liminf_jg), extended(f.limsup_jg)))
    }

    fn moment_finite(&self, d: u32) -> bool {
        self.0.moment_finite(d)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("TailDistribution('{}')", self.0)
    }
}

fn query(site: &Bound<'_, PyAny>, p: f64, k: u32, dist: &PyTailDistribution, initiators: bool) -> PyResult<ExactQuery> {
    Ok(ExactQuery { site: parse_site(site)?, p, k, dist: dist.0.clone(), include_initiators: initiators })
}

/// `P(site has fewer than k covers)`; the DP on the line or the grid.
#[pyfunction]
#[pyo3(signature = (site, p, k, dist, initiators = false))]
fn undercovered_prob(site: &Bound<'_, PyAny>, p: f64, k: u32, dist: &PyTailDistribution, initiators: bool) -> PyResult<f64> {
    let q = query(site, p, k, dist, initiators)?;
    match q.site {
        Site::Line(_) => exact::undercovered_prob_1d(&q),
        Site::Grid(..) => exact::undercovered_prob_2d_exact(&q),
    }
    .map_err(value_error)
}

/// `P(site is not covered)`.
#[pyfunction]
#[pyo3(signature = (site, p, dist, initiators = false))]
fn uncovered_prob(site: &Bound<'_, PyAny>, p: f64, dist: &PyTailDistribution, initiators: bool) -> PyResult<f64> {
    let q = query(site, p, 1, dist, initiators)?;
    match q.site {
        Site::Line(_) => exact::uncovered_prob_1d(&q),
        Site::Grid(..) => exact::uncovered_prob_2d(&q),
    }
    .map_err(value_error)
}

/// Explicit sum for `k` in {1, 2} on the line.
#[pyfunction]
fn undercovered_prob_1d_closed_form(i: i64, p: f64, k: u32, dist: &PyTailDistribution) -> PyResult<f64> {
    exact::undercovered_prob_1d_closed_form(&ExactQuery::new(Site::Line(i), p, k, dist.0.clone())).map_err(value_error)
}

/// The printed two-cover grid expression, which omits shell multiplicities.
#[pyfunction]
fn undercovered_prob_2d_paper(i: i64, j: i64, p: f64, dist: &PyTailDistribution) -> PyResult<f64> {
    exact::undercovered_prob_2d_paper(&ExactQuery::new(Site::Grid(i, j), p, 2, dist.0.clone())).map_err(value_error)
}

#[pyfunction]
fn shell_multiplicity_2d(i: u64, j: u64, t: u64) -> PyResult<u64> {
    exact::shell_multiplicity_2d(i, j, t).map_err(value_error)
}

/// Brute-force enumeration over every joint source state.
#[pyfunction]
#[pyo3(signature = (site, p, k, dist, radius_cap, initiators = false))]
fn enumeration_oracle(site: &Bound<'_, PyAny>, p: f64, k: u32, dist: &PyTailDistribution, radius_cap: u64, initiators: bool) -> PyResult<f64> {
    exact::enumeration_oracle(&query(site, p, k, dist, initiators)?, radius_cap).map_err(value_error)
}

/// `P(fewer than k successes)` for independent Bernoulli trials.
#[pyfunction]
fn poisson_binomial_fewer_than(probs: Vec<f64>, k: u32) -> f64 {
    exact::poisson_binomial_fewer_than(&probs, k)
}

/// Partial sums of `P(B_i)` over `i_min..=i_max` with growth summaries.
#[pyfunction]
fn series_diagnostics<'py>(py: Python<'py>, p: f64, dist: &PyTailDistribution, k: u32, i_min: u64, i_max: u64) -> PyResult<Bound<'py, PyDict>> {
    let d = exact::series_diagnostics(p, &dist.0, k, i_min, i_max).map_err(value_error)?;
    let out = PyDict::new(py);
    out.set_item("i_min", d.i_min)?;
    out.set_item("i_max", d.i_max)?;
    out.set_item("growth_ratio", d.growth_ratio)?;
    out.set_item("decay_exponent", d.decay_exponent)?;
    out.set_item("probabilities", d.probabilities)?;
    out.set_item("partial_sums", d.partial_sums)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn lattice_config(dim: u8, model_name: &str, p: f64, k: u32, n: u64, dist: &PyTailDistribution, seed: u64, cushion: u64, initiators: bool) -> PyResult<LatticeConfig> {
    Ok(LatticeConfig {
        dimension: dimension(dim)?,
        model: model(model_name)?,
        p,
        k,
        n,
        cushion,
        include_initiators: initiators,
        dist: dist.0.clone(),
        seed,
    })
}

/// Coverage of one realization over the reported window: firework counts,
/// or reverse membership (0/1) at threshold `k`. Returns
/// `(origin, values)`, values flat on the line and row-major on the grid.
#[pyfunction]
#[pyo3(signature = (dim, model, p, k, n, dist, seed, cushion = 10, initiators = false))]
#[allow(clippy::too_many_arguments)]
fn coverage(dim: u8, model: &str, p: f64, k: u32, n: u64, dist: &PyTailDistribution, seed: u64, cushion: u64, initiators: bool) -> PyResult<(i64, Vec<u32>)> {
    let config = lattice_config(dim, model, p, k, n, dist, seed, cushion, initiators)?;
    let r = realize(&config).map_err(value_error)?;
    let field = coverage_field(&r);
    Ok((field.origin(), field.values().to_vec()))
}

/// Under-coverage frequency per site with a 99% Wilson interval.
#[pyfunction]
#[pyo3(signature = (dim, model, p, k, n, dist, sites, trials, seed, cushion = 10, initiators = false, workers = None))]
#[allow(clippy::too_many_arguments)]
fn estimate_under_coverage<'py>(
    py: Python<'py>,
    dim: u8,
    model: &str,
    p: f64,
    k: u32,
    n: u64,
    dist: &PyTailDistribution,
    sites: Vec<Bound<'py, PyAny>>,
    trials: u64,
    seed: u64,
    cushion: u64,
    initiators: bool,
    workers: Option<usize>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let config = lattice_config(dim, model, p, k, n, dist, seed, cushion, initiators)?;
    let sites = sites.iter().map(parse_site).collect::<PyResult<Vec<_>>>()?;
    let est = py.detach(|| lattice::estimate_under_coverage(&config, &sites, trials, workers)).map_err(value_error)?;
    est.sites
        .iter()
        .map(|s| {
            let d = PyDict::new(py);
            d.set_item("site", site_object(py, s.site)?)?;
            d.set_item("under_covered", s.under_covered)?;
            d.set_item("trials", s.trials)?;
            d.set_item("frequency", s.frequency)?;
            d.set_item("ci_low", s.ci.low)?;
            d.set_item("ci_high", s.ci.high)?;
            Ok(d)
        })
        .collect()
}

fn continuum_config(dim: u8, lam: f64, window: f64, law: &str, k: u32, resolution: f64, seed: u64) -> PyResult<ContinuumConfig> {
    let radius_law: ContinuousRadius = law.parse().map_err(value_error)?;
    Ok(ContinuumConfig { dimension: dimension(dim)?, lambda: lam, window_t: window, radius_law, k, resolution, seed })
}

fn point_set(dim: u8, window: f64, points: Vec<(f64, f64, f64)>) -> PyResult<PointSet> {
    Ok(PointSet::new(dimension(dim)?, window, points.into_iter().map(|(x, y, radius)| Point { x, y, radius }).collect()))
}

/// Poisson points in `[0, window]^dim` as `(x, y, radius)`; `y` is 0 on the line.
#[pyfunction]
fn sample_ppp(dim: u8, lam: f64, window: f64, law: &str, seed: u64) -> PyResult<Vec<(f64, f64, f64)>> {
    let config = continuum_config(dim, lam, window, law, 1, 1.0, seed)?;
    let ps = continuum::sample_ppp(&config).map_err(value_error)?;
    Ok(ps.points.iter().map(|p| (p.x, p.y, p.radius)).collect())
}

/// `(last deficient point or None, deficient length, components)` on `[0, t]`.
#[pyfunction]
fn k_cover_last_gap_1d(points: Vec<(f64, f64, f64)>, k: u32, t: f64) -> PyResult<(Option<f64>, f64, u64)> {
    let g = continuum::k_cover_last_gap_1d(&point_set(1, t, points)?, k, t);
    Ok((g.last_deficient, g.deficient_length, g.components))
}

/// `(deficient pixel fraction, witness pixel centre or None)`.
#[pyfunction]
fn k_cover_deficit_2d(points: Vec<(f64, f64, f64)>, k: u32, t: f64, resolution: f64) -> PyResult<(f64, Option<(f64, f64)>)> {
    let d = continuum::k_cover_deficit_2d(&point_set(2, t, points)?, k, t, resolution).map_err(value_error)?;
    Ok((d.fraction, d.witness.map(|[x, y]| (x, y))))
}

/// Mean statistic per intensity: `(lambda, mean, ci_low, ci_high)`.
#[pyfunction]
#[pyo3(signature = (dim, law, lambdas, trials, window, k = 2, resolution = 1.0, seed = 0, workers = None))]
#[allow(clippy::too_many_arguments)]
fn scan_lambda(
    py: Python<'_>,
    dim: u8,
    law: &str,
    lambdas: Vec<f64>,
    trials: u64,
    window: f64,
    k: u32,
    resolution: f64,
    seed: u64,
    workers: Option<usize>,
) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    let first = lambdas.first().copied().unwrap_or(1.0);
    let template = continuum_config(dim, first, window, law, k, resolution, seed)?;
    let rows = py.detach(|| continuum::scan_lambda(&template, &lambdas, trials, workers)).map_err(value_error)?;
    Ok(rows.iter().map(|r| (r.lambda, r.estimate.mean, r.estimate.ci.low, r.estimate.ci.high)).collect())
}

/// Runs an experiment spec (JSON) and returns the result as JSON. Raises
/// `ValueError` on invalid specs; divergences are reported in the result.
#[pyfunction]
#[pyo3(signature = (spec_json, workers = None))]
fn run_experiment(py: Python<'_>, spec_json: &str, workers: Option<usize>) -> PyResult<String> {
    let spec: ExperimentSpec = serde_json::from_str(spec_json).map_err(value_error)?;
    let result = py.detach(|| experiment::run(&spec, &RunOptions { workers, timing: false })).map_err(value_error)?;
    Ok(experiment::to_json(&result))
}

/// CSV rendering of a result produced by `run_experiment`.
#[pyfunction]
fn result_to_csv(result_json: &str) -> PyResult<String> {
    let result: experiment::ExperimentResult = serde_json::from_str(result_json).map_err(value_error)?;
    Ok(experiment::to_csv(&result))
}

/// Default spec for a subcommand, as JSON, to edit and pass to `run_experiment`.
#[pyfunction]
fn default_spec(subcommand: &str) -> PyResult<String> {
    let sub: experiment::Subcommand = serde_json::from_value(serde_json::Value::String(subcommand.to_string())).map_err(value_error)?;
    serde_json::to_string(&ExperimentSpec::new(sub)).map_err(value_error)
}

#[pymodule]
fn rumourlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", experiment::TOOL_VERSION)?;
    m.add_class::<PyTailDistribution>()?;
    m.add_function(wrap_pyfunction!(undercovered_prob, m)?)?;
    m.add_function(wrap_pyfunction!(uncovered_prob, m)?)?;
    m.add_function(wrap_pyfunction!(undercovered_prob_1d_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(undercovered_prob_2d_paper, m)?)?;
    m.add_function(wrap_pyfunction!(shell_multiplicity_2d, m)?)?;
    m.add_function(wrap_pyfunction!(enumeration_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(poisson_binomial_fewer_than, m)?)?;
    m.add_function(wrap_pyfunction!(series_diagnostics, m)?)?;
    m.add_function(wrap_pyfunction!(coverage, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_under_coverage, m)?)?;
    m.add_function(wrap_pyfunction!(sample_ppp, m)?)?;
    m.add_function(wrap_pyfunction!(k_cover_last_gap_1d, m)?)?;
    m.add_function(wrap_pyfunction!(k_cover_deficit_2d, m)?)?;
    m.add_function(wrap_pyfunction!(scan_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(result_to_csv, m)?)?;
    m.add_function(wrap_pyfunction!(default_spec, m)?)?;
    Ok(())
}
