use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, ValueEnum};

use rumourlab::continuum::ContinuousRadius;
use rumourlab::experiment::{
    parse_sites, run, to_csv, to_json, write_outputs, ExactMethod, ExperimentResult, ExperimentSpec, OutputFormats, RunOptions, ScanStat, Subcommand,
};
use rumourlab::stats::mix_seed;
use rumourlab::{Dimension, Model, TailDistribution};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    Exact,
    Simulate,
    Scan,
    Diagnose,
    Continuum,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Firework,
    Reverse,
}

/// Sceptic rumour spreading: exact probabilities, lattice Monte Carlo,
/// parameter scans, series diagnostics and the continuum Boolean model.
#[derive(Debug, Parser)]
#[command(name = "rumourlab", version)]
struct Cli {
    command: Command,

    /// Lattice dimension.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    dim: u8,
    #[arg(long, value_enum, default_value = "firework")]
    model: ModelArg,
    /// Radius law, e.g. `pareto:alpha=4`, `power:beta=1.5`, `geom:q=0.5`,
    /// `const:r=2`, `trunc:geom:q=0.5:cap=6`. The continuum subcommand and
    /// `--grid-lambda` scans take `pareto:alpha=`, `power:beta=` or `const:r=`.
    #[arg(long, default_value = "pareto:alpha=4")]
    dist: String,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Number of distinct sources a site needs.
    #[arg(long, default_value_t = 2)]
    k: u32,
    /// Reported window `1..=n` per axis; upper end of the diagnose range.
    #[arg(long, default_value_t = 100)]
    n: u64,
    /// Reverse model: simulate `n * cushion` sites per axis.
    #[arg(long, default_value_t = 10)]
    cushion: u64,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    /// `1,2,5` or `1..8` on the line; `2,2;3,1` on the grid.
    #[arg(long)]
    sites: Option<String>,
    #[arg(long, env = "RUMOURLAB_SEED")]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    /// Output path stem; `.csv`, `.json` and `.svg` are appended.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: bool,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    svg: bool,
    /// Exact methods: closedForm, dp, paperEq11, oracle (repeatable or comma-separated).
    #[arg(long = "method", value_delimiter = ',')]
    methods: Vec<String>,
    /// Refuse to run without an explicit seed.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    allow_paper_formula_divergence: bool,
    /// Add the always-open initiators at -1 and 0.
    #[arg(long)]
    initiators: bool,
    /// Record wall time in the JSON output (breaks byte-identical reruns).
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    oracle_cap: Option<u64>,
    /// Lower end of summary regions and of the diagnose range.
    #[arg(long, default_value_t = 1)]
    from: u64,
    /// Scan statistic: lastUnderCovered, deficientFraction, membershipFraction,
    /// diagonalMembership or growthRatio.
    #[arg(long)]
    stat: Option<String>,
    #[arg(long, value_delimiter = ',')]
    grid_p: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    grid_dist: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    grid_lambda: Vec<f64>,
    /// Continuum intensity.
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Continuum window side T.
    #[arg(long, default_value_t = 1000.0)]
    window: f64,
    /// Continuum pixel size in 2D.
    #[arg(long, default_value_t = 1.0)]
    resolution: f64,
    /// Rerun the spec stored in a result (or bare spec) JSON file; the
    /// spec flags above are then ignored.
    #[arg(long)]
    spec: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Io(_) => 4,
        }
    }
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn generated_seed() -> u64 {
    let nanos = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_nanos() as u64);
    mix_seed(nanos, std::process::id() as u64)
}

fn subcommand(c: Command) -> Subcommand {
    match c {
        Command::Exact => Subcommand::Exact,
        Command::Simulate => Subcommand::Simulate,
        Command::Scan => Subcommand::Scan,
        Command::Diagnose => Subcommand::Diagnose,
        Command::Continuum => Subcommand::Continuum,
    }
}

fn load_spec(path: &PathBuf, expected: Subcommand) -> Result<ExperimentSpec, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let spec_value = value.get("spec").cloned().unwrap_or(value);
    let spec: ExperimentSpec = serde_json::from_value(spec_value).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    if spec.subcommand != expected {
        return Err(usage(format!("{} holds a `{}` spec", path.display(), spec.subcommand)));
    }
    Ok(spec)
}

fn build_spec(cli: &Cli) -> Result<ExperimentSpec, Failure> {
    let sub = subcommand(cli.command);
    if let Some(path) = &cli.spec {
        return load_spec(path, sub);
    }
    let seed = match cli.seed {
        Some(s) => s,
        None if cli.strict => return Err(usage("--strict requires --seed or RUMOURLAB_SEED")),
        None => {
            let s = generated_seed();
            eprintln!("rumourlab: no seed given, using generated seed {s}");
            s
        }
    };
    let dimension = if cli.dim == 1 { Dimension::One } else { Dimension::Two };
    let continuum_law = sub == Subcommand::Continuum || !cli.grid_lambda.is_empty();
    let mut spec = ExperimentSpec::new(sub);
    if continuum_law {
        spec.radius_law = cli.dist.parse::<ContinuousRadius>().map_err(usage)?;
    } else {
        spec.dist = cli.dist.parse::<TailDistribution>().map_err(usage)?;
    }
    spec.dimension = dimension;
    spec.model = match cli.model {
        ModelArg::Firework => Model::Firework,
        ModelArg::Reverse => Model::Reverse,
    };
    spec.p = cli.p;
    spec.k = cli.k;
    spec.n = cli.n;
    spec.cushion = cli.cushion;
    spec.trials = cli.trials;
    spec.sites = match &cli.sites {
        Some(s) => parse_sites(dimension, s).map_err(usage)?,
        None => Vec::new(),
    };
    spec.seed = seed;
    spec.include_initiators = cli.initiators;
    if !cli.methods.is_empty() {
        spec.methods = cli.methods.iter().map(|m| m.parse::<ExactMethod>()).collect::<Result<_, _>>().map_err(usage)?;
    }
    spec.allow_paper_formula_divergence = cli.allow_paper_formula_divergence;
    spec.oracle_cap = cli.oracle_cap;
    spec.from = cli.from;
    spec.stat = cli.stat.as_deref().map(str::parse::<ScanStat>).transpose().map_err(usage)?;
    spec.grid_p = cli.grid_p.clone();
    spec.grid_dist = cli.grid_dist.iter().map(|d| d.parse::<TailDistribution>()).collect::<Result<_, _>>().map_err(usage)?;
    spec.grid_lambda = cli.grid_lambda.clone();
    spec.lambda = cli.lambda;
    spec.window_t = cli.window;
    spec.resolution = cli.resolution;
    Ok(spec)
}

fn emit(cli: &Cli, result: &ExperimentResult) -> Result<(), Failure> {
    let formats = OutputFormats::from_flags(cli.csv, cli.json, cli.svg);
    match &cli.out {
        Some(stem) => {
            let written = write_outputs(result, stem, formats).map_err(|e| Failure::Io(e.to_string()))?;
            for path in written {
                eprintln!("rumourlab: wrote {}", path.display());
            }
        }
        None => {
            if cli.svg {
                return Err(usage("--svg needs --out"));
            }
            let text = if cli.json && !cli.csv { to_json(result) } else { to_csv(result) };
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| Failure::Io(format!("stdout: {e}")))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = (|| {
        let spec = build_spec(&cli)?;
        let opts = RunOptions { workers: cli.workers, timing: cli.timing };
        let result = run(&spec, &opts).map_err(|e| match e.exit_code() {
            4 => Failure::Io(e.to_string()),
            _ => usage(e),
        })?;
        emit(&cli, &result)?;
        Ok::<_, Failure>(result)
    })();
    match outcome {
        Ok(result) if result.blocking_divergence() => {
            for d in &result.divergences {
                let pairs: Vec<String> = d.methods.iter().zip(&d.values).map(|(m, v)| format!("{m}={v}")).collect();
                eprintln!("rumourlab: methods disagree at site {} by {}: {}", d.site, d.spread, pairs.join(", "));
            }
            eprintln!("rumourlab: pass --allow-paper-formula-divergence to accept this");
            ExitCode::from(3)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) | Failure::Io(m) => eprintln!("rumourlab: error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
