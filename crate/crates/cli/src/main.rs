use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use phasealg::harness::{
    self, aggregate, emit_plots, run_experiment, ExperimentConfig, KRange, PlotStyle, ResultTable,
};
use phasealg::identifiability::{
    count_solutions, estimate_generic_threshold, jacobian_rank, CensusOptions, JacobianReport, Oracle, SolutionCensus,
};
use phasealg::inversion::{invert_ideal_regression, invert_lifted_least_squares, InversionOptions, SolverKind};
use phasealg::model::{
    add_noise, forward_measure, make_ensemble, sample_signal, InstanceFile, Mode, ProjectorDistribution, ProjectorSpec,
};
use phasealg::polyspace::NullSpaceEngine;
use phasealg::{rng, Error};

const EXIT_FAILURE: u8 = 1;
const EXIT_NOT_IDENTIFIABLE: u8 = 2;
const EXIT_NON_GENERIC: u8 = 3;
const EXIT_ILL_CONDITIONED: u8 = 4;

#[derive(Parser)]
#[command(name = "phasealg", version, about = "Phase retrieval by ideal regression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a signal and ensemble, measure, and write an instance file.
    Simulate(SimulateArgs),
    /// Recover the signal from an instance file and print a recovery report.
    Invert(InvertArgs),
    /// Solution census and Jacobian rank for one instance.
    Certify(CertifyArgs),
    /// Sweep k and estimate the generic identifiability threshold.
    Threshold(ThresholdArgs),
    /// Run a Monte-Carlo experiment and write CSV, summary and plots.
    Experiment(ExperimentArgs),
    /// Aggregate a results CSV and render SVG plots.
    Plot(PlotArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ProjectorArg {
    Haar,
    Gaussian,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Real,
    ComplexSplit,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    IdealRegression,
    LiftedLs,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Dual,
    Dense,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleArg {
    Census,
    IdealRegression,
}

impl From<SolverArg> for SolverKind {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::IdealRegression => SolverKind::IdealRegression,
            SolverArg::LiftedLs => SolverKind::LiftedLs,
        }
    }
}

impl From<EngineArg> for NullSpaceEngine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Dual => NullSpaceEngine::Dual,
            EngineArg::Dense => NullSpaceEngine::Dense,
        }
    }
}

#[derive(Args)]
struct EnsembleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    rank: usize,
    #[arg(long, value_enum, default_value = "haar")]
    projector: ProjectorArg,
    #[arg(long, value_enum, default_value = "real")]
    mode: ModeArg,
}

impl EnsembleArgs {
    fn spec(&self) -> anyhow::Result<ProjectorSpec> {
        let dist = match self.projector {
            ProjectorArg::Haar => ProjectorDistribution::HaarOrthogonal,
            ProjectorArg::Gaussian => ProjectorDistribution::GenericGaussian,
        };
        let mode = match self.mode {
            ModeArg::Real => Mode::Real,
            ModeArg::ComplexSplit => Mode::ComplexSplit,
        };
        Ok(ProjectorSpec::new(self.n, self.rank, mode, dist)?)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    #[arg(long)]
    k: usize,
    /// Noise standard deviation added to the measurements.
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InvertArgs {
    /// Instance file in the phasealg/instance@1 JSON schema.
    input: PathBuf,
    #[arg(long, value_enum, default_value = "ideal-regression")]
    solver: SolverArg,
    #[arg(long, value_enum, default_value = "dual")]
    engine: EngineArg,
    /// Cap on the prolongation degree (default n).
    #[arg(long)]
    degree_cap: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    input: PathBuf,
    /// Number of multistart runs (default 200 * 2^n).
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ThresholdArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    /// `a..b`, `a..=b` (both inclusive) or a comma list. Default `n..2n`.
    #[arg(long)]
    k_range: Option<String>,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, value_enum, default_value = "census")]
    oracle: OracleArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for threshold.json and threshold.csv; JSON on stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// TOML or JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Signal dimension when no config file is given.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k_range: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replaces the configured solver list; repeatable.
    #[arg(long, value_enum)]
    solver: Vec<SolverArg>,
    #[arg(long)]
    trials: Option<usize>,
    /// Replaces the configured noise levels; repeatable or comma separated.
    #[arg(long, value_delimiter = ',')]
    sigma: Vec<f64>,
    /// Record per-solve wall time (makes reruns differ).
    #[arg(long)]
    timing: bool,
    /// Allow n >= 10. Expect several GB of memory and minutes per trial.
    #[arg(long)]
    allow_large: bool,
    #[arg(long)]
    no_plots: bool,
}

#[derive(Args)]
struct PlotArgs {
    /// Results CSV written by `experiment`.
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// TOML or JSON plot style (width, height, stroke_width, font_size).
    #[arg(long)]
    config: Option<PathBuf>,
}

fn write_output(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn read_instance(path: &Path) -> anyhow::Result<InstanceFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(InstanceFile::from_json(&text)?)
}

fn parse_k_range(s: &str) -> anyhow::Result<KRange> {
    let s = s.trim();
    let range = s.split_once("..=").or_else(|| s.split_once(".."));
    if let Some((a, b)) = range {
        let start = a.trim().parse().context("k range start")?;
        let end = b.trim().parse().context("k range end")?;
        if start > end {
            bail!("empty k range {s:?}");
        }
        return Ok(KRange::Span { start, end });
    }
    let list = s.split(',').map(|v| v.trim().parse::<usize>()).collect::<Result<Vec<_>, _>>();
    Ok(KRange::List(list.with_context(|| format!("bad k range {s:?}"))?))
}

fn simulate(args: SimulateArgs) -> anyhow::Result<ExitCode> {
    let spec = args.ensemble.spec()?;
    let mut r = rng::trial_rng(args.seed, spec.n, args.k, 0);
    let z = sample_signal(spec.n, spec.mode, &mut r)?;
    let mut ensemble = make_ensemble(&spec, args.k, &mut r)?;
    ensemble.seed = Some(args.seed);
    let clean = forward_measure(&z, &ensemble)?;
    let obs = add_noise(&clean, args.sigma, &mut r)?;
    let file = InstanceFile::new(&ensemble, Some(&obs), Some(&z));
    write_output(args.out.as_deref(), &file.to_json()?)?;
    Ok(ExitCode::SUCCESS)
}

fn invert(args: InvertArgs) -> anyhow::Result<ExitCode> {
    let file = read_instance(&args.input)?;
    let ensemble = file.ensemble()?;
    let obs = file.observation()?.context("instance has no measurements b")?;
    let mut opts = InversionOptions { engine: args.engine.into(), ..Default::default() };
    opts.prolong.degree_cap = args.degree_cap;
    let outcome = match args.solver {
        SolverArg::IdealRegression => invert_ideal_regression(&ensemble, &obs, &opts),
        SolverArg::LiftedLs => invert_lifted_least_squares(&ensemble, &obs, &opts),
    };
    let (report, code) = match outcome {
        Ok(rep) => (rep, ExitCode::SUCCESS),
        Err(Error::IllConditioned(rep)) => (*rep, ExitCode::from(EXIT_ILL_CONDITIONED)),
        Err(e) => return Err(e.into()),
    };
    let report = match file.signal()? {
        Some(z) => report.with_truth(&z)?,
        None => report,
    };
    write_output(args.out.as_deref(), &report.to_json()?)?;
    Ok(code)
}

#[derive(Serialize)]
struct Certificate {
    n: usize,
    k: usize,
    mode: Mode,
    census: SolutionCensus,
    unique: bool,
    /// At the stored signal if present, else at the first census class.
    jacobian: Option<JacobianReport>,
    jacobian_full_rank: Option<bool>,
}

fn certify(args: CertifyArgs) -> anyhow::Result<ExitCode> {
    let file = read_instance(&args.input)?;
    let ensemble = file.ensemble()?;
    let obs = file.observation()?.context("instance has no measurements b")?;
    let opts = CensusOptions { starts: args.starts, seed: args.seed, ..Default::default() };
    let census = count_solutions(&ensemble, &obs, &opts)?;
    let point = file.signal()?.or_else(|| census.representatives.first().cloned());
    let jacobian = match (ensemble.mode(), point) {
        (Mode::Real, Some(z)) => Some(jacobian_rank(&ensemble, z.as_real().context("real signal expected")?)?),
        _ => None,
    };
    let cert = Certificate {
        n: ensemble.n(),
        k: ensemble.k(),
        mode: ensemble.mode(),
        unique: census.is_unique(),
        jacobian_full_rank: jacobian.as_ref().map(|j| j.rank == ensemble.n()),
        jacobian,
        census,
    };
    write_output(args.out.as_deref(), &serde_json::to_string_pretty(&cert)?)?;
    Ok(ExitCode::SUCCESS)
}

fn threshold(args: ThresholdArgs) -> anyhow::Result<ExitCode> {
    let spec = args.ensemble.spec()?;
    let ks = match &args.k_range {
        Some(s) => parse_k_range(s)?.values(),
        None => (spec.n..=2 * spec.n).collect(),
    };
    let oracle = match args.oracle {
        OracleArg::Census => Oracle::Census(CensusOptions::default()),
        OracleArg::IdealRegression => Oracle::IdealRegression(InversionOptions::default()),
    };
    let report = estimate_generic_threshold(&spec, &ks, args.trials, args.seed, &oracle)?;
    let json = serde_json::to_string_pretty(&report)?;
    match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("threshold.json"), &json)?;
            std::fs::write(dir.join("threshold.csv"), report.to_csv())?;
            match report.lambda_hat {
                Some(k) => eprintln!("estimated threshold: k = {k}"),
                None => eprintln!("no k in range reached the generic level"),
            }
        }
        None => println!("{json}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn experiment(args: ExperimentArgs) -> anyhow::Result<ExitCode> {
    let mut cfg = match (&args.config, args.n) {
        (Some(p), _) => ExperimentConfig::from_path(p).with_context(|| format!("loading {}", p.display()))?,
        (None, Some(n)) => ExperimentConfig::new(n),
        (None, None) => bail!("either --config or --n is required"),
    };
    if let Some(s) = &args.k_range {
        cfg.k_range = Some(parse_k_range(s)?);
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if !args.solver.is_empty() {
        cfg.solvers = args.solver.iter().map(|&s| s.into()).collect();
    }
    if !args.sigma.is_empty() {
        cfg.sigma = args.sigma.clone();
    }
    if args.out.is_some() {
        cfg.out_dir = args.out.clone();
    }
    cfg.timing |= args.timing;
    cfg.allow_large |= args.allow_large;
    let table = run_experiment(&cfg)?;
    let summary = aggregate(&table)?;
    match &cfg.out_dir {
        Some(dir) => {
            std::fs::write(dir.join("summary.json"), summary.to_json()?)?;
            if !args.no_plots {
                emit_plots(&summary, &PlotStyle::default(), dir)?;
            }
            for c in &summary.cells {
                eprintln!("{} k={} sigma={} rate={:.3} median={:e}", c.solver, c.k, c.sigma, c.success_rate, c.median);
            }
        }
        None => print!("{}", table.to_csv()?),
    }
    Ok(ExitCode::SUCCESS)
}

fn plot(args: PlotArgs) -> anyhow::Result<ExitCode> {
    let table = ResultTable::from_csv_path(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let style = match &args.config {
        Some(p) => PlotStyle::from_path(p).with_context(|| format!("loading {}", p.display()))?,
        None => PlotStyle::default(),
    };
    let summary = aggregate(&table)?;
    std::fs::create_dir_all(&args.out)?;
    std::fs::write(args.out.join("summary.json"), summary.to_json()?)?;
    for p in emit_plots(&summary, &style, &args.out)? {
        eprintln!("wrote {}", p.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::NotIdentifiable { .. }) => EXIT_NOT_IDENTIFIABLE,
        Some(Error::NonGenericMeasurement { .. }) => EXIT_NON_GENERIC,
        _ => EXIT_FAILURE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = harness::configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_FAILURE);
    }
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Invert(a) => invert(a),
        Command::Certify(a) => certify(a),
        Command::Threshold(a) => threshold(a),
        Command::Experiment(a) => experiment(a),
        Command::Plot(a) => plot(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(exit_code(&e))
    })
}
