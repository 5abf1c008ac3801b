//! Monte-Carlo experiment driver.
//!
//! Every `(k, trial)` cell draws its signal, ensemble and noise vector from
//! its own stream `rng::trial_rng(seed, n, k, trial)`, so results do not
//! depend on scheduling. All noise levels of a cell share one standard
//! normal draw. Rows are sorted into canonical order before output.

mod config;
mod plot;
mod table;

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

pub use config::{ExperimentConfig, KRange, ProjectorConfig, LARGE_N};
pub use plot::{emit_plots, render_error_svg, render_rate_svg, PlotStyle};
pub use table::{aggregate, quantile, CellSummary, ResultRow, ResultTable, Summary, CSV_HEADER};

use crate::inversion::{invert_ideal_regression, invert_lifted_least_squares, RecoveryReport, SolverKind};
use crate::model::{forward_measure, gaussian_vector, make_ensemble, noisy_with, sample_signal, Signal};
use crate::{rng, Error, Result};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "PHASEALG_THREADS";

/// Sizes the global rayon pool from [`THREADS_ENV`]. Returns the requested
/// count, or `None` when the variable is unset.
pub fn configure_threads() -> Result<Option<usize>> {
    let Ok(raw) = std::env::var(THREADS_ENV) else { return Ok(None) };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::InvalidArgument(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    // A pool that is already initialized keeps its size.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(Some(threads))
}

/// Errors that mean "this solve failed" rather than "the input was bad".
fn is_solver_failure(e: &Error) -> bool {
    matches!(
        e,
        Error::NotIdentifiable { .. }
            | Error::NonGenericMeasurement { .. }
            | Error::ZeroMoment
            | Error::AmbiguousRankOne { .. }
            | Error::NonPositiveScale
            | Error::CodimNotOne(_)
            | Error::DegreeCap { .. }
    )
}

struct Cell {
    k: usize,
    trial: usize,
}

fn run_cell(cfg: &ExperimentConfig, cell: &Cell) -> Result<Vec<ResultRow>> {
    let spec = cfg.projector_spec()?;
    let opts = cfg.inversion_options();
    let mut r = rng::trial_rng(cfg.seed, cfg.n, cell.k, cell.trial);
    let z = sample_signal(cfg.n, cfg.mode, &mut r)?;
    let ensemble = make_ensemble(&spec, cell.k, &mut r)?;
    let clean = forward_measure(&z, &ensemble)?;
    let xi = gaussian_vector(&mut r, cell.k);
    let mut rows = Vec::with_capacity(cfg.sigma.len() * cfg.solvers.len());
    for &sigma in &cfg.sigma {
        let obs = noisy_with(&clean, sigma, &xi)?;
        for &solver in &cfg.solvers {
            let start = Instant::now();
            let outcome = match solver {
                SolverKind::IdealRegression => invert_ideal_regression(&ensemble, &obs, &opts),
                SolverKind::LiftedLs => invert_lifted_least_squares(&ensemble, &obs, &opts),
            };
            let wall_ms = cfg.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
            let report = match outcome {
                Ok(rep) => Some(rep),
                Err(Error::IllConditioned(rep)) => Some(*rep),
                Err(e) if is_solver_failure(&e) => None,
                Err(e) => return Err(e),
            };
            rows.push(row(cfg, cell, solver, sigma, report, &z, wall_ms)?);
        }
    }
    Ok(rows)
}

fn row(
    cfg: &ExperimentConfig,
    cell: &Cell,
    solver: SolverKind,
    sigma: f64,
    report: Option<RecoveryReport>,
    truth: &Signal,
    wall_ms: Option<f64>,
) -> Result<ResultRow> {
    let base = ResultRow {
        solver,
        n: cfg.n,
        k: cell.k,
        r: cfg.projector.rank,
        sigma,
        trial: cell.trial,
        rel_error: f64::NAN,
        success: false,
        stop_degree: None,
        alpha: f64::NAN,
        wall_ms,
        seed: cfg.seed,
    };
    let Some(report) = report else { return Ok(base) };
    let report = report.with_truth(truth)?;
    Ok(ResultRow {
        rel_error: report.rel_error.unwrap_or(f64::NAN),
        success: report.success,
        stop_degree: report.stop_degree,
        alpha: report.alpha,
        ..base
    })
}

fn check_writable(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let probe = dir.join(".phasealg-write-probe");
    std::fs::write(&probe, b"")?;
    std::fs::remove_file(&probe)?;
    Ok(())
}

/// Runs the full sweep. With `out_dir` set, the directory is checked before
/// any work starts and `results.csv` is written into it afterwards.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    if let Some(dir) = &cfg.out_dir {
        check_writable(dir)?;
    }
    let cells: Vec<Cell> =
        cfg.ks().into_iter().flat_map(|k| (0..cfg.trials).map(move |trial| Cell { k, trial })).collect();
    let rows: Vec<ResultRow> =
        cells.par_iter().map(|c| run_cell(cfg, c)).collect::<Result<Vec<_>>>()?.into_iter().flatten().collect();
    let table = ResultTable::new(rows);
    if let Some(dir) = &cfg.out_dir {
        table.write_csv(std::fs::File::create(dir.join("results.csv"))?)?;
    }
    Ok(table)
}

/// Output files written by [`persist`].
#[derive(Clone, Debug)]
pub struct Artifacts {
    pub csv: PathBuf,
    pub summary: PathBuf,
    pub plots: Vec<PathBuf>,
}

/// Writes `results.csv`, `summary.json` and the SVG plots into `dir`.
pub fn persist(table: &ResultTable, dir: &Path, style: &PlotStyle) -> Result<Artifacts> {
    check_writable(dir)?;
    let summary = aggregate(table)?;
    let csv = dir.join("results.csv");
    table.write_csv(std::fs::File::create(&csv)?)?;
    let summary_path = dir.join("summary.json");
    std::fs::write(&summary_path, summary.to_json()?)?;
    let plots = emit_plots(&summary, style, dir)?;
    Ok(Artifacts { csv, summary: summary_path, plots })
}
