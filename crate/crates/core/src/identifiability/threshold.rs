use rayon::prelude::*;
use serde::Serialize;

use super::census::{count_solutions, CensusOptions};
use crate::inversion::{invert_ideal_regression, InversionOptions};
use crate::model::{forward_measure, make_ensemble, sample_signal, Mode, ProjectorDistribution, ProjectorSpec};
use crate::{rng, Error, Result};

/// Frequency a `k` must reach to count as generically identifying.
pub const GENERIC_LEVEL: f64 = 0.95;

/// Decides whether one fresh instance is uniquely solvable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Oracle {
    /// Census with exactly one class.
    Census(CensusOptions),
    /// Ideal regression reaching its success threshold.
    IdealRegression(InversionOptions),
}

impl Oracle {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Census(_) => "census",
            Self::IdealRegression(_) => "ideal-regression",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub k: usize,
    pub trials: usize,
    pub unique: usize,
    pub frequency: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub n: usize,
    pub rank: usize,
    pub mode: Mode,
    pub projector: String,
    pub oracle: &'static str,
    pub seed: u64,
    pub level: f64,
    pub rows: Vec<ThresholdRow>,
    /// Smallest swept `k` whose frequency reaches `level`.
    pub lambda_hat: Option<usize>,
}

impl ThresholdReport {
    pub fn frequency(&self, k: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.k == k).map(|r| r.frequency)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,r,mode,projector,oracle,k,trials,unique,frequency\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                self.n,
                self.rank,
                mode_name(self.mode),
                self.projector,
                self.oracle,
                r.k,
                r.trials,
                r.unique,
                r.frequency
            ));
        }
        out
    }
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Real => "real",
        Mode::ComplexSplit => "complex-split",
    }
}

/// One generic trial: signal and ensemble from the `(n, k, trial)` stream.
fn trial_is_unique(spec: &ProjectorSpec, k: usize, trial: usize, seed: u64, oracle: &Oracle) -> Result<bool> {
    let mut r = rng::trial_rng(seed, spec.n, k, trial);
    let z = sample_signal(spec.n, spec.mode, &mut r)?;
    let ensemble = make_ensemble(spec, k, &mut r)?;
    let obs = forward_measure(&z, &ensemble)?;
    match oracle {
        Oracle::Census(opts) => {
            let opts = CensusOptions { seed: rng::stream_id(spec.n, k, trial) ^ seed, ..*opts };
            match count_solutions(&ensemble, &obs, &opts) {
                Ok(c) => Ok(c.is_unique()),
                Err(Error::NoConvergedStarts) => Ok(false),
                Err(e) => Err(e),
            }
        }
        Oracle::IdealRegression(opts) => match invert_ideal_regression(&ensemble, &obs, opts) {
            Ok(rep) => Ok(rep.with_truth(&z)?.success),
            Err(Error::NotIdentifiable { .. } | Error::IllConditioned(_) | Error::NonGenericMeasurement { .. }) => {
                Ok(false)
            }
            Err(e) => Err(e),
        },
    }
}

fn sweep(
    spec: &ProjectorSpec,
    k_range: &[usize],
    trials: usize,
    seed: u64,
    oracle: &Oracle,
) -> Result<Vec<ThresholdRow>> {
    if k_range.is_empty() {
        return Err(Error::InvalidArgument("empty k range".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    let cells: Vec<(usize, usize)> = k_range.iter().flat_map(|&k| (0..trials).map(move |t| (k, t))).collect();
    let outcomes =
        cells.par_iter().map(|&(k, t)| trial_is_unique(spec, k, t, seed, oracle)).collect::<Result<Vec<bool>>>()?;
    Ok(k_range
        .iter()
        .zip(outcomes.chunks(trials))
        .map(|(&k, chunk)| {
            let unique = chunk.iter().filter(|&&u| u).count();
            ThresholdRow { k, trials, unique, frequency: unique as f64 / trials as f64 }
        })
        .collect())
}

/// Per-`k` frequency of uniquely solvable generic instances and the
/// resulting threshold estimate.
pub fn estimate_generic_threshold(
    spec: &ProjectorSpec,
    k_range: &[usize],
    trials: usize,
    seed: u64,
    oracle: &Oracle,
) -> Result<ThresholdReport> {
    let rows = sweep(spec, k_range, trials, seed, oracle)?;
    let lambda_hat = rows.iter().find(|r| r.frequency >= GENERIC_LEVEL).map(|r| r.k);
    Ok(ThresholdReport {
        n: spec.n,
        rank: spec.rank,
        mode: spec.mode,
        projector: spec.label(),
        oracle: oracle.name(),
        seed,
        level: GENERIC_LEVEL,
        rows,
        lambda_hat,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassRow {
    pub class: String,
    pub rank: usize,
    pub k: usize,
    pub frequency: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassComparison {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub rows: Vec<ClassRow>,
}

impl ClassComparison {
    pub fn frequency(&self, class: &str, k: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.class == class && r.k == k).map(|r| r.frequency)
    }

    pub fn classes(&self) -> Vec<String> {
        let mut c: Vec<String> = self.rows.iter().map(|r| r.class.clone()).collect();
        c.dedup();
        c
    }
}

/// Success frequencies for Gaussian and Haar projectors of each rank, on
/// identical random streams.
pub fn compare_projector_classes(
    n: usize,
    k_range: &[usize],
    ranks: &[usize],
    trials: usize,
    seed: u64,
    oracle: &Oracle,
) -> Result<ClassComparison> {
    if ranks.is_empty() {
        return Err(Error::InvalidArgument("empty rank list".into()));
    }
    let mut rows = Vec::new();
    for distribution in [ProjectorDistribution::GenericGaussian, ProjectorDistribution::HaarOrthogonal] {
        for &rank in ranks {
            let spec = ProjectorSpec::new(n, rank, Mode::Real, distribution.clone())?;
            for row in sweep(&spec, k_range, trials, seed, oracle)? {
                rows.push(ClassRow { class: spec.label(), rank, k: row.k, frequency: row.frequency });
            }
        }
    }
    Ok(ClassComparison { n, trials, seed, rows })
}
