use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::inversion::{InversionOptions, SolverKind};
use crate::model::{Mode, ProjectorDistribution, ProjectorSpec};
use crate::polyspace::NullSpaceEngine;
use crate::{Error, Result};

/// Dimension from which a sweep must be explicitly enabled with
/// `allow_large`. Degree-n prolongation at n = 10 needs several GB of memory
/// and minutes per trial.
pub const LARGE_N: usize = 10;

/// Either an explicit list of `k` or an inclusive span.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KRange {
    List(Vec<usize>),
    Span { start: usize, end: usize },
}

impl KRange {
    pub fn values(&self) -> Vec<usize> {
        match self {
            Self::List(v) => v.clone(),
            Self::Span { start, end } => (*start..=*end).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProjectorConfig {
    pub distribution: ProjectorDistribution,
    pub rank: usize,
}

impl Default for ProjectorConfig {
    fn default() -> Self {
        Self { distribution: ProjectorDistribution::HaarOrthogonal, rank: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    /// Defaults to `n+1 ..= 3n`.
    #[serde(default)]
    pub k_range: Option<KRange>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Noise standard deviations.
    #[serde(default = "default_sigma")]
    pub sigma: Vec<f64>,
    #[serde(default)]
    pub projector: ProjectorConfig,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default = "default_solvers")]
    pub solvers: Vec<SolverKind>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "default_threshold")]
    pub success_threshold: f64,
    #[serde(default)]
    pub engine: NullSpaceEngine,
    /// Record wall-clock time per solve. Off by default since timings break
    /// byte-identical reruns.
    #[serde(default)]
    pub timing: bool,
    /// Required for `n >= LARGE_N`.
    #[serde(default)]
    pub allow_large: bool,
}

fn default_trials() -> usize {
    100
}
fn default_sigma() -> Vec<f64> {
    vec![0.0]
}
fn default_mode() -> Mode {
    Mode::Real
}
fn default_solvers() -> Vec<SolverKind> {
    vec![SolverKind::IdealRegression]
}
fn default_threshold() -> f64 {
    1e-6
}

impl ExperimentConfig {
    /// Noiseless Haar rank-1 sweep over the default `k` range.
    pub fn new(n: usize) -> Self {
        Self {
            n,
            k_range: None,
            trials: default_trials(),
            sigma: default_sigma(),
            projector: ProjectorConfig::default(),
            mode: Mode::Real,
            solvers: default_solvers(),
            seed: 0,
            out_dir: None,
            success_threshold: default_threshold(),
            engine: NullSpaceEngine::default(),
            timing: false,
            allow_large: false,
        }
    }

    pub fn ks(&self) -> Vec<usize> {
        match &self.k_range {
            Some(r) => r.values(),
            None => (self.n + 1..=3 * self.n).collect(),
        }
    }

    pub fn projector_spec(&self) -> Result<ProjectorSpec> {
        ProjectorSpec::new(self.n, self.projector.rank, self.mode, self.projector.distribution.clone())
    }

    pub fn inversion_options(&self) -> InversionOptions {
        InversionOptions { success_threshold: self.success_threshold, engine: self.engine, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::ZeroDimension);
        }
        if self.n >= LARGE_N && !self.allow_large {
            return Err(Error::InvalidArgument(format!(
                "n = {} needs allow_large: degree-n prolongation at this size takes GBs of memory and minutes per trial",
                self.n
            )));
        }
        let ks = self.ks();
        if ks.is_empty() {
            return Err(Error::InvalidArgument("k range is empty".into()));
        }
        if ks.contains(&0) {
            return Err(Error::InvalidArgument("k must be >= 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be >= 1".into()));
        }
        if self.sigma.is_empty() {
            return Err(Error::InvalidArgument("sigma list is empty".into()));
        }
        if let Some(s) = self.sigma.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
            return Err(Error::InvalidArgument(format!("noise level must be finite and >= 0, got {s}")));
        }
        if self.solvers.is_empty() {
            return Err(Error::InvalidArgument("solver list is empty".into()));
        }
        if !(self.success_threshold > 0.0) {
            return Err(Error::InvalidArgument("success threshold must be > 0".into()));
        }
        if self.mode != Mode::Real {
            return Err(Error::RealModeRequired);
        }
        if let ProjectorDistribution::Explicit(_) = self.projector.distribution {
            return Err(Error::InvalidArgument("explicit projectors are not supported in sweeps".into()));
        }
        self.projector_spec().map(|_| ())
    }

    /// TOML unless the extension is `.json`.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            Ok(serde_json::from_str(&text)?)
        } else {
            Ok(toml::from_str(&text)?)
        }
    }
}
