use serde::{Deserialize, Serialize, Serializer};

use crate::model::Signal;
use crate::polyspace::DegreeTrace;
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    IdealRegression,
    #[serde(alias = "lifted-least-squares")]
    LiftedLs,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::IdealRegression => "ideal-regression",
            Self::LiftedLs => "lifted-ls",
        }
    }
}

impl std::str::FromStr for SolverKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ideal-regression" | "ideal" => Ok(Self::IdealRegression),
            "lifted-ls" | "lifted-least-squares" | "lifted" => Ok(Self::LiftedLs),
            other => Err(format!("unknown solver {other:?}")),
        }
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecoveryReport {
    pub solver: SolverKind,
    #[serde(serialize_with = "signal_coords")]
    pub z_hat: Signal,
    /// `min(|z_hat - z|, |z_hat + z|) / |z|`, set by [`Self::with_truth`].
    pub rel_error: Option<f64>,
    pub stop_degree: Option<usize>,
    pub singular_gap: Option<f64>,
    pub catalecticant_separation: Option<f64>,
    pub alpha: f64,
    pub scale_fallback: bool,
    pub underdetermined: bool,
    pub well_conditioned: bool,
    pub success: bool,
    pub success_threshold: f64,
    pub wall_ms: f64,
    pub trace: Vec<DegreeTrace>,
}

impl RecoveryReport {
    pub fn with_truth(mut self, truth: &Signal) -> Result<Self> {
        let err = self.z_hat.relative_error(truth)?;
        self.rel_error = Some(err);
        self.success = self.well_conditioned && err <= self.success_threshold;
        Ok(self)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn signal_coords<S: Serializer>(z: &Signal, s: S) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Coords<'a> {
        re: &'a [f64],
        #[serde(skip_serializing_if = "Option::is_none")]
        im: Option<&'a [f64]>,
    }
    match z {
        Signal::Real(v) => Coords { re: v.as_slice(), im: None }.serialize(s),
        Signal::ComplexSplit { re, im } => Coords { re: re.as_slice(), im: Some(im.as_slice()) }.serialize(s),
    }
}
