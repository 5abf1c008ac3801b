use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::quadrics::{normalize_quadrics_with, DEFAULT_B_FLOOR};
use super::report::{RecoveryReport, SolverKind};
use super::scale::recover_scale;
use crate::model::{MeasurementEnsemble, Observation, Signal};
use crate::polyspace::{catalecticant_factor, saturate, NullSpaceEngine, ProlongOptions};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InversionOptions {
    pub success_threshold: f64,
    pub engine: NullSpaceEngine,
    pub prolong: ProlongOptions,
    /// Smallest acceptable `sigma_{last-1} / sigma_last` at the stop degree.
    pub min_gap: f64,
    /// Smallest acceptable `sigma_1 / sigma_2` of the catalecticant.
    pub min_separation: f64,
    pub b_floor: f64,
}

impl Default for InversionOptions {
    fn default() -> Self {
        Self {
            success_threshold: 1e-6,
            engine: NullSpaceEngine::Dual,
            prolong: ProlongOptions::default(),
            min_gap: 10.0,
            min_separation: 10.0,
            b_floor: DEFAULT_B_FLOOR,
        }
    }
}

/// Quadrics -> saturated complement -> moment vector -> rank-one factor -> scale.
///
/// An ill-conditioned stop (gap or separation below the configured minimum)
/// is returned as [`Error::IllConditioned`] carrying the full report, so the
/// estimate stays available to callers that want it.
pub fn invert_ideal_regression(
    ensemble: &MeasurementEnsemble,
    obs: &Observation,
    opts: &InversionOptions,
) -> Result<RecoveryReport> {
    let start = Instant::now();
    let quadrics = normalize_quadrics_with(ensemble, obs, opts.b_floor)?;
    let n = quadrics.n();
    let saturation = saturate(&quadrics.quadrics(), opts.engine, &opts.prolong)?;
    let cat = catalecticant_factor(&saturation.moment, n, saturation.degree)?;
    let fit = recover_scale(&cat.direction, ensemble, obs)?;
    let well_conditioned = saturation.gap() >= opts.min_gap && cat.separation >= opts.min_separation;
    let report = RecoveryReport {
        solver: SolverKind::IdealRegression,
        z_hat: Signal::Real(fit.z_hat),
        rel_error: None,
        stop_degree: Some(saturation.degree),
        singular_gap: Some(saturation.gap()),
        catalecticant_separation: Some(cat.separation),
        alpha: fit.alpha,
        scale_fallback: fit.fallback,
        underdetermined: false,
        well_conditioned,
        success: well_conditioned,
        success_threshold: opts.success_threshold,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
        trace: saturation.trace,
    };
    if well_conditioned {
        Ok(report)
    } else {
        Err(Error::IllConditioned(Box::new(report)))
    }
}
