use nalgebra::DVector;

use crate::model::{MeasurementEnsemble, Observation};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ScaleFit {
    pub alpha: f64,
    pub z_hat: DVector<f64>,
    /// The least-squares fit was used because some `u_i` or `b_i` was not positive.
    pub fallback: bool,
}

/// Chooses `alpha` so that `z_hat = alpha * z_dir` reproduces the
/// measurements: `alpha = exp(mean_i (log b_i - log u_i) / 2)` with
/// `u_i = z_dir^T A_i z_dir`, or `alpha^2 = sum b u / sum u^2` when a log is
/// undefined.
pub fn recover_scale(z_dir: &DVector<f64>, ensemble: &MeasurementEnsemble, obs: &Observation) -> Result<ScaleFit> {
    let matrices = ensemble.real_matrices()?;
    if z_dir.len() != ensemble.n() {
        return Err(Error::DimensionMismatch { expected: ensemble.n(), found: z_dir.len() });
    }
    if obs.k() != matrices.len() {
        return Err(Error::DimensionMismatch { expected: matrices.len(), found: obs.k() });
    }
    let u: Vec<f64> = matrices.iter().map(|a| z_dir.dot(&(*a * z_dir))).collect();
    let positive = u.iter().zip(obs.b.iter()).all(|(&u, &b)| u > 0.0 && b > 0.0);
    let (alpha, fallback) = if positive {
        let mean_log = u.iter().zip(obs.b.iter()).map(|(&u, &b)| b.ln() - u.ln()).sum::<f64>() / u.len() as f64;
        ((0.5 * mean_log).exp(), false)
    } else {
        let num: f64 = u.iter().zip(obs.b.iter()).map(|(&u, &b)| u * b).sum();
        let den: f64 = u.iter().map(|&u| u * u).sum();
        if !(den > 0.0 && num > 0.0) {
            return Err(Error::NonPositiveScale);
        }
        ((num / den).sqrt(), true)
    };
    Ok(ScaleFit { alpha, z_hat: z_dir * alpha, fallback })
}
