use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::model::MeasurementEnsemble;
use crate::{Error, Result};

/// Relative tolerance for counting singular values of the Jacobian.
pub const JACOBIAN_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JacobianReport {
    pub rank: usize,
    /// Smallest of the `n` singular values, zero when `k < n`.
    pub smallest_singular_value: f64,
    pub singular_values: Vec<f64>,
    pub tolerance: f64,
}

/// Rank of the `k x n` matrix with rows `2 (A_i z)^T`.
pub fn jacobian_rank(ensemble: &MeasurementEnsemble, z: &DVector<f64>) -> Result<JacobianReport> {
    let matrices = ensemble.real_matrices()?;
    let n = ensemble.n();
    if z.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: z.len() });
    }
    let mut jac = DMatrix::zeros(matrices.len(), n);
    for (i, a) in matrices.iter().enumerate() {
        jac.row_mut(i).copy_from(&(*a * z * 2.0).transpose());
    }
    let mut values: Vec<f64> = jac.singular_values().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values.resize(n, 0.0);
    let smax = values[0];
    let tolerance = JACOBIAN_TOL * smax;
    let rank = if smax > 0.0 { values.iter().filter(|&&s| s > tolerance).count() } else { 0 };
    Ok(JacobianReport { rank, smallest_singular_value: values[n - 1], singular_values: values, tolerance })
}
