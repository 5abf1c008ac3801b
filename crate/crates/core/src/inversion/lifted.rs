use std::time::Instant;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::canonical_sign;
use super::ideal::InversionOptions;
use super::report::{RecoveryReport, SolverKind};
use super::scale::recover_scale;
use crate::model::{MeasurementEnsemble, Observation, Signal};
use crate::polyspace::binomial;
use crate::{Error, Result};

/// Rows `(A_11, 2 A_12, A_22, ...)` in the degree-2 monomial order, so that
/// `design * vech(Z) = (Tr(A_i Z))_i` for symmetric `Z`.
pub fn lifted_design(ensemble: &MeasurementEnsemble) -> Result<DMatrix<f64>> {
    let matrices = ensemble.real_matrices()?;
    let n = ensemble.n();
    let cols = binomial(n + 1, 2);
    let pairs = upper_pairs(n);
    Ok(DMatrix::from_fn(matrices.len(), cols, |r, c| {
        let (i, j) = pairs[c];
        let a = matrices[r];
        if i == j {
            a[(i, i)]
        } else {
            a[(i, j)] + a[(j, i)]
        }
    }))
}

/// `(i, j)` with `i <= j`, ordered like the degree-2 monomials `X_i X_j`.
fn upper_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|j| (0..=j).map(move |i| (i, j))).collect()
}

/// Minimum-norm least-squares solve for the lifted matrix `Z = z z^T`,
/// followed by a rank-one truncation.
pub fn invert_lifted_least_squares(
    ensemble: &MeasurementEnsemble,
    obs: &Observation,
    opts: &InversionOptions,
) -> Result<RecoveryReport> {
    let start = Instant::now();
    let n = ensemble.n();
    if obs.k() != ensemble.k() {
        return Err(Error::DimensionMismatch { expected: ensemble.k(), found: obs.k() });
    }
    let design = lifted_design(ensemble)?;
    let cols = design.ncols();
    let svd = design.svd(true, true);
    let smax = svd.singular_values.max();
    let w = svd.solve(&obs.b, 1e-12 * smax).map_err(|e| Error::InvalidArgument(format!("lifted solve failed: {e}")))?;
    let mut z = DMatrix::zeros(n, n);
    for (c, &(i, j)) in upper_pairs(n).iter().enumerate() {
        z[(i, j)] = w[c];
        z[(j, i)] = w[c];
    }
    let eig = SymmetricEigen::new(z);
    let top = eig.eigenvalues.imax();
    let direction = canonical_sign(eig.eigenvectors.column(top).into_owned());
    let fit = recover_scale(&direction, ensemble, obs)?;
    let z_hat: DVector<f64> = fit.z_hat;
    Ok(RecoveryReport {
        solver: SolverKind::LiftedLs,
        z_hat: Signal::Real(z_hat),
        rel_error: None,
        stop_degree: None,
        singular_gap: None,
        catalecticant_separation: None,
        alpha: fit.alpha,
        scale_fallback: fit.fallback,
        underdetermined: ensemble.k() < cols,
        well_conditioned: true,
        success: true,
        success_threshold: opts.success_threshold,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
        trace: Vec::new(),
    })
}
