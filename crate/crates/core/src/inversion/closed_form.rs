//! Designs with fewer than the generic threshold of measurements that are
//! still solvable in closed form for signals with `z_1 != 0`.

use nalgebra::{DMatrix, DVector};

use crate::model::{MeasurementEnsemble, MeasurementMatrix, Observation, Signal};
use crate::{Error, Result};

const B1_FLOOR: f64 = 1e-12;

fn basis_outer(n: usize, i: usize, j: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    m[(i, j)] = 1.0;
    m
}

/// `A_1 = e1 e1^T` and `A_j = e1 e1^T + e_j e1^T + e1 e_j^T` for `j >= 2`,
/// so that `b_1 = z_1^2` and `b_j = z_1^2 + 2 z_1 z_j`.
pub fn ramex_ensemble(n: usize) -> Result<MeasurementEnsemble> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let e11 = basis_outer(n, 0, 0);
    let mut matrices = vec![e11.clone()];
    for j in 1..n {
        matrices.push(&e11 + basis_outer(n, j, 0) + basis_outer(n, 0, j));
    }
    MeasurementEnsemble::from_real(matrices)
}

fn first_entry(b: &DVector<f64>) -> Result<f64> {
    let b1 = *b.get(0).ok_or(Error::ZeroDimension)?;
    let scale = b.amax().max(f64::MIN_POSITIVE);
    if !(b1 > B1_FLOOR * scale) {
        return Err(Error::NonGenericSignal(format!("b_1 = {b1:e} must be positive")));
    }
    Ok(b1.sqrt())
}

/// `z_1 = sqrt(b_1)`, `z_j = (b_j - b_1) / (2 z_1)`.
pub fn solve_ramex(b: &DVector<f64>) -> Result<Signal> {
    let z1 = first_entry(b)?;
    let b1 = b[0];
    let z = DVector::from_fn(b.len(), |j, _| if j == 0 { z1 } else { (b[j] - b1) / (2.0 * z1) });
    Signal::real(z)
}

/// Split-form design with `2n - 1` measurements: `A_1`, the real `A_j` of
/// [`ramex_ensemble`], then `A~_j = e1 e1^T + i (e_j e1^T - e1 e_j^T)` which
/// measures `|z_1|^2 + 2 Im(conj(z_1) z_j)`.
pub fn complex_example_ensemble(n: usize) -> Result<MeasurementEnsemble> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let e11 = basis_outer(n, 0, 0);
    let zero = DMatrix::zeros(n, n);
    let mut matrices = vec![MeasurementMatrix::split(e11.clone(), zero.clone(), 1)?];
    for j in 1..n {
        let b = &e11 + basis_outer(n, j, 0) + basis_outer(n, 0, j);
        matrices.push(MeasurementMatrix::split(b, zero.clone(), 2)?);
    }
    for j in 1..n {
        let c = basis_outer(n, j, 0) - basis_outer(n, 0, j);
        matrices.push(MeasurementMatrix::split(e11.clone(), c, 2)?);
    }
    MeasurementEnsemble::new(matrices)
}

/// `b` holds `b_1..b_n`, `c` holds `c_2..c_n`. The representative has `z_1` real and positive.
pub fn solve_2b(b: &DVector<f64>, c: &DVector<f64>) -> Result<Signal> {
    let n = b.len();
    if c.len() + 1 != n {
        return Err(Error::DimensionMismatch { expected: n.saturating_sub(1), found: c.len() });
    }
    let z1 = first_entry(b)?;
    let b1 = b[0];
    let re = DVector::from_fn(n, |j, _| if j == 0 { z1 } else { (b[j] - b1) / (2.0 * z1) });
    let im = DVector::from_fn(n, |j, _| if j == 0 { 0.0 } else { (c[j - 1] - b1) / (2.0 * z1) });
    Signal::complex(re, im)
}

/// [`solve_2b`] on an observation of [`complex_example_ensemble`].
pub fn solve_2b_observation(obs: &Observation) -> Result<Signal> {
    let k = obs.k();
    if k == 0 || k.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("expected 2n - 1 measurements, got {k}")));
    }
    let n = k.div_ceil(2);
    solve_2b(&obs.b.rows(0, n).into_owned(), &obs.b.rows(n, n - 1).into_owned())
}
