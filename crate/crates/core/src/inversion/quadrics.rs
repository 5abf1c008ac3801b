use nalgebra::DMatrix;

use crate::model::{MeasurementEnsemble, Observation};
use crate::polyspace::{quadric_from_matrix, FormCoeffs};
use crate::{Error, Result};

/// Measurements with `|b_i| <= DEFAULT_B_FLOOR * max|b|` are rejected.
pub const DEFAULT_B_FLOOR: f64 = 1e-10;

/// Mean-centred quadrics `q_i = X^T (A_i/b_i - mean_j A_j/b_j) X`.
#[derive(Clone, Debug)]
pub struct QuadricSet {
    n: usize,
    all: Vec<FormCoeffs>,
    constants: Vec<f64>,
    dropped: usize,
}

impl QuadricSet {
    pub fn n(&self) -> usize {
        self.n
    }

    /// The `k - 1` retained quadrics.
    pub fn quadrics(&self) -> Vec<FormCoeffs> {
        self.retained().map(|i| self.all[i].clone()).collect()
    }

    /// Measurement indices of [`Self::quadrics`].
    pub fn retained(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.all.len()).filter(move |&i| i != self.dropped)
    }

    pub fn dropped(&self) -> usize {
        self.dropped
    }

    /// All `k` centred quadrics; they sum to zero.
    pub fn all(&self) -> &[FormCoeffs] {
        &self.all
    }

    /// Constant terms `b_i/b_i - mean_j(b_j/b_j)`; zero by construction.
    pub fn constant_terms(&self) -> &[f64] {
        &self.constants
    }
}

pub fn normalize_quadrics(ensemble: &MeasurementEnsemble, obs: &Observation) -> Result<QuadricSet> {
    normalize_quadrics_with(ensemble, obs, DEFAULT_B_FLOOR)
}

pub(crate) fn normalize_quadrics_with(
    ensemble: &MeasurementEnsemble,
    obs: &Observation,
    b_floor: f64,
) -> Result<QuadricSet> {
    let matrices = ensemble.real_matrices()?;
    let k = matrices.len();
    if obs.k() != k {
        return Err(Error::DimensionMismatch { expected: k, found: obs.k() });
    }
    if k < 2 {
        return Err(Error::InvalidArgument("normalization needs k >= 2".into()));
    }
    let max_b = obs.b.amax();
    let floor = b_floor * max_b;
    if let Some((index, &value)) = obs.b.iter().enumerate().find(|(_, b)| !(b.abs() > floor)) {
        return Err(Error::NonGenericMeasurement { index, value });
    }
    let n = ensemble.n();
    let scaled: Vec<DMatrix<f64>> = matrices.iter().zip(obs.b.iter()).map(|(a, &b)| *a / b).collect();
    let mean = scaled.iter().fold(DMatrix::zeros(n, n), |acc, m| acc + m) / k as f64;
    let all = scaled.iter().map(|m| quadric_from_matrix(&(m - &mean))).collect::<Result<Vec<_>>>()?;
    // Each scaled form has constant term b_i / b_i = 1, so the centered ones vanish.
    let constants = vec![0.0; k];
    let dropped = all
        .iter()
        .map(|q| q.coeffs().norm())
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
        .expect("k >= 2");
    Ok(QuadricSet { n, all, constants, dropped })
}
