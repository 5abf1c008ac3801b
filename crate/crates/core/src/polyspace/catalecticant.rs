use nalgebra::{DMatrix, DVector};

use super::monomial::MonomialBasis;
use crate::linalg::right_svd;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Catalecticant {
    /// Unit left factor, largest-magnitude entry positive.
    pub direction: DVector<f64>,
    pub singular_values: Vec<f64>,
    /// `sigma_1 / sigma_2`; infinite when `n = 1` or the matrix is exactly rank one.
    pub separation: f64,
}

/// `C[i, beta] = m_{e_i + beta}` for `beta` of degree `t - 1`.
pub fn catalecticant_matrix(m: &DVector<f64>, n: usize, t: usize) -> Result<DMatrix<f64>> {
    if t < 1 {
        return Err(Error::DegreeTooLow(t));
    }
    let basis = MonomialBasis::new(n, t)?;
    if m.len() != basis.len() {
        return Err(Error::DimensionMismatch { expected: basis.len(), found: m.len() });
    }
    let lower = MonomialBasis::new(n, t - 1)?;
    let mut unit = vec![0u16; n];
    let mut c = DMatrix::zeros(n, lower.len());
    for i in 0..n {
        unit[i] = 1;
        for (j, beta) in lower.iter().enumerate() {
            c[(i, j)] = m[basis.index_of_sum(&unit, beta).expect("degrees add up")];
        }
        unit[i] = 0;
    }
    Ok(c)
}

/// Rank-one factorization of a moment vector without a separation check.
pub fn catalecticant_factor(m: &DVector<f64>, n: usize, t: usize) -> Result<Catalecticant> {
    let c = catalecticant_matrix(m, n, t)?;
    if c.amax() == 0.0 {
        return Err(Error::ZeroMoment);
    }
    let svd = right_svd(&c.transpose());
    let mut direction = svd.v.column(0).into_owned();
    let lead = direction.iamax();
    if direction[lead] < 0.0 {
        direction.neg_mut();
    }
    let separation = match svd.values.get(1) {
        Some(&s2) if s2 > 0.0 => svd.values[0] / s2,
        _ => f64::INFINITY,
    };
    Ok(Catalecticant { direction, singular_values: svd.values, separation })
}

pub fn catalecticant_extract(m: &DVector<f64>, n: usize, t: usize, min_separation: f64) -> Result<Catalecticant> {
    if t < 2 {
        return Err(Error::DegreeTooLow(t));
    }
    let cat = catalecticant_factor(m, n, t)?;
    if cat.separation < min_separation {
        return Err(Error::AmbiguousRankOne { ratio: cat.separation, required: min_separation });
    }
    Ok(cat)
}
