use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::form::FormCoeffs;
use super::monomial::MonomialBasis;
use super::rank::{RankEstimate, RankRule};
use crate::linalg::right_svd;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, serde::Deserialize)]
pub struct ProlongOptions {
    /// Highest admissible degree; `None` means the number of variables.
    pub degree_cap: Option<usize>,
    pub rank_rule: RankRule,
}

impl ProlongOptions {
    pub fn cap_for(&self, n: usize) -> usize {
        self.degree_cap.unwrap_or(n).max(2)
    }
}

/// Per-degree summary of a rank decision.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeTrace {
    pub degree: usize,
    pub rows: usize,
    pub cols: usize,
    pub codim: usize,
    pub below_tol: usize,
    pub gap: f64,
    pub sigma_max: f64,
    pub sigma_min: f64,
}

impl DegreeTrace {
    pub(crate) fn new(degree: usize, rows: usize, cols: usize, values: &[f64], est: &RankEstimate) -> Self {
        Self {
            degree,
            rows,
            cols,
            codim: est.codim,
            below_tol: est.below_tol,
            gap: est.gap,
            sigma_max: values.first().copied().unwrap_or(0.0),
            sigma_min: if values.len() == cols { values.last().copied().unwrap_or(0.0) } else { 0.0 },
        }
    }
}

/// Coefficient rows of all products `m * q`, `m` a monomial of degree `t - 2`.
#[derive(Clone, Debug)]
pub struct ProlongationMatrix {
    degree: usize,
    basis: MonomialBasis,
    matrix: DMatrix<f64>,
    singular_values: Vec<f64>,
    right: DMatrix<f64>,
    rule: RankRule,
    estimate: RankEstimate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NullDirection {
    pub vector: DVector<f64>,
    pub gap: f64,
}

pub fn prolong(quadrics: &[FormCoeffs], t: usize, opts: &ProlongOptions) -> Result<ProlongationMatrix> {
    let first = quadrics.first().ok_or(Error::EmptyQuadrics)?;
    let n = first.n();
    for q in quadrics {
        if q.degree() != 2 {
            return Err(Error::InvalidArgument(format!("expected a quadric, got degree {}", q.degree())));
        }
        if q.n() != n {
            return Err(Error::DimensionMismatch { expected: n, found: q.n() });
        }
    }
    if t < 2 {
        return Err(Error::DegreeTooLow(t));
    }
    let cap = opts.cap_for(n);
    if t > cap {
        return Err(Error::DegreeCap { degree: t, cap });
    }
    let quad_basis = MonomialBasis::new(n, 2)?;
    let mult_basis = MonomialBasis::new(n, t - 2)?;
    let basis = MonomialBasis::new(n, t)?;
    let mut matrix = DMatrix::zeros(quadrics.len() * mult_basis.len(), basis.len());
    let mut row = 0;
    for q in quadrics {
        for beta in mult_basis.iter() {
            for (alpha, &c) in quad_basis.iter().zip(q.coeffs().iter()) {
                if c != 0.0 {
                    let col = basis.index_of_sum(alpha, beta).expect("degrees add up");
                    matrix[(row, col)] += c;
                }
            }
            row += 1;
        }
    }
    let svd = right_svd(&matrix);
    let estimate = opts.rank_rule.estimate(&svd.values, basis.len());
    Ok(ProlongationMatrix {
        degree: t,
        basis,
        matrix,
        singular_values: svd.values,
        right: svd.v,
        rule: opts.rank_rule,
        estimate,
    })
}

impl ProlongationMatrix {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn rank_rule(&self) -> RankRule {
        self.rule
    }

    pub fn estimate(&self) -> RankEstimate {
        self.estimate
    }

    pub fn rank(&self) -> usize {
        self.estimate.rank
    }

    pub fn codim(&self) -> usize {
        self.estimate.codim
    }

    pub fn trace(&self) -> DegreeTrace {
        DegreeTrace::new(self.degree, self.matrix.nrows(), self.matrix.ncols(), &self.singular_values, &self.estimate)
    }

    /// Unit right singular vector of the smallest singular value.
    pub fn null_direction(&self) -> Result<NullDirection> {
        if self.estimate.codim != 1 {
            return Err(Error::CodimNotOne(self.estimate.codim));
        }
        Ok(self.smallest_direction())
    }

    /// Same as [`Self::null_direction`] without the codimension check.
    pub fn smallest_direction(&self) -> NullDirection {
        let last = self.right.ncols() - 1;
        NullDirection { vector: self.right.column(last).into_owned(), gap: self.estimate.gap }
    }

    pub fn diagnostics(&self) -> ProlongationDiagnostics {
        ProlongationDiagnostics {
            schema: "phasealg/prolongation@1",
            basis: self.basis.descriptor(),
            rows: self.matrix.nrows(),
            rank_rule: self.rule,
            estimate: self.estimate,
            singular_values: self.singular_values.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProlongationDiagnostics {
    pub schema: &'static str,
    pub basis: super::monomial::BasisDescriptor,
    pub rows: usize,
    pub rank_rule: RankRule,
    pub estimate: RankEstimate,
    pub singular_values: Vec<f64>,
}
