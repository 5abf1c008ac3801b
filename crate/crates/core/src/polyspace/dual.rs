//! Saturation via the inverse system.
//!
//! For an ideal generated in degree 2, the orthogonal complement `N_t` of its
//! degree-`t` part consists of exactly those moment vectors whose every
//! contraction `(d_j m)_g = m_{g + e_j}` lies in `N_{t-1}`. Writing the
//! contractions as `W y_j` for an orthonormal basis `W` of `N_{t-1}`, the
//! unknowns `y_1..y_n` must agree wherever two contractions describe the same
//! entry of `m`. The resulting constraint matrix has `n * dim N_{t-1}`
//! columns, far fewer than the prolongation matrix at the same degree.

use nalgebra::{DMatrix, DVector};

use super::form::FormCoeffs;
use super::monomial::MonomialBasis;
use super::prolong::DegreeTrace;
use super::rank::{RankEstimate, RankRule};
use crate::linalg::{orthonormal_columns, right_svd};
use crate::{Error, Result};

pub(crate) struct DualStep {
    pub trace: DegreeTrace,
    pub estimate: RankEstimate,
    /// Unit vector spanning the smallest singular direction, mapped to
    /// moment coordinates.
    pub candidate: DVector<f64>,
    pub basis: MonomialBasis,
}

pub(crate) struct DualRecursion {
    n: usize,
    rule: RankRule,
    basis: MonomialBasis,
    w: DMatrix<f64>,
}

impl DualRecursion {
    pub fn start(quadrics: &[FormCoeffs], rule: RankRule) -> Result<(Self, DualStep)> {
        let first = quadrics.first().ok_or(Error::EmptyQuadrics)?;
        let n = first.n();
        let basis = MonomialBasis::new(n, 2)?;
        let cols = basis.len();
        let coeffs = DMatrix::from_fn(quadrics.len(), cols, |r, c| quadrics[r].coeffs()[c]);
        let svd = right_svd(&coeffs);
        let estimate = rule.estimate(&svd.values, cols);
        let keep = estimate.codim.max(1);
        let w = svd.v.columns(cols - keep, keep).into_owned();
        let step = DualStep {
            trace: DegreeTrace::new(2, quadrics.len(), cols, &svd.values, &estimate),
            estimate,
            candidate: svd.v.column(cols - 1).into_owned(),
            basis: basis.clone(),
        };
        Ok((Self { n, rule, basis, w }, step))
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    /// Moves from `N_{t-1}` to `N_t`.
    pub fn advance(&mut self) -> Result<DualStep> {
        let n = self.n;
        let t = self.basis.degree() + 1;
        let next = MonomialBasis::new(n, t)?;
        let c = self.w.ncols();
        let lowered = |alpha: &[u16], j: usize| self.basis.index_of_lowered(alpha, j).expect("support index");

        let rows: usize = next.iter().map(|a| a.iter().filter(|&&e| e > 0).count() - 1).sum();
        let mut k = DMatrix::zeros(rows, n * c);
        let mut r = 0;
        for alpha in next.iter() {
            let mut support = (0..n).filter(|&j| alpha[j] > 0);
            let j0 = support.next().expect("nonzero degree");
            let i0 = lowered(alpha, j0);
            for l in support {
                let il = lowered(alpha, l);
                for col in 0..c {
                    k[(r, l * c + col)] += self.w[(il, col)];
                    k[(r, j0 * c + col)] -= self.w[(i0, col)];
                }
                r += 1;
            }
        }
        let svd = right_svd(&k);
        let estimate = self.rule.estimate(&svd.values, n * c);
        let keep = estimate.codim.max(1);
        let y = svd.v.columns(n * c - keep, keep);

        let mut m = DMatrix::zeros(next.len(), keep);
        for (ai, alpha) in next.iter().enumerate() {
            let j0 = alpha.iter().position(|&e| e > 0).expect("nonzero degree");
            let i0 = lowered(alpha, j0);
            for v in 0..keep {
                m[(ai, v)] = (0..c).map(|col| self.w[(i0, col)] * y[(j0 * c + col, v)]).sum();
            }
        }
        let mut candidate = m.column(keep - 1).into_owned();
        let norm = candidate.norm();
        if norm > 0.0 {
            candidate /= norm;
        }
        let trace = DegreeTrace::new(t, rows, n * c, &svd.values, &estimate);
        if estimate.codim >= 2 {
            self.w = orthonormal_columns(m);
        }
        self.basis = next.clone();
        Ok(DualStep { trace, estimate, candidate, basis: next })
    }
}
