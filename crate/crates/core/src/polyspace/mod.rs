//! Homogeneous polynomials in coefficient form, degree prolongation and the
//! numerical decisions that turn a set of quadrics into a point estimate.

mod catalecticant;
mod dual;
mod form;
mod monomial;
mod prolong;
mod rank;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub use catalecticant::{catalecticant_extract, catalecticant_factor, catalecticant_matrix, Catalecticant};
pub use form::{quadric_from_matrix, veronese, FormCoeffs, FormJson};
pub use monomial::{binomial, monomial_basis, BasisDescriptor, MonomialBasis};
pub use prolong::{prolong, DegreeTrace, NullDirection, ProlongOptions, ProlongationDiagnostics, ProlongationMatrix};
pub use rank::{RankEstimate, RankRule};

use crate::linalg::right_svd;
use crate::{Error, Result};

/// How the degree-`t` complement of the quadric ideal is computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NullSpaceEngine {
    /// Inverse-system recursion; cost grows with the complement, not with
    /// the full monomial count.
    #[default]
    Dual,
    /// SVD of the full prolongation matrix at each degree.
    Dense,
}

/// First degree at which the complement is at most one-dimensional.
#[derive(Clone, Debug)]
pub struct Saturation {
    pub degree: usize,
    pub estimate: RankEstimate,
    /// Unit moment vector indexed by the degree-`degree` basis.
    pub moment: DVector<f64>,
    pub trace: Vec<DegreeTrace>,
}

impl Saturation {
    pub fn gap(&self) -> f64 {
        self.estimate.gap
    }
}

/// Raises the degree until the estimated codimension drops to 1 (or 0 when
/// noise has removed the exact null vector).
pub fn saturate(quadrics: &[FormCoeffs], engine: NullSpaceEngine, opts: &ProlongOptions) -> Result<Saturation> {
    let n = quadrics.first().ok_or(Error::EmptyQuadrics)?.n();
    let cap = opts.cap_for(n);
    let mut trace = Vec::new();
    match engine {
        NullSpaceEngine::Dual => {
            let (mut state, mut step) = dual::DualRecursion::start(quadrics, opts.rank_rule)?;
            loop {
                trace.push(step.trace.clone());
                if step.estimate.codim <= 1 {
                    return Ok(Saturation {
                        degree: step.basis.degree(),
                        estimate: step.estimate,
                        moment: step.candidate,
                        trace,
                    });
                }
                if state.degree() >= cap {
                    return Err(Error::NotIdentifiable { max_degree: cap, trace });
                }
                step = state.advance()?;
            }
        }
        NullSpaceEngine::Dense => {
            let spanned = orthonormal_span(quadrics, opts.rank_rule)?;
            for t in 2..=cap {
                let p = prolong(&spanned, t, opts)?;
                trace.push(p.trace());
                if p.codim() <= 1 {
                    return Ok(Saturation {
                        degree: t,
                        estimate: p.estimate(),
                        moment: p.smallest_direction().vector,
                        trace,
                    });
                }
            }
            Err(Error::NotIdentifiable { max_degree: cap, trace })
        }
    }
}

/// Orthonormal coefficient vectors spanning the same space as `quadrics`.
/// Same ideal, better conditioned prolongation rows.
pub fn orthonormal_span(quadrics: &[FormCoeffs], rule: RankRule) -> Result<Vec<FormCoeffs>> {
    let first = quadrics.first().ok_or(Error::EmptyQuadrics)?;
    let (n, cols) = (first.n(), first.coeffs().len());
    let coeffs = DMatrix::from_fn(quadrics.len(), cols, |r, c| quadrics[r].coeffs()[c]);
    let svd = right_svd(&coeffs);
    let s0 = svd.values[0];
    let rank = svd.values.iter().take(quadrics.len()).filter(|&&s| s > rule.rel_tol * 1e-4 * s0).count();
    (0..rank.max(1)).map(|j| FormCoeffs::new(n, 2, svd.v.column(j).into_owned())).collect()
}
