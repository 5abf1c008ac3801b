use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::monomial::{BasisDescriptor, MonomialBasis};
use crate::linalg::max_asymmetry;
use crate::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;

/// Homogeneous form `f(z) = sum_alpha c_alpha z^alpha` over a [`MonomialBasis`].
#[derive(Clone, Debug, PartialEq)]
pub struct FormCoeffs {
    n: usize,
    degree: usize,
    coeffs: DVector<f64>,
}

impl FormCoeffs {
    pub fn new(n: usize, degree: usize, coeffs: DVector<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let expected = super::binomial(n + degree - 1, degree);
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch { expected, found: coeffs.len() });
        }
        Ok(Self { n, degree, coeffs })
    }

    pub fn zeros(n: usize, degree: usize) -> Result<Self> {
        Self::new(n, degree, DVector::zeros(super::binomial(n + degree - 1, degree)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &DVector<f64> {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> DVector<f64> {
        self.coeffs
    }

    pub fn evaluate(&self, z: &DVector<f64>) -> Result<f64> {
        let basis = MonomialBasis::new(self.n, self.degree)?;
        self.evaluate_with(&basis, z)
    }

    pub fn evaluate_with(&self, basis: &MonomialBasis, z: &DVector<f64>) -> Result<f64> {
        Ok(self.coeffs.dot(&veronese(basis, z)?))
    }

    pub fn to_json(&self) -> FormJson {
        let basis = MonomialBasis::new(self.n, self.degree).expect("validated at construction");
        FormJson { schema: "phasealg/form@1", basis: basis.descriptor(), coeffs: self.coeffs.iter().copied().collect() }
    }
}

impl std::ops::Sub for &FormCoeffs {
    type Output = FormCoeffs;
    fn sub(self, rhs: &FormCoeffs) -> FormCoeffs {
        assert_eq!((self.n, self.degree), (rhs.n, rhs.degree), "form shapes differ");
        FormCoeffs { n: self.n, degree: self.degree, coeffs: &self.coeffs - &rhs.coeffs }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FormJson {
    pub schema: &'static str,
    pub basis: BasisDescriptor,
    pub coeffs: Vec<f64>,
}

/// The moment vector `v_t(z) = (z^alpha)_alpha`.
pub fn veronese(basis: &MonomialBasis, z: &DVector<f64>) -> Result<DVector<f64>> {
    if z.len() != basis.n() {
        return Err(Error::DimensionMismatch { expected: basis.n(), found: z.len() });
    }
    Ok(DVector::from_iterator(
        basis.len(),
        basis.iter().map(|alpha| alpha.iter().zip(z.iter()).map(|(&a, &x)| x.powi(a as i32)).product::<f64>()),
    ))
}

/// Degree-2 form `z -> z^T A z`: `c_{2e_i} = A_ii`, `c_{e_i+e_j} = 2 A_ij`.
pub fn quadric_from_matrix(a: &DMatrix<f64>) -> Result<FormCoeffs> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a.ncols() });
    }
    let deviation = max_asymmetry(a);
    let scale = a.amax().max(1.0);
    if deviation > SYMMETRY_TOL * scale {
        return Err(Error::Asymmetric { deviation });
    }
    let basis = MonomialBasis::new(n, 2)?;
    let coeffs = DVector::from_iterator(
        basis.len(),
        basis.iter().map(|alpha| {
            let mut idx = alpha.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, _)| i);
            let i = idx.next().expect("degree-2 monomial");
            match idx.next() {
                None => a[(i, i)],
                Some(j) => a[(i, j)] + a[(j, i)],
            }
        }),
    );
    FormCoeffs::new(n, 2, coeffs)
}
