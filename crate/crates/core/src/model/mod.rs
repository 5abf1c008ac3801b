//! Signals, measurement ensembles and the forward maps `z -> (|P_i z|^2)_i`.
//!
//! Complex data is carried in split form: `z = x + i y` becomes the pair
//! `(x, y)` and a Hermitian `P^* P = B + i C` becomes the real pair `(B, C)`
//! with `B` symmetric and `C` antisymmetric. In that form
//! `|P z|^2 = x^T B x + y^T B y - 2 x^T C y = <R, B> + <Phi, C>` with
//! `R = x x^T + y y^T`, `Phi = y x^T - x y^T` and `<.,.>` the Frobenius pairing.

mod schema;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub use schema::{HexF64, InstanceFile, MatrixRecord, SignalRecord, SCHEMA};

use crate::linalg::max_asymmetry;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Real,
    ComplexSplit,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Signal {
    Real(DVector<f64>),
    ComplexSplit { re: DVector<f64>, im: DVector<f64> },
}

impl Signal {
    pub fn real(coords: DVector<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::ZeroDimension);
        }
        Ok(Self::Real(coords))
    }

    pub fn complex(re: DVector<f64>, im: DVector<f64>) -> Result<Self> {
        if re.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if re.len() != im.len() {
            return Err(Error::DimensionMismatch { expected: re.len(), found: im.len() });
        }
        Ok(Self::ComplexSplit { re, im })
    }

    pub fn from_complex(z: &[Complex64]) -> Result<Self> {
        Self::complex(
            DVector::from_iterator(z.len(), z.iter().map(|c| c.re)),
            DVector::from_iterator(z.len(), z.iter().map(|c| c.im)),
        )
    }

    pub fn mode(&self) -> Mode {
        match self {
            Self::Real(_) => Mode::Real,
            Self::ComplexSplit { .. } => Mode::ComplexSplit,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Self::Real(z) => z.len(),
            Self::ComplexSplit { re, .. } => re.len(),
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            Self::Real(z) => z.norm(),
            Self::ComplexSplit { re, im } => (re.norm_squared() + im.norm_squared()).sqrt(),
        }
    }

    pub fn as_real(&self) -> Option<&DVector<f64>> {
        match self {
            Self::Real(z) => Some(z),
            Self::ComplexSplit { .. } => None,
        }
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        match self {
            Self::Real(z) => z.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            Self::ComplexSplit { re, im } => re.iter().zip(im.iter()).map(|(&a, &b)| Complex64::new(a, b)).collect(),
        }
    }

    /// Multiplies by `e^{i theta}`; a real signal is promoted to split form.
    pub fn rotate(&self, theta: f64) -> Self {
        let (c, s) = (theta.cos(), theta.sin());
        let (re, im) = match self {
            Self::Real(z) => (z.clone(), DVector::zeros(z.len())),
            Self::ComplexSplit { re, im } => (re.clone(), im.clone()),
        };
        Self::ComplexSplit { re: &re * c - &im * s, im: &re * s + &im * c }
    }

    /// Distance to `truth` modulo the mode's symmetry, relative to `|truth|`:
    /// sign for real signals, global phase for complex ones.
    pub fn relative_error(&self, truth: &Signal) -> Result<f64> {
        if self.n() != truth.n() {
            return Err(Error::DimensionMismatch { expected: truth.n(), found: self.n() });
        }
        let denom = truth.norm();
        match (self, truth) {
            (Self::Real(a), Self::Real(b)) => Ok((a - b).norm().min((a + b).norm()) / denom),
            _ => {
                let a = self.to_complex();
                let b = truth.to_complex();
                let inner: Complex64 = a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
                let phase = if inner.norm() > 0.0 { inner / inner.norm() } else { Complex64::new(1.0, 0.0) };
                let d2: f64 = a.iter().zip(&b).map(|(x, y)| (x * phase - y).norm_sqr()).sum();
                Ok(d2.sqrt() / denom)
            }
        }
    }
}

/// Uniform draw from the unit sphere of the signal space.
pub fn sample_signal(n: usize, mode: Mode, rng: &mut impl Rng) -> Result<Signal> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    match mode {
        Mode::Real => Ok(Signal::Real(gaussian_vector(rng, n).normalize())),
        Mode::ComplexSplit => {
            let re = gaussian_vector(rng, n);
            let im = gaussian_vector(rng, n);
            let norm = (re.norm_squared() + im.norm_squared()).sqrt();
            Ok(Signal::ComplexSplit { re: re / norm, im: im / norm })
        }
    }
}

pub(crate) fn gaussian_vector(rng: &mut impl Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

pub(crate) fn gaussian_matrix(rng: &mut impl Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.sample(StandardNormal))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProjectorDistribution {
    /// I.i.d. standard normal entries.
    GenericGaussian,
    /// `r` orthonormal rows, Haar distributed.
    HaarOrthogonal,
    /// The same fixed `r x n` projector for every measurement.
    #[serde(skip)]
    Explicit(DMatrix<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectorSpec {
    pub n: usize,
    pub rank: usize,
    pub mode: Mode,
    pub distribution: ProjectorDistribution,
}

impl ProjectorSpec {
    pub fn new(n: usize, rank: usize, mode: Mode, distribution: ProjectorDistribution) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        if rank == 0 || rank > n {
            return Err(Error::InvalidRank { rank, n });
        }
        if let ProjectorDistribution::Explicit(p) = &distribution {
            if p.shape() != (rank, n) {
                return Err(Error::InvalidArgument(format!(
                    "explicit projector is {}x{}, expected {rank}x{n}",
                    p.nrows(),
                    p.ncols()
                )));
            }
        }
        Ok(Self { n, rank, mode, distribution })
    }

    pub fn haar(n: usize, rank: usize) -> Result<Self> {
        Self::new(n, rank, Mode::Real, ProjectorDistribution::HaarOrthogonal)
    }

    pub fn gaussian(n: usize, rank: usize) -> Result<Self> {
        Self::new(n, rank, Mode::Real, ProjectorDistribution::GenericGaussian)
    }

    pub fn label(&self) -> String {
        let d = match self.distribution {
            ProjectorDistribution::GenericGaussian => "gaussian",
            ProjectorDistribution::HaarOrthogonal => "haar",
            ProjectorDistribution::Explicit(_) => "explicit",
        };
        format!("{d}-r{}", self.rank)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MatrixPayload {
    Real(DMatrix<f64>),
    Split { b: DMatrix<f64>, c: DMatrix<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementMatrix {
    payload: MatrixPayload,
    rank_bound: usize,
}

const STRUCTURE_TOL: f64 = 1e-12;

impl MeasurementMatrix {
    /// `A = P^T P`, symmetric by construction.
    pub fn from_projector(p: &DMatrix<f64>) -> Self {
        let mut a = p.transpose() * p;
        symmetrize(&mut a);
        Self { payload: MatrixPayload::Real(a), rank_bound: p.nrows() }
    }

    /// `(B, C)` from a complex projector `P = Q + i S`.
    pub fn from_complex_projector(q: &DMatrix<f64>, s: &DMatrix<f64>) -> Result<Self> {
        if q.shape() != s.shape() {
            return Err(Error::DimensionMismatch { expected: q.ncols(), found: s.ncols() });
        }
        let mut b = q.transpose() * q + s.transpose() * s;
        let mut c = q.transpose() * s - s.transpose() * q;
        symmetrize(&mut b);
        antisymmetrize(&mut c);
        Ok(Self { payload: MatrixPayload::Split { b, c }, rank_bound: q.nrows() })
    }

    /// Validates symmetry and stores `(A + A^T)/2` so the invariant is exact.
    pub fn real(a: DMatrix<f64>, rank_bound: usize) -> Result<Self> {
        let mut a = a;
        check_square(&a)?;
        let deviation = max_asymmetry(&a);
        if deviation > STRUCTURE_TOL * a.amax().max(1.0) {
            return Err(Error::Asymmetric { deviation });
        }
        symmetrize(&mut a);
        Ok(Self { payload: MatrixPayload::Real(a), rank_bound })
    }

    pub fn split(b: DMatrix<f64>, c: DMatrix<f64>, rank_bound: usize) -> Result<Self> {
        let (mut b, mut c) = (b, c);
        check_square(&b)?;
        check_square(&c)?;
        if b.nrows() != c.nrows() {
            return Err(Error::DimensionMismatch { expected: b.nrows(), found: c.nrows() });
        }
        let deviation = max_asymmetry(&b);
        if deviation > STRUCTURE_TOL * b.amax().max(1.0) {
            return Err(Error::Asymmetric { deviation });
        }
        let n = c.nrows();
        let deviation = (0..n)
            .flat_map(|i| (0..=i).map(move |j| (i, j)))
            .map(|(i, j)| (c[(i, j)] + c[(j, i)]).abs())
            .fold(0.0, f64::max);
        if deviation > STRUCTURE_TOL * c.amax().max(1.0) {
            return Err(Error::NotAntisymmetric { deviation });
        }
        symmetrize(&mut b);
        antisymmetrize(&mut c);
        Ok(Self { payload: MatrixPayload::Split { b, c }, rank_bound })
    }

    pub fn payload(&self) -> &MatrixPayload {
        &self.payload
    }

    pub fn rank_bound(&self) -> usize {
        self.rank_bound
    }

    pub fn mode(&self) -> Mode {
        match self.payload {
            MatrixPayload::Real(_) => Mode::Real,
            MatrixPayload::Split { .. } => Mode::ComplexSplit,
        }
    }

    pub fn n(&self) -> usize {
        match &self.payload {
            MatrixPayload::Real(a) => a.nrows(),
            MatrixPayload::Split { b, .. } => b.nrows(),
        }
    }

    pub fn as_real(&self) -> Option<&DMatrix<f64>> {
        match &self.payload {
            MatrixPayload::Real(a) => Some(a),
            MatrixPayload::Split { .. } => None,
        }
    }

    /// The quadratic form at `z`. A real matrix applied to a split signal
    /// acts as the Hermitian matrix `A + 0i`.
    pub fn measure(&self, z: &Signal) -> Result<f64> {
        if z.n() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: z.n() });
        }
        Ok(match (&self.payload, z) {
            (MatrixPayload::Real(a), Signal::Real(z)) => z.dot(&(a * z)),
            (MatrixPayload::Split { b, c }, Signal::ComplexSplit { re, im }) => {
                let r = re * re.transpose() + im * im.transpose();
                let phi = im * re.transpose() - re * im.transpose();
                r.dot(b) + phi.dot(c)
            }
            _ => return Err(Error::ModeMismatch),
        })
    }
}

fn check_square(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() == 0 {
        return Err(Error::ZeroDimension);
    }
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
    }
    Ok(())
}

fn symmetrize(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
}

fn antisymmetrize(c: &mut DMatrix<f64>) {
    let n = c.nrows();
    for i in 0..n {
        c[(i, i)] = 0.0;
        for j in 0..i {
            let v = 0.5 * (c[(i, j)] - c[(j, i)]);
            c[(i, j)] = v;
            c[(j, i)] = -v;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementEnsemble {
    matrices: Vec<MeasurementMatrix>,
    n: usize,
    mode: Mode,
    pub seed: Option<u64>,
    pub projector: Option<ProjectorSpec>,
}

impl MeasurementEnsemble {
    pub fn new(matrices: Vec<MeasurementMatrix>) -> Result<Self> {
        let first = matrices.first().ok_or_else(|| Error::InvalidArgument("ensemble needs k >= 1".into()))?;
        let (n, mode) = (first.n(), first.mode());
        for m in &matrices {
            if m.n() != n {
                return Err(Error::DimensionMismatch { expected: n, found: m.n() });
            }
            if m.mode() != mode {
                return Err(Error::ModeMismatch);
            }
        }
        Ok(Self { matrices, n, mode, seed: None, projector: None })
    }

    pub fn from_real(matrices: Vec<DMatrix<f64>>) -> Result<Self> {
        let n = matrices.first().map_or(0, |m| m.nrows());
        Self::new(matrices.into_iter().map(|a| MeasurementMatrix::real(a, n)).collect::<Result<_>>()?)
    }

    pub fn matrices(&self) -> &[MeasurementMatrix] {
        &self.matrices
    }

    pub fn k(&self) -> usize {
        self.matrices.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn rank_bound(&self) -> usize {
        self.matrices.iter().map(MeasurementMatrix::rank_bound).max().unwrap_or(0)
    }

    /// The real matrices, or `RealModeRequired`.
    pub fn real_matrices(&self) -> Result<Vec<&DMatrix<f64>>> {
        self.matrices.iter().map(|m| m.as_real().ok_or(Error::RealModeRequired)).collect()
    }

    /// The first `k` measurements.
    pub fn truncated(&self, k: usize) -> Result<Self> {
        let mut out = Self::new(self.matrices.iter().take(k).cloned().collect())?;
        out.seed = self.seed;
        out.projector = self.projector.clone();
        Ok(out)
    }
}

pub fn make_ensemble(spec: &ProjectorSpec, k: usize, rng: &mut impl Rng) -> Result<MeasurementEnsemble> {
    if k == 0 {
        return Err(Error::InvalidArgument("ensemble needs k >= 1".into()));
    }
    let spec = ProjectorSpec::new(spec.n, spec.rank, spec.mode, spec.distribution.clone())?;
    let (n, r) = (spec.n, spec.rank);
    let matrices = (0..k)
        .map(|_| match (&spec.distribution, spec.mode) {
            (ProjectorDistribution::GenericGaussian, Mode::Real) => {
                Ok(MeasurementMatrix::from_projector(&gaussian_matrix(rng, r, n)))
            }
            (ProjectorDistribution::GenericGaussian, Mode::ComplexSplit) => {
                let scale = std::f64::consts::FRAC_1_SQRT_2;
                MeasurementMatrix::from_complex_projector(
                    &(gaussian_matrix(rng, r, n) * scale),
                    &(gaussian_matrix(rng, r, n) * scale),
                )
            }
            (ProjectorDistribution::HaarOrthogonal, Mode::Real) => {
                Ok(MeasurementMatrix::from_projector(&haar_rows(rng, r, n)))
            }
            (ProjectorDistribution::HaarOrthogonal, Mode::ComplexSplit) => {
                let (q, s) = haar_unitary_rows(rng, r, n);
                MeasurementMatrix::from_complex_projector(&q, &s)
            }
            (ProjectorDistribution::Explicit(p), Mode::Real) => Ok(MeasurementMatrix::from_projector(p)),
            (ProjectorDistribution::Explicit(p), Mode::ComplexSplit) => {
                MeasurementMatrix::from_complex_projector(p, &DMatrix::zeros(r, n))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut ensemble = MeasurementEnsemble::new(matrices)?;
    ensemble.projector = Some(spec);
    Ok(ensemble)
}

/// First `r` rows of a Haar orthogonal matrix: QR of a Gaussian matrix with
/// the signs of `diag(R)` folded into `Q`.
pub(crate) fn haar_rows(rng: &mut impl Rng, r: usize, n: usize) -> DMatrix<f64> {
    let qr = gaussian_matrix(rng, n, n).qr();
    let (mut q, rr) = qr.unpack();
    for j in 0..n {
        if rr[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q.columns(0, r).transpose()
}

/// First `r` rows of a Haar unitary matrix, returned as `(Re, Im)`.
fn haar_unitary_rows(rng: &mut impl Rng, r: usize, n: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let g = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal) * scale, rng.sample::<f64, _>(StandardNormal) * scale)
    });
    let (mut q, rr) = g.qr().unpack();
    for j in 0..n {
        let d = rr[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
    }
    let rows = q.columns(0, r).adjoint();
    (rows.map(|c| c.re), rows.map(|c| c.im))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    pub b: DVector<f64>,
    pub noise_sigma: f64,
    pub clean: Option<DVector<f64>>,
}

impl Observation {
    pub fn exact(b: DVector<f64>) -> Self {
        Self { clean: Some(b.clone()), b, noise_sigma: 0.0 }
    }

    pub fn k(&self) -> usize {
        self.b.len()
    }

    pub fn clean_or_observed(&self) -> &DVector<f64> {
        self.clean.as_ref().unwrap_or(&self.b)
    }
}

pub fn forward_measure(z: &Signal, ensemble: &MeasurementEnsemble) -> Result<Observation> {
    if z.mode() != ensemble.mode() {
        return Err(Error::ModeMismatch);
    }
    let b = ensemble.matrices().iter().map(|m| m.measure(z)).collect::<Result<Vec<_>>>()?;
    Ok(Observation::exact(DVector::from_vec(b)))
}

/// `b~ = b + sigma xi` with `xi` standard normal; `sigma` is a standard deviation.
pub fn add_noise(obs: &Observation, sigma: f64, rng: &mut impl Rng) -> Result<Observation> {
    let xi = gaussian_vector(rng, obs.k());
    noisy_with(obs, sigma, &xi)
}

/// Noise injection with a caller-supplied standard normal draw, so several
/// noise levels can share the same `xi`.
pub fn noisy_with(obs: &Observation, sigma: f64, xi: &DVector<f64>) -> Result<Observation> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!("noise level must be finite and >= 0, got {sigma}")));
    }
    if xi.len() != obs.k() {
        return Err(Error::DimensionMismatch { expected: obs.k(), found: xi.len() });
    }
    let clean = obs.clean_or_observed().clone();
    let b = if sigma == 0.0 { clean.clone() } else { &clean + xi * sigma };
    Ok(Observation { b, noise_sigma: sigma, clean: Some(clean) })
}
