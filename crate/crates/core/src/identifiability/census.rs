use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{gaussian_vector, MatrixPayload, MeasurementEnsemble, Mode, Observation, Signal};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CensusOptions {
    /// Number of random starts; `None` means `200 * 2^n`.
    pub starts: Option<usize>,
    pub max_iter: usize,
    /// Relative radius for merging symmetric-equivalent solutions.
    pub cluster_radius: f64,
    /// A run counts as converged when `max_i |r_i| <= accept_tol * max|b|`.
    pub accept_tol: f64,
    pub real_cap: usize,
    pub complex_cap: usize,
    pub seed: u64,
}

impl Default for CensusOptions {
    fn default() -> Self {
        Self {
            starts: None,
            max_iter: 200,
            cluster_radius: 1e-6,
            accept_tol: 1e-10,
            real_cap: 5,
            complex_cap: 3,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolutionCensus {
    pub mode: Mode,
    #[serde(serialize_with = "signals")]
    pub representatives: Vec<Signal>,
    /// `max_i |z^T A_i z - b_i|` for each representative.
    pub residuals: Vec<f64>,
    /// Converged starts that landed in each class.
    pub multiplicities: Vec<usize>,
    pub starts: usize,
    pub converged: usize,
    pub cluster_radius: f64,
}

impl SolutionCensus {
    pub fn classes(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_unique(&self) -> bool {
        self.representatives.len() == 1
    }

    /// Index of the class containing `z`, if any.
    pub fn find(&self, z: &Signal) -> Option<usize> {
        self.representatives.iter().position(|r| equivalent(r, z, self.cluster_radius))
    }
}

fn signals<S: serde::Serializer>(v: &[Signal], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        let c = z.to_complex();
        match z {
            Signal::Real(x) => seq.serialize_element(x.as_slice())?,
            Signal::ComplexSplit { .. } => {
                seq.serialize_element(&c.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>())?
            }
        }
    }
    seq.end()
}

/// Residual system `r_i(u) = u^T G_i u - b_i` over the real unknown `u`
/// (`u = z` in real mode, `u = (x, y)` in split mode).
struct System {
    grams: Vec<DMatrix<f64>>,
    b: DVector<f64>,
}

impl System {
    fn new(ensemble: &MeasurementEnsemble, obs: &Observation) -> Self {
        let n = ensemble.n();
        let grams = ensemble
            .matrices()
            .iter()
            .map(|m| match m.payload() {
                MatrixPayload::Real(a) => a.clone(),
                // x^T B x + y^T B y - 2 x^T C y as one symmetric 2n x 2n form.
                MatrixPayload::Split { b, c } => {
                    let mut g = DMatrix::zeros(2 * n, 2 * n);
                    g.view_mut((0, 0), (n, n)).copy_from(b);
                    g.view_mut((n, n), (n, n)).copy_from(b);
                    g.view_mut((0, n), (n, n)).copy_from(&(-c));
                    g.view_mut((n, 0), (n, n)).copy_from(&(-c.transpose()));
                    g
                }
            })
            .collect();
        Self { grams, b: obs.b.clone() }
    }

    fn residual(&self, u: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.b.len(), self.grams.iter().zip(self.b.iter()).map(|(g, &b)| u.dot(&(g * u)) - b))
    }

    fn jacobian(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let mut j = DMatrix::zeros(self.grams.len(), u.len());
        for (i, g) in self.grams.iter().enumerate() {
            j.row_mut(i).copy_from(&(g * u * 2.0).transpose());
        }
        j
    }

    /// Whitening map `L^{-T}` for `M = sum_i G_i / b_i = L L^T`. Starts drawn
    /// as `L^{-T} g` spread evenly over the sign patterns of each measured
    /// amplitude, which Newton's basins follow. Identity when `M` is singular.
    fn whitening(&self) -> Option<DMatrix<f64>> {
        let floor = 1e-12 * self.b.amax().max(f64::MIN_POSITIVE);
        let dim = self.grams.first()?.nrows();
        let m =
            self.grams.iter().zip(self.b.iter()).fold(DMatrix::zeros(dim, dim), |acc, (g, &b)| acc + g / b.max(floor));
        let l = m.cholesky()?.l();
        l.transpose().try_inverse()
    }

    /// The point on the ray through `d` that best fits `b` in least squares.
    /// Solutions far from the origin are reached as easily as near ones.
    fn scaled_start(&self, d: DVector<f64>) -> DVector<f64> {
        let q: Vec<f64> = self.grams.iter().map(|g| d.dot(&(g * &d))).collect();
        let num: f64 = q.iter().zip(self.b.iter()).map(|(q, b)| q * b).sum();
        let den: f64 = q.iter().map(|q| q * q).sum();
        if num > 0.0 && den > 0.0 {
            d * (num / den).sqrt()
        } else {
            d * self.b.amax().sqrt().max(1.0)
        }
    }

    /// Undamped Gauss-Newton steps. Not monotone in the cost, so the basins
    /// of distant roots are not starved by nearer ones.
    fn newton(&self, mut u: DVector<f64>, iters: usize) -> DVector<f64> {
        for _ in 0..iters {
            let r = self.residual(&u);
            let Ok(step) = self.jacobian(&u).svd(true, true).solve(&r, 1e-14) else { break };
            if !step.iter().all(|v| v.is_finite()) {
                break;
            }
            u -= &step;
            if step.norm() <= 1e-15 * u.norm() {
                break;
            }
        }
        u
    }

    /// Levenberg-Marquardt from `u`; returns the final point and `max|r|`.
    fn solve(&self, u: DVector<f64>, max_iter: usize, stop: f64) -> (DVector<f64>, f64) {
        let mut u = self.newton(u, 40);
        let mut r = self.residual(&u);
        let mut cost = r.norm_squared();
        let mut mu = 1e-3;
        for _ in 0..max_iter {
            if r.amax() <= stop {
                break;
            }
            let j = self.jacobian(&u);
            let jt = j.transpose();
            let jtj = &jt * &j;
            let g = &jt * &r;
            let scale = jtj.diagonal().max().max(f64::MIN_POSITIVE);
            let mut accepted = false;
            for _ in 0..30 {
                let mut lhs = jtj.clone();
                for d in 0..lhs.nrows() {
                    lhs[(d, d)] += mu * scale;
                }
                let Some(chol) = lhs.cholesky() else {
                    mu *= 10.0;
                    continue;
                };
                let step = chol.solve(&g);
                let trial = &u - &step;
                let tr = self.residual(&trial);
                let tc = tr.norm_squared();
                if tc < cost {
                    let tiny = step.norm() <= 1e-16 * trial.norm();
                    u = trial;
                    r = tr;
                    cost = tc;
                    mu = (mu * 0.1).max(1e-18);
                    accepted = !tiny;
                    break;
                }
                mu *= 10.0;
            }
            if !accepted {
                break;
            }
        }
        let res = r.amax();
        (u, res)
    }
}

fn to_signal(u: DVector<f64>, mode: Mode) -> Signal {
    match mode {
        Mode::Real => Signal::Real(crate::inversion::canonical_sign(u)),
        Mode::ComplexSplit => {
            let n = u.len() / 2;
            let z = Signal::ComplexSplit { re: u.rows(0, n).into_owned(), im: u.rows(n, n).into_owned() };
            // Rotate so the largest-modulus entry is real and positive.
            let c = z.to_complex();
            let lead = (0..n).max_by(|&a, &b| c[a].norm().total_cmp(&c[b].norm())).unwrap_or(0);
            z.rotate(-c[lead].arg())
        }
    }
}

/// Sign or phase-orbit equivalence within a relative radius. Split signals
/// are compared through their lifts `R = xx^T + yy^T`, `Phi = yx^T - xy^T`.
fn equivalent(a: &Signal, b: &Signal, radius: f64) -> bool {
    let scale = a.norm().max(b.norm()).max(f64::MIN_POSITIVE);
    match (a, b) {
        (Signal::Real(x), Signal::Real(y)) => (x - y).norm().min((x + y).norm()) <= radius * scale,
        _ => {
            let (ra, pa) = lift(a);
            let (rb, pb) = lift(b);
            let d = ((ra - rb).norm_squared() + (pa - pb).norm_squared()).sqrt();
            d <= radius * scale * scale
        }
    }
}

fn lift(z: &Signal) -> (DMatrix<f64>, DMatrix<f64>) {
    match z {
        Signal::Real(x) => (x * x.transpose(), DMatrix::zeros(x.len(), x.len())),
        Signal::ComplexSplit { re, im } => {
            (re * re.transpose() + im * im.transpose(), im * re.transpose() - re * im.transpose())
        }
    }
}

/// Multistart Levenberg-Marquardt census of the solutions of
/// `z^T A_i z = b_i`, merged by the mode's symmetry. A lower bound on the
/// true number of classes.
pub fn count_solutions(
    ensemble: &MeasurementEnsemble,
    obs: &Observation,
    opts: &CensusOptions,
) -> Result<SolutionCensus> {
    let n = ensemble.n();
    let mode = ensemble.mode();
    let cap = match mode {
        Mode::Real => opts.real_cap,
        Mode::ComplexSplit => opts.complex_cap,
    };
    if n > cap {
        return Err(Error::CensusCap { n, cap });
    }
    if obs.k() != ensemble.k() {
        return Err(Error::DimensionMismatch { expected: ensemble.k(), found: obs.k() });
    }
    let system = System::new(ensemble, obs);
    let bmax = obs.b.amax();
    let unknowns = if mode == Mode::Real { n } else { 2 * n };
    let starts = opts.starts.unwrap_or(200usize << n.min(20));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let whiten = system.whitening();

    let mut reps: Vec<Signal> = Vec::new();
    let mut residuals: Vec<f64> = Vec::new();
    let mut mult: Vec<usize> = Vec::new();
    let mut converged = 0;
    for _ in 0..starts {
        let g = gaussian_vector(&mut rng, unknowns);
        let d = match &whiten {
            Some(w) => w * g,
            None => g,
        };
        let u0 = system.scaled_start(d.normalize());
        let (u, res) = system.solve(u0, opts.max_iter, 1e-15 * bmax);
        if !(res <= opts.accept_tol * bmax) {
            continue;
        }
        converged += 1;
        let z = to_signal(u, mode);
        match reps.iter().position(|r| equivalent(r, &z, opts.cluster_radius)) {
            Some(i) => {
                mult[i] += 1;
                if res < residuals[i] {
                    reps[i] = z;
                    residuals[i] = res;
                }
            }
            None => {
                reps.push(z);
                residuals.push(res);
                mult.push(1);
            }
        }
    }
    if converged == 0 {
        return Err(Error::NoConvergedStarts);
    }
    Ok(SolutionCensus {
        mode,
        representatives: reps,
        residuals,
        multiplicities: mult,
        starts,
        converged,
        cluster_radius: opts.cluster_radius,
    })
}
