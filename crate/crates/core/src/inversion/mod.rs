//! Signal reconstruction: ideal regression at the identifiability threshold,
//! the lifted least-squares baseline, scale recovery and two closed-form
//! solvers for special designs.

mod closed_form;
mod ideal;
mod lifted;
mod quadrics;
mod report;
mod scale;

pub use closed_form::{complex_example_ensemble, ramex_ensemble, solve_2b, solve_2b_observation, solve_ramex};
pub use ideal::{invert_ideal_regression, InversionOptions};
pub use lifted::{invert_lifted_least_squares, lifted_design};
pub use quadrics::{normalize_quadrics, QuadricSet, DEFAULT_B_FLOOR};
pub use report::{RecoveryReport, SolverKind};
pub use scale::{recover_scale, ScaleFit};

use nalgebra::DVector;

/// Flips `z` so that its largest-magnitude entry is positive.
pub fn canonical_sign(mut z: DVector<f64>) -> DVector<f64> {
    if !z.is_empty() && z[z.iamax()] < 0.0 {
        z.neg_mut();
    }
    z
}

#[cfg(test)]
mod tests;
