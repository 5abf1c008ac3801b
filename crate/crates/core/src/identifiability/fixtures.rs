use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::census::{count_solutions, CensusOptions};
use super::jacobian::jacobian_rank;
use crate::model::{forward_measure, MeasurementEnsemble, Signal};
use crate::Result;

fn coordinate_projections() -> Vec<DMatrix<f64>> {
    (0..3)
        .map(|i| {
            let mut a = DMatrix::zeros(3, 3);
            a[(i, i)] = 1.0;
            a
        })
        .collect()
}

/// `e_i e_i^T` for `i = 1, 2, 3`.
pub fn example_2_14_ensemble() -> MeasurementEnsemble {
    MeasurementEnsemble::from_real(coordinate_projections()).expect("fixed design")
}

/// The coordinate projections followed by the all-ones matrix.
pub fn example_2_12_ensemble() -> MeasurementEnsemble {
    let mut m = coordinate_projections();
    m.push(DMatrix::from_element(3, 3, 1.0));
    MeasurementEnsemble::from_real(m).expect("fixed design")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identifiability {
    StablyIdentifiable,
    IdentifiableNotStable,
    NotIdentifiable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Example212Report {
    /// Some pair satisfies `z_i = -z_j`.
    pub in_z: bool,
    /// Some coordinate vanishes.
    pub in_c: bool,
    /// Classification from the two membership predicates.
    pub predicted: Identifiability,
    pub census_classes: usize,
    pub jacobian_rank: usize,
    /// Classification from the census and the Jacobian rank.
    pub observed: Identifiability,
    pub agree: bool,
}

const MEMBERSHIP_TOL: f64 = 1e-12;

/// Three-way classification of a signal for the design of
/// [`example_2_12_ensemble`]: outside `Z` stable; in `Z` but not `C` not
/// identifiable; in both identifiable but not stable.
pub fn check_example_2_12(z: &DVector<f64>) -> Result<Example212Report> {
    let ensemble = example_2_12_ensemble();
    let scale = z.amax().max(f64::MIN_POSITIVE);
    let close = |a: f64, b: f64| (a - b).abs() <= MEMBERSHIP_TOL * scale;
    let in_z = (0..3).any(|i| (i + 1..3).any(|j| close(z[i], -z[j])));
    let in_c = z.iter().any(|&x| close(x, 0.0));
    let predicted = match (in_z, in_c) {
        (false, _) => Identifiability::StablyIdentifiable,
        (true, false) => Identifiability::NotIdentifiable,
        (true, true) => Identifiability::IdentifiableNotStable,
    };
    let obs = forward_measure(&Signal::real(z.clone())?, &ensemble)?;
    let census = count_solutions(&ensemble, &obs, &CensusOptions::default())?;
    let jac = jacobian_rank(&ensemble, z)?;
    let observed = match (census.classes(), jac.rank) {
        (1, 3) => Identifiability::StablyIdentifiable,
        (1, _) => Identifiability::IdentifiableNotStable,
        _ => Identifiability::NotIdentifiable,
    };
    Ok(Example212Report {
        in_z,
        in_c,
        predicted,
        census_classes: census.classes(),
        jacobian_rank: jac.rank,
        observed,
        agree: predicted == observed,
    })
}
