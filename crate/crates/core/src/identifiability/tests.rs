use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::model::{
    forward_measure, make_ensemble, sample_signal, MeasurementEnsemble, Mode, Observation, ProjectorSpec, Signal,
};
use crate::Error;

fn obs_for(e: &MeasurementEnsemble, z: &[f64]) -> Observation {
    forward_measure(&Signal::Real(DVector::from_row_slice(z)), e).unwrap()
}

#[test]
fn jacobian_examples() {
    let e14 = example_2_14_ensemble();
    let rep = jacobian_rank(&e14, &DVector::from_vec(vec![1.0, 2.0, 3.0])).unwrap();
    assert_eq!(rep.rank, 3);
    // Rows 2 z_i e_i^T: singular values are exactly 2|z_i|.
    assert_eq!(rep.singular_values, vec![6.0, 4.0, 2.0]);
    assert_eq!(jacobian_rank(&e14, &DVector::from_vec(vec![0.0, 2.0, 3.0])).unwrap().rank, 2);
    assert_eq!(jacobian_rank(&example_2_12_ensemble(), &DVector::from_vec(vec![1.0, 2.0, 3.0])).unwrap().rank, 3);
    assert!(jacobian_rank(&e14, &DVector::zeros(2)).is_err());
}

#[test]
fn census_of_coordinate_projections() {
    let e = example_2_14_ensemble();
    let census = count_solutions(&e, &obs_for(&e, &[1.0, 2.0, 3.0]), &CensusOptions::default()).unwrap();
    assert_eq!(census.classes(), 4);
    for z in [[1.0, 2.0, 3.0], [-1.0, 2.0, 3.0], [1.0, -2.0, 3.0], [1.0, 2.0, -3.0]] {
        assert!(census.find(&Signal::Real(DVector::from_row_slice(&z))).is_some());
    }
    assert!(census.residuals.iter().all(|&r| r <= 1e-8 * 9.0));
}

#[test]
fn census_of_example_2_12() {
    let e = example_2_12_ensemble();
    let unique = count_solutions(&e, &obs_for(&e, &[1.0, 2.0, 3.0]), &CensusOptions::default()).unwrap();
    assert_eq!(unique.classes(), 1);
    let ambiguous = count_solutions(&e, &obs_for(&e, &[1.0, 1.0, -1.0]), &CensusOptions::default()).unwrap();
    assert!(ambiguous.classes() >= 2);
    assert_eq!(ambiguous.classes(), 3);
}

#[test]
fn example_2_12_classification() {
    let cases = [
        ([1.0, 2.0, 3.0], Identifiability::StablyIdentifiable),
        ([1.0, 1.0, -1.0], Identifiability::NotIdentifiable),
        ([0.0, 1.0, -1.0], Identifiability::IdentifiableNotStable),
        ([0.0, 1.0, 2.0], Identifiability::StablyIdentifiable),
    ];
    for (z, want) in cases {
        let rep = check_example_2_12(&DVector::from_row_slice(&z)).unwrap();
        assert_eq!(rep.predicted, want, "{z:?}");
        assert_eq!(rep.observed, want, "{z:?} {rep:?}");
        assert!(rep.agree);
    }
}

#[test]
fn census_respects_caps_and_symmetry() {
    let mut r = ChaCha8Rng::seed_from_u64(1);
    let e = make_ensemble(&ProjectorSpec::haar(6, 1).unwrap(), 7, &mut r).unwrap();
    let z = sample_signal(6, Mode::Real, &mut r).unwrap();
    let obs = forward_measure(&z, &e).unwrap();
    assert!(matches!(count_solutions(&e, &obs, &CensusOptions::default()), Err(Error::CensusCap { n: 6, cap: 5 })));

    let e = make_ensemble(&ProjectorSpec::haar(3, 1).unwrap(), 3, &mut r).unwrap();
    let z = sample_signal(3, Mode::Real, &mut r).unwrap();
    let census = count_solutions(&e, &forward_measure(&z, &e).unwrap(), &CensusOptions::default()).unwrap();
    for (i, a) in census.representatives.iter().enumerate() {
        for b in &census.representatives[i + 1..] {
            let Signal::Real(neg) = b else { panic!() };
            let flipped = Signal::Real(-neg);
            assert!(a.relative_error(b).unwrap() > 1e-6);
            assert!(a.relative_error(&flipped).unwrap() > 1e-6);
        }
    }
}

#[test]
fn census_is_monotone_in_added_measurements() {
    let mut r = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..5 {
        let full = make_ensemble(&ProjectorSpec::haar(3, 1).unwrap(), 5, &mut r).unwrap();
        let z = sample_signal(3, Mode::Real, &mut r).unwrap();
        let mut last = usize::MAX;
        for k in 2..=5 {
            let e = full.truncated(k).unwrap();
            let c = count_solutions(&e, &forward_measure(&z, &e).unwrap(), &CensusOptions::default()).unwrap();
            if k >= 3 {
                assert!(c.classes() <= last, "k={k}");
            }
            last = c.classes();
        }
    }
}

#[test]
fn rank_deficient_jacobian_signals_a_fragile_census() {
    let e = example_2_14_ensemble();
    let z = [0.0, 2.0, 3.0];
    assert!(jacobian_rank(&e, &DVector::from_row_slice(&z)).unwrap().rank < 3);
    let base = count_solutions(&e, &obs_for(&e, &z), &CensusOptions::default()).unwrap();
    let perturbed = count_solutions(&e, &obs_for(&e, &[1e-3, 2.0, 3.0]), &CensusOptions::default()).unwrap();
    assert_eq!(base.classes(), 2);
    assert_eq!(perturbed.classes(), 4);
}

#[test]
fn below_threshold_sign_classes() {
    for n in [2usize, 3] {
        let spec = ProjectorSpec::haar(n, 1).unwrap();
        let mut hits = 0;
        for trial in 0..50 {
            let mut r = crate::rng::trial_rng(5, n, n, trial);
            let z = sample_signal(n, Mode::Real, &mut r).unwrap();
            let e = make_ensemble(&spec, n, &mut r).unwrap();
            let opts = CensusOptions { seed: trial as u64, ..Default::default() };
            let c = count_solutions(&e, &forward_measure(&z, &e).unwrap(), &opts).unwrap();
            if c.classes() == 1 << (n - 1) {
                hits += 1;
            }
        }
        assert!(hits >= 45, "n={n}: {hits}/50");
    }
}

#[test]
fn complex_census_clusters_phase_orbits() {
    let spec =
        ProjectorSpec::new(2, 1, Mode::ComplexSplit, crate::model::ProjectorDistribution::HaarOrthogonal).unwrap();
    let mut r = ChaCha8Rng::seed_from_u64(3);
    let z = sample_signal(2, Mode::ComplexSplit, &mut r).unwrap();
    let e = make_ensemble(&spec, 4, &mut r).unwrap();
    let c = count_solutions(&e, &forward_measure(&z, &e).unwrap(), &CensusOptions::default()).unwrap();
    assert_eq!(c.classes(), 1);
    assert!(c.find(&z.rotate(0.7)).is_some());
}

#[test]
fn threshold_sweep_n3_census() {
    let spec = ProjectorSpec::haar(3, 1).unwrap();
    let oracle = Oracle::Census(CensusOptions { starts: Some(400), ..Default::default() });
    let rep = estimate_generic_threshold(&spec, &[2, 3, 4, 5], 20, 9, &oracle).unwrap();
    assert_eq!(rep.lambda_hat, Some(4));
    assert_eq!(rep.frequency(3), Some(0.0));
    assert!(rep.to_csv().lines().count() == 5);
    assert!(estimate_generic_threshold(&spec, &[], 5, 0, &oracle).is_err());
    assert!(estimate_generic_threshold(&spec, &[4], 0, 0, &oracle).is_err());
}

#[test]
fn threshold_sweep_is_deterministic() {
    let spec = ProjectorSpec::haar(4, 1).unwrap();
    let oracle = Oracle::IdealRegression(Default::default());
    let a = estimate_generic_threshold(&spec, &[4, 5, 6], 10, 3, &oracle).unwrap();
    let b = estimate_generic_threshold(&spec, &[4, 5, 6], 10, 3, &oracle).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.lambda_hat, Some(5));
}
