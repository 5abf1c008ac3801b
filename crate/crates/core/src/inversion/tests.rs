use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::model::{
    add_noise, forward_measure, make_ensemble, sample_signal, MeasurementEnsemble, Mode, Observation, ProjectorSpec,
    Signal,
};
use crate::polyspace::{quadric_from_matrix, NullSpaceEngine};
use crate::Error;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn instance(n: usize, k: usize, seed: u64) -> (Signal, MeasurementEnsemble, Observation) {
    let mut r = rng(seed);
    let z = sample_signal(n, Mode::Real, &mut r).unwrap();
    let e = make_ensemble(&ProjectorSpec::haar(n, 1).unwrap(), k, &mut r).unwrap();
    let obs = forward_measure(&z, &e).unwrap();
    (z, e, obs)
}

fn opts() -> InversionOptions {
    InversionOptions::default()
}

#[test]
fn normalized_quadrics_vanish_at_the_signal() {
    let z = Signal::real(DVector::from_vec(vec![1.0, 2.0, 3.0])).unwrap();
    let mut r = rng(1);
    let e = make_ensemble(&ProjectorSpec::gaussian(3, 1).unwrap(), 4, &mut r).unwrap();
    let obs = forward_measure(&z, &e).unwrap();
    let qs = normalize_quadrics(&e, &obs).unwrap();
    assert_eq!(qs.quadrics().len(), 3);
    assert!(qs.constant_terms().iter().all(|&c| c == 0.0));
    for q in qs.all() {
        assert!(q.evaluate(z.as_real().unwrap()).unwrap().abs() <= 1e-12);
    }
    let sum = qs.all().iter().fold(DVector::zeros(6), |acc, q| acc + q.coeffs());
    assert!(sum.amax() <= 1e-12);
    // Each q_i is the quadric of A_i/b_i minus the mean of those matrices.
    let mats = e.real_matrices().unwrap();
    let mean = mats.iter().zip(obs.b.iter()).fold(DMatrix::zeros(3, 3), |acc, (a, &b)| acc + *a / b) / 4.0;
    let q0 = quadric_from_matrix(&(mats[0] / obs.b[0] - &mean)).unwrap();
    assert!((q0.coeffs() - qs.all()[0].coeffs()).amax() <= 1e-12);
    assert!(qs.retained().all(|i| i != qs.dropped()));
}

#[test]
fn normalization_rejects_degenerate_input() {
    let (_, e, mut obs) = instance(3, 4, 2);
    obs.b[2] = 0.0;
    assert!(matches!(normalize_quadrics(&e, &obs), Err(Error::NonGenericMeasurement { index: 2, .. })));
    let (_, e1, obs1) = instance(3, 1, 2);
    assert!(normalize_quadrics(&e1, &obs1).is_err());
    let spec =
        ProjectorSpec::new(2, 1, Mode::ComplexSplit, crate::model::ProjectorDistribution::HaarOrthogonal).unwrap();
    let ce = make_ensemble(&spec, 3, &mut rng(0)).unwrap();
    let cz = sample_signal(2, Mode::ComplexSplit, &mut rng(0)).unwrap();
    let cobs = forward_measure(&cz, &ce).unwrap();
    assert!(matches!(normalize_quadrics(&ce, &cobs), Err(Error::RealModeRequired)));
    assert!(matches!(invert_ideal_regression(&ce, &cobs, &opts()), Err(Error::RealModeRequired)));
}

#[test]
fn threshold_round_trip_n3() {
    let z = Signal::real(DVector::from_vec(vec![1.0, 2.0, 3.0]).normalize()).unwrap();
    let e = make_ensemble(&ProjectorSpec::haar(3, 1).unwrap(), 4, &mut rng(3)).unwrap();
    let obs = forward_measure(&z, &e).unwrap();
    let report = invert_ideal_regression(&e, &obs, &opts()).unwrap().with_truth(&z).unwrap();
    assert!(report.rel_error.unwrap() <= 1e-8, "{:?}", report.rel_error);
    assert!(report.success);
    assert_eq!(report.stop_degree, Some(3));
}

#[test]
fn below_threshold_is_not_identifiable() {
    let (_, e, obs) = instance(3, 3, 4);
    match invert_ideal_regression(&e, &obs, &opts()) {
        Err(Error::NotIdentifiable { max_degree: 3, trace }) => {
            assert!(trace.iter().all(|t| t.codim > 1));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn threshold_round_trip_n6() {
    let mut ok = 0;
    for seed in 0..10 {
        let (z, e, obs) = instance(6, 7, 100 + seed);
        if let Ok(report) = invert_ideal_regression(&e, &obs, &opts()) {
            let report = report.with_truth(&z).unwrap();
            assert!(report.stop_degree.unwrap() <= 6);
            if report.success {
                ok += 1;
            }
        }
    }
    assert!(ok >= 9, "{ok}/10");
}

#[test]
fn dense_engine_matches_dual() {
    for seed in 0..5 {
        let (z, e, obs) = instance(4, 5 + seed as usize % 3, 200 + seed);
        let dual = invert_ideal_regression(&e, &obs, &opts()).unwrap();
        let dense_opts = InversionOptions { engine: NullSpaceEngine::Dense, ..opts() };
        let dense = invert_ideal_regression(&e, &obs, &dense_opts).unwrap();
        assert_eq!(dual.stop_degree, dense.stop_degree);
        assert!(dual.z_hat.relative_error(&dense.z_hat).unwrap() <= 1e-8);
        assert!(dense.with_truth(&z).unwrap().success);
    }
}

#[test]
fn reported_sign_is_canonical_and_equivariant() {
    let (z, e, obs) = instance(5, 7, 5);
    let neg = Signal::Real(-z.as_real().unwrap());
    let obs_neg = forward_measure(&neg, &e).unwrap();
    let a = invert_ideal_regression(&e, &obs, &opts()).unwrap();
    let b = invert_ideal_regression(&e, &obs_neg, &opts()).unwrap();
    assert_eq!(a.z_hat, b.z_hat);
    let zh = a.z_hat.as_real().unwrap();
    assert!(zh[zh.iamax()] > 0.0);
}

#[test]
fn measurement_scaling_does_not_change_the_estimate() {
    let (_, e, obs) = instance(5, 8, 6);
    let c = [0.5, 2.0, 3.0, 0.25, 7.0, 1.5, 0.9, 4.0];
    let scaled =
        MeasurementEnsemble::from_real(e.real_matrices().unwrap().iter().zip(c).map(|(a, c)| *a * c).collect())
            .unwrap();
    let scaled_obs = Observation::exact(obs.b.component_mul(&DVector::from_row_slice(&c)));
    let a = invert_ideal_regression(&e, &obs, &opts()).unwrap();
    let b = invert_ideal_regression(&scaled, &scaled_obs, &opts()).unwrap();
    assert!(a.z_hat.relative_error(&b.z_hat).unwrap() <= 1e-9);
}

#[test]
fn successful_reports_reproduce_the_measurements() {
    for seed in 0..5 {
        let (z, e, obs) = instance(5, 6 + seed as usize, 300 + seed);
        let report = invert_ideal_regression(&e, &obs, &opts()).unwrap().with_truth(&z).unwrap();
        if report.success {
            let zh = report.z_hat.as_real().unwrap();
            let bmax = obs.b.amax();
            for (a, &b) in e.real_matrices().unwrap().iter().zip(obs.b.iter()) {
                assert!((zh.dot(&(*a * zh)) - b).abs() <= 1e-8 * bmax);
            }
        }
    }
}

#[test]
fn scale_recovery_examples() {
    let (z, e, obs) = instance(4, 6, 7);
    let zv = z.as_real().unwrap();
    let fit = recover_scale(&zv.normalize(), &e, &obs).unwrap();
    assert!((fit.z_hat.clone() - zv).norm().min((fit.z_hat + zv).norm()) <= 1e-10);
    assert!(!fit.fallback);
    let doubled = zv * 2.0;
    let fit = recover_scale(&doubled, &e, &obs).unwrap();
    assert!((fit.alpha - 0.5).abs() <= 1e-12);
    assert!((fit.z_hat - zv).norm() <= 1e-12);
}

#[test]
fn scale_fallback_on_indefinite_forms() {
    let a1 = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    let a2 = DMatrix::identity(2, 2);
    let e = MeasurementEnsemble::from_real(vec![a1, a2]).unwrap();
    let z = DVector::from_vec(vec![1.0, 2.0]);
    let obs = forward_measure(&Signal::Real(z.clone()), &e).unwrap();
    let fit = recover_scale(&z.normalize(), &e, &obs).unwrap();
    assert!(fit.fallback);
    assert!((fit.z_hat - z).norm() <= 1e-12);
}

#[test]
fn scale_is_accurate_under_small_noise() {
    let mut deviations: Vec<f64> = (0..100)
        .map(|trial| {
            let (z, e, obs) = instance(6, 12, 1000 + trial);
            let noisy = add_noise(&obs, 1e-4, &mut rng(trial)).unwrap();
            let report = match invert_ideal_regression(&e, &noisy, &opts()) {
                Ok(r) => r,
                Err(Error::IllConditioned(r)) => *r,
                Err(e) => panic!("{e}"),
            };
            // The true scale of a unit signal is 1.
            (report.alpha / z.norm() - 1.0).abs()
        })
        .collect();
    deviations.sort_by(f64::total_cmp);
    assert!(deviations[50] <= 1e-2, "median {:e}", deviations[50]);
}

#[test]
fn lifted_least_squares_examples() {
    let (z, e, obs) = instance(3, 6, 8);
    let report = invert_lifted_least_squares(&e, &obs, &opts()).unwrap().with_truth(&z).unwrap();
    assert!(report.rel_error.unwrap() <= 1e-8);
    assert!(!report.underdetermined);
    let (z, e, obs) = instance(6, 21, 9);
    let report = invert_lifted_least_squares(&e, &obs, &opts()).unwrap().with_truth(&z).unwrap();
    assert!(report.rel_error.unwrap() <= 1e-8);
    let (_, e, obs) = instance(6, 7, 10);
    assert!(invert_lifted_least_squares(&e, &obs, &opts()).unwrap().underdetermined);
}

#[test]
fn baseline_and_ideal_regression_agree_at_high_k() {
    for seed in 0..3 {
        let (z, e, obs) = instance(6, 21, 400 + seed);
        let a = invert_ideal_regression(&e, &obs, &opts()).unwrap().with_truth(&z).unwrap();
        let b = invert_lifted_least_squares(&e, &obs, &opts()).unwrap().with_truth(&z).unwrap();
        assert!(a.success && b.success);
        assert!(a.z_hat.relative_error(&b.z_hat).unwrap() <= 1e-6);
    }
}

#[test]
fn ramex_examples() {
    let z = solve_ramex(&DVector::from_vec(vec![1.0, 5.0, 7.0])).unwrap();
    assert_eq!(z.as_real().unwrap().as_slice(), &[1.0, 2.0, 3.0]);
    let z = solve_ramex(&DVector::from_vec(vec![4.0, 4.0, 4.0])).unwrap();
    assert_eq!(z.as_real().unwrap().as_slice(), &[2.0, 0.0, 0.0]);
    assert!(matches!(solve_ramex(&DVector::from_vec(vec![0.0, 1.0, 2.0])), Err(Error::NonGenericSignal(_))));
    // The design reproduces the displayed measurements.
    let e = ramex_ensemble(3).unwrap();
    let obs = forward_measure(&Signal::Real(DVector::from_vec(vec![1.0, 2.0, 3.0])), &e).unwrap();
    assert_eq!(obs.b.as_slice(), &[1.0, 5.0, 7.0]);
}

#[test]
fn two_b_examples() {
    let z = solve_2b(&DVector::from_vec(vec![1.0, 3.0]), &DVector::from_vec(vec![3.0])).unwrap();
    assert_eq!(z.to_complex(), vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 1.0)]);
    let e = complex_example_ensemble(2).unwrap();
    let truth = Signal::from_complex(&[Complex64::new(1.0, 0.0), Complex64::new(1.0, 1.0)]).unwrap();
    assert_eq!(forward_measure(&truth, &e).unwrap().b.as_slice(), &[1.0, 3.0, 3.0]);

    // Real signals: the real part equals the ramex solution.
    let x = DVector::from_vec(vec![0.7, -1.2, 0.4]);
    let split = Signal::complex(x.clone(), DVector::zeros(3)).unwrap();
    let obs = forward_measure(&split, &complex_example_ensemble(3).unwrap()).unwrap();
    let got = solve_2b_observation(&obs).unwrap();
    let real = solve_ramex(&forward_measure(&Signal::Real(x), &ramex_ensemble(3).unwrap()).unwrap().b).unwrap();
    let Signal::ComplexSplit { re, im } = &got else { panic!() };
    assert!((re - real.as_real().unwrap()).amax() <= 1e-15);
    assert!(im.amax() <= 1e-15);
    assert!(solve_2b(&DVector::from_vec(vec![0.0, 1.0]), &DVector::from_vec(vec![1.0])).is_err());
}

#[test]
fn two_b_round_trip() {
    let e = complex_example_ensemble(4).unwrap();
    assert_eq!(e.k(), 7);
    let mut r = rng(11);
    for _ in 0..100 {
        let z = sample_signal(4, Mode::ComplexSplit, &mut r).unwrap();
        let got = solve_2b_observation(&forward_measure(&z, &e).unwrap()).unwrap();
        assert!(got.relative_error(&z).unwrap() <= 1e-10);
    }
}
