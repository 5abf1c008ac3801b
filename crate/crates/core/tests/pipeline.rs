use phasealg::harness::{aggregate, run_experiment, ExperimentConfig, KRange};
use phasealg::inversion::{invert_ideal_regression, InversionOptions, SolverKind};
use phasealg::model::{add_noise, forward_measure, make_ensemble, sample_signal, InstanceFile, Mode, ProjectorSpec};
use phasealg::polyspace::NullSpaceEngine;
use phasealg::rng;

#[test]
fn instance_file_roundtrip_preserves_inversion() {
    let spec = ProjectorSpec::haar(5, 1).unwrap();
    let mut r = rng::trial_rng(3, 5, 7, 0);
    let z = sample_signal(5, Mode::Real, &mut r).unwrap();
    let e = make_ensemble(&spec, 7, &mut r).unwrap();
    let obs = add_noise(&forward_measure(&z, &e).unwrap(), 1e-9, &mut r).unwrap();
    let text = InstanceFile::new(&e, Some(&obs), Some(&z)).to_json().unwrap();
    let file = InstanceFile::from_json(&text).unwrap();
    let (e2, obs2, z2) =
        (file.ensemble().unwrap(), file.observation().unwrap().unwrap(), file.signal().unwrap().unwrap());
    assert_eq!(z2, z);
    assert_eq!(obs2.b, obs.b);
    let opts = InversionOptions::default();
    let a = invert_ideal_regression(&e, &obs, &opts).unwrap();
    let b = invert_ideal_regression(&e2, &obs2, &opts).unwrap();
    assert_eq!(a.z_hat, b.z_hat);
    assert!(b.with_truth(&z).unwrap().rel_error.unwrap() < 1e-6);
}

#[test]
fn engines_agree_end_to_end() {
    let spec = ProjectorSpec::gaussian(5, 2).unwrap();
    for t in 0..5 {
        let mut r = rng::trial_rng(8, 5, 6, t);
        let z = sample_signal(5, Mode::Real, &mut r).unwrap();
        let e = make_ensemble(&spec, 6, &mut r).unwrap();
        let obs = forward_measure(&z, &e).unwrap();
        let dual = invert_ideal_regression(&e, &obs, &InversionOptions::default()).unwrap();
        let dense = invert_ideal_regression(
            &e,
            &obs,
            &InversionOptions { engine: NullSpaceEngine::Dense, ..Default::default() },
        )
        .unwrap();
        assert_eq!(dual.stop_degree, dense.stop_degree);
        assert!(dual.z_hat.relative_error(&dense.z_hat).unwrap() < 1e-8);
    }
}

/// Median error is non-decreasing in sigma per k, up to one inversion per
/// curve.
#[test]
fn median_error_monotone_in_noise() {
    let sigmas = [0.0, 1e-6, 1e-4, 1e-2];
    let cfg = ExperimentConfig {
        k_range: Some(KRange::Span { start: 7, end: 18 }),
        trials: 100,
        sigma: sigmas.to_vec(),
        seed: 4,
        ..ExperimentConfig::new(6)
    };
    let s = aggregate(&run_experiment(&cfg).unwrap()).unwrap();
    for k in 7..=18 {
        let med: Vec<f64> =
            sigmas.iter().map(|&sg| s.cell(SolverKind::IdealRegression, k, sg).unwrap().median).collect();
        let inversions = med.windows(2).filter(|w| w[1] < w[0]).count();
        assert!(inversions <= 1, "k={k}: {med:?}");
    }
}
