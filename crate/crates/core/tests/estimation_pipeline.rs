//! End-to-end flows through the public API: synthesize a channel, schedule
//! the switch-based training, observe, estimate with both estimators, and
//! score the results.

use mmwave_mc::channel::{assemble_channel, sample_paths, ArrayGeometry};
use mmwave_mc::evaluation::{greedy_selection, nmse, SelectionConstraint};
use mmwave_mc::incoherence::incoherence_mu;
use mmwave_mc::omp::{omp_estimate, Dictionary};
use mmwave_mc::sampling::{build_uss_schedule, noise_variance_for_pnr, observe};
use mmwave_mc::svp::{svp_estimate, SvpConfig};
use mmwave_mc::C64;

const PILOT: C64 = C64::new(1.0, 0.0);

#[test]
fn noiseless_training_recovers_the_channel() {
    let ms = ArrayGeometry::new(32, 4).unwrap();
    let bs = ArrayGeometry::new(32, 1).unwrap();
    let paths = sample_paths(2, 1.0, 404).unwrap();
    let instance = assemble_channel(&paths, &ms, &bs).unwrap();

    // 0.75 sampling density: 768 of 1024 entries.
    let schedule = build_uss_schedule(&ms, &bs, 768, 404).unwrap();
    let samples = observe(&instance, &schedule, PILOT, 0.0, 404).unwrap();

    let config = SvpConfig::new(2)
        .with_step_size(1.4)
        .with_max_iterations(200)
        .with_tolerance_floor(1e-7);
    let result = svp_estimate(&samples, &config).unwrap();
    assert!(result.converged);
    assert!(!result.diverged);
    let error = nmse(&instance.matrix, &result.estimate).unwrap();
    assert!(error < 1e-6, "NMSE {error:e}");
}

#[test]
fn noisy_training_stops_and_stays_accurate() {
    let ms = ArrayGeometry::new(32, 4).unwrap();
    let bs = ArrayGeometry::new(32, 1).unwrap();
    let paths = sample_paths(2, 1.0, 7).unwrap();
    let instance = assemble_channel(&paths, &ms, &bs).unwrap();

    let schedule = build_uss_schedule(&ms, &bs, 512, 7).unwrap();
    let noise = noise_variance_for_pnr(25.0, PILOT, 1.0);
    let samples = observe(&instance, &schedule, PILOT, noise, 7).unwrap();

    let config = SvpConfig::new(2)
        .with_step_size(1.8)
        .with_noise_variance(samples.noise_variance());
    let result = svp_estimate(&samples, &config).unwrap();
    assert!(result.converged, "stopping rule should fire under noise");
    let error = nmse(&instance.matrix, &result.estimate).unwrap();
    assert!(error < 0.05, "NMSE {error:e}");
}

#[test]
fn completion_beats_pursuit_on_off_grid_paths() {
    // Off-grid angles with modest noise: the grid-based estimator pays a
    // quantization penalty that the completion estimator does not.
    let ms = ArrayGeometry::new(64, 4).unwrap();
    let bs = ArrayGeometry::new(64, 1).unwrap();
    let dictionary = Dictionary::new(64, 64, 64, 64, 0.5).unwrap();
    let noise = noise_variance_for_pnr(25.0, PILOT, 1.0);

    let mut svp_total = 0.0;
    let mut omp_total = 0.0;
    for seed in 0..5 {
        let paths = sample_paths(4, 1.0, 1000 + seed).unwrap();
        let instance = assemble_channel(&paths, &ms, &bs).unwrap();
        let schedule = build_uss_schedule(&ms, &bs, 2048, 1000 + seed).unwrap();
        let samples = observe(&instance, &schedule, PILOT, noise, 1000 + seed).unwrap();

        let config = SvpConfig::new(4)
            .with_step_size(1.8)
            .with_noise_variance(samples.noise_variance());
        let svp = svp_estimate(&samples, &config).unwrap();
        let omp = omp_estimate(&samples, &dictionary, 6).unwrap();
        svp_total += nmse(&instance.matrix, &svp.estimate).unwrap();
        omp_total += nmse(&instance.matrix, &omp.reconstructed).unwrap();
    }
    assert!(
        svp_total < omp_total,
        "SVP mean NMSE {:.3e} should beat OMP {:.3e}",
        svp_total / 5.0,
        omp_total / 5.0
    );
}

#[test]
fn phase_errors_leave_completion_unharmed() {
    let gamma_max = std::f64::consts::FRAC_PI_2;
    let ms_ideal = ArrayGeometry::new(32, 4).unwrap();
    let bs_ideal = ArrayGeometry::new(32, 1).unwrap();
    let ms_skewed = ArrayGeometry::new(32, 4)
        .unwrap()
        .with_random_phase_errors(gamma_max, 1)
        .unwrap();
    let bs_skewed = ArrayGeometry::new(32, 1)
        .unwrap()
        .with_random_phase_errors(gamma_max, 2)
        .unwrap();

    let mut ideal_total = 0.0;
    let mut skewed_total = 0.0;
    for seed in 0..5 {
        let paths = sample_paths(2, 1.0, 50 + seed).unwrap();
        for (ms, bs, total) in [
            (&ms_ideal, &bs_ideal, &mut ideal_total),
            (&ms_skewed, &bs_skewed, &mut skewed_total),
        ] {
            let instance = assemble_channel(&paths, ms, bs).unwrap();
            let schedule = build_uss_schedule(ms, bs, 768, 50 + seed).unwrap();
            let samples = observe(&instance, &schedule, PILOT, 0.0, 50 + seed).unwrap();
            let config = SvpConfig::new(2)
                .with_step_size(1.4)
                .with_max_iterations(200)
                .with_tolerance_floor(1e-7);
            let estimate = svp_estimate(&samples, &config).unwrap().estimate;
            *total += nmse(&instance.matrix, &estimate).unwrap();
        }
    }
    // Both runs recover essentially exactly: the sampled-entry view never
    // references a steering basis, so mismatch cannot enter.
    assert!(ideal_total / 5.0 < 1e-6);
    assert!(skewed_total / 5.0 < 1e-6);
}

#[test]
fn selection_pipeline_orders_schemes_sensibly() {
    let ms = ArrayGeometry::new(32, 4).unwrap();
    let bs = ArrayGeometry::new(32, 1).unwrap();
    let constraint = SelectionConstraint::ms_only(32, 4).unwrap();
    let snr = 10.0;
    let noise = noise_variance_for_pnr(10.0, PILOT, 1.0);

    let mut perfect_total = 0.0;
    let mut estimated_total = 0.0;
    for seed in 0..10 {
        let paths = sample_paths(4, 1.0, 300 + seed).unwrap();
        let instance = assemble_channel(&paths, &ms, &bs).unwrap();
        let truth = &instance.matrix;
        let schedule = build_uss_schedule(&ms, &bs, 512, 300 + seed).unwrap();
        let samples = observe(&instance, &schedule, PILOT, noise, 300 + seed).unwrap();
        let config = SvpConfig::new(4)
            .with_step_size(1.8)
            .with_noise_variance(samples.noise_variance());
        let estimate = svp_estimate(&samples, &config).unwrap().estimate;

        perfect_total += greedy_selection(truth, truth, &constraint, snr)
            .unwrap()
            .spectral_efficiency;
        estimated_total += greedy_selection(truth, &estimate, &constraint, snr)
            .unwrap()
            .spectral_efficiency;
    }
    assert!(
        perfect_total >= estimated_total,
        "perfect CSI {perfect_total} vs estimated {estimated_total}"
    );
    // Estimation error at this few-sample, small-array setting costs about
    // 10% of the perfect-CSI efficiency; guard against regressions past it.
    assert!(estimated_total > 0.85 * perfect_total);
}

#[test]
fn incoherence_of_estimated_channels_matches_the_truth_scale() {
    let ms = ArrayGeometry::new(32, 4).unwrap();
    let bs = ArrayGeometry::new(32, 1).unwrap();
    let paths = sample_paths(2, 1.0, 77).unwrap();
    let instance = assemble_channel(&paths, &ms, &bs).unwrap();
    let schedule = build_uss_schedule(&ms, &bs, 768, 77).unwrap();
    let samples = observe(&instance, &schedule, PILOT, 0.0, 77).unwrap();
    let config = SvpConfig::new(2)
        .with_step_size(1.4)
        .with_max_iterations(200)
        .with_tolerance_floor(1e-7);
    let estimate = svp_estimate(&samples, &config).unwrap().estimate;

    let truth_report = incoherence_mu(&instance.matrix, 2).unwrap();
    let estimate_report = incoherence_mu(&estimate, 2).unwrap();
    assert!(!truth_report.degenerate);
    assert!((truth_report.mu - estimate_report.mu).abs() < 0.05 * truth_report.mu);
}
