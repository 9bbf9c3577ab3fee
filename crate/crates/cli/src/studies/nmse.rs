//! Estimator NMSE comparison across training PNR and phase-mismatch
//! levels: completion versus pursuit over unitary and redundant
//! dictionaries.

use anyhow::Result;
use mmwave_mc::evaluation::nmse;
use mmwave_mc::omp::{omp_estimate, Dictionary};
use mmwave_mc::sampling::noise_variance_for_pnr;
use mmwave_mc::svp::svp_estimate;

use crate::config::ExperimentConfig;
use crate::output::{mean_and_stderr, render_csv};
use crate::trial::{draw_trial, Trial};

const DEFAULT_TRIALS: usize = 200;

/// Builds the unitary (array-sized) and redundant (configured) pursuit
/// dictionaries for the configured arrays.
pub fn build_dictionaries(config: &ExperimentConfig) -> Result<(Dictionary, Dictionary)> {
    let d = &config.dimensions;
    let spacing = 0.5;
    let unitary = Dictionary::new(
        d.num_ms_antennas,
        d.num_bs_antennas,
        d.num_ms_antennas,
        d.num_bs_antennas,
        spacing,
    )?;
    let redundant = Dictionary::new(
        d.num_ms_antennas,
        d.num_bs_antennas,
        config.omp.grid_ms,
        config.omp.grid_bs,
        spacing,
    )?;
    Ok((unitary, redundant))
}

/// Runs the comparison study and renders its CSV artifact.
///
/// Within each (PNR, mismatch) cell all three estimators consume the same
/// per-trial sample sets. The pursuit iteration count is matched to the
/// completion solver's average stopping count in that cell, so the
/// estimators spend comparable iteration budgets.
pub fn run(config: &ExperimentConfig) -> Result<String> {
    let trials = config.effective_trials(DEFAULT_TRIALS);
    let num_samples = config.scalar_num_samples();
    let step_size = config.step_size_at(config.scalar_density());
    let (unitary, redundant) = build_dictionaries(config)?;
    let mut rows = Vec::new();
    for &pnr_db in &config.sweeps.pnr_db {
        let noise = noise_variance_for_pnr(pnr_db, config.pilot(), config.channel.gain_variance);
        for &gamma in &config.sweeps.gamma_max {
            let cell: Vec<Trial> = (0..trials)
                .map(|trial| {
                    draw_trial(config, "nmse", num_samples, (gamma, gamma), noise, trial as u64)
                })
                .collect::<Result<_>>()?;
            let solver = config.solver(step_size, noise);
            let mut svp_errors = Vec::with_capacity(trials);
            let mut iterations_total = 0usize;
            for t in &cell {
                let result = svp_estimate(&t.samples, &solver)?;
                svp_errors.push(nmse(&t.instance.matrix, &result.estimate)?);
                iterations_total += result.iterations_used;
            }
            let matched = ((iterations_total as f64 / trials as f64).round() as usize).max(1);
            let mut unitary_errors = Vec::with_capacity(trials);
            let mut redundant_errors = Vec::with_capacity(trials);
            for t in &cell {
                let estimate = omp_estimate(&t.samples, &unitary, matched)?;
                unitary_errors.push(nmse(&t.instance.matrix, &estimate.reconstructed)?);
                let estimate = omp_estimate(&t.samples, &redundant, matched)?;
                redundant_errors.push(nmse(&t.instance.matrix, &estimate.reconstructed)?);
            }
            for (estimator, errors) in [
                ("svp", &svp_errors),
                ("omp_unitary", &unitary_errors),
                ("omp_redundant", &redundant_errors),
            ] {
                let (mean, stderr) = mean_and_stderr(errors);
                rows.push(format!(
                    "{pnr_db},{gamma},{estimator},{mean:e},{stderr:e},{trials}"
                ));
            }
        }
    }
    Ok(render_csv(
        &config.digest(),
        "pnr_db,gamma_max,estimator,mean_nmse,stderr_nmse,trials",
        &rows,
    ))
}
