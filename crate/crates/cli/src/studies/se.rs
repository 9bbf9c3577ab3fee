//! Spectral-efficiency comparison across data SNR: selection and precoding
//! from estimated channels versus perfect CSI, plus a small fully-digital
//! array without selection.

use anyhow::Result;
use mmwave_mc::channel::{assemble_channel, ArrayGeometry};
use mmwave_mc::evaluation::{greedy_selection, SelectionConstraint};
use mmwave_mc::omp::omp_estimate;
use mmwave_mc::sampling::noise_variance_for_pnr;
use mmwave_mc::svp::svp_estimate;
use mmwave_mc::CMatrix;

use crate::config::ExperimentConfig;
use crate::output::{mean_and_stderr, render_csv};
use crate::studies::nmse::build_dictionaries;
use crate::trial::{draw_trial, Trial};

const DEFAULT_TRIALS: usize = 100;

/// Training PNR of the estimation phase; the study sweeps the data SNR
/// while the channel estimates stay pinned to this quality level.
const TRAINING_PNR_DB: f64 = 10.0;

/// Which ends of the link select antennas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Setting {
    /// Selection at the MS only; the precoder is fixed from the estimate.
    A,
    /// Alternating selection at both ends.
    B,
}

impl Setting {
    fn label(self) -> &'static str {
        match self {
            Setting::A => "a",
            Setting::B => "b",
        }
    }

    fn constraint(self, config: &ExperimentConfig) -> mmwave_mc::Result<SelectionConstraint> {
        let d = &config.dimensions;
        match self {
            Setting::A => SelectionConstraint::ms_only(d.num_ms_antennas, d.num_ms_rf_chains),
            Setting::B => SelectionConstraint::joint(
                d.num_ms_antennas,
                d.num_ms_rf_chains,
                d.num_bs_antennas,
                d.num_bs_rf_chains,
            ),
        }
    }

    /// Constraint for the small reference arrays, where every subarray has
    /// one element and selection is forced.
    fn small_constraint(self, config: &ExperimentConfig) -> mmwave_mc::Result<SelectionConstraint> {
        let d = &config.dimensions;
        match self {
            Setting::A => SelectionConstraint::ms_only(d.num_ms_rf_chains, d.num_ms_rf_chains),
            Setting::B => SelectionConstraint::joint(
                d.num_ms_rf_chains,
                d.num_ms_rf_chains,
                d.num_bs_rf_chains,
                d.num_bs_rf_chains,
            ),
        }
    }
}

const SCHEMES: [&str; 4] = ["perfect", "svp", "omp_unitary", "no_as"];

/// Runs the spectral-efficiency study and renders its CSV artifact.
///
/// Per trial, the channel is estimated once at the training PNR by each
/// estimator; selection is then optimized on each estimate at every data
/// SNR and the resulting rate is evaluated on the true channel. The no-AS
/// reference rebuilds the same propagation paths on RF-chain-sized arrays
/// where selection has no freedom, with perfect CSI, so the comparison
/// isolates the aperture-plus-selection gain.
pub fn run(config: &ExperimentConfig, setting: Setting) -> Result<String> {
    let trials = config.effective_trials(DEFAULT_TRIALS);
    let num_samples = config.scalar_num_samples();
    let step_size = config.step_size_at(config.scalar_density());
    let noise =
        noise_variance_for_pnr(TRAINING_PNR_DB, config.pilot(), config.channel.gain_variance);
    let gammas = (config.channel.gamma_max_ms, config.channel.gamma_max_bs);
    let (unitary, _) = build_dictionaries(config)?;
    let constraint = setting.constraint(config)?;
    let small_constraint = setting.small_constraint(config)?;
    let small_ms = ArrayGeometry::new(
        config.dimensions.num_ms_rf_chains,
        config.dimensions.num_ms_rf_chains,
    )?;
    let small_bs = ArrayGeometry::new(
        config.dimensions.num_bs_rf_chains,
        config.dimensions.num_bs_rf_chains,
    )?;

    let cell: Vec<Trial> = (0..trials)
        .map(|trial| draw_trial(config, "se", num_samples, gammas, noise, trial as u64))
        .collect::<Result<_>>()?;
    let solver = config.solver(step_size, noise);
    let mut svp_estimates = Vec::with_capacity(trials);
    let mut iterations_total = 0usize;
    for t in &cell {
        let result = svp_estimate(&t.samples, &solver)?;
        iterations_total += result.iterations_used;
        svp_estimates.push(result.estimate);
    }
    let matched = ((iterations_total as f64 / trials as f64).round() as usize).max(1);
    let omp_estimates: Vec<CMatrix> = cell
        .iter()
        .map(|t| Ok(omp_estimate(&t.samples, &unitary, matched)?.reconstructed))
        .collect::<Result<_>>()?;

    let snr_axis = &config.sweeps.snr_db;
    // rates[scheme][snr point][trial]
    let mut rates = vec![vec![Vec::with_capacity(trials); snr_axis.len()]; SCHEMES.len()];
    for (i, t) in cell.iter().enumerate() {
        let truth = &t.instance.matrix;
        let small_truth = assemble_channel(&t.instance.paths, &small_ms, &small_bs)?.matrix;
        for (j, &snr_db) in snr_axis.iter().enumerate() {
            let snr = 10f64.powf(snr_db / 10.0);
            let estimates: [(&CMatrix, &SelectionConstraint, &CMatrix); 4] = [
                (truth, &constraint, truth),
                (&svp_estimates[i], &constraint, truth),
                (&omp_estimates[i], &constraint, truth),
                (&small_truth, &small_constraint, &small_truth),
            ];
            for (k, (estimate, cons, channel)) in estimates.into_iter().enumerate() {
                let result = greedy_selection(channel, estimate, cons, snr)?;
                rates[k][j].push(result.spectral_efficiency);
            }
        }
    }

    let mut rows = Vec::new();
    for (j, &snr_db) in snr_axis.iter().enumerate() {
        for (k, scheme) in SCHEMES.iter().enumerate() {
            let (mean, stderr) = mean_and_stderr(&rates[k][j]);
            rows.push(format!(
                "{snr_db},{scheme},{},{mean:e},{stderr:e},{trials}",
                setting.label()
            ));
        }
    }
    Ok(render_csv(
        &config.digest(),
        "snr_db,scheme,setting,mean_se,stderr_se,trials",
        &rows,
    ))
}
