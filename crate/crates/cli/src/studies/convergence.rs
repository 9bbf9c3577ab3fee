//! Per-iteration NMSE traces of the completion solver across step sizes
//! and sampling densities, at the configured training PNR.

use anyhow::Result;
use mmwave_mc::sampling::noise_variance_for_pnr;
use mmwave_mc::svp::svp_estimate_traced;

use crate::config::ExperimentConfig;
use crate::output::render_csv;
use crate::trial::draw_trial;

const DEFAULT_TRIALS: usize = 200;

/// Runs the convergence study and renders its CSV artifact.
///
/// Every (step size, density) cell is averaged over the same channel and
/// noise realizations. The stopping rule is disabled (zero threshold) so
/// all traces share the full iteration axis; a trial that nevertheless
/// stops early holds its final iterate, so its trace is padded with the
/// final NMSE. Diverged trials are excluded from the mean and counted in
/// their own column.
pub fn run(config: &ExperimentConfig) -> Result<String> {
    let trials = config.effective_trials(DEFAULT_TRIALS);
    let noise = noise_variance_for_pnr(
        config.sampling.pnr_db,
        config.pilot(),
        config.channel.gain_variance,
    );
    let gammas = (config.channel.gamma_max_ms, config.channel.gamma_max_bs);
    let cap = config.svp.max_iterations;
    let mut rows = Vec::new();
    for &eta in &config.sweeps.step_size {
        for &density in &config.sweeps.density {
            let num_samples = config.num_samples_for(density);
            let solver = config.solver(eta, 0.0).with_tolerance_floor(0.0);
            let mut sums = vec![0.0f64; cap];
            let mut diverged = 0usize;
            for trial in 0..trials {
                let t = draw_trial(config, "convergence", num_samples, gammas, noise, trial as u64)?;
                let (result, nmse_trace) =
                    svp_estimate_traced(&t.samples, &solver, &t.instance.matrix)?;
                if result.diverged {
                    diverged += 1;
                    continue;
                }
                let last = *nmse_trace.last().expect("at least one iteration runs");
                for (k, sum) in sums.iter_mut().enumerate() {
                    *sum += nmse_trace.get(k).copied().unwrap_or(last);
                }
            }
            let survivors = trials - diverged;
            for (k, sum) in sums.iter().enumerate() {
                let mean = if survivors > 0 {
                    sum / survivors as f64
                } else {
                    f64::NAN
                };
                rows.push(format!(
                    "{eta},{density},{},{:e},{diverged},{trials}",
                    k + 1,
                    mean
                ));
            }
        }
    }
    Ok(render_csv(
        &config.digest(),
        "eta,density,iteration,mean_nmse,diverged_trials,trials",
        &rows,
    ))
}
