//! Analytic and empirical row-miss probabilities of the switching plan.
//!
//! A row is missed when no training stage samples its MS antenna, leaving
//! that row of the channel matrix unobserved. The analytic value follows
//! from the per-column without-replacement draws; the empirical frequency
//! counts misses of the first row over freshly seeded schedules, and is
//! only estimated where the analytic value is large enough for the trial
//! budget to resolve it.

use anyhow::Result;
use mmwave_mc::channel::ArrayGeometry;
use mmwave_mc::sampling::{build_uss_schedule, miss_probability};

use crate::config::ExperimentConfig;
use crate::output::render_csv;
use crate::seeding::derive_seed;

const DEFAULT_TRIALS: usize = 200;

/// Analytic probabilities below this are reported without an empirical
/// column; resolving them would need more schedules than any reasonable
/// trial budget.
const EMPIRICAL_FLOOR: f64 = 1e-4;

/// Runs the miss-probability study and renders its CSV artifact: one row
/// per swept sampling density.
pub fn run(config: &ExperimentConfig) -> Result<String> {
    let trials = config.effective_trials(DEFAULT_TRIALS);
    let d = &config.dimensions;
    let ms = ArrayGeometry::new(d.num_ms_antennas, d.num_ms_rf_chains)?;
    let bs = ArrayGeometry::new(d.num_bs_antennas, d.num_bs_rf_chains)?;
    let mut rows = Vec::new();
    for &density in &config.sweeps.density {
        let num_samples = config.num_samples_for(density);
        let analytic =
            miss_probability(d.num_ms_antennas, d.num_bs_antennas, num_samples, d.num_ms_rf_chains)?;
        let (empirical, schedule_trials) = if analytic >= EMPIRICAL_FLOOR {
            let mut misses = 0usize;
            for trial in 0..trials {
                let schedule = build_uss_schedule(
                    &ms,
                    &bs,
                    num_samples,
                    derive_seed(
                        config.master_seed,
                        &format!("missprob/schedule/m={num_samples}"),
                        trial as u64,
                    ),
                )?;
                if schedule.index_pairs().iter().all(|&(i, _)| i != 0) {
                    misses += 1;
                }
            }
            (format!("{:e}", misses as f64 / trials as f64), trials)
        } else {
            ("NA".into(), 0)
        };
        rows.push(format!(
            "{},{},{num_samples},{analytic:e},{empirical},{schedule_trials}",
            d.num_ms_antennas, d.num_bs_antennas
        ));
    }
    Ok(render_csv(
        &config.digest(),
        "num_ms_antennas,num_bs_antennas,num_samples,analytic_miss_probability,\
         empirical_frequency,schedule_trials",
        &rows,
    ))
}
