//! Shared synthesis of one Monte-Carlo trial: channel, switching plan,
//! observations.

use anyhow::Result;
use mmwave_mc::channel::{assemble_channel, sample_paths, ArrayGeometry, ChannelInstance};
use mmwave_mc::sampling::{build_uss_schedule, observe, SampleSet};

use crate::config::ExperimentConfig;
use crate::seeding::derive_seed;

/// Everything one trial observes: the true channel and the sampled entries
/// the estimators work from.
pub struct Trial {
    /// True channel with its path set and (possibly phase-impaired)
    /// geometries.
    pub instance: ChannelInstance,
    /// Masked noisy observations.
    pub samples: SampleSet,
}

/// Draws one trial deterministically from the master seed, the study name,
/// and the trial index.
///
/// The sample budget enters the schedule seed label so densities draw
/// independent plans, while the phase, channel, and noise draws are shared
/// across axis points that only rescale them (PNR, mismatch level), pairing
/// the realizations the studies compare.
pub fn draw_trial(
    config: &ExperimentConfig,
    study: &str,
    num_samples: usize,
    gamma_max: (f64, f64),
    noise_variance: f64,
    trial: u64,
) -> Result<Trial> {
    let master = config.master_seed;
    let d = &config.dimensions;
    let ms = ArrayGeometry::new(d.num_ms_antennas, d.num_ms_rf_chains)?
        .with_random_phase_errors(
            gamma_max.0,
            derive_seed(master, &format!("{study}/phase-ms"), trial),
        )?;
    let bs = ArrayGeometry::new(d.num_bs_antennas, d.num_bs_rf_chains)?
        .with_random_phase_errors(
            gamma_max.1,
            derive_seed(master, &format!("{study}/phase-bs"), trial),
        )?;
    let paths = sample_paths(
        config.channel.num_paths,
        config.channel.gain_variance,
        derive_seed(master, &format!("{study}/paths"), trial),
    )?;
    let instance = assemble_channel(&paths, &ms, &bs)?;
    let schedule = build_uss_schedule(
        &ms,
        &bs,
        num_samples,
        derive_seed(master, &format!("{study}/schedule/m={num_samples}"), trial),
    )?;
    let samples = observe(
        &instance,
        &schedule,
        config.pilot(),
        noise_variance,
        derive_seed(master, &format!("{study}/noise"), trial),
    )?;
    Ok(Trial { instance, samples })
}
