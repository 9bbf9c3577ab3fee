//! Iterations-to-stop histograms of the completion solver across training
//! PNR levels.

use std::collections::BTreeMap;

use anyhow::Result;
use mmwave_mc::sampling::noise_variance_for_pnr;
use mmwave_mc::svp::svp_estimate;

use crate::config::ExperimentConfig;
use crate::output::render_csv;
use crate::trial::draw_trial;

const DEFAULT_TRIALS: usize = 200;

/// Runs the stopping study and renders its CSV artifact: one row per
/// (PNR, iteration count) histogram bucket, with the per-PNR mean repeated
/// on each row of its group.
pub fn run(config: &ExperimentConfig) -> Result<String> {
    let trials = config.effective_trials(DEFAULT_TRIALS);
    let num_samples = config.scalar_num_samples();
    let step_size = config.step_size_at(config.scalar_density());
    let gammas = (config.channel.gamma_max_ms, config.channel.gamma_max_bs);
    let mut rows = Vec::new();
    for &pnr_db in &config.sweeps.pnr_db {
        let noise = noise_variance_for_pnr(pnr_db, config.pilot(), config.channel.gain_variance);
        let solver = config.solver(step_size, noise);
        let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
        let mut total = 0usize;
        for trial in 0..trials {
            let t = draw_trial(config, "stopping", num_samples, gammas, noise, trial as u64)?;
            let result = svp_estimate(&t.samples, &solver)?;
            *histogram.entry(result.iterations_used).or_default() += 1;
            total += result.iterations_used;
        }
        let mean = total as f64 / trials as f64;
        for (iterations, count) in histogram {
            rows.push(format!("{pnr_db},{iterations},{count},{mean:e}"));
        }
    }
    Ok(render_csv(
        &config.digest(),
        "pnr_db,iterations,count,mean_iterations",
        &rows,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> ExperimentConfig {
        let mut config = ExperimentConfig::default();
        config.dimensions.num_ms_antennas = 16;
        config.dimensions.num_bs_antennas = 16;
        config.dimensions.num_ms_rf_chains = 2;
        config.dimensions.num_bs_rf_chains = 2;
        config.channel.num_paths = 2;
        config.trials = Some(8);
        config.sweeps.pnr_db = vec![10.0, 25.0];
        config
    }

    #[test]
    fn reruns_are_byte_identical() {
        let config = tiny_config();
        assert_eq!(run(&config).unwrap(), run(&config).unwrap());
    }

    #[test]
    fn histogram_counts_sum_to_the_trial_count_per_pnr() {
        let csv = run(&tiny_config()).unwrap();
        let mut per_pnr: std::collections::BTreeMap<String, usize> = Default::default();
        for line in csv.lines().skip(2) {
            let fields: Vec<&str> = line.split(',').collect();
            *per_pnr.entry(fields[0].to_string()).or_default() +=
                fields[2].parse::<usize>().unwrap();
        }
        assert_eq!(per_pnr.len(), 2);
        for (_, count) in per_pnr {
            assert_eq!(count, 8);
        }
    }

    #[test]
    fn very_high_pnr_stops_are_governed_by_the_floor_alone() {
        // With σ² ≈ 0 the threshold degenerates to the floor ε₀, orders of
        // magnitude below the 25 dB threshold, so stops come strictly
        // later.
        let mut config = tiny_config();
        config.sweeps.pnr_db = vec![25.0, 200.0];
        let csv = run(&config).unwrap();
        let mean_at = |pnr: &str| -> f64 {
            csv.lines()
                .skip(2)
                .find(|l| l.starts_with(&format!("{pnr},")))
                .unwrap()
                .split(',')
                .nth(3)
                .unwrap()
                .parse()
                .unwrap()
        };
        assert!(mean_at("200") > mean_at("25"));
    }
}
