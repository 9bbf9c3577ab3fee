//! Command-line experiment runner: parses a configuration, dispatches one
//! study, and writes its CSV artifact to a file or standard output.

use std::path::PathBuf;

use anyhow::bail;
use clap::{Parser, Subcommand, ValueEnum};

use mmwave_mc_cli::config::ExperimentConfig;
use mmwave_mc_cli::studies;
use mmwave_mc_cli::studies::se::Setting;

#[derive(Parser)]
#[command(
    name = "mmwave-mc",
    version,
    about = "Monte-Carlo studies of switch-based mmWave channel estimators"
)]
struct Cli {
    /// TOML experiment configuration; built-in defaults are used when
    /// omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the configuration's master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Overrides the configuration's trial count.
    #[arg(long, global = true)]
    trials: Option<usize>,

    /// Writes the CSV artifact here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-iteration NMSE traces across step sizes and sampling densities.
    Convergence,
    /// Iterations-to-stop histograms across training PNR levels.
    Stopping,
    /// Estimator NMSE comparison across PNR and phase-mismatch levels.
    Nmse,
    /// Spectral-efficiency comparison across data SNR with antenna
    /// selection.
    Se {
        /// Selection setting: at the MS only (a) or at both ends (b).
        #[arg(long, value_enum, default_value_t = SettingArg::A)]
        setting: SettingArg,
    },
    /// Analytic and empirical row-miss probabilities of the switching
    /// plan.
    Missprob,
    /// Checks the configuration and reports all violations.
    ValidateConfig,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SettingArg {
    A,
    B,
}

impl From<SettingArg> for Setting {
    fn from(arg: SettingArg) -> Self {
        match arg {
            SettingArg::A => Setting::A,
            SettingArg::B => Setting::B,
        }
    }
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.master_seed = seed;
    }
    if let Some(trials) = cli.trials {
        config.trials = Some(trials);
    }

    if let Err(violations) = config.validate() {
        for violation in &violations {
            eprintln!("configuration violation: {violation}");
        }
        bail!("{} configuration violation(s)", violations.len());
    }
    if matches!(cli.command, Command::ValidateConfig) {
        println!("configuration valid; digest {}", config.digest());
        return Ok(());
    }

    let csv = match cli.command {
        Command::Convergence => studies::convergence::run(&config)?,
        Command::Stopping => studies::stopping::run(&config)?,
        Command::Nmse => studies::nmse::run(&config)?,
        Command::Se { setting } => studies::se::run(&config, setting.into())?,
        Command::Missprob => studies::missprob::run(&config)?,
        Command::ValidateConfig => unreachable!("handled above"),
    };
    match &cli.out {
        Some(path) => std::fs::write(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}
