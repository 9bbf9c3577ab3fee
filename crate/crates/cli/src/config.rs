//! Experiment configuration: TOML schema, defaults, validation, digest.
//!
//! A configuration fully determines a study's output together with the
//! study name: every CSV artifact embeds the SHA-256 digest of the
//! serialized configuration so results can be traced back to their exact
//! parameters. Validation collects every violation instead of stopping at
//! the first, so a bad file is diagnosed in one pass before any trial runs.

use std::path::Path;

use anyhow::Context;
use mmwave_mc::sampling::validate_sample_budget;
use mmwave_mc::svp::{default_step_size, ProjectionMethod, SvpConfig};
use mmwave_mc::C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Array sizes at both terminals.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Dimensions {
    /// MS antenna count N_MS.
    pub num_ms_antennas: usize,
    /// BS antenna count N_BS.
    pub num_bs_antennas: usize,
    /// MS RF chain count; must divide the MS antenna count.
    pub num_ms_rf_chains: usize,
    /// BS RF chain count; must divide the BS antenna count.
    pub num_bs_rf_chains: usize,
}

impl Default for Dimensions {
    fn default() -> Self {
        Self {
            num_ms_antennas: 64,
            num_bs_antennas: 64,
            num_ms_rf_chains: 4,
            num_bs_rf_chains: 4,
        }
    }
}

/// Propagation model parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelSection {
    /// Number of propagation paths L; also the completion rank budget.
    pub num_paths: usize,
    /// Per-path complex gain variance σ_α².
    pub gain_variance: f64,
    /// Half-width of the uniform per-element phase error at the MS.
    pub gamma_max_ms: f64,
    /// Half-width of the uniform per-element phase error at the BS.
    pub gamma_max_bs: f64,
}

impl Default for ChannelSection {
    fn default() -> Self {
        Self {
            num_paths: 4,
            gain_variance: 1.0,
            gamma_max_ms: 0.0,
            gamma_max_bs: 0.0,
        }
    }
}

/// Training-phase parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplingSection {
    /// Sampling density p; the sample budget is round(p·N_MS·N_BS).
    /// Exactly one of `density` and `num_samples` may be set.
    pub density: Option<f64>,
    /// Explicit sample budget M, alternative to `density`.
    pub num_samples: Option<usize>,
    /// Real part of the pilot symbol.
    pub pilot_re: f64,
    /// Imaginary part of the pilot symbol.
    pub pilot_im: f64,
    /// Pilot-to-noise ratio in dB used by studies that do not sweep PNR;
    /// `inf` selects noiseless training.
    pub pnr_db: f64,
}

impl Default for SamplingSection {
    fn default() -> Self {
        Self {
            density: Some(0.5),
            num_samples: None,
            pilot_re: 1.0,
            pilot_im: 0.0,
            pnr_db: 25.0,
        }
    }
}

/// Rank-projection route of the completion solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Projection {
    /// Eigendecompose the smaller Gram matrix and project.
    Gram,
    /// Truncate a full singular value decomposition.
    Direct,
}

impl From<Projection> for ProjectionMethod {
    fn from(projection: Projection) -> Self {
        match projection {
            Projection::Gram => ProjectionMethod::GramEigendecomposition,
            Projection::Direct => ProjectionMethod::DirectSvd,
        }
    }
}

/// Completion-solver parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SvpSection {
    /// Gradient step size η; when unset, a density-dependent default is
    /// used (1.8 at densities of one half and above, 1.4 below).
    pub step_size: Option<f64>,
    /// Additive floor ε₀ of the stopping threshold `|Ω|·σ² + ε₀`.
    pub tolerance_floor: f64,
    /// Iteration cap.
    pub max_iterations: usize,
    /// Rank-projection route.
    pub projection: Projection,
}

impl Default for SvpSection {
    fn default() -> Self {
        Self {
            step_size: None,
            tolerance_floor: 1e-3,
            max_iterations: 100,
            projection: Projection::Gram,
        }
    }
}

/// Pursuit-estimator parameters: the redundant dictionary grid sizes.
/// The unitary dictionary always matches the array sizes and is not
/// configurable.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OmpSection {
    /// MS-side (arrival) grid size of the redundant dictionary.
    pub grid_ms: usize,
    /// BS-side (departure) grid size of the redundant dictionary.
    pub grid_bs: usize,
}

impl Default for OmpSection {
    fn default() -> Self {
        Self {
            grid_ms: 128,
            grid_bs: 128,
        }
    }
}

/// Sweep axes of the studies. Each study reads only the axes it varies.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sweeps {
    /// Pilot-to-noise ratios in dB (stopping and estimator-comparison
    /// studies).
    pub pnr_db: Vec<f64>,
    /// Sampling densities (convergence and miss-probability studies).
    pub density: Vec<f64>,
    /// Gradient step sizes η (convergence study).
    pub step_size: Vec<f64>,
    /// Phase-error half-widths applied at both terminals
    /// (estimator-comparison study).
    pub gamma_max: Vec<f64>,
    /// Data-transmission SNRs in dB (spectral-efficiency study).
    pub snr_db: Vec<f64>,
}

impl Default for Sweeps {
    fn default() -> Self {
        Self {
            pnr_db: vec![5.0, 10.0, 15.0, 20.0, 25.0],
            density: vec![0.25, 0.5, 0.75],
            step_size: vec![0.6, 1.4, 1.8, 2.4],
            gamma_max: vec![0.0, std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_2],
            snr_db: vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0],
        }
    }
}

/// Complete description of an experiment; every study takes one of these
/// plus a master seed and emits a CSV artifact.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Root of all per-trial seeds.
    pub master_seed: u64,
    /// Trial count override; when unset, each study uses its own default
    /// (200 for estimation studies, 100 for the spectral-efficiency study).
    pub trials: Option<usize>,
    /// Array sizes.
    pub dimensions: Dimensions,
    /// Propagation model.
    pub channel: ChannelSection,
    /// Training phase.
    pub sampling: SamplingSection,
    /// Completion solver.
    pub svp: SvpSection,
    /// Pursuit estimator.
    pub omp: OmpSection,
    /// Sweep axes.
    pub sweeps: Sweeps,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            master_seed: 42,
            trials: None,
            dimensions: Dimensions::default(),
            channel: ChannelSection::default(),
            sampling: SamplingSection::default(),
            svp: SvpSection::default(),
            omp: OmpSection::default(),
            sweeps: Sweeps::default(),
        }
    }
}

impl ExperimentConfig {
    /// Reads and parses a TOML configuration file.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read configuration {}", path.display()))?;
        let config: Self = toml::from_str(&text)
            .with_context(|| format!("cannot parse configuration {}", path.display()))?;
        Ok(config)
    }

    /// SHA-256 digest of the canonical serialized configuration, embedded
    /// in every CSV artifact.
    pub fn digest(&self) -> String {
        let text = toml::to_string(self).expect("configuration serializes");
        let mut hasher = Sha256::new();
        hasher.update(text.as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Pilot symbol as a complex scalar.
    pub fn pilot(&self) -> C64 {
        C64::new(self.sampling.pilot_re, self.sampling.pilot_im)
    }

    /// Sample budget derived from a sampling density.
    pub fn num_samples_for(&self, density: f64) -> usize {
        let full = self.dimensions.num_ms_antennas * self.dimensions.num_bs_antennas;
        (density * full as f64).round() as usize
    }

    /// Sample budget of the scalar (non-swept) sampling section.
    pub fn scalar_num_samples(&self) -> usize {
        match (self.sampling.density, self.sampling.num_samples) {
            (_, Some(m)) => m,
            (Some(p), None) => self.num_samples_for(p),
            (None, None) => 0,
        }
    }

    /// Sampling density of the scalar sampling section.
    pub fn scalar_density(&self) -> f64 {
        let full = self.dimensions.num_ms_antennas * self.dimensions.num_bs_antennas;
        self.scalar_num_samples() as f64 / full as f64
    }

    /// Trial count: the explicit override when present, otherwise the
    /// study's default.
    pub fn effective_trials(&self, study_default: usize) -> usize {
        self.trials.unwrap_or(study_default)
    }

    /// Completion-solver configuration for a given step size and noise
    /// variance, with the remaining knobs taken from the `svp` section.
    pub fn solver(&self, step_size: f64, noise_variance: f64) -> SvpConfig {
        SvpConfig::new(self.channel.num_paths)
            .with_step_size(step_size)
            .with_tolerance_floor(self.svp.tolerance_floor)
            .with_noise_variance(noise_variance)
            .with_max_iterations(self.svp.max_iterations)
            .with_projection_method(self.svp.projection.into())
    }

    /// Configured step size, falling back to the density rule.
    pub fn step_size_at(&self, density: f64) -> f64 {
        self.svp.step_size.unwrap_or_else(|| default_step_size(density))
    }

    /// Checks every documented constraint, returning the full list of
    /// violations so one pass diagnoses the whole file.
    pub fn validate(&self) -> Result<(), Vec<String>> {
        let mut violations = Vec::new();
        let d = &self.dimensions;
        for (name, antennas, chains) in [
            ("ms", d.num_ms_antennas, d.num_ms_rf_chains),
            ("bs", d.num_bs_antennas, d.num_bs_rf_chains),
        ] {
            if antennas == 0 || chains == 0 {
                violations.push(format!(
                    "dimensions: {name} antenna and RF chain counts must be positive"
                ));
            } else if antennas % chains != 0 {
                violations.push(format!(
                    "dimensions: {name} RF chain count {chains} must divide the antenna \
                     count {antennas}"
                ));
            }
        }

        let c = &self.channel;
        if c.num_paths == 0 {
            violations.push("channel: num_paths must be positive".into());
        } else if c.num_paths > d.num_ms_antennas.min(d.num_bs_antennas) {
            violations.push(format!(
                "channel: num_paths {} exceeds the smaller array size {}",
                c.num_paths,
                d.num_ms_antennas.min(d.num_bs_antennas)
            ));
        }
        if !(c.gain_variance > 0.0) || !c.gain_variance.is_finite() {
            violations.push(format!(
                "channel: gain_variance must be positive and finite, got {}",
                c.gain_variance
            ));
        }
        for (name, gamma) in [("gamma_max_ms", c.gamma_max_ms), ("gamma_max_bs", c.gamma_max_bs)] {
            if !(gamma >= 0.0) || !gamma.is_finite() {
                violations.push(format!(
                    "channel: {name} must be nonnegative and finite, got {gamma}"
                ));
            }
        }

        let s = &self.sampling;
        match (s.density, s.num_samples) {
            (Some(_), Some(_)) => violations.push(
                "sampling: density and num_samples are mutually exclusive; set one".into(),
            ),
            (None, None) => {
                violations.push("sampling: one of density or num_samples is required".into())
            }
            (Some(p), None) => {
                if !(p > 0.0 && p <= 1.0) {
                    violations.push(format!("sampling: density must lie in (0, 1], got {p}"));
                } else {
                    self.check_budget("sampling", p, &mut violations);
                }
            }
            (None, Some(m)) => {
                if let Err(err) = validate_sample_budget(
                    d.num_ms_antennas,
                    d.num_bs_antennas,
                    m,
                    d.num_ms_rf_chains,
                ) {
                    violations.push(format!("sampling: {err}"));
                }
            }
        }
        if self.pilot().norm_sqr() == 0.0 || !self.pilot().norm_sqr().is_finite() {
            violations.push("sampling: pilot symbol must be nonzero and finite".into());
        }
        if s.pnr_db.is_nan() {
            violations.push("sampling: pnr_db must not be NaN".into());
        }

        let v = &self.svp;
        if let Some(eta) = v.step_size {
            if !(eta > 0.0) || !eta.is_finite() {
                violations.push(format!(
                    "svp: step_size must be positive and finite, got {eta}"
                ));
            }
        }
        if !(v.tolerance_floor >= 0.0) || !v.tolerance_floor.is_finite() {
            violations.push(format!(
                "svp: tolerance_floor must be nonnegative and finite, got {}",
                v.tolerance_floor
            ));
        }
        if v.max_iterations == 0 {
            violations.push("svp: max_iterations must be positive".into());
        }

        if self.omp.grid_ms < d.num_ms_antennas {
            violations.push(format!(
                "omp: grid_ms {} must be at least the MS antenna count {}",
                self.omp.grid_ms, d.num_ms_antennas
            ));
        }
        if self.omp.grid_bs < d.num_bs_antennas {
            violations.push(format!(
                "omp: grid_bs {} must be at least the BS antenna count {}",
                self.omp.grid_bs, d.num_bs_antennas
            ));
        }

        let w = &self.sweeps;
        for (name, axis) in [
            ("pnr_db", &w.pnr_db),
            ("density", &w.density),
            ("step_size", &w.step_size),
            ("gamma_max", &w.gamma_max),
            ("snr_db", &w.snr_db),
        ] {
            if axis.is_empty() {
                violations.push(format!("sweeps: {name} must not be empty"));
            }
        }
        if w.pnr_db.iter().any(|x| x.is_nan()) {
            violations.push("sweeps: pnr_db must not contain NaN".into());
        }
        for &p in &w.density {
            if !(p > 0.0 && p <= 1.0) {
                violations.push(format!("sweeps: density {p} must lie in (0, 1]"));
            } else {
                self.check_budget(&format!("sweeps: density {p}"), p, &mut violations);
            }
        }
        for &eta in &w.step_size {
            if !(eta > 0.0) || !eta.is_finite() {
                violations.push(format!(
                    "sweeps: step_size {eta} must be positive and finite"
                ));
            }
        }
        for &gamma in &w.gamma_max {
            if !(gamma >= 0.0) || !gamma.is_finite() {
                violations.push(format!(
                    "sweeps: gamma_max {gamma} must be nonnegative and finite"
                ));
            }
        }
        if w.snr_db.iter().any(|x| !x.is_finite()) {
            violations.push("sweeps: snr_db must contain only finite values".into());
        }

        if self.trials == Some(0) {
            violations.push("trials must be positive when set".into());
        }

        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    fn check_budget(&self, context: &str, density: f64, violations: &mut Vec<String>) {
        let d = &self.dimensions;
        if let Err(err) = validate_sample_budget(
            d.num_ms_antennas,
            d.num_bs_antennas,
            self.num_samples_for(density),
            d.num_ms_rf_chains,
        ) {
            violations.push(format!("{context}: {err}"));
        }
    }
}
