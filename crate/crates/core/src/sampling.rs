//! Switch-based training: scheduling, noisy observation, masking, and the
//! analytic row-miss probability.
//!
//! Training proceeds in stages. In each stage the transmit side activates a
//! single BS antenna (cycling through all of them) and the receive side
//! switches one antenna per subarray onto its RF chain, so each stage yields
//! one noisy channel entry per RF chain. Receive antennas are drawn uniformly
//! without replacement per (BS antenna, subarray) pair, which spreads the
//! samples evenly: every column of the channel matrix ends up with exactly
//! the same number of observations from each subarray.

use rand::seq::index::sample as sample_without_replacement;

use crate::channel::{ArrayGeometry, ChannelInstance};
use crate::util::{complex_gaussian, seeded_rng};
use crate::{C64, CMatrix, Error, Result};

/// Noisy observations of a subset Ω of channel-matrix entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    omega: Vec<(usize, usize)>,
    observed: CMatrix,
    density: f64,
    noise_variance: f64,
}

impl SampleSet {
    /// Builds a sample set from explicit per-entry observations.
    ///
    /// `noise_variance` is the variance of the additive noise on the
    /// recorded values (receiver noise variance divided by the squared
    /// pilot magnitude).
    pub fn from_observations(
        num_rows: usize,
        num_cols: usize,
        entries: &[(usize, usize, C64)],
        noise_variance: f64,
    ) -> Result<Self> {
        if num_rows == 0 || num_cols == 0 {
            return Err(Error::InvalidArgument("matrix dimensions must be positive".into()));
        }
        if entries.is_empty() {
            return Err(Error::InvalidArgument("sample set must be nonempty".into()));
        }
        if !(noise_variance >= 0.0) || !noise_variance.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "noise variance must be nonnegative and finite, got {noise_variance}"
            )));
        }
        let mut omega = Vec::with_capacity(entries.len());
        let mut observed = CMatrix::zeros(num_rows, num_cols);
        for &(i, j, value) in entries {
            if i >= num_rows || j >= num_cols {
                return Err(Error::ShapeMismatch(format!(
                    "sample index ({i}, {j}) outside {num_rows}×{num_cols}"
                )));
            }
            omega.push((i, j));
            observed[(i, j)] = value;
        }
        omega.sort_unstable();
        if omega.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("sample indices must be distinct".into()));
        }
        let density = omega.len() as f64 / (num_rows * num_cols) as f64;
        Ok(Self {
            omega,
            observed,
            density,
            noise_variance,
        })
    }

    /// Sampled index pairs, sorted row-major.
    pub fn omega(&self) -> &[(usize, usize)] {
        &self.omega
    }

    /// Observed matrix: noisy values on Ω, exact zeros elsewhere.
    pub fn observed(&self) -> &CMatrix {
        &self.observed
    }

    /// Fraction of entries sampled, |Ω| / (rows·cols).
    pub fn density(&self) -> f64 {
        self.density
    }

    /// Noise variance on the recorded values.
    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    /// Number of samples |Ω|.
    pub fn len(&self) -> usize {
        self.omega.len()
    }

    /// True when no entries are recorded (never for validated sets).
    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    /// Rows of the underlying matrix.
    pub fn num_rows(&self) -> usize {
        self.observed.nrows()
    }

    /// Columns of the underlying matrix.
    pub fn num_cols(&self) -> usize {
        self.observed.ncols()
    }
}

/// One training stage: the active BS antenna and the MS antenna switched on
/// in each subarray (index `k` of `ms_antennas` belongs to subarray `k`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage {
    pub bs_antenna: usize,
    pub ms_antennas: Vec<usize>,
}

/// Complete switching plan for one training phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingSchedule {
    stages: Vec<Stage>,
    num_ms_antennas: usize,
    num_bs_antennas: usize,
    num_rf_chains: usize,
}

impl TrainingSchedule {
    /// Stage records in execution order.
    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    /// Total number of scheduled samples M.
    pub fn num_samples(&self) -> usize {
        self.stages.len() * self.num_rf_chains
    }

    /// Receive antennas per stage (one per subarray).
    pub fn num_rf_chains(&self) -> usize {
        self.num_rf_chains
    }

    /// Rows of the sampled matrix.
    pub fn num_ms_antennas(&self) -> usize {
        self.num_ms_antennas
    }

    /// Columns of the sampled matrix.
    pub fn num_bs_antennas(&self) -> usize {
        self.num_bs_antennas
    }

    /// Sampled (row, column) pairs in execution order.
    pub fn index_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::with_capacity(self.num_samples());
        for stage in &self.stages {
            for &i in &stage.ms_antennas {
                pairs.push((i, stage.bs_antenna));
            }
        }
        pairs
    }

    /// Renders the schedule as a CSV table with 0-based antenna indices,
    /// one row per stage.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("stage,bs_antenna");
        for k in 0..self.num_rf_chains {
            out.push_str(&format!(",ms_antenna_{k}"));
        }
        out.push('\n');
        for (t, stage) in self.stages.iter().enumerate() {
            out.push_str(&format!("{t},{}", stage.bs_antenna));
            for &i in &stage.ms_antennas {
                out.push_str(&format!(",{i}"));
            }
            out.push('\n');
        }
        out
    }
}

fn check_budget(
    num_ms: usize,
    num_bs: usize,
    num_samples: usize,
    num_rf_chains: usize,
) -> Result<usize> {
    if num_ms == 0 || num_bs == 0 || num_rf_chains == 0 {
        return Err(Error::InvalidArgument("array sizes must be positive".into()));
    }
    if num_ms % num_rf_chains != 0 {
        return Err(Error::InvalidArgument(format!(
            "num_rf_chains {num_rf_chains} must divide num_ms_antennas {num_ms}"
        )));
    }
    let quantum = num_bs * num_rf_chains;
    let full = num_ms * num_bs;
    if num_samples == 0 || num_samples % quantum != 0 {
        let below = (num_samples / quantum).max(1) * quantum;
        let below = below.min(full);
        let above = (num_samples / quantum + 1) * quantum;
        return Err(Error::InfeasibleSampleBudget {
            requested: num_samples,
            constraint: format!(
                "budget must be a positive multiple of num_bs_antennas × num_rf_chains = {quantum}"
            ),
            below,
            above: above.min(full),
        });
    }
    let rounds = num_samples / quantum;
    let subarray_size = num_ms / num_rf_chains;
    if rounds > subarray_size {
        return Err(Error::InfeasibleSampleBudget {
            requested: num_samples,
            constraint: format!(
                "each (column, subarray) pair can supply at most {subarray_size} distinct \
                 samples, so the budget is capped at {full}"
            ),
            below: full,
            above: full,
        });
    }
    Ok(rounds)
}

/// Builds the switching plan for `num_samples` observations.
///
/// The BS antenna for stage `t` is `t mod num_bs_antennas`, so every column
/// is visited the same number of times. For each (BS antenna, subarray)
/// pair the MS antennas are drawn uniformly without replacement, giving
/// exactly `num_samples / (num_bs_antennas × num_rf_chains)` samples per
/// column per subarray.
pub fn build_uss_schedule(
    ms_geometry: &ArrayGeometry,
    bs_geometry: &ArrayGeometry,
    num_samples: usize,
    seed: u64,
) -> Result<TrainingSchedule> {
    let num_ms = ms_geometry.num_antennas();
    let num_bs = bs_geometry.num_antennas();
    let num_rf = ms_geometry.num_rf_chains();
    let rounds = check_budget(num_ms, num_bs, num_samples, num_rf)?;
    let subarray_size = ms_geometry.subarray_size();

    let mut rng = seeded_rng(seed);
    // picks[j][k] lists the subarray offsets drawn for BS antenna j and
    // subarray k, in visit order.
    let mut picks = Vec::with_capacity(num_bs);
    for _ in 0..num_bs {
        let mut per_subarray = Vec::with_capacity(num_rf);
        for _ in 0..num_rf {
            let drawn = sample_without_replacement(&mut rng, subarray_size, rounds).into_vec();
            per_subarray.push(drawn);
        }
        picks.push(per_subarray);
    }

    let num_stages = num_samples / num_rf;
    let stages = (0..num_stages)
        .map(|t| {
            let bs_antenna = t % num_bs;
            let visit = t / num_bs;
            let ms_antennas = (0..num_rf)
                .map(|k| k * subarray_size + picks[bs_antenna][k][visit])
                .collect();
            Stage {
                bs_antenna,
                ms_antennas,
            }
        })
        .collect();

    Ok(TrainingSchedule {
        stages,
        num_ms_antennas: num_ms,
        num_bs_antennas: num_bs,
        num_rf_chains: num_rf,
    })
}

/// Runs the training schedule against a channel: each scheduled entry is
/// received as `H[i,j]·s + n` with `n ~ CN(0, noise_variance)` and recorded
/// as `H[i,j] + n/s`. With zero noise variance no randomness is consumed
/// and the recorded values equal the channel entries exactly.
pub fn observe(
    channel: &ChannelInstance,
    schedule: &TrainingSchedule,
    pilot: C64,
    noise_variance: f64,
    seed: u64,
) -> Result<SampleSet> {
    if pilot.norm_sqr() == 0.0 {
        return Err(Error::InvalidArgument("pilot symbol must be nonzero".into()));
    }
    if !(noise_variance >= 0.0) || !noise_variance.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "noise variance must be nonnegative and finite, got {noise_variance}"
        )));
    }
    if channel.num_ms_antennas() != schedule.num_ms_antennas()
        || channel.num_bs_antennas() != schedule.num_bs_antennas()
    {
        return Err(Error::ShapeMismatch(format!(
            "channel is {}×{} but the schedule was built for {}×{}",
            channel.num_ms_antennas(),
            channel.num_bs_antennas(),
            schedule.num_ms_antennas(),
            schedule.num_bs_antennas()
        )));
    }
    let mut rng = seeded_rng(seed);
    let mut entries = Vec::with_capacity(schedule.num_samples());
    for stage in schedule.stages() {
        let j = stage.bs_antenna;
        for &i in &stage.ms_antennas {
            let mut value = channel.matrix[(i, j)];
            if noise_variance > 0.0 {
                value += complex_gaussian(&mut rng, noise_variance) / pilot;
            }
            entries.push((i, j, value));
        }
    }
    SampleSet::from_observations(
        channel.num_ms_antennas(),
        channel.num_bs_antennas(),
        &entries,
        noise_variance / pilot.norm_sqr(),
    )
}

/// Projects a matrix onto an index set: entries on `omega` are copied,
/// everything else is exactly zero. Idempotent.
pub fn apply_mask(matrix: &CMatrix, omega: &[(usize, usize)]) -> Result<CMatrix> {
    let mut masked = CMatrix::zeros(matrix.nrows(), matrix.ncols());
    for &(i, j) in omega {
        if i >= matrix.nrows() || j >= matrix.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "mask index ({i}, {j}) outside {}×{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        masked[(i, j)] = matrix[(i, j)];
    }
    Ok(masked)
}

/// Noise variance that realizes a pilot-to-noise ratio, defined as
/// `PNR = |s|²·σ_α²/σ²` (per-observation signal power over noise power).
pub fn noise_variance_for_pnr(pnr_db: f64, pilot: C64, gain_variance: f64) -> f64 {
    pilot.norm_sqr() * gain_variance / 10f64.powf(pnr_db / 10.0)
}

/// Checks that a sample budget is schedulable without building the plan.
///
/// The budget must be a positive multiple of `num_bs × num_rf_chains` and
/// at most `num_ms × num_bs`; on failure the error names the nearest
/// feasible budgets.
pub fn validate_sample_budget(
    num_ms: usize,
    num_bs: usize,
    num_samples: usize,
    num_rf_chains: usize,
) -> Result<()> {
    check_budget(num_ms, num_bs, num_samples, num_rf_chains).map(|_| ())
}

/// Probability that one specific row of the channel matrix receives no
/// sample under the switching plan: `((N_MS − M/N_BS)/N_MS)^N_BS`.
pub fn miss_probability(
    num_ms: usize,
    num_bs: usize,
    num_samples: usize,
    num_rf_chains: usize,
) -> Result<f64> {
    check_budget(num_ms, num_bs, num_samples, num_rf_chains)?;
    let per_column = (num_samples / num_bs) as f64;
    let ratio = (num_ms as f64 - per_column) / num_ms as f64;
    Ok(ratio.powi(num_bs as i32))
}
