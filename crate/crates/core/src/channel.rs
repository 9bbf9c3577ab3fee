//! Geometric multipath channel synthesis for uniform linear arrays.
//!
//! A narrowband channel with `L` propagation paths between two uniform
//! linear arrays is the sum of `L` rank-one outer products of steering
//! vectors, scaled so that the expected per-entry power equals the path-gain
//! variance. Each array may carry per-element phase errors that corrupt its
//! steering vectors without changing any element magnitude, which models
//! hardware phase mismatch.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;

use crate::util::{complex_gaussian, seeded_rng};
use crate::{C64, CMatrix, CVector, Error, Result};

/// Uniform linear array whose antennas are wired to RF chains through
/// switches in equal-sized contiguous subarrays.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    num_antennas: usize,
    num_rf_chains: usize,
    element_spacing: f64,
    phase_errors: Vec<f64>,
}

impl ArrayGeometry {
    /// Ideal array with half-wavelength spacing and zero phase errors.
    pub fn new(num_antennas: usize, num_rf_chains: usize) -> Result<Self> {
        Self::with_spacing(num_antennas, num_rf_chains, 0.5)
    }

    /// Ideal array with the given element spacing in wavelengths (d/λ).
    pub fn with_spacing(
        num_antennas: usize,
        num_rf_chains: usize,
        element_spacing: f64,
    ) -> Result<Self> {
        if num_antennas == 0 || num_rf_chains == 0 {
            return Err(Error::InvalidArgument(
                "antenna and RF-chain counts must be positive".into(),
            ));
        }
        if num_antennas % num_rf_chains != 0 {
            return Err(Error::InvalidArgument(format!(
                "num_rf_chains {num_rf_chains} must divide num_antennas {num_antennas} \
                 to form equal subarrays"
            )));
        }
        if !(element_spacing > 0.0) || !element_spacing.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "element spacing must be positive and finite, got {element_spacing}"
            )));
        }
        Ok(Self {
            num_antennas,
            num_rf_chains,
            element_spacing,
            phase_errors: vec![0.0; num_antennas],
        })
    }

    /// Replaces the per-element phase errors γ_i (radians).
    pub fn with_phase_errors(mut self, phase_errors: Vec<f64>) -> Result<Self> {
        if phase_errors.len() != self.num_antennas {
            return Err(Error::ShapeMismatch(format!(
                "expected {} phase errors, got {}",
                self.num_antennas,
                phase_errors.len()
            )));
        }
        if phase_errors.iter().any(|g| !g.is_finite()) {
            return Err(Error::InvalidArgument("phase errors must be finite".into()));
        }
        self.phase_errors = phase_errors;
        Ok(self)
    }

    /// Draws i.i.d. phase errors uniform on [−gamma_max, gamma_max].
    ///
    /// `gamma_max = 0` leaves the array ideal without consuming randomness,
    /// so the zero-mismatch configuration is bit-identical to an array that
    /// never had errors attached.
    pub fn with_random_phase_errors(self, gamma_max: f64, seed: u64) -> Result<Self> {
        if !(gamma_max >= 0.0) || !gamma_max.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "gamma_max must be nonnegative and finite, got {gamma_max}"
            )));
        }
        if gamma_max == 0.0 {
            return Ok(self);
        }
        let mut rng = seeded_rng(seed);
        let n = self.num_antennas;
        let errors = (0..n)
            .map(|_| rng.random_range(-gamma_max..=gamma_max))
            .collect();
        self.with_phase_errors(errors)
    }

    /// Number of antenna elements N.
    pub fn num_antennas(&self) -> usize {
        self.num_antennas
    }

    /// Number of RF chains, equal to the number of subarrays.
    pub fn num_rf_chains(&self) -> usize {
        self.num_rf_chains
    }

    /// Element spacing in wavelengths (d/λ).
    pub fn element_spacing(&self) -> f64 {
        self.element_spacing
    }

    /// Per-element phase errors γ_i in radians.
    pub fn phase_errors(&self) -> &[f64] {
        &self.phase_errors
    }

    /// Antennas per subarray.
    pub fn subarray_size(&self) -> usize {
        self.num_antennas / self.num_rf_chains
    }

    /// Antenna indices (0-based) wired to RF chain `k`.
    pub fn subarray_members(&self, k: usize) -> std::ops::Range<usize> {
        let size = self.subarray_size();
        k * size..(k + 1) * size
    }
}

/// Angles and complex gains of the propagation paths of one channel draw.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSet {
    aoas: Vec<f64>,
    aods: Vec<f64>,
    gains: Vec<C64>,
    gain_variance: f64,
}

impl PathSet {
    /// Builds a path set, validating angle ranges and matching lengths.
    pub fn new(
        aoas: Vec<f64>,
        aods: Vec<f64>,
        gains: Vec<C64>,
        gain_variance: f64,
    ) -> Result<Self> {
        if aoas.is_empty() {
            return Err(Error::InvalidArgument("path count must be positive".into()));
        }
        if aoas.len() != aods.len() || aoas.len() != gains.len() {
            return Err(Error::ShapeMismatch(format!(
                "path sequences disagree: {} AoAs, {} AoDs, {} gains",
                aoas.len(),
                aods.len(),
                gains.len()
            )));
        }
        if !(gain_variance > 0.0) || !gain_variance.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "gain variance must be positive and finite, got {gain_variance}"
            )));
        }
        for &angle in aoas.iter().chain(aods.iter()) {
            check_angle(angle)?;
        }
        Ok(Self {
            aoas,
            aods,
            gains,
            gain_variance,
        })
    }

    /// Number of paths L.
    pub fn count(&self) -> usize {
        self.aoas.len()
    }

    /// Angles of arrival θ_l at the receive array, radians in [−π/2, π/2].
    pub fn aoas(&self) -> &[f64] {
        &self.aoas
    }

    /// Angles of departure φ_l at the transmit array, radians in [−π/2, π/2].
    pub fn aods(&self) -> &[f64] {
        &self.aods
    }

    /// Complex path gains α_l.
    pub fn gains(&self) -> &[C64] {
        &self.gains
    }

    /// Variance σ_α² of the path-gain distribution.
    pub fn gain_variance(&self) -> f64 {
        self.gain_variance
    }
}

/// A synthesized channel matrix together with everything that produced it.
#[derive(Debug, Clone)]
pub struct ChannelInstance {
    /// Channel matrix H, shape `num_ms_antennas × num_bs_antennas`.
    pub matrix: CMatrix,
    /// Path angles and gains behind `matrix`.
    pub paths: PathSet,
    /// Receive-side (MS) array.
    pub ms_geometry: ArrayGeometry,
    /// Transmit-side (BS) array.
    pub bs_geometry: ArrayGeometry,
}

impl ChannelInstance {
    /// Rows of the channel matrix.
    pub fn num_ms_antennas(&self) -> usize {
        self.ms_geometry.num_antennas()
    }

    /// Columns of the channel matrix.
    pub fn num_bs_antennas(&self) -> usize {
        self.bs_geometry.num_antennas()
    }

    /// Recomputes the matrix from stored paths and geometries, for
    /// round-trip checks against `self.matrix`.
    pub fn reassemble(&self) -> CMatrix {
        synthesize(&self.paths, &self.ms_geometry, &self.bs_geometry)
    }
}

fn check_angle(angle: f64) -> Result<()> {
    if !angle.is_finite() || !(-FRAC_PI_2..=FRAC_PI_2).contains(&angle) {
        return Err(Error::InvalidArgument(format!(
            "angle {angle} outside [-π/2, π/2]"
        )));
    }
    Ok(())
}

/// Array response to a plane wave from `angle`, including the geometry's
/// phase errors.
///
/// Element `i` (0-based) is `(1/√N)·exp(j·(i·2π·(d/λ)·sin(angle) + γ_i))`,
/// so the vector always has unit Euclidean norm: phase errors rotate
/// elements without changing magnitudes.
pub fn steering_vector(geometry: &ArrayGeometry, angle: f64) -> Result<CVector> {
    check_angle(angle)?;
    let n = geometry.num_antennas();
    let amplitude = 1.0 / (n as f64).sqrt();
    let phase_step = 2.0 * PI * geometry.element_spacing() * angle.sin();
    Ok(CVector::from_fn(n, |i, _| {
        let phase = i as f64 * phase_step + geometry.phase_errors()[i];
        C64::from_polar(amplitude, phase)
    }))
}

/// Draws a random path set: AoAs and AoDs i.i.d. uniform on [−π/2, π/2],
/// gains i.i.d. CN(0, gain_variance). Deterministic given the seed; the
/// draw order is all AoAs, then all AoDs, then all gains.
pub fn sample_paths(count: usize, gain_variance: f64, seed: u64) -> Result<PathSet> {
    if count == 0 {
        return Err(Error::InvalidArgument("path count must be positive".into()));
    }
    if !(gain_variance > 0.0) || !gain_variance.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "gain variance must be positive and finite, got {gain_variance}"
        )));
    }
    let mut rng = seeded_rng(seed);
    let draw_angles = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
        (0..count)
            .map(|_| rng.random_range(-FRAC_PI_2..=FRAC_PI_2))
            .collect()
    };
    let aoas = draw_angles(&mut rng);
    let aods = draw_angles(&mut rng);
    let gains = (0..count)
        .map(|_| complex_gaussian(&mut rng, gain_variance))
        .collect();
    PathSet::new(aoas, aods, gains, gain_variance)
}

fn synthesize(paths: &PathSet, ms: &ArrayGeometry, bs: &ArrayGeometry) -> CMatrix {
    let n_ms = ms.num_antennas();
    let n_bs = bs.num_antennas();
    let scale = ((n_ms * n_bs) as f64 / paths.count() as f64).sqrt();
    let mut matrix = CMatrix::zeros(n_ms, n_bs);
    for l in 0..paths.count() {
        let a_ms = steering_vector(ms, paths.aoas()[l]).expect("validated angle");
        let a_bs = steering_vector(bs, paths.aods()[l]).expect("validated angle");
        let weight = paths.gains()[l] * scale;
        // H += weight · a_ms · a_bsᴴ
        for j in 0..n_bs {
            let col_factor = weight * a_bs[j].conj();
            for i in 0..n_ms {
                matrix[(i, j)] += a_ms[i] * col_factor;
            }
        }
    }
    matrix
}

/// Assembles the channel matrix `H = A_MS · diag(√(N_BS·N_MS/L)·α) · A_BSᴴ`
/// from steering vectors at the path angles, phase errors included.
///
/// The `1/√N` steering normalizations and the `√(N_BS·N_MS/L)` gain scaling
/// cancel, so each entry has expected power equal to the gain variance.
pub fn assemble_channel(
    paths: &PathSet,
    ms_geometry: &ArrayGeometry,
    bs_geometry: &ArrayGeometry,
) -> Result<ChannelInstance> {
    let matrix = synthesize(paths, ms_geometry, bs_geometry);
    Ok(ChannelInstance {
        matrix,
        paths: paths.clone(),
        ms_geometry: ms_geometry.clone(),
        bs_geometry: bs_geometry.clone(),
    })
}
