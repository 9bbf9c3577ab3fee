//! Compressive-sensing baseline: steering-vector dictionaries on uniform
//! angular grids and orthogonal matching pursuit on the sampled entries.
//!
//! The sparse model expands the channel over outer products of ideal
//! MS-side and BS-side steering atoms. The sensing operator restricts the
//! expansion to the sampled positions of a [`SampleSet`], so the baseline
//! consumes exactly the same measurements as the completion estimator.
//! Correlations are computed from the factored atoms instead of the full
//! Kronecker dictionary, which would be prohibitively large at fine grids.

use nalgebra::linalg::SymmetricEigen;

use crate::channel::{steering_vector, ArrayGeometry};
use crate::sampling::SampleSet;
use crate::{C64, CMatrix, Error, Result};

/// Relative eigenvalue threshold below which the least-squares system is
/// treated as rank deficient and solved in the minimum-norm sense.
const LS_RANK_TOLERANCE: f64 = 1e-12;

/// Relative residual threshold at which pursuit stops early: further atoms
/// would only fit floating-point noise.
const EARLY_STOP_RATIO: f64 = 1e-14;

/// Pair of steering-vector dictionaries on uniform angular grids.
///
/// Each column is a unit-norm ideal steering vector (zero phase errors).
/// When the grid size equals the antenna count at half-wavelength spacing,
/// each atom matrix is unitary.
#[derive(Debug, Clone)]
pub struct Dictionary {
    ms_atoms: CMatrix,
    bs_atoms: CMatrix,
    grid_angles_ms: Vec<f64>,
    grid_angles_bs: Vec<f64>,
}

impl Dictionary {
    /// Builds MS-side and BS-side dictionaries with `num_ms_atoms` and
    /// `num_bs_atoms` grid points for arrays of the given sizes, both at
    /// element spacing `d_over_lambda` wavelengths.
    pub fn new(
        num_ms_antennas: usize,
        num_bs_antennas: usize,
        num_ms_atoms: usize,
        num_bs_atoms: usize,
        d_over_lambda: f64,
    ) -> Result<Self> {
        let (ms_atoms, grid_angles_ms) =
            build_dictionary(num_ms_antennas, num_ms_atoms, d_over_lambda)?;
        let (bs_atoms, grid_angles_bs) =
            build_dictionary(num_bs_antennas, num_bs_atoms, d_over_lambda)?;
        Ok(Self {
            ms_atoms,
            bs_atoms,
            grid_angles_ms,
            grid_angles_bs,
        })
    }

    /// MS-side atom matrix, one unit-norm steering vector per column.
    pub fn ms_atoms(&self) -> &CMatrix {
        &self.ms_atoms
    }

    /// BS-side atom matrix, one unit-norm steering vector per column.
    pub fn bs_atoms(&self) -> &CMatrix {
        &self.bs_atoms
    }

    /// Grid angles (radians) behind the MS-side atoms.
    pub fn grid_angles_ms(&self) -> &[f64] {
        &self.grid_angles_ms
    }

    /// Grid angles (radians) behind the BS-side atoms.
    pub fn grid_angles_bs(&self) -> &[f64] {
        &self.grid_angles_bs
    }

    /// Number of MS-side grid points.
    pub fn num_ms_atoms(&self) -> usize {
        self.ms_atoms.ncols()
    }

    /// Number of BS-side grid points.
    pub fn num_bs_atoms(&self) -> usize {
        self.bs_atoms.ncols()
    }
}

/// Sparse channel estimate produced by [`omp_estimate`].
#[derive(Debug, Clone)]
pub struct SparseEstimate {
    /// Selected grid pairs `(ms_grid_index, bs_grid_index)`, in selection
    /// order; pairs are distinct.
    pub support: Vec<(usize, usize)>,
    /// Fitted complex coefficients, aligned with `support`.
    pub coefficients: Vec<C64>,
    /// Dense channel estimate assembled from the support atoms.
    pub reconstructed: CMatrix,
    /// True when the least-squares refit hit a rank-deficient system and
    /// fell back to the minimum-norm solution.
    pub rank_deficient: bool,
    /// Frobenius norms of the sampled-entry residual: the pre-iteration
    /// norm first, then one entry per completed iteration.
    pub residual_norms: Vec<f64>,
}

impl SparseEstimate {
    /// Reassembles the dense estimate from `support` and `coefficients`;
    /// identical to the stored `reconstructed` matrix.
    pub fn synthesize(&self, dictionary: &Dictionary) -> CMatrix {
        assemble(&self.support, &self.coefficients, dictionary)
    }

    /// Support and coefficients as CSV rows
    /// (`ms_grid_index,bs_grid_index,coefficient_re,coefficient_im`).
    pub fn support_csv(&self) -> String {
        let mut out = String::from("ms_grid_index,bs_grid_index,coefficient_re,coefficient_im\n");
        for (&(g_r, g_t), c) in self.support.iter().zip(&self.coefficients) {
            out.push_str(&format!("{g_r},{g_t},{:e},{:e}\n", c.re, c.im));
        }
        out
    }
}

/// Builds one uniform-grid steering dictionary: an atom matrix whose columns
/// are ideal steering vectors, plus the grid angles.
///
/// Grid point `g` (zero-based) is placed so that the per-element phase
/// increment `2π·(d/λ)·sin θ_g` equals `(2π/G)·g − π`; the grid therefore
/// spans sin θ ∈ [−1, 1) uniformly when `d = λ/2`. The grid is only
/// solvable for physical angles when the spacing is at least half a
/// wavelength, and needs at least as many points as antennas.
pub fn build_dictionary(
    num_antennas: usize,
    grid_size: usize,
    d_over_lambda: f64,
) -> Result<(CMatrix, Vec<f64>)> {
    if num_antennas == 0 {
        return Err(Error::InvalidArgument("antenna count must be positive".into()));
    }
    if grid_size < num_antennas {
        return Err(Error::InvalidArgument(format!(
            "grid size {grid_size} must be at least the antenna count {num_antennas}"
        )));
    }
    if !(d_over_lambda > 0.0) || !d_over_lambda.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "element spacing must be positive and finite, got {d_over_lambda}"
        )));
    }
    let g = grid_size as f64;
    let sines: Vec<f64> = (0..grid_size)
        .map(|idx| (2.0 * idx as f64 / g - 1.0) / (2.0 * d_over_lambda))
        .collect();
    let max_abs_sin = sines.iter().fold(0.0_f64, |acc, s| acc.max(s.abs()));
    if max_abs_sin > 1.0 + 1e-12 {
        return Err(Error::UnsolvableGrid {
            spacing: d_over_lambda,
            max_abs_sin,
        });
    }
    let angles: Vec<f64> = sines.iter().map(|s| s.clamp(-1.0, 1.0).asin()).collect();

    let geometry = ArrayGeometry::with_spacing(num_antennas, 1, d_over_lambda)?;
    let mut atoms = CMatrix::zeros(num_antennas, grid_size);
    for (col, &angle) in angles.iter().enumerate() {
        let atom = steering_vector(&geometry, angle)?;
        for row in 0..num_antennas {
            atoms[(row, col)] = atom[row];
        }
    }
    Ok((atoms, angles))
}

/// Orthogonal matching pursuit on the sampled entries.
///
/// Each iteration selects the grid pair whose outer-product atom has the
/// largest correlation magnitude with the current residual (ties broken
/// toward the lowest row-major pair), refits every selected coefficient by
/// least squares on the sampled positions, and updates the residual.
/// Pursuit stops early once the residual is negligible relative to the
/// observations or every grid pair is selected.
pub fn omp_estimate(
    samples: &SampleSet,
    dictionary: &Dictionary,
    num_iterations: usize,
) -> Result<SparseEstimate> {
    if num_iterations == 0 {
        return Err(Error::InvalidArgument("iteration count must be positive".into()));
    }
    if samples.is_empty() {
        return Err(Error::InvalidArgument("sample set must be nonempty".into()));
    }
    if samples.num_rows() != dictionary.ms_atoms.nrows()
        || samples.num_cols() != dictionary.bs_atoms.nrows()
    {
        return Err(Error::ShapeMismatch(format!(
            "sample grid {}×{} does not match dictionary array sizes {}×{}",
            samples.num_rows(),
            samples.num_cols(),
            dictionary.ms_atoms.nrows(),
            dictionary.bs_atoms.nrows(),
        )));
    }

    let omega = samples.omega();
    let observed: Vec<C64> = omega.iter().map(|&(i, j)| samples.observed()[(i, j)]).collect();

    let mut residual_matrix = samples.observed().clone();
    let mut residual_norms = vec![samples.observed().norm()];
    let mut support: Vec<(usize, usize)> = Vec::with_capacity(num_iterations);
    // Sampled values of each selected atom, one column per support pair.
    let mut atom_columns: Vec<Vec<C64>> = Vec::with_capacity(num_iterations);
    let mut coefficients: Vec<C64> = Vec::new();
    let mut rank_deficient = false;
    let num_pairs = dictionary.num_ms_atoms() * dictionary.num_bs_atoms();

    for _ in 0..num_iterations {
        let current = *residual_norms.last().expect("seeded with the initial norm");
        if current <= EARLY_STOP_RATIO * residual_norms[0] || support.len() == num_pairs {
            break;
        }

        // Correlation of every grid pair with the residual, factored
        // through the two atom matrices.
        let correlations =
            dictionary.ms_atoms.adjoint() * &residual_matrix * &dictionary.bs_atoms;
        let mut best: Option<((usize, usize), f64)> = None;
        for g_r in 0..dictionary.num_ms_atoms() {
            for g_t in 0..dictionary.num_bs_atoms() {
                if support.contains(&(g_r, g_t)) {
                    continue;
                }
                let magnitude = correlations[(g_r, g_t)].norm_sqr();
                if best.is_none_or(|(_, held)| magnitude > held) {
                    best = Some(((g_r, g_t), magnitude));
                }
            }
        }
        let (pair, _) = best.expect("support smaller than the grid leaves candidates");
        support.push(pair);
        atom_columns.push(
            omega
                .iter()
                .map(|&(i, j)| dictionary.ms_atoms[(i, pair.0)] * dictionary.bs_atoms[(j, pair.1)].conj())
                .collect(),
        );

        let (solution, deficient) = solve_least_squares(&atom_columns, &observed);
        rank_deficient |= deficient;
        coefficients = solution;

        let mut residual_sq = 0.0;
        for (idx, &(i, j)) in omega.iter().enumerate() {
            let mut fitted = C64::new(0.0, 0.0);
            for (column, &c) in atom_columns.iter().zip(&coefficients) {
                fitted += c * column[idx];
            }
            let value = observed[idx] - fitted;
            residual_matrix[(i, j)] = value;
            residual_sq += value.norm_sqr();
        }
        residual_norms.push(residual_sq.sqrt());
    }

    let reconstructed = assemble(&support, &coefficients, dictionary);
    Ok(SparseEstimate {
        support,
        coefficients,
        reconstructed,
        rank_deficient,
        residual_norms,
    })
}

/// Flop count of one pursuit iteration at `num_samples` measurements on a
/// `num_ms_atoms × num_bs_atoms` grid; used only for complexity reporting.
pub fn per_iteration_flops(num_samples: usize, num_bs_atoms: usize, num_ms_atoms: usize) -> u64 {
    8 * num_samples as u64 * num_bs_atoms as u64 * num_ms_atoms as u64
}

fn assemble(support: &[(usize, usize)], coefficients: &[C64], dictionary: &Dictionary) -> CMatrix {
    let mut out = CMatrix::zeros(dictionary.ms_atoms.nrows(), dictionary.bs_atoms.nrows());
    for (&(g_r, g_t), &c) in support.iter().zip(coefficients) {
        for j in 0..out.ncols() {
            let weight = c * dictionary.bs_atoms[(j, g_t)].conj();
            for i in 0..out.nrows() {
                out[(i, j)] += dictionary.ms_atoms[(i, g_r)] * weight;
            }
        }
    }
    out
}

/// Least squares over the selected atoms via the pseudo-inverse of their
/// Gram matrix; returns the minimum-norm solution and whether the system
/// was rank deficient.
fn solve_least_squares(atom_columns: &[Vec<C64>], observed: &[C64]) -> (Vec<C64>, bool) {
    let k = atom_columns.len();
    let mut gram = CMatrix::zeros(k, k);
    let mut rhs = vec![C64::new(0.0, 0.0); k];
    for (a, column_a) in atom_columns.iter().enumerate() {
        for (b, column_b) in atom_columns.iter().enumerate() {
            let mut dot = C64::new(0.0, 0.0);
            for idx in 0..observed.len() {
                dot += column_a[idx].conj() * column_b[idx];
            }
            gram[(a, b)] = dot;
        }
        let mut dot = C64::new(0.0, 0.0);
        for (idx, &y) in observed.iter().enumerate() {
            dot += column_a[idx].conj() * y;
        }
        rhs[a] = dot;
    }

    let eigen = SymmetricEigen::new(gram);
    let lambda_max = eigen.eigenvalues.iter().fold(0.0_f64, |acc, &l| acc.max(l));
    let threshold = lambda_max * LS_RANK_TOLERANCE;
    let mut deficient = false;
    let mut solution = vec![C64::new(0.0, 0.0); k];
    for (idx, &lambda) in eigen.eigenvalues.iter().enumerate() {
        if lambda <= threshold {
            deficient = true;
            continue;
        }
        let q = eigen.eigenvectors.column(idx);
        let mut projection = C64::new(0.0, 0.0);
        for (row, &r) in rhs.iter().enumerate() {
            projection += q[row].conj() * r;
        }
        let scale = projection / lambda;
        for row in 0..k {
            solution[row] += q[row] * scale;
        }
    }
    (solution, deficient)
}
