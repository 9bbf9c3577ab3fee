//! Low-complexity channel estimation for switch-based mmWave MIMO links.
//!
//! The library models a narrowband multipath channel observed through a
//! switch-driven training protocol that samples one antenna per subarray at a
//! time, then recovers the full channel matrix from the sampled entries.
//! Two estimators are provided: a low-rank matrix-completion solver based on
//! singular value projection ([`svp`]) and a compressive-sensing baseline
//! based on orthogonal matching pursuit over steering-vector dictionaries
//! ([`omp`]). Supporting modules synthesize channels ([`channel`]), schedule
//! and simulate the sampling process ([`sampling`]), quantify how favorable a
//! channel is for completion ([`incoherence`]), and score estimates by NMSE
//! and spectral efficiency with antenna selection ([`evaluation`]).
//!
//! All randomness is drawn from explicitly seeded generators, so every
//! simulation result is reproducible from its seed.

pub mod channel;
pub mod evaluation;
pub mod incoherence;
pub mod omp;
pub mod sampling;
pub mod svd;
pub mod svp;

mod util;

/// Complex scalar used throughout: double-precision complex number.
pub type C64 = num_complex::Complex<f64>;

/// Dynamically sized complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;

/// Dynamically sized complex column vector.
pub type CVector = nalgebra::DVector<C64>;

/// Errors reported by precondition checks across the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A scalar or structural argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Matrix or sequence dimensions do not line up.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// The requested sample budget cannot be scheduled by the switch
    /// protocol, which needs the same number of draws per column and
    /// subarray.
    #[error(
        "infeasible sample budget {requested}: {constraint}; nearest feasible \
         budgets are {below} and {above}"
    )]
    InfeasibleSampleBudget {
        requested: usize,
        constraint: String,
        below: usize,
        above: usize,
    },

    /// The angular grid cannot be inverted to physical angles at this
    /// element spacing.
    #[error(
        "grid not solvable: spacing {spacing} wavelengths requires \
         |sin θ| = {max_abs_sin} > 1 at the grid edge"
    )]
    UnsolvableGrid { spacing: f64, max_abs_sin: f64 },
}

/// Convenience alias for results carrying [`Error`].
pub type Result<T> = std::result::Result<T, Error>;
