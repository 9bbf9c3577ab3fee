//! Strong-incoherence diagnostics for channel matrices.
//!
//! Matrix completion from uniformly sampled entries succeeds when the
//! singular subspaces of the target matrix are spread out rather than
//! aligned with the sampling basis. This module quantifies that spread:
//! from the top-`L` singular pairs it forms the subspace projections and
//! the cross-product matrix, measures their worst-case entry deviations,
//! and reports the tightest incoherence parameter the matrix satisfies.

use crate::{CMatrix, Error, Result};

/// Relative spectral-gap threshold below which the rank-`L` subspace is
/// considered ill-defined.
const DEGENERACY_GAP: f64 = 1e-8;

/// Incoherence parameters of one channel matrix at a fixed rank.
#[derive(Debug, Clone, PartialEq)]
pub struct IncoherenceReport {
    /// Tightest parameter bounding the row-space projection deviations.
    pub mu_u: f64,
    /// Tightest parameter bounding the column-space projection deviations.
    pub mu_v: f64,
    /// Tightest parameter bounding the cross-product entries.
    pub mu_e: f64,
    /// Overall incoherence parameter: the maximum of the three components.
    pub mu: f64,
    /// Rank used when truncating the singular decomposition.
    pub rank_used: usize,
    /// True when the spectrum has no usable gap at the requested rank, so
    /// the subspace (and hence the report) is not uniquely defined.
    pub degenerate: bool,
}

impl IncoherenceReport {
    /// Column names matching [`IncoherenceReport::to_csv_row`].
    pub fn csv_header() -> &'static str {
        "mu_u,mu_v,mu_e,mu,rank_used,degenerate"
    }

    /// One CSV row with the report fields in header order.
    pub fn to_csv_row(&self) -> String {
        format!(
            "{:e},{:e},{:e},{:e},{},{}",
            self.mu_u, self.mu_v, self.mu_e, self.mu, self.rank_used, self.degenerate
        )
    }
}

/// Computes the incoherence parameters of `matrix` from its top-`rank`
/// singular pairs.
///
/// With `U` and `V` holding the top-`rank` left and right singular vectors
/// of the `N_MS × N_BS` input, the three components are the smallest
/// parameters μ satisfying, entrywise,
///
/// - `|[U·Uᴴ]_{a,a'} − (L/N_MS)·1_{a=a'}| ≤ μ·√L/N_MS`,
/// - `|[V·Vᴴ]_{b,b'} − (L/N_BS)·1_{b=b'}| ≤ μ·√L/N_BS`,
/// - `|[U·Vᴴ]_{a,b}| ≤ μ·√L/√(N_MS·N_BS)`,
///
/// and `mu` is their maximum. A degeneracy flag is set when the spectrum
/// lacks a relative gap of `1e-8` at the requested rank, in which case the
/// truncated subspace is an arbitrary choice among equivalent ones.
pub fn incoherence_mu(matrix: &CMatrix, rank: usize) -> Result<IncoherenceReport> {
    let (n_ms, n_bs) = matrix.shape();
    let smaller = n_ms.min(n_bs);
    if rank == 0 || rank > smaller {
        return Err(Error::InvalidArgument(format!(
            "rank {rank} must lie in 1..={smaller} for a {n_ms}×{n_bs} matrix"
        )));
    }

    let svd = crate::svd::thin_svd(matrix);
    let sigma = &svd.singular_values;
    let degenerate = sigma[0] == 0.0
        || sigma[rank - 1] < DEGENERACY_GAP * sigma[0]
        || (rank < smaller && sigma[rank - 1] - sigma[rank] < DEGENERACY_GAP * sigma[0]);

    let u = svd.u.columns(0, rank).into_owned();
    let v = svd.v.columns(0, rank).into_owned();
    let l = rank as f64;

    let p_u = &u * u.adjoint();
    let p_v = &v * v.adjoint();
    let cross = &u * v.adjoint();

    let mut dev_u = 0.0_f64;
    for a in 0..n_ms {
        for a2 in 0..n_ms {
            let target = if a == a2 { l / n_ms as f64 } else { 0.0 };
            dev_u = dev_u.max((p_u[(a, a2)] - target * crate::C64::new(1.0, 0.0)).norm());
        }
    }
    let mut dev_v = 0.0_f64;
    for b in 0..n_bs {
        for b2 in 0..n_bs {
            let target = if b == b2 { l / n_bs as f64 } else { 0.0 };
            dev_v = dev_v.max((p_v[(b, b2)] - target * crate::C64::new(1.0, 0.0)).norm());
        }
    }
    let dev_e = cross.iter().fold(0.0_f64, |acc, e| acc.max(e.norm()));

    let mu_u = dev_u * n_ms as f64 / l.sqrt();
    let mu_v = dev_v * n_bs as f64 / l.sqrt();
    let mu_e = dev_e * (n_ms as f64 * n_bs as f64 / l).sqrt();
    let mu = mu_u.max(mu_v).max(mu_e);

    Ok(IncoherenceReport {
        mu_u,
        mu_v,
        mu_e,
        mu,
        rank_used: rank,
        degenerate,
    })
}
