//! Thin complex SVD by one-sided Jacobi rotations.
//!
//! The general-purpose SVD in the linear-algebra dependency loses accuracy
//! on exactly rank-deficient complex inputs (the factorization stops
//! reproducing the matrix), and rank-deficient matrices are routine here:
//! every completion iterate and every synthesized channel has low rank.
//! One-sided Jacobi orthogonalization is slower but unconditionally
//! accurate, including for tiny and repeated singular values, so all
//! singular-vector computations in this crate go through this module.

use crate::{C64, CMatrix};

/// Thin singular value decomposition `A = U·diag(σ)·Vᴴ`.
///
/// With `A` of shape m×n and `r = min(m, n)`: `u` is m×r, `v` is n×r, both
/// with orthonormal columns, and `singular_values` holds σ₁ ≥ … ≥ σ_r ≥ 0.
/// Columns paired with exactly zero singular values are an arbitrary
/// orthonormal completion.
#[derive(Debug, Clone)]
pub struct ThinSvd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

impl ThinSvd {
    /// Reassembles `Σ_k σ_k·u_k·v_kᴴ` truncated to the leading `rank`
    /// triplets (clamped to the decomposition size).
    pub fn truncated(&self, rank: usize) -> CMatrix {
        let m = self.u.nrows();
        let n = self.v.nrows();
        let rank = rank.min(self.singular_values.len());
        let mut out = CMatrix::zeros(m, n);
        for k in 0..rank {
            let sigma = self.singular_values[k];
            if sigma == 0.0 {
                break;
            }
            let u_k = self.u.column(k);
            let v_k = self.v.column(k);
            for j in 0..n {
                let w = v_k[j].conj() * sigma;
                for i in 0..m {
                    out[(i, j)] += u_k[i] * w;
                }
            }
        }
        out
    }
}

/// Computes the thin SVD of `matrix` by one-sided Jacobi sweeps.
pub fn thin_svd(matrix: &CMatrix) -> ThinSvd {
    let (m, n) = matrix.shape();
    if m < n {
        // Orthogonalize the shorter side: A = U Σ Vᴴ ⟺ Aᴴ = V Σ Uᴴ.
        let flipped = thin_svd(&matrix.adjoint());
        return ThinSvd {
            u: flipped.v,
            singular_values: flipped.singular_values,
            v: flipped.u,
        };
    }

    let mut a = matrix.clone();
    let mut v = CMatrix::identity(n, n);
    // Relative off-diagonal threshold for the implicit Gram matrix.
    let tol = 1e-14;
    let max_sweeps = 64;

    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = C64::new(0.0, 0.0);
                for i in 0..m {
                    let ap = a[(i, p)];
                    let aq = a[(i, q)];
                    alpha += ap.norm_sqr();
                    beta += aq.norm_sqr();
                    gamma += ap.conj() * aq;
                }
                let limit = tol * (alpha * beta).sqrt();
                if gamma.norm() <= limit || limit == 0.0 {
                    continue;
                }
                rotated = true;
                // Phase that makes the column inner product real, then a
                // classical Jacobi rotation on the 2×2 Gram block.
                let phase = gamma / gamma.norm();
                let zeta = (beta - alpha) / (2.0 * gamma.norm());
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let s_conj_phase = phase.conj() * s;
                let s_phase = phase * s;
                for i in 0..m {
                    let ap = a[(i, p)];
                    let aq = a[(i, q)];
                    a[(i, p)] = ap * c - aq * s_conj_phase;
                    a[(i, q)] = ap * s_phase + aq * c;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = vp * c - vq * s_conj_phase;
                    v[(i, q)] = vp * s_phase + vq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    // Column norms are the singular values; order them descending.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|k| a.column(k).norm()).collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap());

    let mut u = CMatrix::zeros(m, n);
    let mut v_sorted = CMatrix::zeros(n, n);
    let mut singular_values = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let sigma = norms[src];
        singular_values.push(sigma);
        if sigma > 0.0 {
            for i in 0..m {
                u[(i, dst)] = a[(i, src)] / sigma;
            }
        }
        for i in 0..n {
            v_sorted[(i, dst)] = v[(i, src)];
        }
    }
    complete_zero_columns(&mut u, &singular_values);

    ThinSvd {
        u,
        singular_values,
        v: v_sorted,
    }
}

/// Fills columns of `u` paired with exactly zero singular values with an
/// orthonormal completion, so both factors always have orthonormal columns.
fn complete_zero_columns(u: &mut CMatrix, singular_values: &[f64]) {
    let (m, n) = u.shape();
    let mut candidate = 0;
    for k in 0..n {
        if singular_values[k] > 0.0 {
            continue;
        }
        while candidate < m {
            let mut col = CMatrix::zeros(m, 1);
            col[(candidate, 0)] = C64::new(1.0, 0.0);
            candidate += 1;
            // Two Gram-Schmidt passes against every existing column keep the
            // result orthogonal to working precision.
            for _ in 0..2 {
                for j in 0..n {
                    if j == k {
                        continue;
                    }
                    let overlap: C64 =
                        (0..m).map(|i| u[(i, j)].conj() * col[(i, 0)]).sum();
                    for i in 0..m {
                        let correction = u[(i, j)] * overlap;
                        col[(i, 0)] -= correction;
                    }
                }
            }
            let norm = col.norm();
            if norm > 0.5 {
                for i in 0..m {
                    u[(i, k)] = col[(i, 0)] / norm;
                }
                break;
            }
        }
    }
}

/// Singular values of `matrix` in descending order, computed to high
/// relative accuracy.
pub fn singular_values(matrix: &CMatrix) -> Vec<f64> {
    thin_svd(matrix).singular_values
}
