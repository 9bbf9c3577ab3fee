//! Downstream quality metrics: NMSE, SVD precoding, and spectral
//! efficiency under switch-constrained antenna selection.
//!
//! Spectral efficiency is evaluated for an L-stream link with equal power
//! per stream and Gaussian signaling, so it takes the log-det form. The
//! selection routines respect the switch wiring: exactly one antenna per
//! contiguous subarray. Selection decisions are made on the channel
//! estimate, while the reported efficiency is always computed on the true
//! channel, so estimation error enters only through the precoder and the
//! chosen antennas.

use nalgebra::linalg::SymmetricEigen;

use crate::{CMatrix, Error, Result};

/// Maximum number of alternating BS/MS sweeps for joint selection.
const JOINT_SWEEP_CAP: usize = 8;

/// Which link ends participate in antenna selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionSide {
    /// Only the MS selects antennas; the BS uses all of its columns.
    MsOnly,
    /// Both ends select, alternating between BS and MS sweeps.
    Joint,
}

/// Switch wiring constraint: antennas partition into contiguous equal
/// subarrays and exactly one antenna per subarray may be selected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionConstraint {
    side: SelectionSide,
    num_ms_antennas: usize,
    num_ms_groups: usize,
    num_bs_antennas: usize,
    num_bs_groups: usize,
}

impl SelectionConstraint {
    /// MS-side selection only: `num_groups` subarrays over `num_antennas`.
    pub fn ms_only(num_antennas: usize, num_groups: usize) -> Result<Self> {
        check_partition(num_antennas, num_groups)?;
        Ok(Self {
            side: SelectionSide::MsOnly,
            num_ms_antennas: num_antennas,
            num_ms_groups: num_groups,
            num_bs_antennas: 0,
            num_bs_groups: 0,
        })
    }

    /// Joint transmit-receive selection with independent partitions.
    pub fn joint(
        num_ms_antennas: usize,
        num_ms_groups: usize,
        num_bs_antennas: usize,
        num_bs_groups: usize,
    ) -> Result<Self> {
        check_partition(num_ms_antennas, num_ms_groups)?;
        check_partition(num_bs_antennas, num_bs_groups)?;
        Ok(Self {
            side: SelectionSide::Joint,
            num_ms_antennas,
            num_ms_groups,
            num_bs_antennas,
            num_bs_groups,
        })
    }

    /// Which ends select antennas.
    pub fn side(&self) -> SelectionSide {
        self.side
    }

    /// Contiguous MS subarrays, one selection slot each.
    pub fn ms_subarrays(&self) -> Vec<std::ops::Range<usize>> {
        partition(self.num_ms_antennas, self.num_ms_groups)
    }

    /// Contiguous BS subarrays under joint selection.
    pub fn bs_subarrays(&self) -> Option<Vec<std::ops::Range<usize>>> {
        match self.side {
            SelectionSide::MsOnly => None,
            SelectionSide::Joint => Some(partition(self.num_bs_antennas, self.num_bs_groups)),
        }
    }

    /// Number of MS subarrays (selected antennas and streams).
    pub fn num_ms_groups(&self) -> usize {
        self.num_ms_groups
    }

    /// Number of data streams the selection supports.
    fn num_streams(&self) -> usize {
        match self.side {
            SelectionSide::MsOnly => self.num_ms_groups,
            SelectionSide::Joint => self.num_ms_groups.min(self.num_bs_groups),
        }
    }
}

fn check_partition(num_antennas: usize, num_groups: usize) -> Result<()> {
    if num_antennas == 0 || num_groups == 0 {
        return Err(Error::InvalidArgument(
            "antenna and group counts must be positive".into(),
        ));
    }
    if num_antennas % num_groups != 0 {
        return Err(Error::InvalidArgument(format!(
            "{num_groups} groups must evenly partition {num_antennas} antennas"
        )));
    }
    Ok(())
}

fn partition(num_antennas: usize, num_groups: usize) -> Vec<std::ops::Range<usize>> {
    let size = num_antennas / num_groups;
    (0..num_groups).map(|k| k * size..(k + 1) * size).collect()
}

/// Outcome of an antenna-selection run.
#[derive(Debug, Clone, PartialEq)]
pub struct SeResult {
    /// Selected MS antennas, one per subarray, in subarray order.
    pub selected_ms: Vec<usize>,
    /// Selected BS antennas under joint selection.
    pub selected_bs: Option<Vec<usize>>,
    /// Spectral efficiency of the selected link in bits/s/Hz, evaluated
    /// on the true channel.
    pub spectral_efficiency: f64,
}

/// Normalized mean squared error `‖truth − estimate‖²_F / ‖truth‖²_F`.
pub fn nmse(truth: &CMatrix, estimate: &CMatrix) -> Result<f64> {
    if truth.shape() != estimate.shape() {
        return Err(Error::ShapeMismatch(format!(
            "truth is {:?}, estimate is {:?}",
            truth.shape(),
            estimate.shape()
        )));
    }
    let denom = truth.norm_squared();
    if denom == 0.0 {
        return Err(Error::InvalidArgument("truth matrix must be nonzero".into()));
    }
    Ok((truth - estimate).norm_squared() / denom)
}

/// Precoder holding the top-`num_streams` right singular vectors of the
/// estimate; columns are orthonormal even when the estimate has lower rank.
pub fn svd_precoder(estimate: &CMatrix, num_streams: usize) -> Result<CMatrix> {
    let smaller = estimate.nrows().min(estimate.ncols());
    if num_streams == 0 || num_streams > smaller {
        return Err(Error::InvalidArgument(format!(
            "stream count {num_streams} must lie in 1..={smaller}"
        )));
    }
    let svd = crate::svd::thin_svd(estimate);
    Ok(svd.v.columns(0, num_streams).into_owned())
}

/// Spectral efficiency of the precoded link restricted to the selected MS
/// antennas, in bits/s/Hz.
///
/// Forms the effective channel from the selected rows of
/// `true_channel · precoder` and returns `log₂ det(I + (snr/L)·H·Hᴴ)`
/// with `L` the precoder's column count: equal power over `L` streams.
pub fn spectral_efficiency(
    true_channel: &CMatrix,
    precoder: &CMatrix,
    selected_ms: &[usize],
    snr: f64,
) -> Result<f64> {
    if precoder.nrows() != true_channel.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "precoder has {} rows, channel has {} columns",
            precoder.nrows(),
            true_channel.ncols()
        )));
    }
    if !(snr >= 0.0) || !snr.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "snr must be nonnegative and finite, got {snr}"
        )));
    }
    if selected_ms.is_empty() {
        return Err(Error::InvalidArgument("selection must be nonempty".into()));
    }
    let mut seen = selected_ms.to_vec();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != selected_ms.len() {
        return Err(Error::InvalidArgument("selected antennas must be distinct".into()));
    }
    if let Some(&out) = selected_ms.iter().find(|&&a| a >= true_channel.nrows()) {
        return Err(Error::InvalidArgument(format!(
            "selected antenna {out} outside 0..{}",
            true_channel.nrows()
        )));
    }
    let precoded = true_channel * precoder;
    Ok(log_det_se(&precoded, selected_ms, snr, precoder.ncols()))
}

/// log₂ det(I + (snr/streams)·B·Bᴴ) for B = the selected rows of `precoded`.
fn log_det_se(precoded: &CMatrix, rows: &[usize], snr: f64, streams: usize) -> f64 {
    let l = precoded.ncols();
    let mut effective = CMatrix::zeros(rows.len(), l);
    for (r, &antenna) in rows.iter().enumerate() {
        for c in 0..l {
            effective[(r, c)] = precoded[(antenna, c)];
        }
    }
    let gram = &effective * effective.adjoint();
    let eigen = SymmetricEigen::new(gram);
    let scale = snr / streams as f64;
    eigen
        .eigenvalues
        .iter()
        .map(|&lambda| (1.0 + scale * lambda.max(0.0)).log2())
        .sum()
}

/// Greedy antenna selection under the switch constraint.
///
/// MS-only mode fixes the precoder from the estimate and fills the MS
/// subarrays in order, each time keeping the antenna that maximizes the
/// partial-selection efficiency scored on the estimate. Joint mode starts
/// from the first antenna of every subarray and alternates replacement
/// sweeps over BS and MS subarrays, recomputing the precoder on the
/// selected-column submatrix of the estimate, until the selection is
/// stable or the sweep cap is hit. The reported efficiency is evaluated
/// on the true channel with the final precoder and selection.
pub fn greedy_selection(
    true_channel: &CMatrix,
    estimate: &CMatrix,
    constraint: &SelectionConstraint,
    snr: f64,
) -> Result<SeResult> {
    if true_channel.shape() != estimate.shape() {
        return Err(Error::ShapeMismatch(format!(
            "truth is {:?}, estimate is {:?}",
            true_channel.shape(),
            estimate.shape()
        )));
    }
    if true_channel.nrows() != constraint.num_ms_antennas {
        return Err(Error::ShapeMismatch(format!(
            "channel has {} rows, constraint expects {}",
            true_channel.nrows(),
            constraint.num_ms_antennas
        )));
    }
    if constraint.side == SelectionSide::Joint
        && true_channel.ncols() != constraint.num_bs_antennas
    {
        return Err(Error::ShapeMismatch(format!(
            "channel has {} columns, constraint expects {}",
            true_channel.ncols(),
            constraint.num_bs_antennas
        )));
    }
    if !(snr >= 0.0) || !snr.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "snr must be nonnegative and finite, got {snr}"
        )));
    }
    let streams = constraint.num_streams();
    if streams > estimate.nrows().min(estimate.ncols()) {
        return Err(Error::InvalidArgument(format!(
            "{streams} streams exceed the channel rank budget"
        )));
    }

    match constraint.side {
        SelectionSide::MsOnly => {
            let precoder = svd_precoder(estimate, streams)?;
            let scored = estimate * &precoder;
            let mut selected: Vec<usize> = Vec::with_capacity(constraint.num_ms_groups);
            for subarray in constraint.ms_subarrays() {
                let mut best: Option<(usize, f64)> = None;
                for antenna in subarray {
                    selected.push(antenna);
                    let se = log_det_se(&scored, &selected, snr, streams);
                    selected.pop();
                    if best.is_none_or(|(_, held)| se > held) {
                        best = Some((antenna, se));
                    }
                }
                selected.push(best.expect("subarrays are nonempty").0);
            }
            let spectral_efficiency =
                log_det_se(&(true_channel * &precoder), &selected, snr, streams);
            Ok(SeResult {
                selected_ms: selected,
                selected_bs: None,
                spectral_efficiency,
            })
        }
        SelectionSide::Joint => {
            let ms_subarrays = constraint.ms_subarrays();
            let bs_subarrays = constraint.bs_subarrays().expect("joint constraint");
            let mut ms_sel: Vec<usize> = ms_subarrays.iter().map(|r| r.start).collect();
            let mut bs_sel: Vec<usize> = bs_subarrays.iter().map(|r| r.start).collect();

            let score = |ms_sel: &[usize], bs_sel: &[usize]| -> Result<f64> {
                let sub = column_submatrix(estimate, bs_sel);
                let precoder = svd_precoder(&sub, streams)?;
                Ok(log_det_se(&(&sub * &precoder), ms_sel, snr, streams))
            };

            for _ in 0..JOINT_SWEEP_CAP {
                let mut changed = false;
                for (k, subarray) in bs_subarrays.iter().enumerate() {
                    let mut best = (bs_sel[k], score(&ms_sel, &bs_sel)?);
                    for antenna in subarray.clone() {
                        if antenna == bs_sel[k] {
                            continue;
                        }
                        let held = std::mem::replace(&mut bs_sel[k], antenna);
                        let se = score(&ms_sel, &bs_sel)?;
                        bs_sel[k] = held;
                        if se > best.1 {
                            best = (antenna, se);
                        }
                    }
                    if best.0 != bs_sel[k] {
                        bs_sel[k] = best.0;
                        changed = true;
                    }
                }
                for (k, subarray) in ms_subarrays.iter().enumerate() {
                    let mut best = (ms_sel[k], score(&ms_sel, &bs_sel)?);
                    for antenna in subarray.clone() {
                        if antenna == ms_sel[k] {
                            continue;
                        }
                        let held = std::mem::replace(&mut ms_sel[k], antenna);
                        let se = score(&ms_sel, &bs_sel)?;
                        ms_sel[k] = held;
                        if se > best.1 {
                            best = (antenna, se);
                        }
                    }
                    if best.0 != ms_sel[k] {
                        ms_sel[k] = best.0;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }

            let estimate_sub = column_submatrix(estimate, &bs_sel);
            let precoder = svd_precoder(&estimate_sub, streams)?;
            let truth_sub = column_submatrix(true_channel, &bs_sel);
            let spectral_efficiency =
                log_det_se(&(&truth_sub * &precoder), &ms_sel, snr, streams);
            Ok(SeResult {
                selected_ms: ms_sel,
                selected_bs: Some(bs_sel),
                spectral_efficiency,
            })
        }
    }
}

fn column_submatrix(matrix: &CMatrix, columns: &[usize]) -> CMatrix {
    CMatrix::from_fn(matrix.nrows(), columns.len(), |i, c| matrix[(i, columns[c])])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{assemble_channel, sample_paths, steering_vector, ArrayGeometry, PathSet};
    use crate::omp::build_dictionary;
    use crate::C64;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    fn random_channel(n_ms: usize, n_bs: usize, paths: usize, seed: u64) -> CMatrix {
        let ms = ArrayGeometry::new(n_ms, 1).unwrap();
        let bs = ArrayGeometry::new(n_bs, 1).unwrap();
        let path_set = sample_paths(paths, 1.0, seed).unwrap();
        assemble_channel(&path_set, &ms, &bs).unwrap().matrix
    }

    #[test]
    fn nmse_handles_the_reference_cases() {
        let truth = random_channel(8, 8, 2, 1);
        assert_abs_diff_eq!(nmse(&truth, &truth).unwrap(), 0.0, epsilon = 1e-15);
        let zero = CMatrix::zeros(8, 8);
        assert_abs_diff_eq!(nmse(&truth, &zero).unwrap(), 1.0, epsilon = 1e-15);
        let doubled = truth.map(|e| e * C64::new(2.0, 0.0));
        assert_abs_diff_eq!(nmse(&truth, &doubled).unwrap(), 1.0, epsilon = 1e-14);
        assert!(nmse(&zero, &truth).is_err());
        assert!(nmse(&truth, &CMatrix::zeros(4, 8)).is_err());
    }

    #[test]
    fn nmse_is_invariant_under_simultaneous_unitary_rotation() {
        let truth = random_channel(8, 8, 3, 2);
        let estimate = random_channel(8, 8, 3, 3);
        let (left, _) = build_dictionary(8, 8, 0.5).unwrap();
        let (right, _) = build_dictionary(8, 8, 0.5).unwrap();
        let base = nmse(&truth, &estimate).unwrap();
        let rotated = nmse(&(&left * &truth * &right), &(&left * &estimate * &right)).unwrap();
        assert_abs_diff_eq!(base, rotated, epsilon = 1e-12);
    }

    #[test]
    fn precoder_columns_are_orthonormal() {
        for (rows, cols, streams) in [(16, 16, 4), (16, 8, 3), (8, 16, 5)] {
            let estimate = random_channel(rows, cols, 4, 7);
            let p = svd_precoder(&estimate, streams).unwrap();
            assert_eq!(p.shape(), (cols, streams));
            let gram = p.adjoint() * &p;
            assert!((gram - CMatrix::identity(streams, streams)).norm() < 1e-10);
        }
        // Rank below the stream count still yields orthonormal columns.
        let rank_one = random_channel(8, 8, 1, 9);
        let p = svd_precoder(&rank_one, 3).unwrap();
        let gram = p.adjoint() * &p;
        assert!((gram - CMatrix::identity(3, 3)).norm() < 1e-10);
    }

    #[test]
    fn perfect_csi_precoder_spans_the_departure_directions() {
        let bs = ArrayGeometry::new(64, 1).unwrap();
        let ms = ArrayGeometry::new(64, 1).unwrap();
        let paths = PathSet::new(
            vec![0.3, -0.7],
            vec![0.5, -0.8],
            vec![C64::new(1.0, 0.4), C64::new(-0.6, 0.9)],
            1.0,
        )
        .unwrap();
        let truth = assemble_channel(&paths, &ms, &bs).unwrap().matrix;
        let precoder = svd_precoder(&truth, 2).unwrap();

        // The row space of a two-path channel is exactly the span of the
        // two departure steering vectors; compare orthogonal projections.
        let a1 = steering_vector(&bs, 0.5).unwrap();
        let a2 = steering_vector(&bs, -0.8).unwrap();
        let mut basis = CMatrix::zeros(64, 2);
        for i in 0..64 {
            basis[(i, 0)] = a1[i];
            basis[(i, 1)] = a2[i];
        }
        // Orthonormalize the second column against the first.
        let overlap: C64 = (0..64).map(|i| basis[(i, 0)].conj() * basis[(i, 1)]).sum();
        for i in 0..64 {
            let correction = basis[(i, 0)] * overlap;
            basis[(i, 1)] -= correction;
        }
        let norm = basis.column(1).norm();
        for i in 0..64 {
            basis[(i, 1)] /= C64::new(norm, 0.0);
        }

        let p_precoder = &precoder * precoder.adjoint();
        let p_steering = &basis * basis.adjoint();
        assert!((p_precoder - p_steering).norm() < 1e-6);
    }

    #[test]
    fn spectral_efficiency_closed_forms() {
        // Zero channel and zero snr both give zero bits.
        let zero = CMatrix::zeros(4, 4);
        let p = svd_precoder(&random_channel(4, 4, 2, 4), 2).unwrap();
        assert_abs_diff_eq!(
            spectral_efficiency(&zero, &p, &[0, 1], 10.0).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        let truth = random_channel(4, 4, 2, 5);
        assert_abs_diff_eq!(
            spectral_efficiency(&truth, &p, &[0, 1], 0.0).unwrap(),
            0.0,
            epsilon = 1e-12
        );

        // Scalar link with snr·|h|² = 1 carries exactly one bit.
        let snr = 3.7_f64;
        let h = CMatrix::from_element(1, 1, C64::new((1.0 / snr).sqrt(), 0.0));
        let identity_precoder = CMatrix::identity(1, 1);
        assert_abs_diff_eq!(
            spectral_efficiency(&h, &identity_precoder, &[0], snr).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn spectral_efficiency_is_monotone_in_snr() {
        let truth = random_channel(8, 8, 3, 6);
        let p = svd_precoder(&truth, 3).unwrap();
        let selection = [0, 3, 6];
        let mut previous = 0.0;
        for snr_db in [-10.0, 0.0, 10.0, 20.0, 30.0] {
            let snr = 10f64.powf(snr_db / 10.0);
            let se = spectral_efficiency(&truth, &p, &selection, snr).unwrap();
            assert!(se >= previous, "SE decreased: {previous} -> {se}");
            previous = se;
        }
    }

    #[test]
    fn spectral_efficiency_validates_the_selection() {
        let truth = random_channel(4, 4, 1, 8);
        let p = svd_precoder(&truth, 1).unwrap();
        assert!(spectral_efficiency(&truth, &p, &[], 1.0).is_err());
        assert!(spectral_efficiency(&truth, &p, &[0, 0], 1.0).is_err());
        assert!(spectral_efficiency(&truth, &p, &[4], 1.0).is_err());
        assert!(spectral_efficiency(&truth, &p, &[0], -1.0).is_err());
    }

    #[test]
    fn greedy_selection_respects_the_wiring() {
        let truth = random_channel(16, 16, 4, 10);
        let constraint = SelectionConstraint::ms_only(16, 4).unwrap();
        let result = greedy_selection(&truth, &truth, &constraint, 10.0).unwrap();
        assert_eq!(result.selected_ms.len(), 4);
        for (k, subarray) in constraint.ms_subarrays().into_iter().enumerate() {
            assert!(subarray.contains(&result.selected_ms[k]));
        }
        assert!(result.selected_bs.is_none());
        assert!(result.spectral_efficiency.is_finite());
    }

    #[test]
    fn forced_selection_returns_the_only_feasible_choice() {
        let truth = random_channel(4, 4, 2, 11);
        let constraint = SelectionConstraint::ms_only(4, 4).unwrap();
        let result = greedy_selection(&truth, &truth, &constraint, 5.0).unwrap();
        assert_eq!(result.selected_ms, vec![0, 1, 2, 3]);
    }

    #[test]
    fn greedy_matches_brute_force_on_the_small_instance() {
        // 8 MS antennas in 2 subarrays of 4: sixteen feasible selections.
        let constraint = SelectionConstraint::ms_only(8, 2).unwrap();
        for seed in 0..10 {
            let truth = random_channel(8, 8, 2, seed);
            let snr = 10.0;
            let greedy = greedy_selection(&truth, &truth, &constraint, snr).unwrap();
            let precoder = svd_precoder(&truth, 2).unwrap();
            let mut optimum = 0.0_f64;
            for a in 0..4 {
                for b in 4..8 {
                    let se = spectral_efficiency(&truth, &precoder, &[a, b], snr).unwrap();
                    optimum = optimum.max(se);
                }
            }
            assert!(
                greedy.spectral_efficiency >= 0.95 * optimum,
                "seed {seed}: greedy {} vs optimum {optimum}",
                greedy.spectral_efficiency
            );
        }
    }

    #[test]
    fn greedy_beats_random_selection_on_average() {
        let constraint = SelectionConstraint::ms_only(16, 4).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let mut greedy_total = 0.0;
        let mut random_total = 0.0;
        for seed in 0..30 {
            let truth = random_channel(16, 16, 4, seed);
            let snr = 10.0;
            greedy_total += greedy_selection(&truth, &truth, &constraint, snr)
                .unwrap()
                .spectral_efficiency;
            let precoder = svd_precoder(&truth, 4).unwrap();
            let pick: Vec<usize> = (0..4).map(|k| 4 * k + rng.random_range(0..4)).collect();
            random_total += spectral_efficiency(&truth, &precoder, &pick, snr).unwrap();
        }
        assert!(
            greedy_total > random_total,
            "greedy {greedy_total} vs random {random_total}"
        );
    }

    #[test]
    fn joint_selection_respects_both_partitions() {
        let truth = random_channel(8, 8, 2, 21);
        let constraint = SelectionConstraint::joint(8, 2, 8, 2).unwrap();
        let result = greedy_selection(&truth, &truth, &constraint, 10.0).unwrap();
        assert_eq!(result.selected_ms.len(), 2);
        let bs = result.selected_bs.as_ref().unwrap();
        assert_eq!(bs.len(), 2);
        for (k, subarray) in constraint.ms_subarrays().into_iter().enumerate() {
            assert!(subarray.contains(&result.selected_ms[k]));
        }
        for (k, subarray) in constraint.bs_subarrays().unwrap().into_iter().enumerate() {
            assert!(subarray.contains(&bs[k]));
        }
        assert!(result.spectral_efficiency.is_finite());
        assert!(result.spectral_efficiency > 0.0);
    }

    #[test]
    fn joint_selection_never_loses_to_its_starting_point() {
        // The alternating sweeps only accept strict improvements of the
        // estimate-scored objective, so with perfect CSI the final SE is
        // at least the SE of the all-first-antennas initialization.
        for seed in 0..10 {
            let truth = random_channel(8, 8, 2, 100 + seed);
            let constraint = SelectionConstraint::joint(8, 2, 8, 2).unwrap();
            let result = greedy_selection(&truth, &truth, &constraint, 10.0).unwrap();
            let initial_bs = vec![0usize, 4];
            let sub = CMatrix::from_fn(8, 2, |i, c| truth[(i, initial_bs[c])]);
            let precoder = svd_precoder(&sub, 2).unwrap();
            let initial_se = {
                let precoded = &sub * &precoder;
                let rows = [0usize, 4];
                let mut eff = CMatrix::zeros(2, 2);
                for (r, &antenna) in rows.iter().enumerate() {
                    for c in 0..2 {
                        eff[(r, c)] = precoded[(antenna, c)];
                    }
                }
                let eigen = SymmetricEigen::new(&eff * eff.adjoint());
                eigen
                    .eigenvalues
                    .iter()
                    .map(|&l| (1.0 + 5.0 * l.max(0.0)).log2())
                    .sum::<f64>()
            };
            assert!(
                result.spectral_efficiency >= initial_se - 1e-12,
                "seed {seed}: final {} vs initial {initial_se}",
                result.spectral_efficiency
            );
        }
    }

    #[test]
    fn constraint_construction_validates_the_partition() {
        assert!(SelectionConstraint::ms_only(8, 3).is_err());
        assert!(SelectionConstraint::ms_only(0, 1).is_err());
        assert!(SelectionConstraint::joint(8, 2, 9, 2).is_err());
        let c = SelectionConstraint::ms_only(8, 2).unwrap();
        assert_eq!(c.ms_subarrays(), vec![0..4, 4..8]);
        assert!(c.bs_subarrays().is_none());
    }
}
