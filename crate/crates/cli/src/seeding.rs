//! Deterministic seed derivation for Monte-Carlo trials.
//!
//! Every random draw in a study is keyed by the master seed, a textual
//! label naming the draw's role (and any axis coordinate that changes the
//! draw's structure), and the trial index. Seeds are pure functions of
//! those three inputs, so sweep cells can run in any order and still
//! consume identical realizations.
//!
//! Labels deliberately exclude axes that only rescale a draw: the same
//! noise seed across a PNR sweep yields the same unit-variance noise
//! scaled to each level, and the same phase seed across a mismatch sweep
//! yields proportional phase errors, which pairs the realizations that the
//! comparison studies average over.

/// SplitMix64 finalizer; a bijective 64-bit mixer with full avalanche.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the generator seed for one labeled draw of one trial.
pub fn derive_seed(master_seed: u64, label: &str, trial: u64) -> u64 {
    let mut state = mix(master_seed);
    for chunk in label.as_bytes().chunks(8) {
        let mut word = [0u8; 8];
        word[..chunk.len()].copy_from_slice(chunk);
        state = mix(state ^ u64::from_le_bytes(word));
    }
    state = mix(state ^ label.len() as u64);
    mix(state ^ trial)
}
