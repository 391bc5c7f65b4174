//! Deterministic seed derivation.
//!
//! Every randomized stage of the pipeline owns a `u64` seed derived from
//! its parent seed and an index, so regenerating any single item never
//! requires replaying the stream that produced its siblings.

/// Mix a base seed with an index into a new, well-scrambled seed
/// (splitmix64 finalizer over the advanced state).
pub fn mix_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
