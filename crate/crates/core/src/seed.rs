//! Stable seed derivation.
//!
//! Seeds must not depend on `std`'s hasher (which is allowed to change between
//! releases), so derivation uses FNV-1a over the tag bytes followed by a
//! splitmix64 finalizer.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// splitmix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

/// Derives a child seed from a master seed and a string tag (e.g. a swing id).
pub fn derive_seed(master: u64, tag: &str) -> u64 {
    mix64(master ^ mix64(fnv1a(tag.as_bytes())))
}

/// Derives the `index`-th seed of a stream rooted at `master`.
pub fn stream_seed(master: u64, index: u64) -> u64 {
    mix64(master.wrapping_add(mix64(index.wrapping_add(1))))
}
