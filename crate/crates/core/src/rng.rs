//! Seed derivation. Every random stream in the pipeline is seeded from one
//! master seed, a purpose tag and an index, so runs can be reproduced and
//! fanned out across workers in any order.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a hash of a purpose tag.
pub fn tag_hash(tag: &str) -> u64 {
    tag.bytes()
        .fold(FNV_OFFSET, |h, b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `(seed XOR hash(tag))`, mixed with `index`.
pub fn derive_seed(seed: u64, tag: &str, index: u64) -> u64 {
    splitmix64((seed ^ tag_hash(tag)) ^ splitmix64(index))
}
