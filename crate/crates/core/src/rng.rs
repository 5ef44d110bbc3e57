//! Per-replicate random streams.
//!
//! Every replicate owns a ChaCha8 generator whose key is derived from the
//! master seed and a purpose tag, and whose stream id is the replicate index.
//! Results therefore do not depend on how replicates are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Purpose tags keep, e.g., walk and branching ensembles from sharing streams.
pub mod tag {
    pub const WALK: u64 = 0x5741_4c4b;
    pub const FULL_WALK: u64 = 0x4655_4c4c;
    pub const COUPLING: u64 = 0x434f_5550;
    pub const BRANCHING: u64 = 0x4252_4e43;
    pub const MODIFIED: u64 = 0x4d4f_4446;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent generator for replicate `index` of the ensemble seeded with
/// `master_seed`.
pub fn stream(master_seed: u64, tag: u64, index: u64) -> StreamRng {
    let key = splitmix64(master_seed ^ splitmix64(tag));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(index);
    rng
}
