use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent substreams derived from one master seed.
///
/// Each stream is the master-seeded ChaCha8 generator switched to its own
/// stream id, so consuming one stream never shifts another.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub mod streams {
    pub const TRUTH: u64 = 0;
    pub const OWNERSHIP: u64 = 1;
    pub const SOCIAL: u64 = 2;
    pub const ASSESSMENT: u64 = 3;
    pub const INIT: u64 = 16;
    /// Split `k` uses stream `SPLIT_BASE + k`.
    pub const SPLIT_BASE: u64 = 1 << 32;
}
