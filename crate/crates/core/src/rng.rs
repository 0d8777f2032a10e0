use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random number generator state threaded explicitly through every sampler.
pub type RngState = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> RngState {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for shard `shard` of a run seeded with `seed`.
pub fn shard_rng(seed: u64, shard: u64) -> RngState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    rng
}
