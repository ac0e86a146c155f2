use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent random streams derived from one user-facing seed.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Stream {
    Split = 1,
    Init = 2,
    Shuffle = 3,
    Synthetic = 4,
}

pub(crate) fn seeded(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}
