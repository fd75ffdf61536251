//! Seeded random streams. Every consumer of randomness derives its own
//! ChaCha stream from the run seed so that adding draws in one subsystem
//! never shifts another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    MicroPlacement = 1,
    AreaLayout = 2,
    Population = 3,
    Shadowing = 4,
    Traffic = 5,
    Fading = 6,
    Analysis = 7,
}

pub fn stream(seed: u64, which: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which as u64);
    rng
}
