//! Reproducible random streams.
//!
//! Every realization draws from its own ChaCha8 stream selected by
//! `(master, stream_index)`. ChaCha is counter based, so stream `i` can be
//! produced without touching streams `0..i` and parallel runs do not depend
//! on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed {
    pub master: u64,
    pub stream_index: u64,
}

impl Seed {
    pub const fn new(master: u64, stream_index: u64) -> Self {
        Self {
            master,
            stream_index,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(self.stream_index);
        rng
    }

    /// Derives an independent sub-stream, e.g. one per side of the road.
    pub fn child(&self, tag: u64) -> Seed {
        Seed {
            master: self.master,
            stream_index: splitmix64(self.stream_index ^ splitmix64(tag.wrapping_add(1))),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
