//! Reproducible random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A seed plus a stream id. Equal pairs always produce identical draws.
///
/// Parallel work derives child streams with [`RngStream::child`], so results
/// do not depend on how work is scheduled across threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// A ChaCha8 generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// An independent stream for sub-task `index`.
    pub fn child(&self, index: u64) -> RngStream {
        RngStream {
            seed: splitmix64(self.seed ^ splitmix64(self.stream_id.wrapping_add(1))),
            stream_id: index,
        }
    }
}
