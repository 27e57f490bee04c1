//! Counter-based, splittable random streams.
//!
//! Every stream is a ChaCha8 generator keyed by a master seed and selected by
//! a path of integers (experiment, circuit, run, ...). Streams with distinct
//! paths are independent, and the value drawn for a given path does not
//! depend on the order in which streams are created.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A node in the stream tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamKey {
    key: u64,
}

impl StreamKey {
    pub fn new(master_seed: u64) -> Self {
        Self { key: splitmix64(master_seed) }
    }

    /// Child key for index `i`.
    pub fn child(self, i: u64) -> Self {
        Self { key: splitmix64(self.key ^ splitmix64(i.wrapping_add(0xA076_1D64_78BD_642F))) }
    }

    pub fn path(self, indices: &[u64]) -> Self {
        indices.iter().fold(self, |k, &i| k.child(i))
    }

    pub fn rng(self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.key);
        rng.set_stream(splitmix64(self.key ^ 0x5851_F42D_4C95_7F2D));
        rng
    }
}

/// Shorthand for `StreamKey::new(seed).path(path).rng()`.
pub fn stream(master_seed: u64, path: &[u64]) -> StreamRng {
    StreamKey::new(master_seed).path(path).rng()
}
