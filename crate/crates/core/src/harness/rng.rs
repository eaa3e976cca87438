//! Deterministic random streams.
//!
//! Every replication owns a ChaCha8 stream. The 256-bit key is derived from
//! the run seed and a label (the experiment name): the label is hashed with
//! 64-bit FNV-1a, xored into the seed, and the result seeds a SplitMix64
//! sequence whose first four outputs (little endian) form the key. The
//! replication index selects the ChaCha stream id, giving 2^64 disjoint
//! substreams per key. Results therefore never depend on how replications
//! are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Keyed family of substreams for one `(seed, label)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamFamily {
    key: [u8; 32],
}

impl StreamFamily {
    pub fn new(seed: u64, label: &str) -> Self {
        let mut state = seed ^ fnv1a64(label.as_bytes());
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        StreamFamily { key }
    }

    pub fn stream(&self, index: u64) -> SimRng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(index);
        rng
    }
}

/// Stream for replication `index` of experiment `label`.
pub fn replication_stream(seed: u64, label: &str, index: u64) -> SimRng {
    StreamFamily::new(seed, label).stream(index)
}
