//! Seeded, splittable random streams for deterministic parallelism.
//!
//! A [`RngStream`] is a value, not a generator: a `(seed, stream_id)` pair.
//! Deriving a child stream is a pure counter-based hash of
//! `(seed, stream_id, index)`, so the stream assigned to replicate `k` is the
//! same no matter how many threads run the simulation or in which order the
//! replicates are scheduled. Instantiating the actual generator is deferred
//! to [`RngStream::rng`], which keys a ChaCha12 generator off the pair.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer. Bijective on u64, which guarantees that derivation
/// with distinct indices yields distinct stream ids under a fixed parent.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn splitmix_next(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN_GAMMA);
    mix64(*state)
}

/// Child seed for grid cell `index` under a master seed. Bijective in
/// `index` for a fixed master, so cells never share a root stream.
pub(crate) fn derive_seed(seed: u64, index: u64) -> u64 {
    mix64(seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1))))
}

/// A deterministic, splittable random stream identified by `(seed, stream_id)`.
///
/// Two streams with identical `(seed, stream_id)` produce identical draw
/// sequences, byte for byte, on any platform. Streams derived with distinct
/// indices are independent for every statistical purpose in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
}

impl RngStream {
    /// Root stream for an experiment: `stream_id = 0`.
    pub fn new(seed: u64) -> Self {
        RngStream { seed, stream_id: 0 }
    }

    pub fn with_id(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Derive the `index`-th child stream.
    ///
    /// Pure function of `(seed, stream_id, index)`: the odd-constant multiply
    /// and the SplitMix64 finalizer are both bijections, so distinct indices
    /// map to distinct child ids under the same parent.
    pub fn derive(&self, index: u64) -> RngStream {
        let id = mix64(
            self.stream_id
                .wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1))),
        );
        RngStream {
            seed: self.seed,
            stream_id: id,
        }
    }

    /// Instantiate the generator for this stream.
    ///
    /// Each call returns a fresh generator positioned at the start of the
    /// stream's sequence; callers that need several independent consumers
    /// must derive one stream per consumer.
    pub fn rng(&self) -> StreamRng {
        let mut state = self.seed ^ mix64(self.stream_id);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix_next(&mut state).to_le_bytes());
        }
        StreamRng(ChaCha12Rng::from_seed(key))
    }
}

/// Concrete generator behind a [`RngStream`].
#[derive(Debug, Clone)]
pub struct StreamRng(ChaCha12Rng);

impl RngCore for StreamRng {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_streams_give_identical_sequences() {
        let a = RngStream::with_id(1, 0);
        let b = RngStream::with_id(1, 0);
        let xs: Vec<u64> = (0..64).map(|_| 0u64).collect();
        let mut ra = a.rng();
        let mut rb = b.rng();
        for _ in xs {
            assert_eq!(ra.next_u64(), rb.next_u64());
        }
    }

    #[test]
    fn repeated_derivation_is_stable() {
        let root = RngStream::new(1);
        assert_eq!(root.derive(0), root.derive(0));
        assert_eq!(root.derive(123), root.derive(123));
    }

    #[test]
    fn distinct_indices_give_distinct_streams() {
        let root = RngStream::new(1);
        let s0 = root.derive(0);
        let s1 = root.derive(1);
        assert_ne!(s0, s1);
        assert_ne!(s0.rng().next_u64(), s1.rng().next_u64());
    }

    #[test]
    fn derivation_is_injective_over_a_range() {
        let root = RngStream::new(42);
        let mut seen = std::collections::HashSet::new();
        for k in 0..10_000u64 {
            assert!(seen.insert(root.derive(k).stream_id()), "collision at {k}");
        }
    }

    // Frozen first outputs for a fixed stream. Guards the key-derivation
    // and generator choice against accidental change: any edit that alters
    // the byte sequence shows up here before it silently shifts every
    // simulation result in the crate.
    #[test]
    fn golden_sequence_is_stable() {
        let mut r = RngStream::with_id(42, 0).rng();
        let got: Vec<u64> = (0..4).map(|_| r.next_u64()).collect();
        let expect = [
            0x280b_7b79_f392_fa12_u64,
            0x4dad_ef83_bc93_1d07,
            0xc195_c99b_a537_5e5f,
            0x7e65_7f1b_6bdc_3bfd,
        ];
        assert_eq!(got, expect);
    }
}
