//! Deterministic, counter-based random numbers.
//!
//! Every stream is addressed by a 64-bit key and a 64-bit counter; the output
//! for `(key, counter)` is `splitmix64_finalize(key + counter * GOLDEN)`,
//! i.e. the SplitMix64 generator seeded with `key`. Output depends only on
//! integer arithmetic, so the same stream is produced on every platform and
//! independently of evaluation order.
//!
//! Per-pixel streams use `key = mix(seed) ^ pixel_index`, which lets noise be
//! generated for any pixel in any order (or in parallel) with identical
//! results.

use rand::RngCore;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output finalizer.
#[inline]
pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent seed for a named sub-stream (e.g. left vs right
/// image) from a master seed.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    mix(seed ^ mix(stream.wrapping_add(GOLDEN)))
}

/// SplitMix64 stream positioned at `counter`.
#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(key: u64) -> Self {
        Self { key, counter: 0 }
    }

    /// Stream for one pixel of an image seeded with `seed`.
    pub fn for_pixel(seed: u64, index: usize) -> Self {
        Self::new(mix(seed) ^ index as u64)
    }
}

impl RngCore for CounterRng {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}
