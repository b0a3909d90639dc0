//! Counter-based pseudorandom numbers.
//!
//! Every value is a pure function of `(key, stream, counter)`, so draws can be
//! evaluated in any order and on any thread with identical results. The mixer
//! is the SplitMix64 finalizer applied twice, once to fold in the stream and
//! once to fold in the counter.

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
const STREAM_MUL: u64 = 0xd1b5_4a32_d192_ed03;

#[inline(always)]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A keyed family of independent streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CounterRng {
    key: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self {
            key: mix64(seed.wrapping_add(GOLDEN_GAMMA)),
        }
    }

    /// Derives an unrelated key for a separate purpose (e.g. obstacles vs.
    /// trajectories) from the same seed.
    pub fn with_domain(seed: u64, domain: u64) -> Self {
        Self {
            key: mix64(mix64(seed.wrapping_add(GOLDEN_GAMMA)) ^ domain.wrapping_mul(STREAM_MUL)),
        }
    }

    #[inline(always)]
    pub fn u64_at(&self, stream: u64, counter: u64) -> u64 {
        let s = mix64(self.key ^ stream.wrapping_mul(STREAM_MUL));
        mix64(s.wrapping_add(counter.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline(always)]
    pub fn uniform_at(&self, stream: u64, counter: u64) -> f64 {
        to_unit(self.u64_at(stream, counter))
    }

    /// Sequential view of one stream.
    pub fn stream(&self, stream: u64) -> Stream {
        Stream {
            key: mix64(self.key ^ stream.wrapping_mul(STREAM_MUL)),
            counter: 0,
        }
    }
}

/// Sequential draws from a single stream; equivalent to `u64_at(stream, 0)`,
/// `u64_at(stream, 1)`, ...
#[derive(Debug, Clone)]
pub struct Stream {
    key: u64,
    counter: u64,
}

impl Stream {
    #[inline(always)]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN_GAMMA)))
    }

    #[inline(always)]
    pub fn next_uniform(&mut self) -> f64 {
        to_unit(self.next_u64())
    }

    /// The stream key itself as a uniform on `[0, 1)`: a hash of
    /// `(key, stream)` independent of the counter draws.
    #[inline(always)]
    pub fn key_uniform(&self) -> f64 {
        to_unit(self.key)
    }
}

#[inline(always)]
fn to_unit(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
