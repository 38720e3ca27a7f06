//! Reproducible stream-splittable pseudo-randomness.
//!
//! The generator is SplitMix64 (Steele, Lea & Flood 2014; the mix is the
//! Stafford "mix13" finalizer used by Java's SplittableRandom). All
//! constants are spelled out below so the exact sample sequence can be
//! reproduced in any language from (seed, stream_id) alone:
//!
//! * GAMMA = 0x9E3779B97F4A7C15 (the state increment)
//! * mix13 multipliers 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB
//! * stream start: mix13(seed) XOR mix13(stream_id * GAMMA + 1)
//! * output: state += GAMMA; return mix13(state)
//! * uniform: top 53 bits of the output scaled by 2^-53

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix13(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A deterministic random stream identified by (seed, stream_id).
///
/// Streams with distinct ids start at pseudorandom offsets of the
/// SplitMix64 orbit and may be consumed concurrently from different
/// threads; a single stream is a value type and is advanced by `&mut`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    state: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let state = mix13(seed) ^ mix13(stream_id.wrapping_mul(GAMMA).wrapping_add(1));
        Self {
            seed,
            stream_id,
            state,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix13(self.state)
    }

    /// Uniform draw in [0, 1) with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE
    }

    /// Standard normal draw via Box-Muller (two uniforms per call,
    /// the sine partner is discarded to keep the stream layout simple).
    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * (1.0 - u1).ln()).sqrt();
        r * (std::f64::consts::TAU * u2).cos()
    }

    /// true with probability p.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }
}
