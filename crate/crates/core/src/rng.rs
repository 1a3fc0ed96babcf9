//! Seeded pseudo-random streams.
//!
//! Everything random in this crate flows through [`SplitMix64`], a tiny
//! generator defined entirely by the update equations below, so that any
//! reimplementation (in any language) reproduces the exact same draws:
//!
//! ```text
//! state <- state + 0x9E3779B97F4A7C15            (mod 2^64)
//! z     <- state
//! z     <- (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9 (mod 2^64)
//! z     <- (z XOR (z >> 27)) * 0x94D049BB133111EB (mod 2^64)
//! output = z XOR (z >> 31)
//! ```
//!
//! Uniform doubles take the top 53 bits: `u = (output >> 11) * 2^-53`,
//! giving values in `[0, 1)`; symmetric draws are `2u - 1` in `[-1, 1)`.
//!
//! Independent substreams are derived with [`derive_stream`], which absorbs a
//! `(tag, index)` pair into the base seed and scrambles once. Weight matrices,
//! data generators, and experiment realizations each own a substream, so
//! changing one knob (say, the number of layers) never shifts the draws of an
//! unrelated component.

/// SplitMix64 generator. See the module docs for the exact recurrence.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX_1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX_2: u64 = 0x94D0_49BB_1331_11EB;
const UNIT_SCALE: f64 = 1.0 / (1u64 << 53) as f64;

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(MIX_1);
        z = (z ^ (z >> 27)).wrapping_mul(MIX_2);
        z ^ (z >> 31)
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * UNIT_SCALE
    }

    /// Uniform draw in `[-1, 1)`.
    pub fn next_symmetric(&mut self) -> f64 {
        2.0 * self.next_unit() - 1.0
    }

    /// Uniform draw in `[low, high)`.
    pub fn next_range(&mut self, low: f64, high: f64) -> f64 {
        low + (high - low) * self.next_unit()
    }
}

/// Derives an independent substream seed from `(seed, tag, index)`:
///
/// ```text
/// mixed = seed + tag * 0x9E3779B97F4A7C15 + index * 0xBF58476D1CE4E5B9  (mod 2^64)
/// derived = first output of SplitMix64 seeded with `mixed`
/// ```
pub fn derive_stream(seed: u64, tag: u64, index: u64) -> u64 {
    let mixed = seed
        .wrapping_add(tag.wrapping_mul(GAMMA))
        .wrapping_add(index.wrapping_mul(MIX_1));
    SplitMix64::new(mixed).next_u64()
}
