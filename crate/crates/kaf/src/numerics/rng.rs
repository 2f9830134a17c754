use crate::error::{Error, Result};
use std::f64::consts::TAU;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Deterministic counter-based generator (splitmix64).
///
/// The `u64` stream is a pure function of `(seed, call order)` and is
/// platform-independent: each step adds a fixed odd constant to the state and
/// mixes it, so there is no data-dependent control flow. Generators are
/// single-owner; independent child streams are derived with [`RngState::fork`].
#[derive(Debug, Clone)]
pub struct RngState {
    state: u64,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        RngState { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 random bits, so every value is exactly
    /// representable and the stream is identical on every platform.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Standard Box-Muller transform. The first uniform is drawn in `(0, 1]`
    /// so the logarithm is always finite; `std == 0` returns `mean` exactly.
    pub fn gaussian(&mut self, mean: f64, std: f64) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        mean + std * r * (TAU * u2).cos()
    }

    pub fn sample_uniform(&mut self, lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
        if !(lo <= hi) {
            return Err(Error::Param(format!("uniform bounds out of order: [{lo}, {hi}]")));
        }
        Ok((0..n).map(|_| self.uniform(lo, hi)).collect())
    }

    pub fn sample_gaussian(&mut self, mean: f64, std: f64, n: usize) -> Result<Vec<f64>> {
        if !(std >= 0.0) {
            return Err(Error::Param(format!("gaussian std must be >= 0, got {std}")));
        }
        Ok((0..n).map(|_| self.gaussian(mean, std)).collect())
    }

    /// Derives an independent child stream. Consumes one draw from the parent
    /// and mixes in the stream tag, so distinct tags (and successive forks
    /// with the same tag) yield unrelated seeds.
    pub fn fork(&mut self, stream: u64) -> RngState {
        let base = self.next_u64();
        RngState::new(base.wrapping_add(stream.wrapping_add(1).wrapping_mul(0xD1B5_4A32_D192_ED03)))
    }

    /// Unbiased integer in `[0, n)` by rejection.
    pub fn next_below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "next_below requires n > 0");
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.next_below(i as u64 + 1) as usize;
            xs.swap(i, j);
        }
    }
}
