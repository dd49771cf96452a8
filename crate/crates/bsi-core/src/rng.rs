//! Counter-based random number streams.
//!
//! Every random draw in a sampling or training run comes from a stream keyed
//! by `(seed, step, component)`. A stream is derived by mixing the key through
//! the splitmix64 finalizer, so any lane can be reconstructed independently of
//! batch size, thread count, or evaluation order. This is what makes sampler
//! runs bit-reproducible and lets tests permute component streams explicitly.
//!
//! Not cryptographically secure.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Reserved step keys. Sampler steps use their index `0..k`, far below these.
pub mod keys {
    /// Prior draw / encoding-marginal draw.
    pub const PRIOR: u64 = u64::MAX;
    /// Final categorical draw of the discrete sampler.
    pub const FINAL_DRAW: u64 = u64::MAX - 1;
}

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sequential generator for one keyed lane (splitmix64).
#[derive(Clone, Debug)]
pub struct LaneRng {
    state: u64,
}

impl LaneRng {
    pub fn from_state(state: u64) -> Self {
        Self { state }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix(self.state)
    }

    /// Uniform draw in the open interval (0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        // 53 mantissa bits; offset by half an ulp so 0 is excluded.
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Standard normal draw via Box-Muller.
    #[inline]
    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Index draw in `[0, n)`.
    #[inline]
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        // Modulo bias is below 2^-50 for desk-scale n.
        (self.next_u64() % n as u64) as usize
    }
}

/// Source of per-`(step, component)` lanes.
///
/// Implemented by [`KeyedRng`] and by [`PermutedNoise`], which remaps
/// component ids so tests can feed a sampler "the same streams, permuted".
pub trait NoiseSource {
    fn lane(&self, step: u64, component: u64) -> LaneRng;
}

/// Root generator: a seed plus the key-mixing scheme.
#[derive(Clone, Copy, Debug)]
pub struct KeyedRng {
    seed: u64,
}

impl KeyedRng {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    /// Derive an independent root for a sub-task (one trajectory of a batch,
    /// one training step, ...).
    pub fn fork(&self, tag: u64) -> KeyedRng {
        KeyedRng {
            seed: mix(self.seed ^ tag.wrapping_mul(0xA24B_AED4_963E_E407)),
        }
    }
}

impl NoiseSource for KeyedRng {
    #[inline]
    fn lane(&self, step: u64, component: u64) -> LaneRng {
        let h = mix(self.seed ^ step.wrapping_mul(0x8CB9_2BA7_2F3D_8DD7));
        LaneRng::from_state(mix(h ^ component.wrapping_mul(0xD6E8_FEB8_6659_FD93)))
    }
}

/// Wrapper that permutes component ids before lane derivation.
pub struct PermutedNoise<'a, N: NoiseSource> {
    inner: &'a N,
    perm: &'a [usize],
}

impl<'a, N: NoiseSource> PermutedNoise<'a, N> {
    /// `perm[i]` is the component id whose stream component `i` receives.
    pub fn new(inner: &'a N, perm: &'a [usize]) -> Self {
        Self { inner, perm }
    }
}

impl<N: NoiseSource> NoiseSource for PermutedNoise<'_, N> {
    #[inline]
    fn lane(&self, step: u64, component: u64) -> LaneRng {
        self.inner.lane(step, self.perm[component as usize] as u64)
    }
}
