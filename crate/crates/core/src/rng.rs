//! Counter-based random number generation.
//!
//! Monte Carlo paths must be reproducible independently of scheduling: the
//! normal increment consumed by path `i` at step `k` is a pure function of
//! `(seed, i, k)`. There is no generator state to share or split, so any
//! partitioning of paths across workers yields bit-identical streams.
//!
//! The mapping is a SplitMix64-style finalizer over a linear combination of
//! the key words; uniforms are taken from the top 53 bits and normals come
//! from a Box-Muller transform of two independent lanes.

const PHI64: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX_B: u64 = 0xC2B2_AE3D_27D4_EB4F;
const MIX_C: u64 = 0x1656_67B1_9E37_79F9;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stateless hash of a (seed, path, step, lane) tuple to a u64.
#[inline]
pub fn counter_u64(seed: u64, path: u64, step: u64, lane: u64) -> u64 {
    let z = seed
        .wrapping_add(path.wrapping_mul(PHI64))
        .wrapping_add(step.wrapping_mul(MIX_B))
        .wrapping_add(lane.wrapping_mul(MIX_C));
    mix(mix(z))
}

/// Uniform in the open interval (0, 1).
#[inline]
pub fn counter_uniform(seed: u64, path: u64, step: u64, lane: u64) -> f64 {
    // top 53 bits, shifted into (0,1) to keep ln() finite in Box-Muller
    ((counter_u64(seed, path, step, lane) >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0)
}

/// Standard normal draw for (seed, path, step), independent across tuples.
#[inline]
pub fn counter_normal(seed: u64, path: u64, step: u64) -> f64 {
    let u1 = counter_uniform(seed, path, step, 0);
    let u2 = counter_uniform(seed, path, step, 1);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Derive an independent sub-seed, e.g. one per ladder entry or experiment stage.
#[inline]
pub fn derive_seed(master: u64, tag: u64) -> u64 {
    mix(master ^ tag.wrapping_mul(PHI64))
}

/// Sequential convenience stream over the same counter construction.
///
/// Used by probes and samplers that just need "a lot of reproducible numbers"
/// rather than per-(path, step) addressing.
#[derive(Debug, Clone)]
pub struct CounterStream {
    seed: u64,
    counter: u64,
}

impl CounterStream {
    pub fn new(seed: u64) -> Self {
        CounterStream { seed, counter: 0 }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        counter_u64(self.seed, 0, self.counter, 0)
    }

    /// Uniform in (0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0)
    }

    /// Uniform in [lo, hi).
    #[inline]
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard normal via Box-Muller (pairs drawn fresh, no spare kept).
    #[inline]
    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}
