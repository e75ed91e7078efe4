//! Shared fixtures for the benchmark suite.

use sde_stability::{CoeffPair, Coefficient, QuadSpec, SdePair};

/// Sign drift against its order-n mollification, unit diffusion.
pub fn sign_ladder_pair(n: u32) -> SdePair {
    let b = sde_stability::coeffs::neg_sign_drift();
    let s = sde_stability::coeffs::constant_diffusion(1.0).unwrap();
    let bn = sde_stability::mollify(&b, n, &QuadSpec::default()).unwrap();
    SdePair::new(
        0.0,
        1.0,
        CoeffPair {
            drift: b,
            diffusion: s.clone(),
        },
        CoeffPair {
            drift: bn,
            diffusion: s,
        },
    )
    .unwrap()
}

/// The clipped-power diffusion used by the Hölder benchmarks.
pub fn holder_diffusion() -> Coefficient {
    sde_stability::coeffs::clipped_power_diffusion(0.8, 0.4, 0.75).unwrap()
}
