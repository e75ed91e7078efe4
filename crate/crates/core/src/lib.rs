//! Numerical laboratory for the stability of one-dimensional SDEs with
//! discontinuous one-sided Lipschitz drift and Hölder-continuous, uniformly
//! elliptic diffusion.
//!
//! The crate implements the computable side of the theory end to end:
//!
//! * [`coeffs`] — coefficients with regularity metadata (bound, one-sided
//!   Lipschitz constant, Hölder pair, ellipticity) and randomized probes of
//!   the standing assumptions;
//! * [`mollify`](mod@mollify) — the bump-kernel mollifier preserving those constants,
//!   with the a-priori weighted-distance bound;
//! * [`weighted_norm`] — the Gaussian-weighted L^p norms and the coefficient
//!   distance `eps_p`;
//! * [`yw`] — the penalty functions approximating |x| with their verifiable
//!   properties;
//! * [`parametrix`] — frozen-Gaussian density expansion, the explicit
//!   kernel-bound constant, majorant series, and the empirical Gaussian
//!   upper-bound certification;
//! * [`sde_sim`] — coupled Euler-Maruyama ensembles on shared noise with
//!   deterministic counter-based increments;
//! * [`rate_lab`] — mollification ladders, log-log order fits, and the
//!   key-estimate uniformity check;
//! * [`config`] — the JSON experiment schema shared with the command-line
//!   driver.
//!
//! Everything is deterministic given (config, seed): random numbers are
//! counter-based, reductions run in fixed order, and worker counts never
//! change results.

// validation guards use the negated form `!(x >= c)` on purpose: unlike
// `x < c` it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coeffs;
pub mod config;
pub mod error;
pub mod kde;
pub mod mollify;
pub mod parametrix;
pub mod quad;
pub mod rate_lab;
pub mod rng;
pub mod sde_sim;
pub mod weighted_norm;
pub mod yw;

pub use coeffs::{
    check_assumptions, probe_holder, probe_one_sided_lipschitz, AssumptionReport, CoeffKind,
    CoeffPair, CoeffRole, Coefficient, GridSpec, SdePair,
};
pub use config::{parse_config, ExperimentConfig, ExperimentSpec, ToleranceSpec};
pub use error::{Error, Result};
pub use kde::{kde_density, KdeEstimate, KdeSpec};
pub use mollify::{bump, mollification_distance_bound, mollify, BumpKernel};
pub use parametrix::{
    c0_constant, certify_gaussian_bound, chaining_constant, check_theta_bound, density_estimate,
    frozen_kernel, gaussian_kernel, majorant_constant, parametrix_term, series_majorant,
    theta_hat, FrozenKernelParams, IntegratorSpec, PairSide,
};
pub use quad::QuadSpec;
pub use rate_lab::{
    fit_loglog, key_estimate_check, run_stability_experiment, theoretical_exponent, ErrorKind,
    RateExperimentConfig, RateExponent, RateFit, TheoremKind, Verdict,
};
pub use sde_sim::{
    simulate_pair, BvFunction, Estimate, PathEnsemble, RecordSpec, SimulationPlan, StoppingRule,
};
pub use weighted_norm::{epsilon_p, weighted_lp_norm, weighted_lp_pow, NormQuadSpec, WeightedMeasure};
pub use yw::{YwParams, YwPropertyReport};
