//! Gaussian-weighted L^p norms and the coefficient distance epsilon_p.
//!
//! The reference measure has density `w(x) = exp(-|x-x0|^2 / (2 (8 lambda) T))`
//! against Lebesgue measure; its variance parameter 8 lambda T matches the
//! Gaussian upper bound on the transition density, which is what makes the
//! norm the right yardstick for coefficient differences.
//!
//! Integrals are truncated to `|x - x0| <= R sqrt(8 lambda T)`; the discarded
//! tail is below `sup|f|^p * sqrt(16 pi lambda T) * erfc(R / sqrt 2) / 2`,
//! which at the default R = 10 is ~1e-23 relative.

use crate::coeffs::SdePair;
use crate::error::{Error, Result};
use crate::quad::{self, QuadSpec};
use serde::{Deserialize, Serialize};

/// Parameters of the weighted measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedMeasure {
    pub x0: f64,
    pub lambda: f64,
    pub t_horizon: f64,
}

pub const DEFAULT_TRUNCATION_RADIUS: f64 = 10.0;

impl WeightedMeasure {
    pub fn new(x0: f64, lambda: f64, t_horizon: f64) -> Result<Self> {
        if !(lambda >= 1.0) {
            return Err(Error::config(format!("lambda must be >= 1, got {lambda}")));
        }
        if !(t_horizon > 0.0) {
            return Err(Error::config(format!(
                "t_horizon must be positive, got {t_horizon}"
            )));
        }
        if !x0.is_finite() {
            return Err(Error::config("x0 must be finite"));
        }
        Ok(WeightedMeasure {
            x0,
            lambda,
            t_horizon,
        })
    }

    /// Weight at `x`: in (0, 1], equal to 1 at x0.
    #[inline]
    pub fn weight(&self, x: f64) -> f64 {
        let u = x - self.x0;
        (-u * u / (16.0 * self.lambda * self.t_horizon)).exp()
    }

    /// Closed form of the total mass: `int w dx = 4 sqrt(pi lambda T)`.
    pub fn total_mass(&self) -> f64 {
        4.0 * (std::f64::consts::PI * self.lambda * self.t_horizon).sqrt()
    }

    /// Truncation window `[x0 - R s, x0 + R s]` with `s = sqrt(8 lambda T)`.
    pub fn window(&self, radius: f64) -> (f64, f64) {
        let s = (8.0 * self.lambda * self.t_horizon).sqrt();
        (self.x0 - radius * s, self.x0 + radius * s)
    }
}

/// Quadrature controls for weighted-norm evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormQuadSpec {
    pub quad: QuadSpec,
    /// Truncation radius R in units of sqrt(8 lambda T).
    pub truncation_radius: f64,
    /// Known kink/jump locations of the integrand; panels split here.
    pub breakpoints: Vec<f64>,
}

impl Default for NormQuadSpec {
    fn default() -> Self {
        NormQuadSpec {
            quad: QuadSpec::default(),
            truncation_radius: DEFAULT_TRUNCATION_RADIUS,
            breakpoints: Vec::new(),
        }
    }
}

impl NormQuadSpec {
    pub fn with_breakpoints(breakpoints: Vec<f64>) -> Self {
        NormQuadSpec {
            breakpoints,
            ..NormQuadSpec::default()
        }
    }
}

/// `int |f|^p w dx` — the norm raised to its own power, computed directly
/// (no root-then-power round trip).
pub fn weighted_lp_pow(
    f: impl Fn(f64) -> f64,
    p: f64,
    m: &WeightedMeasure,
    spec: &NormQuadSpec,
) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::domain(format!("norm order p must be >= 1, got {p}")));
    }
    let (lo, hi) = m.window(spec.truncation_radius);
    let integrand = |x: f64| f(x).abs().powf(p) * m.weight(x);
    quad::integrate_split(integrand, lo, hi, &spec.breakpoints, &spec.quad)
}

/// The weighted L^p norm `(int |f|^p w dx)^{1/p}`.
pub fn weighted_lp_norm(
    f: impl Fn(f64) -> f64,
    p: f64,
    m: &WeightedMeasure,
    spec: &NormQuadSpec,
) -> Result<f64> {
    weighted_lp_pow(f, p, m, spec).map(|v| v.powf(1.0 / p))
}

/// Outcome of the coefficient-distance computation at order p.
#[derive(Debug, Clone, Serialize)]
pub struct EpsilonReport {
    /// `||b - b_hat||_p^p`
    pub drift_pow: f64,
    /// `||sigma - sigma_hat||_{2p}^{2p}`
    pub diffusion_pow: f64,
    /// max of the two
    pub epsilon: f64,
    /// epsilon_p < 1
    pub meets_distance_condition: bool,
    /// for alpha = 0 only: 1 / log(1/epsilon) < 1
    pub log_condition: Option<bool>,
}

/// Coefficient distance `epsilon_p = ||b-b_hat||_p^p  v  ||sigma-sigma_hat||_{2p}^{2p}`.
pub fn epsilon_p(pair: &SdePair, p: f64, m: &WeightedMeasure) -> Result<EpsilonReport> {
    if !(p >= 1.0) {
        return Err(Error::domain(format!("order p must be >= 1, got {p}")));
    }
    let mut drift_breaks = pair.exact.drift.nonsmooth_points();
    drift_breaks.extend(pair.perturbed.drift.nonsmooth_points());
    let mut diff_breaks = pair.exact.diffusion.nonsmooth_points();
    diff_breaks.extend(pair.perturbed.diffusion.nonsmooth_points());

    let b = &pair.exact.drift;
    let bh = &pair.perturbed.drift;
    let drift_pow = if b == bh {
        0.0
    } else {
        weighted_lp_pow(
            |x| b.eval_raw(x) - bh.eval_raw(x),
            p,
            m,
            &NormQuadSpec::with_breakpoints(drift_breaks),
        )?
    };
    let s = &pair.exact.diffusion;
    let sh = &pair.perturbed.diffusion;
    let diffusion_pow = if s == sh {
        0.0
    } else {
        weighted_lp_pow(
            |x| s.eval_raw(x) - sh.eval_raw(x),
            2.0 * p,
            m,
            &NormQuadSpec::with_breakpoints(diff_breaks),
        )?
    };
    let epsilon = drift_pow.max(diffusion_pow);
    let alpha = pair.effective_alpha();
    let log_condition = if alpha.abs() < 1e-12 {
        // 1/log(1/eps) < 1, i.e. eps < 1/e; the zero-distance limit holds trivially
        Some(if epsilon == 0.0 {
            true
        } else {
            epsilon < 1.0 && 1.0 / (1.0 / epsilon).ln() < 1.0
        })
    } else {
        None
    };
    Ok(EpsilonReport {
        drift_pow,
        diffusion_pow,
        epsilon,
        meets_distance_condition: epsilon < 1.0,
        log_condition,
    })
}
