//! Stability-rate experiments: mollified coefficient ladders, coefficient
//! distances, coupled simulation, and log-log order fits against the
//! theoretical exponents.
//!
//! For a ladder of mollification orders `n`, build `(b_n, sigma_n)`, measure
//! `eps_{p,n}` in the weighted norm, couple the original and smoothed
//! equations on shared noise, and regress the chosen error functional
//! against the distance. The theory gives one-sided bounds with unspecified
//! constants, so only the order is testable: the fitted slope must reach the
//! theoretical exponent minus a tolerance covering Monte Carlo noise and
//! discretization bias (quantified by the grid-doubling diagnostic attached
//! to every run). In the boundary regime `alpha = 0` the bound is
//! logarithmic rather than a power, and the fit is performed against
//! `1 / log(1/eps)` instead.

use crate::coeffs::{check_assumptions, CoeffPair, Coefficient, GridSpec, SdePair};
use crate::error::{Error, Result};
use crate::mollify;
use crate::quad::QuadSpec;
use crate::rng::{counter_normal, derive_seed};
use crate::sde_sim::{simulate_pair, BvFunction, SimulationPlan, StoppingRule};
use crate::weighted_norm::epsilon_p;
use serde::{Deserialize, Serialize};

/// Which bound's exponent an experiment is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremKind {
    /// stopped first-moment bound: exponent 2 alpha / (2 alpha + 1)
    StoppedL1,
    /// supremum first-moment bound: exponent alpha
    SupL1,
    /// p-th moment bound (p >= 2): 1/2 at alpha = 1/2, else 2 alpha/(2 alpha + 1)
    LpMoment,
    /// interpolated moment bound (1 < p < 2): 1/2 at alpha = 1/2, else alpha/(2 alpha + 1)
    LpJensen,
    /// bounded-variation terminal functional: exponent alpha / (2 alpha + 1)
    Bv,
}

/// A rate exponent, or the marker for the logarithmic regime at alpha = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateExponent {
    Power(f64),
    Logarithmic,
}

/// The theoretical convergence exponent for `alpha` in [0, 1/2].
pub fn theoretical_exponent(alpha: f64, kind: TheoremKind) -> Result<RateExponent> {
    if !(0.0..=0.5).contains(&alpha) {
        return Err(Error::domain(format!(
            "alpha must lie in [0, 1/2], got {alpha}"
        )));
    }
    if alpha == 0.0 {
        return Ok(RateExponent::Logarithmic);
    }
    let power = match kind {
        TheoremKind::StoppedL1 => 2.0 * alpha / (2.0 * alpha + 1.0),
        TheoremKind::SupL1 => alpha,
        TheoremKind::LpMoment => {
            if alpha == 0.5 {
                0.5
            } else {
                2.0 * alpha / (2.0 * alpha + 1.0)
            }
        }
        TheoremKind::LpJensen => {
            if alpha == 0.5 {
                0.5
            } else {
                alpha / (2.0 * alpha + 1.0)
            }
        }
        TheoremKind::Bv => alpha / (2.0 * alpha + 1.0),
    };
    Ok(RateExponent::Power(power))
}

/// Error functional measured along the ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ErrorKind {
    /// `E |X_tau - X^{(n)}_tau|` for a stopping rule
    Stopped { rule: StoppingRule },
    /// `E sup_t |X - X^{(n)}|`
    Sup,
    /// `E sup_t |X - X^{(n)}|^p`
    PMoment,
    /// `E |g(X_T) - g(X^{(n)}_T)|^r`
    Bv { g: BvFunction, r: f64 },
}

impl ErrorKind {
    pub fn theorem(&self) -> TheoremKind {
        match self {
            ErrorKind::Stopped { .. } => TheoremKind::StoppedL1,
            ErrorKind::Sup => TheoremKind::SupL1,
            ErrorKind::PMoment => TheoremKind::LpMoment,
            ErrorKind::Bv { .. } => TheoremKind::Bv,
        }
    }
}

/// Configuration of one ladder experiment.
#[derive(Debug, Clone)]
pub struct RateExperimentConfig {
    pub x0: f64,
    pub t_horizon: f64,
    /// base coefficients; the perturbed side is their mollification per ladder entry
    pub drift: Coefficient,
    pub diffusion: Coefficient,
    pub n_ladder: Vec<u32>,
    /// moment order; epsilon uses p = 1 for first-moment experiments
    pub p: f64,
    pub plan: SimulationPlan,
    pub error_kind: ErrorKind,
    pub slope_tolerance: f64,
    pub quad: QuadSpec,
}

pub const DEFAULT_SLOPE_TOLERANCE: f64 = 0.15;

impl RateExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_ladder.len() < 3 {
            return Err(Error::config(format!(
                "n_ladder needs at least 3 entries for a slope fit, got {}",
                self.n_ladder.len()
            )));
        }
        if !self.n_ladder.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::config("n_ladder must be strictly increasing"));
        }
        if self.n_ladder[0] == 0 {
            return Err(Error::config("mollification orders must be positive"));
        }
        self.plan.validate()
    }

    fn epsilon_order(&self) -> f64 {
        match self.error_kind {
            ErrorKind::PMoment => self.p,
            _ => 1.0,
        }
    }
}

/// One ladder entry.
#[derive(Debug, Clone, Serialize)]
pub struct RatePoint {
    pub n: u32,
    pub epsilon: f64,
    pub error: f64,
    pub error_std_error: f64,
    pub error_ci: (f64, f64),
    pub used: bool,
    pub exclusion: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    Inconsistent,
    Inconclusive,
}

/// Discretization-bias diagnostic: the finest ladder entry re-run at twice
/// the grid resolution.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridDoublingDiag {
    pub n: u32,
    pub steps: u32,
    pub error_base: f64,
    pub error_doubled: f64,
    pub rel_change: f64,
}

/// Fit of the measured errors against the coefficient distance.
#[derive(Debug, Clone, Serialize)]
pub struct RateFit {
    pub points: Vec<RatePoint>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub slope_std_error: f64,
    /// correlation of error with 1/log(1/eps); the fit target when alpha = 0
    pub log_mode_correlation: Option<f64>,
    pub theoretical: RateExponent,
    pub alpha: f64,
    pub verdict: Verdict,
    pub grid_doubling: Option<GridDoublingDiag>,
    pub master_seed: u64,
    pub warnings: Vec<String>,
}

/// Ordinary least squares of `log(error)` on `log(eps)`.
/// Returns (slope, intercept, r_squared).
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    fit_linear_core(
        &points
            .iter()
            .map(|(x, y)| (x.ln(), y.ln()))
            .collect::<Vec<_>>(),
    )
    .map(|f| (f.0, f.1, f.2))
}

/// (slope, intercept, r_squared, slope_std_error) of a linear fit.
fn fit_linear_core(pts: &[(f64, f64)]) -> Result<(f64, f64, f64, f64)> {
    let n = pts.len();
    if n < 3 {
        return Err(Error::precondition(format!(
            "slope fit needs at least 3 points, got {n}"
        )));
    }
    if pts.iter().any(|(x, y)| !(x.is_finite() && y.is_finite())) {
        return Err(Error::domain("fit input contains non-finite values"));
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<f64>();
    let sxy = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>();
    let syy = pts.iter().map(|p| (p.1 - my) * (p.1 - my)).sum::<f64>();
    if sxx == 0.0 {
        return Err(Error::domain("fit abscissae are all identical"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res = pts
        .iter()
        .map(|p| {
            let r = p.1 - (intercept + slope * p.0);
            r * r
        })
        .sum::<f64>();
    let r_squared = if syy <= 1e-30 {
        1.0
    } else {
        1.0 - ss_res / syy
    };
    let slope_se = if n > 2 {
        (ss_res / (nf - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    Ok((slope, intercept, r_squared, slope_se))
}

fn correlation(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>();
    let sxx = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<f64>();
    let syy = pts.iter().map(|p| (p.1 - my) * (p.1 - my)).sum::<f64>();
    if sxx <= 0.0 || syy <= 0.0 {
        return f64::NAN;
    }
    sxy / (sxx * syy).sqrt()
}

fn ladder_pair(cfg: &RateExperimentConfig, n: u32) -> Result<SdePair> {
    let bn = mollify::mollify(&cfg.drift, n, &cfg.quad)?;
    let sn = mollify::mollify(&cfg.diffusion, n, &cfg.quad)?;
    SdePair::new(
        cfg.x0,
        cfg.t_horizon,
        CoeffPair {
            drift: cfg.drift.clone(),
            diffusion: cfg.diffusion.clone(),
        },
        CoeffPair {
            drift: bn,
            diffusion: sn,
        },
    )
}

fn measure_error(
    cfg: &RateExperimentConfig,
    pair: &SdePair,
    seed: u64,
    steps: u32,
) -> Result<crate::sde_sim::Estimate> {
    let mut plan = cfg.plan.clone();
    plan.seed = seed;
    plan.steps = steps;
    match &cfg.error_kind {
        ErrorKind::Stopped { rule } => plan.record.stopping = vec![*rule],
        ErrorKind::Bv { g, .. } => plan.record.bv = vec![*g],
        _ => {}
    }
    let ensemble = simulate_pair(pair, &plan)?;
    match &cfg.error_kind {
        ErrorKind::Stopped { .. } => ensemble.stopped_error(0),
        ErrorKind::Sup => Ok(ensemble.sup_error()),
        ErrorKind::PMoment => ensemble.pth_moment_sup_error(cfg.p),
        ErrorKind::Bv { r, .. } => ensemble.bv_error(0, *r),
    }
}

/// Run the full ladder: mollify, measure distances, simulate, fit, compare.
pub fn run_stability_experiment(cfg: &RateExperimentConfig) -> Result<RateFit> {
    cfg.validate()?;
    let mut warnings = Vec::new();

    // probe the standing assumptions on a representative ladder pair
    let probe_pair = ladder_pair(cfg, cfg.n_ladder[0])?;
    let grid = GridSpec {
        points: 2_000,
        ..GridSpec::standard(&probe_pair.measure())
    };
    match check_assumptions(&probe_pair, cfg.epsilon_order(), &grid) {
        Ok(rep) if !rep.all_pass => {
            for c in rep.conditions.iter().filter(|c| !c.pass) {
                warnings.push(format!("assumption probe failed: {} ({})", c.condition, c.detail));
            }
        }
        Err(e) => warnings.push(format!("assumption probe skipped: {e}")),
        _ => {}
    }

    let alpha = probe_pair.effective_alpha();
    let theoretical = theoretical_exponent(alpha, cfg.error_kind.theorem())?;
    let p_eps = cfg.epsilon_order();

    let mut points = Vec::with_capacity(cfg.n_ladder.len());
    for &n in &cfg.n_ladder {
        let pair = ladder_pair(cfg, n)?;
        let eps = epsilon_p(&pair, p_eps, &pair.measure())?.epsilon;
        if eps >= 1.0 {
            warnings.push(format!(
                "ladder entry n = {n} excluded: eps = {eps:.4} violates the distance condition"
            ));
            points.push(RatePoint {
                n,
                epsilon: eps,
                error: f64::NAN,
                error_std_error: f64::NAN,
                error_ci: (f64::NAN, f64::NAN),
                used: false,
                exclusion: Some("eps >= 1".into()),
            });
            continue;
        }
        let est = measure_error(cfg, &pair, derive_seed(cfg.plan.seed, n as u64), cfg.plan.steps)?;
        let usable = eps > 0.0 && est.value > 0.0 && est.ci95.0 > 0.0;
        points.push(RatePoint {
            n,
            epsilon: eps,
            error: est.value,
            error_std_error: est.std_error,
            error_ci: est.ci95,
            used: usable,
            exclusion: (!usable).then(|| "error indistinguishable from zero".into()),
        });
    }

    let usable: Vec<&RatePoint> = points.iter().filter(|p| p.used).collect();
    let (slope, intercept, r_squared, slope_se, log_corr, verdict) = if usable.len() < 3 {
        warnings.push("fewer than 3 usable points: fit refused".into());
        (
            f64::NAN,
            f64::NAN,
            f64::NAN,
            f64::NAN,
            None,
            Verdict::Inconclusive,
        )
    } else {
        match theoretical {
            RateExponent::Power(exponent) => {
                let pts: Vec<(f64, f64)> = usable
                    .iter()
                    .map(|p| (p.epsilon.ln(), p.error.ln()))
                    .collect();
                let (slope, intercept, r2, se) = fit_linear_core(&pts)?;
                // the bounds are one-sided: the empirical order must reach
                // the theoretical one up to the tolerance
                let verdict = if slope >= exponent - cfg.slope_tolerance {
                    Verdict::Consistent
                } else {
                    Verdict::Inconsistent
                };
                (slope, intercept, r2, se, None, verdict)
            }
            RateExponent::Logarithmic => {
                let pts: Vec<(f64, f64)> = usable
                    .iter()
                    .map(|p| (1.0 / (1.0 / p.epsilon).ln(), p.error))
                    .collect();
                let (slope, intercept, r2, se) = fit_linear_core(&pts)?;
                let corr = correlation(&pts);
                let verdict = if corr >= 0.9 {
                    Verdict::Consistent
                } else {
                    Verdict::Inconsistent
                };
                (slope, intercept, r2, se, Some(corr), verdict)
            }
        }
    };

    // discretization-bias diagnostic at the finest usable ladder entry
    let grid_doubling = match usable.last() {
        Some(last) => {
            let n = last.n;
            let pair = ladder_pair(cfg, n)?;
            let seed = derive_seed(cfg.plan.seed, n as u64);
            let doubled = measure_error(cfg, &pair, seed, cfg.plan.steps * 2)?;
            let rel = (doubled.value - last.error).abs() / last.error.abs().max(1e-300);
            Some(GridDoublingDiag {
                n,
                steps: cfg.plan.steps,
                error_base: last.error,
                error_doubled: doubled.value,
                rel_change: rel,
            })
        }
        None => None,
    };

    Ok(RateFit {
        points,
        slope,
        intercept,
        r_squared,
        slope_std_error: slope_se,
        log_mode_correlation: log_corr,
        theoretical,
        alpha,
        verdict,
        grid_doubling,
        master_seed: cfg.plan.seed,
        warnings,
    })
}

// ---------------------------------------------------------------------------
// Key-estimate check
// ---------------------------------------------------------------------------

/// One ladder entry of the time-integrated expectation check.
#[derive(Debug, Clone, Serialize)]
pub struct KeyEstimateEntry {
    pub n: u32,
    /// MC estimate of `int_0^T E|b - b_n|(X^{(n)}_s) ds`
    pub drift_numerator: f64,
    /// `||b - b_n||_1`
    pub drift_denominator: f64,
    pub drift_ratio: f64,
    /// MC estimate of `int_0^T E|sigma - sigma_n|^2(X^{(n)}_s) ds`
    pub diffusion_numerator: f64,
    /// `||sigma - sigma_n||_2^2`
    pub diffusion_denominator: f64,
    pub diffusion_ratio: f64,
}

/// Uniform-constant behavior of the time-integrated coefficient-difference
/// expectation against the weighted norm, across the mollification ladder.
#[derive(Debug, Clone, Serialize)]
pub struct KeyEstimateReport {
    pub entries: Vec<KeyEstimateEntry>,
    /// max/min of the drift ratios over entries with a nonzero denominator
    pub drift_band: f64,
    pub diffusion_band: f64,
    /// both bands within the exclusion factor
    pub bounded: bool,
    pub band_limit: f64,
}

/// Simulate the perturbed equation alone and compare the time-integrated
/// expectations against the weighted distances, per ladder entry.
pub fn key_estimate_check(
    cfg: &RateExperimentConfig,
    band_limit: f64,
) -> Result<KeyEstimateReport> {
    cfg.validate()?;
    let n_steps = cfg.plan.steps as usize;
    let h = cfg.t_horizon / n_steps as f64;
    let sqrt_h = h.sqrt();
    let mut entries = Vec::new();
    for &n in &cfg.n_ladder {
        let pair = ladder_pair(cfg, n)?;
        let eps = epsilon_p(&pair, 1.0, &pair.measure())?;
        let b = &pair.exact.drift;
        let bn = &pair.perturbed.drift;
        let s = &pair.exact.diffusion;
        let sn = &pair.perturbed.diffusion;
        let seed = derive_seed(cfg.plan.seed, 0x4E57 ^ n as u64);
        use rayon::prelude::*;
        let sums: Vec<(f64, f64)> = (0..cfg.plan.paths)
            .into_par_iter()
            .map(|path| {
                let mut xh = cfg.x0;
                let mut acc_b = 0.5 * (b.eval_raw(xh) - bn.eval_raw(xh)).abs();
                let mut acc_s = 0.5 * (s.eval_raw(xh) - sn.eval_raw(xh)).powi(2);
                for k in 0..n_steps {
                    let dw = sqrt_h * counter_normal(seed, path, k as u64);
                    xh += bn.eval_raw(xh) * h + sn.eval_raw(xh) * dw;
                    let w = if k + 1 == n_steps { 0.5 } else { 1.0 };
                    acc_b += w * (b.eval_raw(xh) - bn.eval_raw(xh)).abs();
                    acc_s += w * (s.eval_raw(xh) - sn.eval_raw(xh)).powi(2);
                }
                (acc_b * h, acc_s * h)
            })
            .collect();
        let paths = cfg.plan.paths as f64;
        let drift_numerator = sums.iter().map(|s| s.0).sum::<f64>() / paths;
        let diffusion_numerator = sums.iter().map(|s| s.1).sum::<f64>() / paths;
        let drift_denominator = eps.drift_pow;
        let diffusion_denominator = eps.diffusion_pow;
        let ratio =
            |num: f64, den: f64| if den > 0.0 { num / den } else if num.abs() < 1e-12 { 0.0 } else { f64::NAN };
        entries.push(KeyEstimateEntry {
            n,
            drift_numerator,
            drift_denominator,
            drift_ratio: ratio(drift_numerator, drift_denominator),
            diffusion_numerator,
            diffusion_denominator,
            diffusion_ratio: ratio(diffusion_numerator, diffusion_denominator),
        });
    }
    let band = |select: fn(&KeyEstimateEntry) -> (f64, f64)| {
        let ratios: Vec<f64> = entries
            .iter()
            .filter(|e| select(e).1 > 0.0)
            .map(|e| select(e).0 / select(e).1)
            .collect();
        if ratios.is_empty() {
            1.0
        } else {
            let max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
            if min > 0.0 {
                max / min
            } else {
                f64::INFINITY
            }
        }
    };
    let drift_band = band(|e| (e.drift_numerator, e.drift_denominator));
    let diffusion_band = band(|e| (e.diffusion_numerator, e.diffusion_denominator));
    Ok(KeyEstimateReport {
        bounded: drift_band <= band_limit && diffusion_band <= band_limit,
        entries,
        drift_band,
        diffusion_band,
        band_limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{constant_diffusion, neg_sign_drift};
    use crate::rng::CounterStream;

    #[test]
    fn exponent_table_matches_the_bounds() {
        // alpha = 1/2 cases
        assert_eq!(
            theoretical_exponent(0.5, TheoremKind::StoppedL1).unwrap(),
            RateExponent::Power(0.5)
        );
        assert_eq!(
            theoretical_exponent(0.5, TheoremKind::SupL1).unwrap(),
            RateExponent::Power(0.5)
        );
        assert_eq!(
            theoretical_exponent(0.5, TheoremKind::LpMoment).unwrap(),
            RateExponent::Power(0.5)
        );
        assert_eq!(
            theoretical_exponent(0.5, TheoremKind::Bv).unwrap(),
            RateExponent::Power(0.25)
        );
        // interior alpha
        let a = 0.25;
        assert_eq!(
            theoretical_exponent(a, TheoremKind::StoppedL1).unwrap(),
            RateExponent::Power(2.0 * a / (2.0 * a + 1.0))
        );
        assert_eq!(
            theoretical_exponent(a, TheoremKind::SupL1).unwrap(),
            RateExponent::Power(a)
        );
        assert_eq!(
            theoretical_exponent(a, TheoremKind::LpJensen).unwrap(),
            RateExponent::Power(a / (2.0 * a + 1.0))
        );
        // alpha = 0 is logarithmic for every kind
        for kind in [
            TheoremKind::StoppedL1,
            TheoremKind::SupL1,
            TheoremKind::LpMoment,
            TheoremKind::LpJensen,
            TheoremKind::Bv,
        ] {
            assert_eq!(
                theoretical_exponent(0.0, kind).unwrap(),
                RateExponent::Logarithmic
            );
        }
        assert!(theoretical_exponent(0.6, TheoremKind::SupL1).is_err());
        assert!(theoretical_exponent(-0.1, TheoremKind::SupL1).is_err());
    }

    #[test]
    fn fit_recovers_synthetic_power_laws() {
        let pts: Vec<(f64, f64)> = (1..=6)
            .map(|i| {
                let eps = 0.5_f64.powi(i);
                (eps, eps.sqrt())
            })
            .collect();
        let (slope, _, r2) = fit_loglog(&pts).unwrap();
        assert!((slope - 0.5).abs() < 1e-12);
        assert!((r2 - 1.0).abs() < 1e-12);

        let flat: Vec<(f64, f64)> = (1..=5).map(|i| (0.5_f64.powi(i), 3.0)).collect();
        let (slope, _, _) = fit_loglog(&flat).unwrap();
        assert!(slope.abs() < 1e-12);

        assert!(fit_loglog(&pts[..2]).is_err());
    }

    #[test]
    fn fit_tolerates_small_noise() {
        let mut stream = CounterStream::new(17);
        let pts: Vec<(f64, f64)> = (1..=8)
            .map(|i| {
                let eps = 0.5_f64.powi(i);
                let noise = 1.0 + 0.01 * (2.0 * stream.uniform() - 1.0);
                (eps, eps.powf(0.7) * noise)
            })
            .collect();
        let (slope, _, r2) = fit_loglog(&pts).unwrap();
        assert!((slope - 0.7).abs() < 0.02, "slope {slope}");
        assert!(r2 > 0.99);
    }

    fn small_cfg(error_kind: ErrorKind) -> RateExperimentConfig {
        RateExperimentConfig {
            x0: 0.0,
            t_horizon: 1.0,
            drift: neg_sign_drift(),
            diffusion: constant_diffusion(1.0).unwrap(),
            n_ladder: vec![2, 4, 8],
            p: 1.0,
            plan: SimulationPlan::new(256, 400, 42).unwrap(),
            error_kind,
            slope_tolerance: DEFAULT_SLOPE_TOLERANCE,
            quad: QuadSpec::default(),
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = small_cfg(ErrorKind::Sup);
        cfg.n_ladder = vec![2, 4];
        assert!(cfg.validate().is_err());
        cfg.n_ladder = vec![4, 2, 8];
        assert!(cfg.validate().is_err());
        cfg.n_ladder = vec![2, 4, 8];
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn degenerate_ladder_is_inconclusive() {
        // identical coefficients: every error is exactly zero, fit refused
        let mut cfg = small_cfg(ErrorKind::Sup);
        cfg.drift = crate::coeffs::constant_drift(0.5);
        // mollified constant == constant, so the ladder is degenerate
        let fit = run_stability_experiment(&cfg).unwrap();
        assert_eq!(fit.verdict, Verdict::Inconclusive);
        assert!(fit.slope.is_nan());
        assert!(fit.points.iter().all(|p| !p.used));
    }

    #[test]
    fn small_sup_experiment_is_consistent() {
        let fit = run_stability_experiment(&small_cfg(ErrorKind::Sup)).unwrap();
        assert_eq!(fit.verdict, Verdict::Consistent, "{fit:?}");
        assert!(fit.slope >= 0.35, "slope {}", fit.slope);
        assert!(fit.grid_doubling.is_some());
        // epsilon decreases along the ladder
        let eps: Vec<f64> = fit.points.iter().map(|p| p.epsilon).collect();
        assert!(eps.windows(2).all(|w| w[1] < w[0]), "{eps:?}");
    }

    #[test]
    fn key_estimate_identical_pair_is_zero() {
        let mut cfg = small_cfg(ErrorKind::Sup);
        cfg.drift = crate::coeffs::constant_drift(0.25);
        let rep = key_estimate_check(&cfg, 10.0).unwrap();
        for e in &rep.entries {
            assert_eq!(e.drift_ratio, 0.0);
            assert_eq!(e.diffusion_ratio, 0.0);
        }
        assert!(rep.bounded);
    }
}
