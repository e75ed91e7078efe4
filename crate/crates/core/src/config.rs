//! Declarative experiment configuration.
//!
//! Experiments are described by a JSON document with a strict schema:
//! unknown keys are rejected with the offending key named, defaults are
//! materialized on parse, and `parse(serialize(cfg)) == cfg` holds for every
//! valid configuration. Coefficients are declared by the compact spec syntax
//! of [`crate::coeffs::parse_spec`] (`neg_sign`, `constant(1)`,
//! `holder(0.8,0.4,0.75)`, `mollified(neg_sign, 8)`, ...).

use crate::coeffs::{parse_spec, CoeffPair, CoeffRole, SdePair};
use crate::error::{Error, Result};
use crate::quad::QuadSpec;
use crate::rate_lab::{self, ErrorKind, RateExperimentConfig};
use crate::sde_sim::{BvFunction, SimulationPlan, StoppingRule};
use crate::weighted_norm::WeightedMeasure;
use serde::{Deserialize, Serialize};

pub const DEFAULT_SEED: u64 = 0x5DE5_7AB1;
pub const DEFAULT_STEPS: u32 = 1 << 12;
pub const DEFAULT_PATHS: u64 = 10_000;

/// Coefficient declarations; the hat side defaults to the exact side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientsSpec {
    pub drift: String,
    pub diffusion: String,
    #[serde(default)]
    pub drift_hat: Option<String>,
    #[serde(default)]
    pub diffusion_hat: Option<String>,
}

/// Weighted-measure parameters; `lambda: null` derives the effective value
/// from the declared coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    #[serde(default)]
    pub x0: f64,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default = "default_t")]
    pub t_horizon: f64,
}

fn default_t() -> f64 {
    1.0
}

impl Default for MeasureSpec {
    fn default() -> Self {
        MeasureSpec {
            x0: 0.0,
            lambda: None,
            t_horizon: 1.0,
        }
    }
}

/// Simulation grid and ensemble defaults (2^12 steps, 10^4 paths).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSpec {
    #[serde(default = "default_steps")]
    pub steps: u32,
    #[serde(default = "default_paths")]
    pub paths: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub record: crate::sde_sim::RecordSpec,
    #[serde(default)]
    pub workers: Option<usize>,
}

fn default_steps() -> u32 {
    DEFAULT_STEPS
}
fn default_paths() -> u64 {
    DEFAULT_PATHS
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl Default for PlanSpec {
    fn default() -> Self {
        PlanSpec {
            steps: DEFAULT_STEPS,
            paths: DEFAULT_PATHS,
            seed: DEFAULT_SEED,
            record: Default::default(),
            workers: None,
        }
    }
}

impl PlanSpec {
    pub fn to_plan(&self) -> Result<SimulationPlan> {
        let plan = SimulationPlan {
            steps: self.steps,
            paths: self.paths,
            seed: self.seed,
            record: self.record.clone(),
            workers: self.workers,
        };
        plan.validate()?;
        Ok(plan)
    }
}

/// Error functional selector for rate experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RatesErrorSpec {
    Sup,
    Stopped { rule: StoppingRule },
    PMoment,
    Bv { threshold: f64, r: f64 },
}

impl RatesErrorSpec {
    pub fn to_error_kind(&self) -> ErrorKind {
        match self {
            RatesErrorSpec::Sup => ErrorKind::Sup,
            RatesErrorSpec::Stopped { rule } => ErrorKind::Stopped { rule: *rule },
            RatesErrorSpec::PMoment => ErrorKind::PMoment,
            RatesErrorSpec::Bv { threshold, r } => ErrorKind::Bv {
                g: BvFunction::IndicatorAbove {
                    threshold: *threshold,
                },
                r: *r,
            },
        }
    }
}

/// The experiment to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExperimentSpec {
    /// probe the standing assumptions
    Check {
        #[serde(default = "default_p")]
        p: f64,
    },
    /// weighted norms and the coefficient distance
    Norm {
        #[serde(default = "default_p")]
        p: f64,
    },
    /// penalty-function property report
    YwValidate { delta: f64, kappa: f64 },
    /// density expansion on a y-grid
    Density {
        t: f64,
        y_min: f64,
        y_max: f64,
        #[serde(default = "default_y_count")]
        y_count: usize,
        #[serde(default = "default_order")]
        order: u32,
    },
    /// coupled ensemble with recorded functionals
    Simulate,
    /// mollification table and preservation report
    Mollify {
        n: u32,
        #[serde(default = "default_grid_points")]
        grid_points: usize,
    },
    /// stability-rate ladder
    Rates {
        n_ladder: Vec<u32>,
        #[serde(default = "default_p")]
        p: f64,
        error: RatesErrorSpec,
        #[serde(default = "default_slope_tol")]
        slope_tolerance: f64,
    },
}

fn default_p() -> f64 {
    1.0
}
fn default_y_count() -> usize {
    101
}
fn default_order() -> u32 {
    2
}
fn default_grid_points() -> usize {
    201
}
fn default_slope_tol() -> f64 {
    rate_lab::DEFAULT_SLOPE_TOLERANCE
}

/// Output destination and formats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_dir")]
    pub dir: String,
    /// emit a per-path binary dump alongside the aggregate CSV (simulate)
    #[serde(default)]
    pub dump_paths: bool,
}

fn default_dir() -> String {
    "out".into()
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            dir: default_dir(),
            dump_paths: false,
        }
    }
}

/// Numerical tolerances in effect for a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(default = "default_quad_rel")]
    pub quad_rel_tol: f64,
    #[serde(default = "default_radius")]
    pub truncation_radius: f64,
}

fn default_quad_rel() -> f64 {
    1e-10
}
fn default_radius() -> f64 {
    crate::weighted_norm::DEFAULT_TRUNCATION_RADIUS
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        ToleranceSpec {
            quad_rel_tol: default_quad_rel(),
            truncation_radius: default_radius(),
        }
    }
}

impl ToleranceSpec {
    /// Named profiles selectable through the environment.
    pub fn profile(name: &str) -> Result<Self> {
        match name {
            "default" => Ok(ToleranceSpec::default()),
            "strict" => Ok(ToleranceSpec {
                quad_rel_tol: 1e-12,
                truncation_radius: 14.0,
            }),
            "fast" => Ok(ToleranceSpec {
                quad_rel_tol: 1e-8,
                truncation_radius: 8.0,
            }),
            other => Err(Error::config(format!(
                "unknown tolerance profile `{other}` (default, strict, fast)"
            ))),
        }
    }

    pub fn quad(&self) -> QuadSpec {
        QuadSpec::with_rel_tol(self.quad_rel_tol)
    }
}

/// A full experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub coefficients: CoefficientsSpec,
    #[serde(default)]
    pub measure: MeasureSpec,
    #[serde(default)]
    pub plan: PlanSpec,
    pub experiment: ExperimentSpec,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub tolerances: ToleranceSpec,
}

/// Parse and validate a JSON experiment config. Unknown keys are rejected
/// with the offending key named in the error.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig =
        serde_json::from_str(text).map_err(|e| Error::config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.plan.to_plan()?;
        self.build_pair()?;
        if let ExperimentSpec::Rates { n_ladder, .. } = &self.experiment {
            if n_ladder.len() < 3 {
                return Err(Error::config(format!(
                    "rates experiment needs an n_ladder with at least 3 entries, got {}",
                    n_ladder.len()
                )));
            }
        }
        Ok(())
    }

    pub fn serialize(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization is infallible")
    }

    /// Resolve the declared coefficients into the coupled pair.
    pub fn build_pair(&self) -> Result<SdePair> {
        let drift = parse_spec(&self.coefficients.drift, CoeffRole::Drift)?;
        let diffusion = parse_spec(&self.coefficients.diffusion, CoeffRole::Diffusion)?;
        let drift_hat = match &self.coefficients.drift_hat {
            Some(s) => parse_spec(s, CoeffRole::Drift)?,
            None => drift.clone(),
        };
        let diffusion_hat = match &self.coefficients.diffusion_hat {
            Some(s) => parse_spec(s, CoeffRole::Diffusion)?,
            None => diffusion.clone(),
        };
        SdePair::new(
            self.measure.x0,
            self.measure.t_horizon,
            CoeffPair { drift, diffusion },
            CoeffPair {
                drift: drift_hat,
                diffusion: diffusion_hat,
            },
        )
    }

    /// The weighted measure: configured lambda, or the pair's effective one.
    pub fn measure(&self) -> Result<WeightedMeasure> {
        let pair = self.build_pair()?;
        let lambda = self.measure.lambda.unwrap_or_else(|| pair.effective_lambda());
        WeightedMeasure::new(self.measure.x0, lambda, self.measure.t_horizon)
    }

    /// Assemble the rate-experiment configuration (rates kind only).
    pub fn rate_config(&self) -> Result<RateExperimentConfig> {
        let ExperimentSpec::Rates {
            n_ladder,
            p,
            error,
            slope_tolerance,
        } = &self.experiment
        else {
            return Err(Error::config("experiment kind is not `rates`"));
        };
        let pair = self.build_pair()?;
        let cfg = RateExperimentConfig {
            x0: self.measure.x0,
            t_horizon: self.measure.t_horizon,
            drift: pair.exact.drift,
            diffusion: pair.exact.diffusion,
            n_ladder: n_ladder.clone(),
            p: *p,
            plan: self.plan.to_plan()?,
            error_kind: error.to_error_kind(),
            slope_tolerance: *slope_tolerance,
            quad: self.tolerances.quad(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
