//! Drift and diffusion coefficients with regularity metadata.
//!
//! A [`Coefficient`] bundles a scalar function with the constants the theory
//! consumes: a uniform bound (drift) or Hölder constant (diffusion), an
//! optional one-sided Lipschitz constant, a Hölder exponent and an ellipticity
//! constant. The metadata makes the standing assumptions machine-checkable:
//! [`check_assumptions`] probes each condition on a grid and reports measured
//! against declared constants with witnesses.
//!
//! The built-in library covers the cases the experiments need: the
//! decreasing sign drift `1_{(-inf,0]} - 1_{(0,inf)}`, shifted indicator
//! drifts, constant diffusions, and a clipped-power diffusion
//! `c0 + c1 * min(|x|^eta, 1)` that saturates its Hölder constant at the
//! origin while staying uniformly elliptic. The theory itself never exhibits
//! a concrete coefficient pair satisfying all conditions at once; this
//! library is our choice of representatives at the assumption boundary.

use crate::error::{Error, Result};
use crate::mollify::{self, MollifyCache};
use crate::quad::QuadSpec;
use crate::rng::CounterStream;
use crate::weighted_norm::{self, EpsilonReport, WeightedMeasure};
use serde::{Deserialize, Serialize};

/// How evaluation is performed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoeffKind {
    AnalyticForm,
    Piecewise,
    MollifiedWrapper,
}

/// The evaluable form of a coefficient.
#[derive(Debug, Clone)]
pub enum CoeffForm {
    Constant(f64),
    Linear {
        slope: f64,
        intercept: f64,
    },
    /// Right-closed step function: `values\[0\]` on `(-inf, breaks[0]]`,
    /// `values\[i\]` on `(breaks[i-1], breaks[i]]`, `values.last()` beyond.
    /// Matches the convention of the indicator drift `1_{(-inf,0]}`.
    PiecewiseConst {
        breaks: Vec<f64>,
        values: Vec<f64>,
    },
    /// `c0 + c1 * min(|x|^eta, 1)` — exactly eta-Hölder with constant c1,
    /// values in [c0, c0 + c1].
    ClippedPower {
        c0: f64,
        c1: f64,
        eta: f64,
    },
    /// Convolution of `base` with the scaled bump kernel of order `n`.
    Mollified {
        base: Box<Coefficient>,
        n: u32,
        quad: QuadSpec,
        cache: MollifyCache,
    },
}

impl PartialEq for CoeffForm {
    fn eq(&self, other: &Self) -> bool {
        use CoeffForm::*;
        match (self, other) {
            (Constant(a), Constant(b)) => a == b,
            (
                Linear { slope: a, intercept: b },
                Linear { slope: c, intercept: d },
            ) => a == c && b == d,
            (
                PiecewiseConst { breaks: b1, values: v1 },
                PiecewiseConst { breaks: b2, values: v2 },
            ) => b1 == b2 && v1 == v2,
            (
                ClippedPower { c0: a, c1: b, eta: e },
                ClippedPower { c0: c, c1: d, eta: f },
            ) => a == c && b == d && e == f,
            (
                Mollified { base: x, n: m, .. },
                Mollified { base: y, n: k, .. },
            ) => x == y && m == k,
            _ => false,
        }
    }
}

/// A scalar coefficient together with its regularity metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficient {
    name: String,
    form: CoeffForm,
    /// Uniform bound for drifts; Hölder constant for diffusions.
    pub bound_k: Option<f64>,
    /// One-sided Lipschitz constant; present iff membership in the class is claimed.
    pub osl_l: Option<f64>,
    /// Hölder exponent in [1/2, 1]; present for diffusions.
    pub holder_eta: Option<f64>,
    /// Ellipticity constant lambda >= 1 with 1/lambda <= value^2 <= lambda.
    pub ellipticity_lambda: Option<f64>,
}

impl Coefficient {
    pub fn new(name: impl Into<String>, form: CoeffForm) -> Self {
        Coefficient {
            name: name.into(),
            form,
            bound_k: None,
            osl_l: None,
            holder_eta: None,
            ellipticity_lambda: None,
        }
    }

    pub fn with_bound(mut self, k: f64) -> Self {
        self.bound_k = Some(k);
        self
    }
    pub fn with_osl(mut self, l: f64) -> Self {
        self.osl_l = Some(l);
        self
    }
    pub fn with_holder(mut self, eta: f64, k: f64) -> Self {
        self.holder_eta = Some(eta);
        self.bound_k = Some(k);
        self
    }
    pub fn with_ellipticity(mut self, lambda: f64) -> Self {
        self.ellipticity_lambda = Some(lambda);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn form(&self) -> &CoeffForm {
        &self.form
    }

    pub fn kind(&self) -> CoeffKind {
        match self.form {
            CoeffForm::PiecewiseConst { .. } => CoeffKind::Piecewise,
            CoeffForm::Mollified { .. } => CoeffKind::MollifiedWrapper,
            _ => CoeffKind::AnalyticForm,
        }
    }

    /// Evaluate at `x`. Total on the reals; non-finite input is a domain error.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::domain(format!(
                "coefficient `{}` evaluated at non-finite x = {x}",
                self.name
            )));
        }
        Ok(self.eval_raw(x))
    }

    /// Evaluation without the finiteness check; hot path for simulation and
    /// quadrature where the caller guarantees finite input.
    #[inline]
    pub fn eval_raw(&self, x: f64) -> f64 {
        match &self.form {
            CoeffForm::Constant(c) => *c,
            CoeffForm::Linear { slope, intercept } => slope * x + intercept,
            CoeffForm::PiecewiseConst { breaks, values } => {
                // first break >= x gives the piece; right-closed pieces
                let idx = breaks.partition_point(|b| *b < x);
                values[idx]
            }
            CoeffForm::ClippedPower { c0, c1, eta } => c0 + c1 * x.abs().powf(*eta).min(1.0),
            CoeffForm::Mollified { base, n, quad, cache } => {
                mollify::eval_mollified(base, *n, quad, cache, x)
            }
        }
    }

    /// Locations where the coefficient jumps (actual discontinuities).
    pub fn jumps(&self) -> Vec<f64> {
        match &self.form {
            CoeffForm::PiecewiseConst { breaks, .. } => breaks.clone(),
            _ => Vec::new(),
        }
    }

    /// Jumps plus kink locations; quadrature panels split here.
    pub fn nonsmooth_points(&self) -> Vec<f64> {
        match &self.form {
            CoeffForm::PiecewiseConst { breaks, .. } => breaks.clone(),
            CoeffForm::ClippedPower { .. } => vec![-1.0, 0.0, 1.0],
            _ => Vec::new(),
        }
    }
}

// ---------------------------------------------------------------------------
// Built-in library
// ---------------------------------------------------------------------------

/// `-sign(x)` in the convention `1_{(-inf,0]}(x) - 1_{(0,inf)}(x)`.
/// Monotone decreasing, hence one-sided Lipschitz with constant 0.
pub fn neg_sign_drift() -> Coefficient {
    Coefficient::new(
        "neg_sign",
        CoeffForm::PiecewiseConst {
            breaks: vec![0.0],
            values: vec![1.0, -1.0],
        },
    )
    .with_bound(1.0)
    .with_osl(0.0)
}

/// `+sign(x)`; bounded but not one-sided Lipschitz (no osl metadata).
pub fn pos_sign_drift() -> Coefficient {
    Coefficient::new(
        "pos_sign",
        CoeffForm::PiecewiseConst {
            breaks: vec![0.0],
            values: vec![-1.0, 1.0],
        },
    )
    .with_bound(1.0)
}

/// Shifted indicator drift `1_{(-inf, theta]}`; decreasing, in the class with L = 0.
pub fn indicator_drift(theta: f64) -> Coefficient {
    Coefficient::new(
        format!("indicator({theta})"),
        CoeffForm::PiecewiseConst {
            breaks: vec![theta],
            values: vec![1.0, 0.0],
        },
    )
    .with_bound(1.0)
    .with_osl(0.0)
}

/// Constant drift.
pub fn constant_drift(c: f64) -> Coefficient {
    Coefficient::new(format!("constant({c})"), CoeffForm::Constant(c))
        .with_bound(c.abs())
        .with_osl(0.0)
}

/// Constant diffusion `sigma = c` (c != 0): Hölder constant 0 at any exponent,
/// ellipticity max(c^2, 1/c^2).
pub fn constant_diffusion(c: f64) -> Result<Coefficient> {
    if c == 0.0 || !c.is_finite() {
        return Err(Error::config(
            "constant diffusion requires a non-zero finite value",
        ));
    }
    let lambda = (c * c).max(1.0 / (c * c));
    Ok(
        Coefficient::new(format!("constant({c})"), CoeffForm::Constant(c))
            .with_holder(1.0, 0.0)
            .with_ellipticity(lambda),
    )
}

/// Clipped-power diffusion `c0 + c1 * min(|x|^eta, 1)`, exactly eta-Hölder
/// with constant c1 and uniformly elliptic when c0 > 0.
pub fn clipped_power_diffusion(c0: f64, c1: f64, eta: f64) -> Result<Coefficient> {
    if !(c0 > 0.0 && c1 >= 0.0) {
        return Err(Error::config("clipped-power diffusion requires c0 > 0, c1 >= 0"));
    }
    if !(0.5..=1.0).contains(&eta) {
        return Err(Error::config(format!(
            "holder_eta must lie in [1/2, 1], got {eta}"
        )));
    }
    let hi = c0 + c1;
    let lambda = (hi * hi).max(1.0 / (c0 * c0));
    Ok(Coefficient::new(
        format!("holder({c0},{c1},{eta})"),
        CoeffForm::ClippedPower { c0, c1, eta },
    )
    .with_holder(eta, c1)
    .with_ellipticity(lambda))
}

/// Linear drift `slope * x + intercept`; unbounded, one-sided Lipschitz with
/// constant max(slope, 0).
pub fn linear_drift(slope: f64, intercept: f64) -> Coefficient {
    Coefficient::new(
        format!("linear({slope},{intercept})"),
        CoeffForm::Linear { slope, intercept },
    )
    .with_osl(slope.max(0.0))
}

/// Role a coefficient plays in an SDE; decides which metadata a parsed
/// builtin carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffRole {
    Drift,
    Diffusion,
}

/// Parse a declarative coefficient spec.
///
/// Grammar: `name` or `name(arg, ...)` where an argument is a number or,
/// for `mollified(base, n)`, a nested spec. Examples: `neg_sign`,
/// `constant(1)`, `indicator(-0.5)`, `holder(0.8, 0.4, 0.75)`,
/// `mollified(neg_sign, 8)`.
pub fn parse_spec(text: &str, role: CoeffRole) -> Result<Coefficient> {
    let (name, args) = split_spec(text.trim())?;
    let num = |i: usize| -> Result<f64> {
        args.get(i)
            .ok_or_else(|| Error::config(format!("`{name}` missing argument {i}")))?
            .trim()
            .parse::<f64>()
            .map_err(|_| Error::config(format!("`{name}`: argument {i} is not a number")))
    };
    match (name.as_str(), role) {
        ("neg_sign", CoeffRole::Drift) => Ok(neg_sign_drift()),
        ("pos_sign", CoeffRole::Drift) => Ok(pos_sign_drift()),
        ("indicator", CoeffRole::Drift) => Ok(indicator_drift(num(0)?)),
        ("constant", CoeffRole::Drift) => Ok(constant_drift(num(0)?)),
        ("constant", CoeffRole::Diffusion) => constant_diffusion(num(0)?),
        ("holder", CoeffRole::Diffusion) => clipped_power_diffusion(num(0)?, num(1)?, num(2)?),
        ("linear", CoeffRole::Drift) => Ok(linear_drift(num(0)?, num(1)?)),
        ("mollified", _) => {
            let base_text = args
                .first()
                .ok_or_else(|| Error::config("`mollified` needs (base, n)"))?;
            let n: u32 = args
                .get(1)
                .ok_or_else(|| Error::config("`mollified` needs (base, n)"))?
                .trim()
                .parse()
                .map_err(|_| Error::config("`mollified`: n must be a positive integer"))?;
            let base = parse_spec(base_text, role)?;
            mollify::mollify(&base, n, &QuadSpec::default())
        }
        (other, CoeffRole::Drift) => Err(Error::config(format!(
            "unknown drift coefficient `{other}`"
        ))),
        (other, CoeffRole::Diffusion) => Err(Error::config(format!(
            "unknown diffusion coefficient `{other}` (diffusions: constant, holder, mollified)"
        ))),
    }
}

/// Split `name(args)` into the name and top-level comma-separated arguments.
fn split_spec(text: &str) -> Result<(String, Vec<String>)> {
    match text.find('(') {
        None => {
            if text.is_empty() {
                return Err(Error::config("empty coefficient spec"));
            }
            Ok((text.to_string(), Vec::new()))
        }
        Some(open) => {
            if !text.ends_with(')') {
                return Err(Error::config(format!("unbalanced parentheses in `{text}`")));
            }
            let name = text[..open].trim().to_string();
            let inner = &text[open + 1..text.len() - 1];
            let mut args = Vec::new();
            let mut depth = 0usize;
            let mut start = 0usize;
            for (i, ch) in inner.char_indices() {
                match ch {
                    '(' => depth += 1,
                    ')' => {
                        depth = depth
                            .checked_sub(1)
                            .ok_or_else(|| Error::config(format!("unbalanced parentheses in `{text}`")))?
                    }
                    ',' if depth == 0 => {
                        args.push(inner[start..i].trim().to_string());
                        start = i + 1;
                    }
                    _ => {}
                }
            }
            if depth != 0 {
                return Err(Error::config(format!("unbalanced parentheses in `{text}`")));
            }
            let last = inner[start..].trim();
            if !last.is_empty() {
                args.push(last.to_string());
            }
            Ok((name, args))
        }
    }
}

// ---------------------------------------------------------------------------
// SDE pair
// ---------------------------------------------------------------------------

/// A (drift, diffusion) pair for one equation.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffPair {
    pub drift: Coefficient,
    pub diffusion: Coefficient,
}

/// The two coupled equations: the reference (b, sigma) and the perturbed
/// (b_hat, sigma_hat), sharing the initial condition, horizon and the
/// driving noise (supplied by the simulator).
#[derive(Debug, Clone, PartialEq)]
pub struct SdePair {
    pub x0: f64,
    pub t_horizon: f64,
    pub exact: CoeffPair,
    pub perturbed: CoeffPair,
}

impl SdePair {
    pub fn new(x0: f64, t_horizon: f64, exact: CoeffPair, perturbed: CoeffPair) -> Result<Self> {
        if !(t_horizon > 0.0) {
            return Err(Error::config("t_horizon must be positive"));
        }
        for (label, c) in [
            ("exact.diffusion", &exact.diffusion),
            ("perturbed.diffusion", &perturbed.diffusion),
        ] {
            if c.ellipticity_lambda.is_none() {
                return Err(Error::config(format!("{label} lacks ellipticity_lambda")));
            }
            if c.holder_eta.is_none() {
                return Err(Error::config(format!("{label} lacks holder_eta")));
            }
        }
        Ok(SdePair {
            x0,
            t_horizon,
            exact,
            perturbed,
        })
    }

    /// Effective ellipticity constant: the max of the two declared lambdas.
    pub fn effective_lambda(&self) -> f64 {
        self.exact
            .diffusion
            .ellipticity_lambda
            .unwrap_or(1.0)
            .max(self.perturbed.diffusion.ellipticity_lambda.unwrap_or(1.0))
    }

    /// Effective Hölder exponent: the min of the two declared etas.
    pub fn effective_eta(&self) -> f64 {
        self.exact
            .diffusion
            .holder_eta
            .unwrap_or(1.0)
            .min(self.perturbed.diffusion.holder_eta.unwrap_or(1.0))
    }

    /// alpha = eta - 1/2 in [0, 1/2].
    pub fn effective_alpha(&self) -> f64 {
        self.effective_eta() - 0.5
    }

    /// Shared constant K: max of drift bounds and diffusion Hölder constants.
    pub fn effective_k(&self) -> f64 {
        [
            self.exact.drift.bound_k,
            self.perturbed.drift.bound_k,
            self.exact.diffusion.bound_k,
            self.perturbed.diffusion.bound_k,
        ]
        .into_iter()
        .flatten()
        .fold(0.0_f64, f64::max)
    }

    /// The Gaussian-weighted measure induced by (x0, effective lambda, T).
    pub fn measure(&self) -> WeightedMeasure {
        WeightedMeasure::new(self.x0, self.effective_lambda(), self.t_horizon)
            .expect("pair metadata validated at construction")
    }

    /// Coupled pair where both equations carry the same coefficients;
    /// every error functional vanishes identically.
    pub fn identical(x0: f64, t_horizon: f64, pair: CoeffPair) -> Result<Self> {
        SdePair::new(x0, t_horizon, pair.clone(), pair)
    }
}

// ---------------------------------------------------------------------------
// Probes
// ---------------------------------------------------------------------------

/// Uniform sampling grid: `points` equidistant nodes on
/// [center - half_width, center + half_width].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub center: f64,
    pub half_width: f64,
    pub points: usize,
}

impl GridSpec {
    /// The standard probe window [x0 - 10 sqrt(8 lambda T), x0 + 10 sqrt(8 lambda T)].
    pub fn standard(m: &WeightedMeasure) -> Self {
        GridSpec {
            center: m.x0,
            half_width: 10.0 * (8.0 * m.lambda * m.t_horizon).sqrt(),
            points: 10_000,
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.points.max(1);
        let lo = self.center - self.half_width;
        let step = if n > 1 {
            2.0 * self.half_width / (n - 1) as f64
        } else {
            0.0
        };
        (0..n).map(move |i| lo + step * i as f64)
    }
}

/// Result of a randomized one-sided Lipschitz probe.
#[derive(Debug, Clone)]
pub struct OslProbe {
    /// Max over probed pairs of (x-y)(f(x)-f(y)) / |x-y|^2. Random pairs
    /// closer than a separation floor are excluded from the ratio (a few
    /// ulps of evaluation noise divided by a tiny gap is not signal);
    /// targeted pairs at declared discontinuities always count.
    pub l_hat: f64,
    /// Pair attaining the max ratio.
    pub worst: (f64, f64),
    /// Max over all pairs of (x-y)(f(x)-f(y)) - L |x-y|^2 for the declared L.
    pub product_excess: Option<f64>,
    /// Whether the defining product inequality holds with the declared L,
    /// up to the absolute slack.
    pub within_declared: Option<bool>,
    pub pairs: usize,
}

pub const OSL_PROBE_SLACK: f64 = 1e-9;

/// Probe the one-sided Lipschitz condition
/// `(x - y)(f(x) - f(y)) <= L |x - y|^2` on random pairs from `domain`,
/// plus pairs straddling every declared jump at dyadically shrinking gaps
/// (those drive the ratio to infinity for genuine jumps upward).
pub fn probe_one_sided_lipschitz(
    c: &Coefficient,
    domain: (f64, f64),
    n_pairs: usize,
    rng_seed: u64,
) -> Result<OslProbe> {
    let (lo, hi) = domain;
    if !(lo < hi) {
        return Err(Error::domain(format!(
            "degenerate probe domain [{lo}, {hi}]"
        )));
    }
    if n_pairs == 0 {
        return Err(Error::precondition("n_pairs must be at least 1"));
    }
    let mut stream = CounterStream::new(rng_seed);
    let declared = c.osl_l;
    let ratio_floor = 1e-6 * (hi - lo);
    let mut l_hat = f64::NEG_INFINITY;
    let mut worst = (lo, hi);
    let mut excess = f64::NEG_INFINITY;
    let mut count = 0usize;
    let mut consider = |x: f64, y: f64, in_ratio: bool| {
        if x == y {
            return;
        }
        let d = x - y;
        let product = d * (c.eval_raw(x) - c.eval_raw(y));
        if let Some(l) = declared {
            let e = product - l * d * d;
            if e > excess {
                excess = e;
            }
        }
        if in_ratio {
            let r = product / (d * d);
            if r > l_hat {
                l_hat = r;
                worst = (x, y);
            }
        }
    };
    for _ in 0..n_pairs {
        let x = stream.range(lo, hi);
        let y = stream.range(lo, hi);
        consider(x, y, (x - y).abs() >= ratio_floor);
        count += 1;
    }
    let scale = hi - lo;
    for j in c.nonsmooth_points() {
        if j <= lo || j >= hi {
            continue;
        }
        for k in 2..=40 {
            let t = scale * 0.25 * 0.5_f64.powi(k);
            for (x, y) in [(j - t, j + t), (j, j + t), (j - t, j)] {
                if x >= lo && y <= hi {
                    consider(x, y, true);
                    count += 1;
                }
            }
        }
    }
    if l_hat == f64::NEG_INFINITY {
        l_hat = 0.0;
    }
    Ok(OslProbe {
        l_hat,
        worst,
        product_excess: declared.map(|_| excess),
        within_declared: declared.map(|_| excess <= OSL_PROBE_SLACK),
        pairs: count,
    })
}

/// Result of a randomized Hölder-continuity probe.
#[derive(Debug, Clone)]
pub struct HolderProbe {
    /// Max over sampled pairs of |f(x)-f(y)| / |x-y|^eta.
    pub k_hat: f64,
    pub worst: (f64, f64),
    pub within_declared: Option<bool>,
    pub pairs: usize,
}

/// Probe the eta-Hölder modulus of `c` on `domain`: random pairs plus pairs
/// collapsing onto each kink, where the modulus saturates.
///
/// Pairs closer than a separation floor are skipped: below it the sampled
/// ratio measures evaluation rounding, not the modulus of the function.
/// Kink-targeted separations stop at ~1e-4 of the domain, which already
/// saturates the modulus for every built-in and mollified form.
pub fn probe_holder(
    c: &Coefficient,
    eta: f64,
    domain: (f64, f64),
    n_pairs: usize,
    rng_seed: u64,
) -> Result<HolderProbe> {
    let (lo, hi) = domain;
    if !(lo < hi) {
        return Err(Error::domain(format!(
            "degenerate probe domain [{lo}, {hi}]"
        )));
    }
    let mut stream = CounterStream::new(rng_seed);
    let floor = 1e-6 * (hi - lo);
    let mut k_hat = 0.0_f64;
    let mut worst = (lo, hi);
    let mut count = 0usize;
    let mut consider = |x: f64, y: f64| {
        if (x - y).abs() < floor {
            return;
        }
        let r = (c.eval_raw(x) - c.eval_raw(y)).abs() / (x - y).abs().powf(eta);
        if r > k_hat {
            k_hat = r;
            worst = (x, y);
        }
    };
    for _ in 0..n_pairs {
        let x = stream.range(lo, hi);
        let y = stream.range(lo, hi);
        consider(x, y);
        count += 1;
    }
    let mut anchors = c.nonsmooth_points();
    anchors.push(0.5 * (lo + hi));
    for s in anchors {
        if s < lo || s > hi {
            continue;
        }
        for k in 2..=13 {
            let t = (hi - lo) * 0.5_f64.powi(k);
            for (x, y) in [(s, s + t), (s - t, s), (s - t, s + t)] {
                if x >= lo && y <= hi {
                    consider(x, y);
                    count += 1;
                }
            }
        }
    }
    Ok(HolderProbe {
        k_hat,
        worst,
        within_declared: c.bound_k.map(|k| k_hat <= k + OSL_PROBE_SLACK),
        pairs: count,
    })
}

// ---------------------------------------------------------------------------
// Assumption report
// ---------------------------------------------------------------------------

/// One checked condition: measured constant vs declared, with a witness point
/// or pair when the condition fails.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub condition: String,
    pub pass: bool,
    pub measured: f64,
    pub declared: Option<f64>,
    pub witness: Option<(f64, f64)>,
    pub detail: String,
}

/// Per-condition verdicts for the standing assumptions on a coefficient pair.
#[derive(Debug, Clone, Serialize)]
pub struct AssumptionReport {
    pub conditions: Vec<ConditionReport>,
    pub all_pass: bool,
    pub epsilon_p: f64,
}

const CHECK_SLACK: f64 = 1e-9;

/// Probe conditions (i)-(iv) and the coefficient-distance condition at
/// moment order `p` for the pair, on the supplied grid.
pub fn check_assumptions(pair: &SdePair, p: f64, grid: &GridSpec) -> Result<AssumptionReport> {
    if grid.points == 0 {
        return Err(Error::domain("sampling grid is empty"));
    }
    let mut conditions = Vec::new();

    // (i): the reference drift is one-sided Lipschitz.
    let b = &pair.exact.drift;
    let l_declared = b.osl_l.ok_or_else(|| {
        Error::config("condition (i) needs exact.drift.osl_l (one-sided Lipschitz constant)")
    })?;
    let domain = (grid.center - grid.half_width, grid.center + grid.half_width);
    let osl = probe_one_sided_lipschitz(b, domain, grid.points.max(10_000), 0xA55E55)?;
    conditions.push(ConditionReport {
        condition: "(i) one-sided Lipschitz drift".into(),
        pass: osl.within_declared.unwrap_or(false),
        measured: osl.l_hat,
        declared: Some(l_declared),
        witness: Some(osl.worst),
        detail: format!(
            "probed L = {:.6e}, product excess = {:.3e} over {} pairs",
            osl.l_hat,
            osl.product_excess.unwrap_or(f64::NAN),
            osl.pairs
        ),
    });

    // (ii): both drifts bounded by the declared K.
    for (label, drift) in [("b", &pair.exact.drift), ("b_hat", &pair.perturbed.drift)] {
        let k = drift.bound_k.ok_or_else(|| {
            Error::config(format!("condition (ii) needs bound_k on drift `{label}`"))
        })?;
        let mut sup = 0.0_f64;
        let mut at = grid.center;
        for x in grid.nodes() {
            let v = drift.eval_raw(x).abs();
            if v > sup {
                sup = v;
                at = x;
            }
        }
        conditions.push(ConditionReport {
            condition: format!("(ii) |{label}| bounded"),
            pass: sup <= k + CHECK_SLACK,
            measured: sup,
            declared: Some(k),
            witness: Some((at, at)),
            detail: format!("grid sup |{label}| = {sup:.6e}"),
        });
    }

    // (iii): both diffusions eta-Hölder with the declared constant.
    for (label, sigma) in [
        ("sigma", &pair.exact.diffusion),
        ("sigma_hat", &pair.perturbed.diffusion),
    ] {
        let eta = sigma.holder_eta.ok_or_else(|| {
            Error::config(format!("condition (iii) needs holder_eta on `{label}`"))
        })?;
        let k = sigma.bound_k.ok_or_else(|| {
            Error::config(format!(
                "condition (iii) needs bound_k (Hölder constant) on `{label}`"
            ))
        })?;
        let probe = probe_holder(sigma, eta, domain, grid.points.max(10_000), 0xB0B0)?;
        conditions.push(ConditionReport {
            condition: format!("(iii) {label} is eta-Hölder"),
            pass: probe.k_hat <= k + CHECK_SLACK,
            measured: probe.k_hat,
            declared: Some(k),
            witness: Some(probe.worst),
            detail: format!("probed Hölder constant {:.6e} at eta = {eta}", probe.k_hat),
        });
    }

    // (iv): uniform ellipticity with the effective lambda.
    let lambda = pair.effective_lambda();
    for (label, sigma) in [
        ("sigma", &pair.exact.diffusion),
        ("sigma_hat", &pair.perturbed.diffusion),
    ] {
        let mut lo_v = f64::INFINITY;
        let mut hi_v: f64 = 0.0;
        let mut lo_at = grid.center;
        let mut hi_at = grid.center;
        for x in grid.nodes() {
            let a = sigma.eval_raw(x).powi(2);
            if a < lo_v {
                lo_v = a;
                lo_at = x;
            }
            if a > hi_v {
                hi_v = a;
                hi_at = x;
            }
        }
        let pass = lo_v >= 1.0 / lambda - CHECK_SLACK && hi_v <= lambda + CHECK_SLACK;
        conditions.push(ConditionReport {
            condition: format!("(iv) {label}^2 uniformly elliptic"),
            pass,
            measured: if hi_v > lambda { hi_v } else { lo_v },
            declared: Some(lambda),
            witness: Some(if hi_v > lambda + CHECK_SLACK {
                (hi_at, hi_at)
            } else {
                (lo_at, lo_at)
            }),
            detail: format!("{label}^2 in [{lo_v:.6e}, {hi_v:.6e}], lambda = {lambda}"),
        });
    }

    // (p): coefficient distance below 1 in the weighted norm.
    let report: EpsilonReport = weighted_norm::epsilon_p(pair, p, &pair.measure())?;
    let mut pass = report.meets_distance_condition;
    let mut detail = format!(
        "epsilon_{p} = {:.6e} (drift {:.3e}, diffusion {:.3e})",
        report.epsilon, report.drift_pow, report.diffusion_pow
    );
    if let Some(log_ok) = report.log_condition {
        pass &= log_ok;
        detail.push_str(&format!(", log condition (alpha = 0): {log_ok}"));
    }
    conditions.push(ConditionReport {
        condition: format!("(p) epsilon_{p} < 1"),
        pass,
        measured: report.epsilon,
        declared: Some(1.0),
        witness: None,
        detail,
    });

    let all_pass = conditions.iter().all(|c| c.pass);
    Ok(AssumptionReport {
        conditions,
        all_pass,
        epsilon_p: report.epsilon,
    })
}
