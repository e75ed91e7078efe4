//! One-dimensional numerical quadrature.
//!
//! Two layers:
//! * fixed-order Gauss-Legendre panels (`gauss_legendre`, `fixed_panels`) for
//!   integrands known to be smooth on a panel, and
//! * adaptive Simpson subdivision (`integrate`) with optional breakpoint
//!   splitting (`integrate_split`) for integrands with declared kinks or jumps.
//!
//! All routines integrate real-valued `f: f64 -> f64` on a finite interval.

use crate::error::{Error, Result};
use std::sync::OnceLock;

/// Tolerances and budget for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadSpec {
    /// Target relative error of the whole integral.
    pub rel_tol: f64,
    /// Absolute floor below which refinement stops.
    pub abs_tol: f64,
    /// Maximum recursion depth per panel.
    pub max_depth: u32,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_depth: 48,
        }
    }
}

impl QuadSpec {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        QuadSpec {
            rel_tol,
            ..QuadSpec::default()
        }
    }
}

/// Nodes and weights of an `n`-point Gauss-Legendre rule on [-1, 1].
///
/// Computed once per order by Newton iteration on the Legendre polynomial and
/// cached for the life of the process.
pub fn gauss_legendre(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    type GlTable = (Vec<f64>, Vec<f64>);
    static TABLES: OnceLock<[(usize, GlTable); 3]> = OnceLock::new();
    let tables = TABLES.get_or_init(|| {
        [
            (16, build_gl(16)),
            (32, build_gl(32)),
            (64, build_gl(64)),
        ]
    });
    tables
        .iter()
        .find(|(m, _)| *m == n)
        .map(|(_, t)| t)
        .expect("supported Gauss-Legendre orders are 16, 32, 64")
}

fn build_gl(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_deriv(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Fixed-order Gauss-Legendre on [a, b], no error control.
pub fn fixed_gl(f: impl Fn(f64) -> f64, a: f64, b: f64, order: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(order);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * f(c + h * x);
    }
    acc * h
}

/// Composite fixed-order Gauss-Legendre over `panels` equal panels of [a, b].
pub fn fixed_panels(f: impl Fn(f64) -> f64, a: f64, b: f64, order: usize, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    for i in 0..panels {
        let lo = a + i as f64 * h;
        acc += fixed_gl(&f, lo, lo + h, order);
    }
    acc
}

/// Adaptive Simpson quadrature of `f` on [a, b].
///
/// Returns an error if the recursion budget is exhausted before the local
/// error estimate meets the tolerance.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, spec: &QuadSpec) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integration bounds must be finite"));
    }
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate(f, b, a, spec).map(|v| -v);
    }
    // Seed with a few panels so narrow features away from the midpoint are not missed.
    let seed_panels = 8;
    let h = (b - a) / seed_panels as f64;
    let mut total = 0.0;
    let mut worst_ok = true;
    for i in 0..seed_panels {
        let lo = a + i as f64 * h;
        let hi = lo + h;
        let flo = f(lo);
        let fmid = f(0.5 * (lo + hi));
        let fhi = f(hi);
        let whole = simpson(lo, hi, flo, fmid, fhi);
        let (v, ok) = adaptive(
            &f,
            lo,
            hi,
            flo,
            fmid,
            fhi,
            whole,
            spec.abs_tol.max(spec.rel_tol * whole.abs()) / seed_panels as f64,
            // unhalved absolute floor: refinement below it chases evaluation
            // noise, not structure of the integrand
            spec.abs_tol,
            spec.max_depth,
        );
        worst_ok &= ok;
        total += v;
    }
    if !worst_ok {
        return Err(Error::numerical(format!(
            "adaptive quadrature failed to converge on [{a}, {b}]"
        )));
    }
    Ok(total)
}

/// Adaptive quadrature with the interval pre-split at `breaks`
/// (declared jump or kink locations of the integrand).
///
/// Panels are nudged off the cut points by a relative epsilon so a jump's
/// one-sided value never contaminates the neighboring panel; the skipped
/// gap contributes O(1e-13 sup|f|), far below the adaptive tolerance.
pub fn integrate_split(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    breaks: &[f64],
    spec: &QuadSpec,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate_split(f, b, a, breaks, spec).map(|v| -v);
    }
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|x| *x > a && *x < b).collect();
    cuts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    cuts.dedup();
    let mut lo = a;
    let mut acc = 0.0;
    for c in cuts {
        let eps = 1e-13 * (1.0 + c.abs());
        acc += integrate(&f, lo, c - eps, spec)?;
        lo = c + eps;
    }
    acc += integrate(&f, lo, b, spec)?;
    Ok(acc)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    floor: f64,
    depth: u32,
) -> (f64, bool) {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    let accept = delta.abs() <= 15.0 * tol.max(floor).max(1e-300);
    if depth == 0 {
        return (left + right + delta / 15.0, accept);
    }
    if accept {
        return (left + right + delta / 15.0, true);
    }
    let (vl, okl) = adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, floor, depth - 1);
    let (vr, okr) = adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, floor, depth - 1);
    (vl + vr, okl && okr)
}
