//! Gaussian kernel density estimation for terminal-value samples.
//!
//! Supports the density-bound certification: the simulated terminal law is
//! smoothed with a Gaussian kernel and compared against the reference
//! Gaussian envelope. Bandwidth defaults to Silverman's reference rule and
//! can be forced for controlled tests.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// KDE controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KdeSpec {
    /// Fixed bandwidth; `None` selects Silverman's rule.
    pub bandwidth: Option<f64>,
    pub grid_points: usize,
    /// Evaluation range; `None` covers the sample span padded by 4 bandwidths.
    pub range: Option<(f64, f64)>,
}

impl Default for KdeSpec {
    fn default() -> Self {
        KdeSpec {
            bandwidth: None,
            grid_points: 512,
            range: None,
        }
    }
}

/// Density estimate on a grid.
#[derive(Debug, Clone)]
pub struct KdeEstimate {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub bandwidth: f64,
    pub n: usize,
}

const MIN_SAMPLES: usize = 1000;
/// Roughness of the Gaussian kernel, `int K^2 = 1/(2 sqrt(pi))`.
const KERNEL_ROUGHNESS: f64 = 0.28209479177387814;

/// Build a Gaussian-kernel density estimate from terminal samples.
pub fn kde_density(samples: &[f64], spec: &KdeSpec) -> Result<KdeEstimate> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::precondition(format!(
            "kernel density estimation needs at least {MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n as f64 - 1.0);
    let bandwidth = match spec.bandwidth {
        Some(h) if h > 0.0 => h,
        Some(h) => return Err(Error::domain(format!("bandwidth must be positive, got {h}"))),
        None => {
            if var <= 0.0 {
                return Err(Error::domain(
                    "degenerate sample (zero variance): bandwidth selection impossible",
                ));
            }
            let sd = var.sqrt();
            let mut sorted = samples.to_vec();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let q = |p: f64| sorted[((n as f64 - 1.0) * p) as usize];
            let iqr = q(0.75) - q(0.25);
            let scale = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
            0.9 * scale * (n as f64).powf(-0.2)
        }
    };
    let (lo, hi) = match spec.range {
        Some(r) => r,
        None => {
            let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            (min - 4.0 * bandwidth, max + 4.0 * bandwidth)
        }
    };
    if !(lo < hi) {
        return Err(Error::domain("degenerate evaluation range"));
    }
    let g = spec.grid_points.max(2);
    let grid: Vec<f64> = (0..g)
        .map(|i| lo + (hi - lo) * i as f64 / (g - 1) as f64)
        .collect();
    // direct summation; binned approximations would bias the peak comparison
    let norm = 1.0 / (n as f64 * bandwidth * (2.0 * std::f64::consts::PI).sqrt());
    let density: Vec<f64> = grid
        .iter()
        .map(|y| {
            let mut acc = 0.0;
            for x in samples {
                let u = (y - x) / bandwidth;
                acc += (-0.5 * u * u).exp();
            }
            acc * norm
        })
        .collect();
    Ok(KdeEstimate {
        grid,
        density,
        bandwidth,
        n,
    })
}

impl KdeEstimate {
    /// Linear interpolation on the evaluation grid; zero outside.
    pub fn eval(&self, y: f64) -> f64 {
        let (first, last) = (self.grid[0], *self.grid.last().unwrap());
        if y < first || y > last {
            return 0.0;
        }
        let step = (last - first) / (self.grid.len() - 1) as f64;
        let pos = (y - first) / step;
        let i = (pos as usize).min(self.grid.len() - 2);
        let s = pos - i as f64;
        self.density[i] * (1.0 - s) + self.density[i + 1] * s
    }

    /// Pointwise standard error `sqrt(f(y) R(K) / (n h))`.
    pub fn std_error(&self, y: f64) -> f64 {
        (self.eval(y) * KERNEL_ROUGHNESS / (self.n as f64 * self.bandwidth)).sqrt()
    }

    /// Integral of the estimate over its grid (trapezoid).
    pub fn mass(&self) -> f64 {
        let mut acc = 0.0;
        for i in 1..self.grid.len() {
            acc += 0.5 * (self.density[i] + self.density[i - 1]) * (self.grid[i] - self.grid[i - 1]);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::CounterStream;

    #[test]
    fn rejects_small_or_degenerate_samples() {
        assert!(kde_density(&[1.0; 10], &KdeSpec::default()).is_err());
        let flat = vec![3.5; 2000];
        assert!(kde_density(&flat, &KdeSpec::default()).is_err());
    }

    #[test]
    fn point_mass_with_forced_bandwidth_is_a_gaussian_bump() {
        let c = 2.0;
        let samples = vec![c; 2000];
        let spec = KdeSpec {
            bandwidth: Some(0.3),
            grid_points: 201,
            range: Some((0.0, 4.0)),
        };
        let kde = kde_density(&samples, &spec).unwrap();
        let peak = 1.0 / (0.3 * (2.0 * std::f64::consts::PI).sqrt());
        assert!((kde.eval(c) - peak).abs() / peak < 1e-3);
        let half = kde.eval(c + 0.3) / kde.eval(c);
        assert!((half - (-0.5_f64).exp()).abs() < 1e-3);
    }

    #[test]
    fn standard_normal_samples_recover_the_density() {
        let mut stream = CounterStream::new(99);
        let n = 1_000_000;
        let samples: Vec<f64> = (0..n).map(|_| stream.normal()).collect();
        let spec = KdeSpec {
            grid_points: 161,
            range: Some((-4.0, 4.0)),
            ..KdeSpec::default()
        };
        let kde = kde_density(&samples, &spec).unwrap();
        let phi = |y: f64| (-0.5 * y * y).exp() / (2.0 * std::f64::consts::PI).sqrt();
        for y in [-1.5, -0.5, 0.0, 0.5, 1.5] {
            let se = kde.std_error(y);
            // allow bandwidth bias of order h^2 |f''| / 2 on top of 3 se
            let bias = 0.5 * kde.bandwidth * kde.bandwidth * phi(y) * (y * y - 1.0).abs();
            assert!(
                (kde.eval(y) - phi(y)).abs() < 3.0 * se + bias + 1e-4,
                "y = {y}: {} vs {}",
                kde.eval(y),
                phi(y)
            );
        }
        assert!((kde.mass() - 1.0).abs() < 1e-3, "mass {}", kde.mass());
    }
}
