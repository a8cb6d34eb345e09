//! Replica statistics.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

/// Mean with a standard error from batch means.
///
/// `R` replicas are split into `⌊√R⌋` contiguous batches. With fewer than two
/// batches the plain sample standard error is used instead.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateCI {
    pub mean: f64,
    pub stderr: f64,
    pub replicas: u64,
    pub batches: u64,
}

impl EstimateCI {
    pub fn from_samples(xs: &[f64]) -> Self {
        let r = xs.len();
        if r == 0 {
            return Self {
                mean: f64::NAN,
                stderr: f64::INFINITY,
                replicas: 0,
                batches: 0,
            };
        }
        let mean = xs.iter().sum::<f64>() / r as f64;
        let b = (r as f64).sqrt().floor() as usize;
        if b < 2 {
            let stderr = if r < 2 {
                f64::INFINITY
            } else {
                let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (r - 1) as f64;
                (var / r as f64).sqrt()
            };
            return Self {
                mean,
                stderr,
                replicas: r as u64,
                batches: 1,
            };
        }
        let means: Vec<f64> = (0..b)
            .map(|i| {
                let chunk = &xs[i * r / b..(i + 1) * r / b];
                chunk.iter().sum::<f64>() / chunk.len() as f64
            })
            .collect();
        let bm = means.iter().sum::<f64>() / b as f64;
        let var = means.iter().map(|m| (m - bm) * (m - bm)).sum::<f64>() / (b - 1) as f64;
        Self {
            mean,
            stderr: (var / b as f64).sqrt(),
            replicas: r as u64,
            batches: b as u64,
        }
    }

    /// `|mean - target| <= k * stderr + slack`.
    pub fn agrees_with(&self, target: f64, k: f64, slack: f64) -> bool {
        (self.mean - target).abs() <= k * self.stderr + slack
    }
}

/// Pearson statistic for two samples of category counts, and its degrees of freedom.
/// Categories empty in both samples are skipped.
pub fn chi_square_homogeneity(a: &[u64], b: &[u64]) -> (f64, usize) {
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    let n = (na + nb) as f64;
    let mut stat = 0.0;
    let mut cats = 0usize;
    for (&x, &y) in a.iter().zip(b) {
        let tot = (x + y) as f64;
        if tot == 0.0 {
            continue;
        }
        cats += 1;
        let ea = tot * na as f64 / n;
        let eb = tot * nb as f64 / n;
        stat += (x as f64 - ea).powi(2) / ea + (y as f64 - eb).powi(2) / eb;
    }
    (stat, cats.saturating_sub(1))
}

/// Least-squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
