//! Renewal initial laws: a zero at the origin followed by i.i.d. gaps.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Boundary, Configuration, Interval};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RenewalKind {
    PointMass(u64),
    /// `μ(k) = r (1 - r)^(k-1)`, mean `1 / r`.
    Geometric(f64),
    Table,
    /// `μ(k) = k^-α - (k+1)^-α`, with the tail beyond `cutoff` lumped into `μ(cutoff)`.
    ParetoTail { alpha: f64, cutoff: u64 },
}

/// Gap law `μ` on `{1, 2, ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenewalLaw {
    kind: RenewalKind,
    // pmf[k - 1] = μ(k), only for table-backed kinds
    pmf: Vec<f64>,
    cdf: Vec<f64>,
}

impl RenewalLaw {
    pub fn point_mass(d: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::Precondition("point mass must sit at d >= 1".into()));
        }
        Ok(Self {
            kind: RenewalKind::PointMass(d),
            pmf: Vec::new(),
            cdf: Vec::new(),
        })
    }

    pub fn geometric(r: f64) -> Result<Self> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::OutOfRange {
                name: "r",
                value: r,
                expected: "(0, 1]",
            });
        }
        Ok(Self {
            kind: RenewalKind::Geometric(r),
            pmf: Vec::new(),
            cdf: Vec::new(),
        })
    }

    pub fn geometric_with_mean(mean: f64) -> Result<Self> {
        if !(mean >= 1.0) {
            return Err(Error::OutOfRange {
                name: "mean",
                value: mean,
                expected: "[1, inf)",
            });
        }
        Self::geometric(1.0 / mean)
    }

    /// `weights[k - 1]` is proportional to `μ(k)`.
    pub fn table(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Precondition("weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::Precondition("weights sum to zero".into()));
        }
        let pmf: Vec<f64> = weights.iter().map(|w| w / total).collect();
        Ok(Self::from_pmf(RenewalKind::Table, pmf))
    }

    pub fn pareto(alpha: f64, cutoff: u64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: alpha,
                expected: "(0, 1]",
            });
        }
        if cutoff == 0 {
            return Err(Error::Precondition("cutoff must be >= 1".into()));
        }
        let tail = |k: u64| (k as f64).powf(-alpha);
        let mut pmf: Vec<f64> = (1..cutoff).map(|k| tail(k) - tail(k + 1)).collect();
        pmf.push(tail(cutoff));
        Ok(Self::from_pmf(RenewalKind::ParetoTail { alpha, cutoff }, pmf))
    }

    fn from_pmf(kind: RenewalKind, pmf: Vec<f64>) -> Self {
        let mut acc = 0.0;
        let cdf = pmf
            .iter()
            .map(|m| {
                acc += m;
                acc
            })
            .collect();
        Self { kind, pmf, cdf }
    }

    pub fn kind(&self) -> &RenewalKind {
        &self.kind
    }

    pub fn pmf(&self, k: u64) -> f64 {
        if k == 0 {
            return 0.0;
        }
        match self.kind {
            RenewalKind::PointMass(d) => (k == d) as u8 as f64,
            RenewalKind::Geometric(r) => r * (1.0 - r).powi((k - 1) as i32),
            _ => self.pmf.get((k - 1) as usize).copied().unwrap_or(0.0),
        }
    }

    pub fn d_min(&self) -> u64 {
        match self.kind {
            RenewalKind::PointMass(d) => d,
            RenewalKind::Geometric(_) | RenewalKind::ParetoTail { .. } => 1,
            RenewalKind::Table => self.pmf.iter().position(|&m| m > 0.0).unwrap() as u64 + 1,
        }
    }

    /// Exponent class: 1 for finite-mean laws, `α` for heavy tails.
    pub fn c0(&self) -> f64 {
        match self.kind {
            RenewalKind::ParetoTail { alpha, .. } => alpha,
            _ => 1.0,
        }
    }

    /// Smallest `n` with `d_min <= 2^n`.
    pub fn n_d(&self) -> u32 {
        scale_index(self.d_min())
    }

    /// Mean gap of the law as stored (Pareto tables are truncated, hence finite).
    pub fn mean(&self) -> f64 {
        match self.kind {
            RenewalKind::PointMass(d) => d as f64,
            RenewalKind::Geometric(r) => 1.0 / r,
            _ => self
                .pmf
                .iter()
                .enumerate()
                .map(|(i, m)| (i + 1) as f64 * m)
                .sum(),
        }
    }

    pub fn total_mass(&self) -> f64 {
        match self.kind {
            RenewalKind::PointMass(_) | RenewalKind::Geometric(_) => 1.0,
            _ => *self.cdf.last().unwrap(),
        }
    }

    /// `u(x)`: probability that `x >= 0` is a renewal point, `u(0) = 1`.
    pub fn renewal_probability(&self, x: u64) -> f64 {
        let mut u = Vec::with_capacity(x as usize + 1);
        u.push(1.0);
        for y in 1..=x {
            let v: f64 = (1..=y).map(|k| self.pmf(k) * u[(y - k) as usize]).sum();
            u.push(v);
        }
        u[x as usize]
    }

    pub fn sample_gap<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match self.kind {
            RenewalKind::PointMass(d) => d,
            RenewalKind::Geometric(r) => {
                if r >= 1.0 {
                    return 1;
                }
                let u: f64 = 1.0 - rng.random::<f64>();
                1 + (u.ln() / (1.0 - r).ln()).floor().min(u64::MAX as f64 / 2.0) as u64
            }
            _ => {
                let u = rng.random::<f64>() * self.total_mass();
                let i = self.cdf.partition_point(|&c| c <= u);
                i.min(self.cdf.len() - 1) as u64 + 1
            }
        }
    }
}

/// Smallest `n >= 0` with `d <= 2^n`, i.e. `d ∈ [2^(n-1) + 1, 2^n]` for `d >= 2`.
pub fn scale_index(d: u64) -> u32 {
    let mut n = 0;
    while (1u128 << n) < d as u128 {
        n += 1;
    }
    n
}

/// Zero at 0, then zeros at cumulative sums of i.i.d. gaps, everything else
/// occupied (in particular every site left of the origin).
pub fn sample_renewal<R: Rng + ?Sized>(
    mu: &RenewalLaw,
    window: Interval,
    boundary: Boundary,
    rng: &mut R,
) -> Result<Configuration> {
    if !window.contains(0) {
        return Err(Error::Precondition(format!(
            "renewal window must contain the origin, got [{}, {}]",
            window.a(),
            window.b()
        )));
    }
    let mut c = Configuration::filled(window, boundary);
    let mut x: u64 = 0;
    let b = window.b() as u64;
    while x <= b {
        c.set(x as i64, false)?;
        x = x.saturating_add(mu.sample_gap(rng));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn point_mass_places_deterministic_zeros() {
        let mu = RenewalLaw::point_mass(3).unwrap();
        let w = Interval::new(0, 9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let c = sample_renewal(&mu, w, Boundary::EmbeddedInZ, &mut rng).unwrap();
        assert_eq!(c.zeros(), [0, 3, 6, 9]);
        assert_eq!(c.boundary(), Boundary::EmbeddedInZ);
    }

    #[test]
    fn left_of_origin_is_filled() {
        let mu = RenewalLaw::point_mass(3).unwrap();
        let w = Interval::new(-3, 7).unwrap();
        let c = sample_renewal(&mu, w, Boundary::FrozenZeroRight, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(c.zeros(), [0, 3, 6]);
    }

    #[test]
    fn renewal_probability_values() {
        // geometric with mean 2 makes every positive site a renewal point with probability 1/2
        let mu = RenewalLaw::geometric(0.5).unwrap();
        for x in 1..10 {
            assert!((mu.renewal_probability(x) - 0.5).abs() < 1e-12);
        }
        let d = RenewalLaw::point_mass(3).unwrap();
        assert_eq!(d.renewal_probability(6), 1.0);
        assert_eq!(d.renewal_probability(4), 0.0);
    }

    #[test]
    fn rejects_window_off_origin() {
        let mu = RenewalLaw::point_mass(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_renewal(&mu, Interval::new(1, 5).unwrap(), Boundary::EmbeddedInZ, &mut rng).is_err());
    }

    #[test]
    fn geometric_mean_gap() {
        let mu = RenewalLaw::geometric_with_mean(2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| mu.sample_gap(&mut rng) as f64).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - 2.0).abs() < 3.0 * (var / n as f64).sqrt(), "{mean}");
    }

    #[test]
    fn scale_index_values() {
        assert_eq!(scale_index(1), 0);
        assert_eq!(scale_index(2), 1);
        assert_eq!(scale_index(3), 2);
        assert_eq!(scale_index(4), 2);
        assert_eq!(scale_index(5), 3);
        assert_eq!(RenewalLaw::point_mass(3).unwrap().n_d(), 2);
    }

    #[test]
    fn pareto_sums_to_one_and_has_heavy_class() {
        let mu = RenewalLaw::pareto(0.5, 500).unwrap();
        assert!((mu.total_mass() - 1.0).abs() < 1e-12);
        assert_eq!(mu.c0(), 0.5);
        assert!((mu.pmf(1) - (1.0 - 0.5f64.sqrt())).abs() < 1e-15);
        assert_eq!(RenewalLaw::geometric(0.3).unwrap().c0(), 1.0);
    }

    #[test]
    fn table_is_normalised() {
        let mu = RenewalLaw::table(&[0.0, 2.0, 6.0]).unwrap();
        assert_eq!(mu.d_min(), 2);
        assert!((mu.pmf(3) - 0.75).abs() < 1e-15);
        assert!(RenewalLaw::table(&[0.0, 0.0]).is_err());
        assert!(RenewalLaw::table(&[-1.0, 2.0]).is_err());
    }

    proptest! {
        #[test]
        fn point_mass_translation_invariant(d in 1u64..8, len in 1usize..80, seed in any::<u64>()) {
            let mu = RenewalLaw::point_mass(d).unwrap();
            let w = Interval::from_len(len).unwrap();
            let c = sample_renewal(&mu, w, Boundary::EmbeddedInZ, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            for x in 0..(len as i64 - d as i64) {
                prop_assert_eq!(c.get(x).unwrap(), c.get(x + d as i64).unwrap());
            }
        }

        #[test]
        fn table_pmf_sums_to_one(ws in proptest::collection::vec(0.0f64..10.0, 1..40)) {
            prop_assume!(ws.iter().sum::<f64>() > 0.0);
            let mu = RenewalLaw::table(&ws).unwrap();
            let s: f64 = (1..=ws.len() as u64).map(|k| mu.pmf(k)).sum();
            prop_assert!((s - 1.0).abs() < 1e-12);
        }

        #[test]
        fn samples_stay_in_support(alpha in 0.05f64..1.0, cutoff in 1u64..300, seed in any::<u64>()) {
            let mu = RenewalLaw::pareto(alpha, cutoff).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..50 {
                let g = mu.sample_gap(&mut rng);
                prop_assert!(g >= 1 && g <= cutoff);
            }
        }
    }
}
