//! Configurations, the product measure and the time scales of the coarsening regime.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit_open, Error, Result};

/// Vacancy density `q`. The occupancy probability `p` is always derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    q: f64,
}

impl ModelParams {
    pub fn new(q: f64) -> Result<Self> {
        check_unit_open("q", q)?;
        Ok(Self { q })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn p(&self) -> f64 {
        1.0 - self.q
    }

    /// Equilibrium probability of a single site value.
    pub fn site_weight(&self, occupied: bool) -> f64 {
        if occupied {
            self.p()
        } else {
            self.q
        }
    }

    /// Rate at which an unconstrained site leaves its current value.
    pub fn flip_rate(&self, occupied: bool) -> f64 {
        if occupied {
            self.q
        } else {
            self.p()
        }
    }

    pub fn min_pq(&self) -> f64 {
        self.q.min(self.p())
    }
}

/// Integer interval `[a, b]`, both ends included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    a: i64,
    b: i64,
}

impl Interval {
    pub fn new(a: i64, b: i64) -> Result<Self> {
        if a > b {
            return Err(Error::EmptyInterval { a, b });
        }
        Ok(Self { a, b })
    }

    /// `[0, len - 1]`.
    pub fn from_len(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::EmptyInterval { a: 0, b: -1 });
        }
        Ok(Self {
            a: 0,
            b: len as i64 - 1,
        })
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn len(&self) -> usize {
        (self.b - self.a + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: i64) -> bool {
        self.a <= x && x <= self.b
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> {
        self.a..=self.b
    }

    pub(crate) fn check(&self, x: i64) -> Result<usize> {
        if self.contains(x) {
            Ok((x - self.a) as usize)
        } else {
            Err(Error::SiteOutsideWindow {
                site: x,
                a: self.a,
                b: self.b,
            })
        }
    }
}

/// How sites outside the window are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Boundary {
    /// `σ(b+1) = 0` forever; nothing else outside the window is ever read.
    FrozenZeroRight,
    /// `σ(b+1) = 0` and every other site outside the window is occupied.
    EmbeddedInZ,
}

/// Occupancy values on a window, 64 sites per word with bit `x - a` holding `σ(x)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    window: Interval,
    words: Vec<u64>,
    boundary: Boundary,
}

impl Configuration {
    pub fn filled(window: Interval, boundary: Boundary) -> Self {
        let len = window.len();
        let mut words = vec![u64::MAX; len.div_ceil(64)];
        let rem = len % 64;
        if rem != 0 {
            *words.last_mut().unwrap() = (1u64 << rem) - 1;
        }
        Self {
            window,
            words,
            boundary,
        }
    }

    pub fn empty(window: Interval, boundary: Boundary) -> Self {
        Self {
            window,
            words: vec![0; window.len().div_ceil(64)],
            boundary,
        }
    }

    pub fn from_fn(window: Interval, boundary: Boundary, mut f: impl FnMut(i64) -> bool) -> Self {
        let mut c = Self::empty(window, boundary);
        for (i, x) in window.sites().enumerate() {
            if f(x) {
                c.words[i / 64] |= 1 << (i % 64);
            }
        }
        c
    }

    /// Decode the `exact` state index. Windows longer than 64 sites have no index.
    pub fn from_index(window: Interval, boundary: Boundary, index: u64) -> Result<Self> {
        let len = window.len();
        if len > 64 {
            return Err(Error::UnsupportedSize {
                got: len,
                min: 1,
                max: 64,
            });
        }
        let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
        Ok(Self {
            window,
            words: vec![index & mask],
            boundary,
        })
    }

    pub fn index(&self) -> Option<u64> {
        (self.window.len() <= 64).then(|| self.words[0])
    }

    /// Configuration whose zeros are exactly `zeros` (all inside the window).
    pub fn from_zeros(window: Interval, boundary: Boundary, zeros: &[i64]) -> Result<Self> {
        let mut c = Self::filled(window, boundary);
        for &z in zeros {
            c.set(z, false)?;
        }
        Ok(c)
    }

    pub fn from_occupancy(window: Interval, boundary: Boundary, bits: &[u8]) -> Result<Self> {
        if bits.len() != window.len() {
            return Err(Error::SizeMismatch {
                expected: window.len(),
                got: bits.len(),
            });
        }
        let a = window.a();
        Ok(Self::from_fn(window, boundary, |x| bits[(x - a) as usize] != 0))
    }

    pub fn window(&self) -> Interval {
        self.window
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn len(&self) -> usize {
        self.window.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn bit(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn get(&self, x: i64) -> Result<bool> {
        let i = self.window.check(x)?;
        Ok(self.bit(i))
    }

    /// Value anywhere on the line, following the boundary rule.
    pub fn read(&self, x: i64) -> Option<bool> {
        if self.window.contains(x) {
            return Some(self.bit((x - self.window.a()) as usize));
        }
        if x == self.window.b() + 1 {
            return Some(false);
        }
        match self.boundary {
            Boundary::FrozenZeroRight => None,
            Boundary::EmbeddedInZ => Some(true),
        }
    }

    pub fn set(&mut self, x: i64, occupied: bool) -> Result<()> {
        let i = self.window.check(x)?;
        if occupied {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
        Ok(())
    }

    pub fn flip(&mut self, x: i64) -> Result<()> {
        let i = self.window.check(x)?;
        self.words[i / 64] ^= 1 << (i % 64);
        Ok(())
    }

    /// `c_x = 1 - σ(x+1)`, with the frozen zero at `b + 1`.
    pub fn constraint(&self, x: i64) -> Result<bool> {
        self.window.check(x)?;
        Ok(x == self.window.b() || !self.bit((x + 1 - self.window.a()) as usize))
    }

    pub fn zeros(&self) -> Vec<i64> {
        self.window
            .sites()
            .enumerate()
            .filter(|&(i, _)| !self.bit(i))
            .map(|(_, x)| x)
            .collect()
    }

    pub fn occupancy(&self) -> Vec<u8> {
        (0..self.len()).map(|i| self.bit(i) as u8).collect()
    }

    pub fn count_occupied(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Independent sites, each occupied with probability `occupancy`.
pub fn sample_bernoulli_product<R: Rng + ?Sized>(
    occupancy: f64,
    window: Interval,
    boundary: Boundary,
    rng: &mut R,
) -> Result<Configuration> {
    check_unit_open("density", occupancy)?;
    Ok(Configuration::from_fn(window, boundary, |_| {
        rng.random_bool(occupancy)
    }))
}

/// Draw from the reversible measure `π`.
pub fn sample_equilibrium<R: Rng + ?Sized>(
    params: &ModelParams,
    window: Interval,
    boundary: Boundary,
    rng: &mut R,
) -> Configuration {
    let p = params.p();
    Configuration::from_fn(window, boundary, |_| rng.random_bool(p))
}

/// The time scales `t_n = (1/q)^n` and the active/stalling windows around them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeScale {
    epsilon: f64,
    q: f64,
}

impl TimeScale {
    pub const DEFAULT_EPSILON: f64 = 0.1;

    pub fn new(epsilon: f64, q: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::OutOfRange {
                name: "epsilon",
                value: epsilon,
                expected: "(0, 1/2)",
            });
        }
        check_unit_open("q", q)?;
        Ok(Self { epsilon, q })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn t(&self, n: u32) -> f64 {
        (1.0 / self.q).powi(n as i32)
    }

    pub fn t_minus(&self, n: u32) -> f64 {
        if n == 0 {
            0.0
        } else {
            (1.0 / self.q).powf(n as f64 * (1.0 - self.epsilon))
        }
    }

    pub fn t_plus(&self, n: u32) -> f64 {
        if n == 0 {
            (1.0 / self.q).powf(self.epsilon)
        } else {
            (1.0 / self.q).powf(n as f64 * (1.0 + self.epsilon))
        }
    }

    /// `[t_n⁻, t_n⁺]`.
    pub fn active_period(&self, n: u32) -> (f64, f64) {
        (self.t_minus(n), self.t_plus(n))
    }

    /// `[t_n⁺, t_{n+1}⁻]`.
    pub fn stalling_period(&self, n: u32) -> (f64, f64) {
        (self.t_plus(n), self.t_minus(n + 1))
    }

    /// `t_n⁻ < t_n < t_n⁺ < t_{n+1}⁻` for every `1 <= n <= n_max`.
    ///
    /// The last inequality needs `ε (2n + 1) < 1`, so large `n` eventually fails.
    pub fn is_ordered(&self, n_max: u32) -> bool {
        (1..=n_max).all(|n| {
            self.t_minus(n) < self.t(n)
                && self.t(n) < self.t_plus(n)
                && self.t_plus(n) < self.t_minus(n + 1)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constraint_all_occupied_frozen_right() {
        let w = Interval::new(0, 9).unwrap();
        let c = Configuration::filled(w, Boundary::FrozenZeroRight);
        assert!(c.constraint(9).unwrap());
        for x in 0..9 {
            assert!(!c.constraint(x).unwrap());
        }
        assert!(c.constraint(10).is_err());
    }

    #[test]
    fn constraint_follows_right_neighbour() {
        let w = Interval::new(-3, 3).unwrap();
        let c = Configuration::from_zeros(w, Boundary::EmbeddedInZ, &[1]).unwrap();
        assert!(c.constraint(0).unwrap());
        assert!(!c.constraint(1).unwrap());
        assert_eq!(c.read(4), Some(false));
        assert_eq!(c.read(-4), Some(true));
        assert_eq!(c.read(5), Some(true));
        let f = Configuration::from_zeros(w, Boundary::FrozenZeroRight, &[1]).unwrap();
        assert_eq!(f.read(5), None);
    }

    #[test]
    fn params_reject_degenerate_q() {
        assert!(ModelParams::new(0.0).is_err());
        assert!(ModelParams::new(1.0).is_err());
        assert!(ModelParams::new(f64::NAN).is_err());
        let m = ModelParams::new(0.3).unwrap();
        assert_eq!(m.p() + m.q(), 1.0);
    }

    #[test]
    fn bernoulli_density_and_domain() {
        let w = Interval::new(0, 9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_bernoulli_product(1.0, w, Boundary::FrozenZeroRight, &mut rng).is_err());
        let draws = 100_000;
        let mut occ = 0usize;
        for _ in 0..draws {
            let c = sample_bernoulli_product(0.7, w, Boundary::FrozenZeroRight, &mut rng).unwrap();
            occ += c.get(0).unwrap() as usize;
        }
        let mean = occ as f64 / draws as f64;
        let se = (0.7 * 0.3 / draws as f64).sqrt();
        assert!((mean - 0.7).abs() < 3.0 * se, "{mean}");
    }

    #[test]
    fn bernoulli_pairs_uncorrelated() {
        let w = Interval::new(0, 19).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 100_000;
        let (mut s3, mut s7, mut s37) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let c = sample_bernoulli_product(0.5, w, Boundary::FrozenZeroRight, &mut rng).unwrap();
            let a = c.get(3).unwrap() as u8 as f64;
            let b = c.get(7).unwrap() as u8 as f64;
            s3 += a;
            s7 += b;
            s37 += a * b;
        }
        let nf = n as f64;
        let cov = s37 / nf - (s3 / nf) * (s7 / nf);
        // the product of two fair bits has variance 3/16
        let se = (3.0f64 / 16.0 / nf).sqrt();
        assert!(cov.abs() < 3.0 * se, "{cov}");
    }

    #[test]
    fn index_matches_bit_layout() {
        let w = Interval::new(5, 8).unwrap();
        let c = Configuration::from_zeros(w, Boundary::FrozenZeroRight, &[5, 7]).unwrap();
        assert_eq!(c.index(), Some(0b1010));
        let back = Configuration::from_index(w, Boundary::FrozenZeroRight, 0b1010).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn time_scale_endpoints() {
        let ts = TimeScale::new(0.1, 0.05).unwrap();
        assert_eq!(ts.t(0), 1.0);
        assert_eq!(ts.t_minus(0), 0.0);
        assert!((ts.t_plus(0) - 20f64.powf(0.1)).abs() < 1e-12);
        assert!((ts.t(2) - 400.0).abs() < 1e-9);
        assert!(ts.is_ordered(4));
        assert!(!ts.is_ordered(5));
        assert!(TimeScale::new(0.5, 0.05).is_err());
    }

    proptest! {
        #[test]
        fn zero_set_round_trip(bits in proptest::collection::vec(any::<bool>(), 1..200), a in -50i64..50) {
            let w = Interval::new(a, a + bits.len() as i64 - 1).unwrap();
            let c = Configuration::from_fn(w, Boundary::EmbeddedInZ, |x| bits[(x - a) as usize]);
            let z = c.zeros();
            let back = Configuration::from_zeros(w, Boundary::EmbeddedInZ, &z).unwrap();
            prop_assert_eq!(back, c.clone());
            prop_assert_eq!(c.count_occupied() + z.len(), bits.len());
        }

        #[test]
        fn time_scale_ordered(q in 0.01f64..0.5, eps in 0.005f64..0.49, n_max in 1u32..8) {
            let ts = TimeScale::new(eps, q).unwrap();
            let expected = eps * ((2 * n_max + 1) as f64) < 1.0;
            prop_assert_eq!(ts.is_ordered(n_max), expected);
        }
    }
}
