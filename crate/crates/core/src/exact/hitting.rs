use alloc::vec::Vec;
use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::generator::{Flavor, SparseGenerator, DENSE_MAX_LEN};
use super::spectrum::spectral_gap;
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;
use crate::model::ModelParams;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HittingCheck {
    pub times: Vec<f64>,
    /// `P_π(τ_A > t)` from the killed generator on `A^c`.
    pub survival: Vec<f64>,
    /// `exp(-t · gap · π(A))`.
    pub bound: Vec<f64>,
    pub gap: f64,
    pub pi_a: f64,
    pub holds: bool,
}

/// Exact survival of `τ_A` under the stationary start, via the sub-Markov
/// generator restricted to `A^c`.
pub fn hitting_survival(
    len: usize,
    params: &ModelParams,
    target: impl Fn(usize) -> bool,
    times: &[f64],
    tol: f64,
) -> Result<HittingCheck> {
    if len == 0 || len > DENSE_MAX_LEN {
        return Err(Error::UnsupportedSize {
            got: len,
            min: 1,
            max: DENSE_MAX_LEN,
        });
    }
    let gen = SparseGenerator::build(len, params, Flavor::Plain)?;
    let gap = spectral_gap(&gen)?.gap;
    let outside: Vec<usize> = (0..gen.states()).filter(|&s| !target(s)).collect();
    let pi = gen.pi();
    let pi_a: f64 = (0..gen.states()).filter(|&s| target(s)).map(|s| pi[s]).sum();
    if pi_a <= 0.0 {
        return Err(Error::Precondition("target event has zero probability".into()));
    }
    let m = outside.len();
    let mut survival = Vec::with_capacity(times.len());
    if m == 0 {
        survival.resize(times.len(), 0.0);
    } else {
        let sq = gen.sqrt_pi();
        let mut s = DMatrix::from_fn(m, m, |i, j| {
            let (a, b) = (outside[i], outside[j]);
            gen.entry(a, b) * sq[a] / sq[b]
        });
        s = (&s + s.transpose()) * 0.5;
        let (vals, vecs) = symmetric_eigen(s);
        // P_π(τ > t) = ⟨√π, e^{tS} √π⟩ restricted to A^c
        let proj: Vec<f64> = (0..m)
            .map(|k| (0..m).map(|i| vecs[(i, k)] * sq[outside[i]]).sum())
            .collect();
        for &t in times {
            survival.push(
                vals.iter()
                    .zip(&proj)
                    .map(|(v, c)| c * c * (t * v).exp())
                    .sum(),
            );
        }
    }
    let bound: Vec<f64> = times.iter().map(|t| (-t * gap * pi_a).exp()).collect();
    let holds = survival.iter().zip(&bound).all(|(s, b)| *s <= b + tol);
    Ok(HittingCheck {
        times: times.to_vec(),
        survival,
        bound,
        gap,
        pi_a,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::semigroup::expm;

    #[test]
    fn first_site_empty_bound() {
        for q in [0.2, 0.5, 0.8] {
            let params = ModelParams::new(q).unwrap();
            for len in 1..=8 {
                let c = hitting_survival(len, &params, |s| s & 1 == 0, &[1.0, 2.0, 5.0], 1e-10).unwrap();
                assert!((c.pi_a - q).abs() < 1e-12);
                assert!(c.holds, "{q} {len} {c:?}");
            }
        }
    }

    #[test]
    fn matches_matrix_exponential() {
        let params = ModelParams::new(0.35).unwrap();
        let len = 4;
        let gen = SparseGenerator::build(len, &params, Flavor::Plain).unwrap();
        let target = |s: usize| s == 0b1010;
        let c = hitting_survival(len, &params, target, &[0.7], 0.0).unwrap();
        let outside: Vec<usize> = (0..16).filter(|&s| !target(s)).collect();
        let k = DMatrix::from_fn(15, 15, |i, j| gen.entry(outside[i], outside[j]) * 0.7);
        let e = expm(&k);
        let mut total = 0.0;
        for i in 0..15 {
            for j in 0..15 {
                total += gen.pi()[outside[i]] * e[(i, j)];
            }
        }
        assert!((total - c.survival[0]).abs() < 1e-12);
    }

    #[test]
    fn whole_space_target_is_hit_at_once() {
        let params = ModelParams::new(0.5).unwrap();
        let c = hitting_survival(3, &params, |_| true, &[0.5], 0.0).unwrap();
        assert_eq!(c.survival, [0.0]);
    }
}
