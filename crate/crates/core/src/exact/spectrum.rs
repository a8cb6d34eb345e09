use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::generator::{Flavor, SparseGenerator, DENSE_MAX_LEN};
use crate::error::{Error, Result};
use crate::linalg::{dot, lanczos_largest, norm, scrambled_start, symmetric_eigen, LanczosOptions};
use crate::model::ModelParams;

/// `(2 log 2)^{-1}`.
pub const GAP_EXPONENT: f64 = 0.721_347_520_444_481_7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Dense,
    Iterative,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub gap: f64,
    /// Largest eigenvalue, zero up to rounding.
    pub top: f64,
    /// `[top, -gap]`.
    pub leading: Vec<f64>,
    /// `‖(S + gap) v‖₂` for the symmetrised generator `S` and unit `v`.
    pub residual: f64,
    pub method: Method,
}

fn residual(gen: &SparseGenerator, v: &[f64], value: f64) -> f64 {
    let mut w = vec![0.0; v.len()];
    gen.apply_symmetric(v, &mut w);
    for (wi, vi) in w.iter_mut().zip(v) {
        *wi -= value * vi;
    }
    norm(&w) / norm(v)
}

pub fn spectral_gap(gen: &SparseGenerator) -> Result<SpectrumResult> {
    if gen.flavor() != Flavor::Plain {
        return Err(Error::Precondition("spectral gap needs the plain generator".into()));
    }
    let n = gen.states();
    if gen.len() <= DENSE_MAX_LEN {
        let (vals, vecs) = symmetric_eigen(gen.to_dense_symmetric());
        let v: Vec<f64> = vecs.column(1).iter().copied().collect();
        let gap = -vals[1];
        return Ok(SpectrumResult {
            gap,
            top: vals[0],
            leading: vec![vals[0], vals[1]],
            residual: residual(gen, &v, vals[1]),
            method: Method::Dense,
        });
    }
    let ground = gen.sqrt_pi().to_vec();
    let mut w = vec![0.0; n];
    gen.apply_symmetric(&ground, &mut w);
    let top = dot(&ground, &w);
    let pair = lanczos_largest(
        n,
        |x, y| gen.apply_symmetric(x, y),
        &scrambled_start(n),
        &[ground],
        LanczosOptions::for_size(n),
    )?;
    Ok(SpectrumResult {
        gap: -pair.value,
        top,
        leading: vec![top, pair.value],
        residual: residual(gen, &pair.vector, pair.value),
        method: Method::Iterative,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopEigen {
    pub value: f64,
    pub residual: f64,
    pub method: Method,
    /// Eigenvector of the symmetrised operator.
    pub vector: Vec<f64>,
}

/// Largest eigenvalue of any flavor.
pub fn top_eigen(gen: &SparseGenerator) -> Result<TopEigen> {
    let n = gen.states();
    if gen.len() <= DENSE_MAX_LEN {
        let (vals, vecs) = symmetric_eigen(gen.to_dense_symmetric());
        let v: Vec<f64> = vecs.column(0).iter().copied().collect();
        return Ok(TopEigen {
            value: vals[0],
            residual: residual(gen, &v, vals[0]),
            method: Method::Dense,
            vector: v,
        });
    }
    // the stationary vector is a good start for every tilt
    let pair = lanczos_largest(
        n,
        |x, y| gen.apply_symmetric(x, y),
        gen.sqrt_pi(),
        &[],
        LanczosOptions::for_size(n),
    )?;
    Ok(TopEigen {
        value: pair.value,
        residual: residual(gen, &pair.vector, pair.value),
        method: Method::Iterative,
        vector: pair.vector,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AsymptoticsRow {
    pub q: f64,
    pub len: usize,
    pub gap: f64,
    pub check_len: usize,
    pub check_gap: f64,
    /// `|gap(len) - gap(check_len)| <= tol · gap(len)`.
    pub saturated: bool,
    /// `log(1/gap) / log(1/q)^2`.
    pub ratio: f64,
}

/// Ratio table along `qs`, each row compared with a smaller window for saturation.
pub fn gap_asymptotics_check(
    qs: &[f64],
    schedule: impl Fn(f64) -> (usize, usize),
    saturation_tol: f64,
) -> Result<Vec<AsymptoticsRow>> {
    qs.iter()
        .map(|&q| {
            let params = ModelParams::new(q)?;
            let (len, check_len) = schedule(q);
            let gap = spectral_gap(&SparseGenerator::build(len, &params, Flavor::Plain)?)?.gap;
            let check_gap = spectral_gap(&SparseGenerator::build(check_len, &params, Flavor::Plain)?)?.gap;
            let l = (1.0 / q).ln();
            Ok(AsymptoticsRow {
                q,
                len,
                gap,
                check_len,
                check_gap,
                saturated: (gap - check_gap).abs() <= saturation_tol * gap,
                ratio: (1.0 / gap).ln() / (l * l),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix4;

    fn plain(len: usize, q: f64) -> SparseGenerator {
        SparseGenerator::build(len, &ModelParams::new(q).unwrap(), Flavor::Plain).unwrap()
    }

    #[test]
    fn single_site_gap_is_one() {
        for q in [0.1, 0.5, 0.9] {
            let r = spectral_gap(&plain(1, q)).unwrap();
            assert!((r.gap - 1.0).abs() < 1e-12);
            assert!(r.top.abs() < 1e-12);
        }
    }

    #[test]
    fn two_site_gap_matches_characteristic_polynomial() {
        // roots of det(K - x I) for the 4x4 generator, located by bisection
        let (p, q) = (0.5, 0.5);
        // states by bit: 0 = both empty, 1 = site 0 occupied, 2 = site 1 occupied, 3 = both
        #[rustfmt::skip]
        let m = Matrix4::new(
            -2.0 * p, p,        p,   0.0,
            q,        -(q + p), 0.0, p,
            q,        0.0,      -q,  0.0,
            0.0,      q,        0.0, -q,
        );
        let g = plain(2, 0.5);
        for i in 0..4 {
            for j in 0..4 {
                assert!((g.entry(i, j) - m[(i, j)]).abs() < 1e-15, "{i} {j}");
            }
        }
        let det = |x: f64| (m - Matrix4::identity() * x).determinant();
        let mut roots = Vec::new();
        let grid: Vec<f64> = (0..=4000).map(|i| -3.0 + i as f64 * 0.00075).collect();
        for w in grid.windows(2) {
            let (mut a, mut b) = (w[0], w[1]);
            if det(a) * det(b) <= 0.0 {
                for _ in 0..200 {
                    let c = 0.5 * (a + b);
                    if det(a) * det(c) <= 0.0 {
                        b = c;
                    } else {
                        a = c;
                    }
                }
                roots.push(0.5 * (a + b));
            }
        }
        roots.sort_by(|a, b| b.total_cmp(a));
        roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        let r = spectral_gap(&g).unwrap();
        assert!(roots[0].abs() < 1e-10);
        assert!((r.gap + roots[1]).abs() < 1e-10, "{roots:?} {}", r.gap);
    }

    #[test]
    fn iterative_matches_dense() {
        let g = plain(10, 0.3);
        let dense = spectral_gap(&g).unwrap();
        let n = g.states();
        let pair = lanczos_largest(
            n,
            |x, y| g.apply_symmetric(x, y),
            &scrambled_start(n),
            &[g.sqrt_pi().to_vec()],
            LanczosOptions::for_size(n),
        )
        .unwrap();
        assert!((dense.gap + pair.value).abs() < 1e-9);
        assert!(dense.residual < 1e-10);
    }

    #[test]
    fn gap_is_monotone_in_length() {
        for q in [0.2, 0.5] {
            let gaps: Vec<f64> = (1..=9).map(|l| spectral_gap(&plain(l, q)).unwrap().gap).collect();
            for w in gaps.windows(2) {
                assert!(w[1] <= w[0] + 1e-10);
            }
        }
    }

    #[test]
    fn exponent_constant() {
        assert!((GAP_EXPONENT - 1.0 / (2.0 * 2f64.ln())).abs() < 1e-15);
    }
}
