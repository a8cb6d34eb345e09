use alloc::vec::Vec;
use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use super::generator::{SparseGenerator, DENSE_MAX_LEN};
use crate::error::{Error, Result};

/// `e^M` by scaling and squaring with a Taylor core.
pub fn expm(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let norm = (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = m * scale;
    let mut term = DMatrix::identity(n, n);
    let mut sum = DMatrix::identity(n, n);
    for k in 1..=20 {
        term = &term * &a / k as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `P_t f = e^{tK} f` for a generator of at most the dense size.
pub fn semigroup_apply(gen: &SparseGenerator, t: f64, f: &[f64]) -> Result<Vec<f64>> {
    if gen.len() > DENSE_MAX_LEN {
        return Err(Error::UnsupportedSize {
            got: gen.len(),
            min: 0,
            max: DENSE_MAX_LEN,
        });
    }
    if f.len() != gen.states() {
        return Err(Error::SizeMismatch {
            expected: gen.states(),
            got: f.len(),
        });
    }
    let e = expm(&(gen.to_dense() * t));
    Ok((0..f.len())
        .map(|i| (0..f.len()).map(|j| e[(i, j)] * f[j]).sum())
        .collect())
}
