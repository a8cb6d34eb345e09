use alloc::vec::Vec;
use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::generator::pi_weight;
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;
use crate::model::ModelParams;

/// `Λ = B₁ ∪ B₂` with `B₁` on the left; the strip `I` is the leftmost
/// `overlap` sites of `B₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSplit {
    pub left: usize,
    pub right: usize,
    pub overlap: usize,
}

impl BlockSplit {
    pub fn len(&self) -> usize {
        self.left + self.right
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self) -> Result<()> {
        if self.overlap == 0 {
            return Err(Error::Precondition("strip I must be nonempty".into()));
        }
        if self.left == 0 || self.overlap > self.right || self.len() > 12 {
            return Err(Error::Precondition(
                "need 1 <= |B1|, 1 <= |I| <= |B2| and |Λ| <= 12".into(),
            ));
        }
        Ok(())
    }
}

/// `-1 + √(1 - π(c₁))` with `π(c₁) = 1 - p^|I|`.
pub fn block_dynamics_eigenvalue(overlap: usize, params: &ModelParams) -> Result<f64> {
    if overlap == 0 {
        return Err(Error::Precondition("strip I must be nonempty".into()));
    }
    Ok(-1.0 + params.p().powi(overlap as i32).sqrt())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockCheck {
    pub closed_form: f64,
    /// Eigenvalues of the explicit block chain, descending.
    pub eigenvalues: Vec<f64>,
    /// Distance from the closest eigenvalue to the closed form.
    pub closed_form_distance: f64,
    /// Distance from the closest eigenvalue to `-1`.
    pub minus_one_distance: f64,
    pub gap: f64,
    /// `1 - √ε`, the smallest gap allowed by the bound on the inverse gap.
    pub gap_lower_bound: f64,
}

/// Build the block chain on `Ω_Λ`, diagonalise it and compare with the closed form.
///
/// `B₂` is refreshed from `π` at rate one; `B₁` is refreshed at rate one when
/// `I` holds at least one zero.
pub fn block_dynamics_check(split: BlockSplit, params: &ModelParams) -> Result<BlockCheck> {
    split.validate()?;
    let len = split.len();
    let n = 1usize << len;
    let left_mask = (1usize << split.left) - 1;
    let right_mask = (n - 1) ^ left_mask;
    let strip_mask = ((1usize << split.overlap) - 1) << split.left;
    let pi: Vec<f64> = (0..n).map(|s| pi_weight(params, len, s)).collect();
    let left_weight = |s: usize| pi_weight(params, split.left, s & left_mask);
    let right_weight = |s: usize| pi_weight(params, split.right, (s & right_mask) >> split.left);

    let mut m = DMatrix::<f64>::zeros(n, n);
    for s in 0..n {
        let c1 = (s & strip_mask) != strip_mask;
        for t in 0..n {
            if t & left_mask == s & left_mask {
                m[(s, t)] += right_weight(t);
            }
            if c1 && t & right_mask == s & right_mask {
                m[(s, t)] += left_weight(t);
            }
        }
        m[(s, s)] -= 1.0 + c1 as u8 as f64;
    }
    let sym = DMatrix::from_fn(n, n, |i, j| m[(i, j)] * (pi[i] / pi[j]).sqrt());
    let sym = (&sym + sym.transpose()) * 0.5;
    let (vals, _) = symmetric_eigen(sym);
    let closed_form = block_dynamics_eigenvalue(split.overlap, params)?;
    let dist = |target: f64| vals.iter().map(|v| (v - target).abs()).fold(f64::INFINITY, f64::min);
    let eps = params.p().powi(split.overlap as i32);
    Ok(BlockCheck {
        closed_form,
        closed_form_distance: dist(closed_form),
        minus_one_distance: dist(-1.0),
        gap: -vals[1],
        gap_lower_bound: 1.0 - eps.sqrt(),
        eigenvalues: vals,
    })
}
