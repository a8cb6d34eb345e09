use alloc::vec::Vec;
use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Longest window accepted by [`SparseGenerator::build`].
pub const MAX_LEN: usize = 24;
/// Longest window solved with a dense eigendecomposition.
pub const DENSE_MAX_LEN: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Flavor {
    Plain,
    /// `ℒ + λV` with `V` multiplication by the occupancy of `probe`.
    FeynmanKac { lambda: f64, probe: usize },
    /// Off-diagonal rates multiplied by `e^λ`, diagonal unchanged.
    ActivityTilted { lambda: f64 },
}

/// Generator in compressed-row form, diagonal included, columns sorted per row.
#[derive(Debug, Clone)]
pub struct SparseGenerator {
    len: usize,
    params: ModelParams,
    flavor: Flavor,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
    // entries of D^{1/2} K D^{-1/2}
    sym_vals: Vec<f64>,
    pi: Vec<f64>,
    sqrt_pi: Vec<f64>,
}

/// Product-measure weight of a state on `len` sites.
pub fn pi_weight(params: &ModelParams, len: usize, s: usize) -> f64 {
    let ones = (s as u64).count_ones() as i32;
    params.p().powi(ones) * params.q().powi(len as i32 - ones)
}

impl SparseGenerator {
    pub fn build(len: usize, params: &ModelParams, flavor: Flavor) -> Result<Self> {
        if len == 0 || len > MAX_LEN {
            return Err(Error::UnsupportedSize {
                got: len,
                min: 1,
                max: MAX_LEN,
            });
        }
        if let Flavor::FeynmanKac { probe, .. } = flavor {
            if probe >= len {
                return Err(Error::SiteOutsideWindow {
                    site: probe as i64,
                    a: 0,
                    b: len as i64 - 1,
                });
            }
        }
        let n = 1usize << len;
        let (p, q) = (params.p(), params.q());
        let tilt = match flavor {
            Flavor::ActivityTilted { lambda } => lambda.exp(),
            _ => 1.0,
        };
        let pi: Vec<f64> = (0..n).map(|s| pi_weight(params, len, s)).collect();
        let sqrt_pi: Vec<f64> = pi.iter().map(|w| w.sqrt()).collect();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut sym_vals = Vec::new();
        let mut row: Vec<(u32, f64)> = Vec::with_capacity(len + 1);
        row_ptr.push(0);
        for s in 0..n {
            row.clear();
            let mut out = 0.0;
            for x in 0..len {
                let legal = x + 1 == len || (s >> (x + 1)) & 1 == 0;
                if !legal {
                    continue;
                }
                let rate = if (s >> x) & 1 == 1 { q } else { p };
                out += rate;
                row.push(((s ^ (1 << x)) as u32, rate * tilt));
            }
            let mut diag = -out;
            if let Flavor::FeynmanKac { lambda, probe } = flavor {
                diag += lambda * ((s >> probe) & 1) as f64;
            }
            row.push((s as u32, diag));
            row.sort_by_key(|e| e.0);
            for &(c, v) in &row {
                cols.push(c);
                vals.push(v);
                sym_vals.push(v * sqrt_pi[s] / sqrt_pi[c as usize]);
            }
            row_ptr.push(cols.len());
        }
        Ok(Self {
            len,
            params: *params,
            flavor,
            row_ptr,
            cols,
            vals,
            sym_vals,
            pi,
            sqrt_pi,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn states(&self) -> usize {
        1 << self.len
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn sqrt_pi(&self) -> &[f64] {
        &self.sqrt_pi
    }

    /// `(column, value)` pairs of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()]
            .iter()
            .zip(&self.vals[r])
            .map(|(&c, &v)| (c as usize, v))
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&(j as u32)) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => 0.0,
        }
    }

    /// `y = K x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let r = self.row_ptr[i]..self.row_ptr[i + 1];
            *yi = self.cols[r.clone()]
                .iter()
                .zip(&self.vals[r])
                .map(|(&c, &v)| v * x[c as usize])
                .sum();
        }
    }

    /// `y = D^{1/2} K D^{-1/2} x`, symmetric for every flavor.
    pub fn apply_symmetric(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let r = self.row_ptr[i]..self.row_ptr[i + 1];
            *yi = self.cols[r.clone()]
                .iter()
                .zip(&self.sym_vals[r])
                .map(|(&c, &v)| v * x[c as usize])
                .sum();
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.states();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn to_dense_symmetric(&self) -> DMatrix<f64> {
        let n = self.states();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            let r = self.row_ptr[i]..self.row_ptr[i + 1];
            for (&c, &v) in self.cols[r.clone()].iter().zip(&self.sym_vals[r]) {
                m[(i, c as usize)] = v;
            }
        }
        // remove rounding asymmetry
        let t = m.transpose();
        (m + t) * 0.5
    }

    /// Largest `|Σ_j K(i, j)|` over rows.
    pub fn max_row_sum(&self) -> f64 {
        (0..self.states())
            .map(|i| self.row(i).map(|(_, v)| v).sum::<f64>().abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|π(i) K(i, j) - π(j) K(j, i)|` over stored entries.
    pub fn max_detailed_balance_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.states() {
            for (j, v) in self.row(i) {
                let d = (self.pi[i] * v - self.pi[j] * self.entry(j, i)).abs();
                worst = worst.max(d);
            }
        }
        worst
    }
}
