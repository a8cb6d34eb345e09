use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::generator::SparseGenerator;
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Real function on the `2^L` configurations, indexed by state.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionOnConfigs {
    len: usize,
    values: Vec<f64>,
}

impl FunctionOnConfigs {
    pub fn new(len: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != 1 << len {
            return Err(Error::SizeMismatch {
                expected: 1 << len,
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Precondition("function values must be finite".into()));
        }
        Ok(Self { len, values })
    }

    pub fn from_fn(len: usize, f: impl Fn(usize) -> f64) -> Result<Self> {
        Self::new(len, (0..1usize << len).map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.len, self.values.iter().map(|&v| f(v)).collect())
    }
}

fn weights(params: &ModelParams, len: usize) -> Vec<f64> {
    (0..1usize << len)
        .map(|s| super::generator::pi_weight(params, len, s))
        .collect()
}

pub fn mean(params: &ModelParams, f: &FunctionOnConfigs) -> f64 {
    weights(params, f.len)
        .iter()
        .zip(&f.values)
        .map(|(w, v)| w * v)
        .sum()
}

pub fn variance(params: &ModelParams, f: &FunctionOnConfigs) -> f64 {
    let m = mean(params, f);
    weights(params, f.len)
        .iter()
        .zip(&f.values)
        .map(|(w, v)| w * (v - m) * (v - m))
        .sum()
}

/// `π(f log f) - π(f) log π(f)` for nonnegative `f`.
pub fn entropy(params: &ModelParams, f: &FunctionOnConfigs) -> Result<f64> {
    if f.values.iter().any(|&v| v < 0.0) {
        return Err(Error::Precondition("entropy needs a nonnegative function".into()));
    }
    let xlogx = |v: f64| if v > 0.0 { v * v.ln() } else { 0.0 };
    let w = weights(params, f.len);
    let m: f64 = w.iter().zip(&f.values).map(|(w, v)| w * v).sum();
    let e: f64 = w.iter().zip(&f.values).map(|(w, &v)| w * xlogx(v)).sum();
    Ok(e - xlogx(m))
}

/// `Σ_x π(c_x Cov_x(f, g))`, summed edge by edge from the constraint rule.
pub fn dirichlet_bilinear(
    params: &ModelParams,
    f: &FunctionOnConfigs,
    g: &FunctionOnConfigs,
) -> Result<f64> {
    if f.len != g.len {
        return Err(Error::SizeMismatch {
            expected: 1 << f.len,
            got: 1 << g.len,
        });
    }
    let len = f.len;
    let (p, q) = (params.p(), params.q());
    let w = weights(params, len);
    let mut total = 0.0;
    for s in 0..1usize << len {
        for x in 0..len {
            if (s >> x) & 1 == 0 {
                continue;
            }
            if x + 1 < len && (s >> (x + 1)) & 1 == 1 {
                continue;
            }
            let t = s ^ (1 << x);
            // π(σ with σ_x = 1) / p is the weight of the other coordinates
            total += w[s] / p * p * q * (f.values[s] - f.values[t]) * (g.values[s] - g.values[t]);
        }
    }
    Ok(total)
}

pub fn dirichlet_form(params: &ModelParams, f: &FunctionOnConfigs) -> Result<f64> {
    dirichlet_bilinear(params, f, f)
}

/// `⟨f, K f⟩_π` through the stored matrix.
pub fn generator_quadratic_form(gen: &SparseGenerator, f: &FunctionOnConfigs) -> Result<f64> {
    if f.len != gen.len() {
        return Err(Error::SizeMismatch {
            expected: gen.states(),
            got: f.values.len(),
        });
    }
    let mut kf = vec![0.0; gen.states()];
    gen.apply(&f.values, &mut kf);
    Ok(gen
        .pi()
        .iter()
        .zip(&f.values)
        .zip(&kf)
        .map(|((w, a), b)| w * a * b)
        .sum())
}
