use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::generator::{Flavor, SparseGenerator};
use super::spectrum::{spectral_gap, top_eigen, Method};
use crate::error::Result;
use crate::model::ModelParams;

/// `β_λ`, the top of the spectrum of `ℒ + λV`, for each `λ`.
pub fn persistence_exponent(
    len: usize,
    params: &ModelParams,
    lambdas: &[f64],
    probe: usize,
) -> Result<Vec<f64>> {
    lambdas
        .iter()
        .map(|&lambda| {
            let g = SparseGenerator::build(len, params, Flavor::FeynmanKac { lambda, probe })?;
            Ok(top_eigen(&g)?.value)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PersistenceCheck {
    pub gap: f64,
    /// `gap / 2`.
    pub lambda: f64,
    pub beta: f64,
    /// `β_λ / λ`.
    pub ratio: f64,
    /// `pq/(1+p) + p`.
    pub bound: f64,
    pub holds: bool,
}

/// Compare `β_{gap/2} / (gap/2)` with `pq/(1+p) + p`.
pub fn persistence_bound_check(len: usize, params: &ModelParams, probe: usize) -> Result<PersistenceCheck> {
    let gap = spectral_gap(&SparseGenerator::build(len, params, Flavor::Plain)?)?.gap;
    let lambda = gap / 2.0;
    let beta = persistence_exponent(len, params, &[lambda], probe)?[0];
    let (p, q) = (params.p(), params.q());
    let bound = p * q / (1.0 + p) + p;
    let ratio = beta / lambda;
    Ok(PersistenceCheck {
        gap,
        lambda,
        beta,
        ratio,
        bound,
        holds: ratio <= bound + 1e-8,
    })
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScgfPoint {
    pub lambda: f64,
    /// Top eigenvalue of the tilted generator divided by `N`.
    pub psi: f64,
    pub residual: f64,
    pub method: Method,
}

/// `ψ_N(λ)` on a grid.
pub fn activity_scgf(n: usize, params: &ModelParams, lambdas: &[f64]) -> Result<Vec<ScgfPoint>> {
    lambdas
        .iter()
        .map(|&lambda| {
            let g = SparseGenerator::build(n, params, Flavor::ActivityTilted { lambda })?;
            let top = top_eigen(&g)?;
            Ok(ScgfPoint {
                lambda,
                psi: top.value / n as f64,
                residual: top.residual,
                method: top.method,
            })
        })
        .collect()
}

/// `φ_N(α) = N ψ_N(α / N)`, a rate per unit time.
pub fn phi(n: usize, params: &ModelParams, alphas: &[f64]) -> Result<Vec<f64>> {
    let lambdas: Vec<f64> = alphas.iter().map(|a| a / n as f64).collect();
    Ok(activity_scgf(n, params, &lambdas)?
        .into_iter()
        .map(|pt| pt.psi * n as f64)
        .collect())
}
