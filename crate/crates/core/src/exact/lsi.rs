//! Bounds on log-Sobolev constants of `Λ = [1, L-1]`.
//!
//! The lower bound uses `f = g(ξ)` with `g(k) = λ^(k-1)`, where `ξ` is the
//! leftmost empty site of `{1, …, L-1}` and `ξ = L` (the frozen zero) when
//! there is none. In the exact state encoding site `k` is bit `k - 1`.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::functional::{dirichlet_bilinear, entropy, FunctionOnConfigs};
use super::generator::{Flavor, SparseGenerator};
use super::spectrum::spectral_gap;
use crate::error::{Error, Result};
use crate::model::ModelParams;

fn check_len(len: usize) -> Result<()> {
    if len < 3 {
        return Err(Error::UnsupportedSize {
            got: len,
            min: 3,
            max: usize::MAX,
        });
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            expected: "(0, 2]",
        });
    }
    Ok(())
}

/// `m(k) = P(ξ = k)` for `k = 1..=L`, returned with `m[k - 1] = m(k)`.
pub fn leftmost_zero_law(len: usize, params: &ModelParams) -> Result<Vec<f64>> {
    check_len(len)?;
    let (p, q) = (params.p(), params.q());
    let mut m: Vec<f64> = (1..len).map(|k| q * p.powi(k as i32 - 1)).collect();
    m.push(p.powi(len as i32 - 1));
    Ok(m)
}

/// `Ent(g(ξ))` from the law of `ξ`.
pub fn test_function_entropy(len: usize, params: &ModelParams, lambda: f64) -> Result<f64> {
    let m = leftmost_zero_law(len, params)?;
    let ln = lambda.ln();
    let mut mean = 0.0;
    let mut e = 0.0;
    for (i, mk) in m.iter().enumerate() {
        let k = i as f64;
        let g = (k * ln).exp();
        mean += mk * g;
        e += mk * g * k * ln;
    }
    Ok(e - mean * mean.ln())
}

/// `αα′(λ^{1/α} - 1)(λ^{1/α′} - 1)`, with its limit `(λ-1) ln λ` at `α = 1`.
fn prefactor(alpha: f64, lambda: f64) -> f64 {
    if (alpha - 1.0).abs() < 1e-12 {
        return (lambda - 1.0) * lambda.ln();
    }
    let alpha_p = alpha / (alpha - 1.0);
    alpha * alpha_p * (lambda.powf(1.0 / alpha) - 1.0) * (lambda.powf(1.0 / alpha_p) - 1.0)
}

/// `pq [q Σ_{j=0}^{L-3} (pλ)^j + (pλ)^{L-2}]`, the edge sum of the birth–death chain of `ξ`.
fn edge_sum(len: usize, params: &ModelParams, lambda: f64) -> f64 {
    let (p, q) = (params.p(), params.q());
    let x = p * lambda;
    let mut s = 0.0;
    let mut xj = 1.0;
    for _ in 0..len - 2 {
        s += xj;
        xj *= x;
    }
    p * q * (q * s + xj)
}

/// `αα′ 𝒟(f^{1/α}, f^{1/α′})` for `f = g(ξ)`, closed form.
pub fn test_function_scaled_dirichlet(
    len: usize,
    params: &ModelParams,
    alpha: f64,
    lambda: f64,
) -> Result<f64> {
    check_len(len)?;
    check_alpha(alpha)?;
    Ok(prefactor(alpha, lambda) * edge_sum(len, params, lambda))
}

/// Entropy and `αα′ 𝒟(f^{1/α}, f^{1/α′})` evaluated over all `2^{L-1}` configurations.
pub fn test_function_direct(
    len: usize,
    params: &ModelParams,
    alpha: f64,
    lambda: f64,
) -> Result<(f64, f64)> {
    check_len(len)?;
    check_alpha(alpha)?;
    let sites = len - 1;
    let xi = |s: usize| -> i32 { (0..sites).find(|&i| (s >> i) & 1 == 0).map_or(len, |i| i + 1) as i32 };
    let f = FunctionOnConfigs::from_fn(sites, |s| lambda.powi(xi(s) - 1))?;
    let ent = entropy(params, &f)?;
    let dir = if (alpha - 1.0).abs() < 1e-12 {
        let logf = f.map(|v| v.ln())?;
        dirichlet_bilinear(params, &f, &logf)?
    } else {
        let alpha_p = alpha / (alpha - 1.0);
        let a = f.map(|v| v.powf(1.0 / alpha))?;
        let b = f.map(|v| v.powf(1.0 / alpha_p))?;
        alpha * alpha_p * dirichlet_bilinear(params, &a, &b)?
    };
    Ok((ent, dir))
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LowerBound {
    pub value: f64,
    pub lambda: f64,
}

fn ratio(len: usize, params: &ModelParams, alpha: f64, lambda: f64) -> f64 {
    let d = prefactor(alpha, lambda) * edge_sum(len, params, lambda);
    let e = test_function_entropy(len, params, lambda).unwrap_or(f64::NAN);
    let r = 4.0 * e / d;
    if r.is_finite() {
        r
    } else {
        0.0
    }
}

/// `sup_λ 4 Ent(f) / (αα′ 𝒟(f^{1/α}, f^{1/α′}))` over `λ ∈ (0, 1/p)`.
pub fn lsi_lower_bound(len: usize, params: &ModelParams, alpha: f64) -> Result<LowerBound> {
    check_len(len)?;
    check_alpha(alpha)?;
    let hi = (1.0 / params.p()) * (1.0 - 1e-9);
    let lo = 1e-6;
    // coarse scan, then golden section around the best grid point
    let n = 400;
    let grid: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let (best, _) = grid
        .iter()
        .enumerate()
        .map(|(i, &l)| (i, ratio(len, params, alpha, l)))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(n)];
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let f = |l: f64| ratio(len, params, alpha, l);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
        if b - a < 1e-12 {
            break;
        }
    }
    let candidates = [(a, f(a)), (b, f(b)), (c, fc), (d, fd), (grid[best], f(grid[best]))];
    let (lambda, value) = candidates
        .iter()
        .copied()
        .fold((f64::NAN, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    if !(lambda > 0.0 && lambda < 1.0 / params.p()) {
        return Err(Error::Inconsistent("λ search left (0, 1/p)".into()));
    }
    Ok(LowerBound { value, lambda })
}

fn gap_and_pi_star(len: usize, params: &ModelParams) -> Result<(f64, f64)> {
    check_len(len)?;
    let gap = spectral_gap(&SparseGenerator::build(len - 1, params, Flavor::Plain)?)?.gap;
    Ok((gap, params.min_pq().powi(len as i32 - 1)))
}

/// `gap⁻¹ log(1/π* - 1) / (1 - 2π*)` with `π* = min(p,q)^{L-1}` and the gap of `L-1` sites.
///
/// The variant with `log(1/π*) - 1` in the numerator is not a valid bound:
/// it falls below the test-function lower bound at `L = 3`.
pub fn lsi_upper_bound(len: usize, params: &ModelParams) -> Result<f64> {
    let (gap, pi_star) = gap_and_pi_star(len, params)?;
    Ok((1.0 / pi_star - 1.0).ln() / (1.0 - 2.0 * pi_star) / gap)
}

/// `gap⁻¹ (log(1/π*) - 1) / (1 - 2π*)`, kept for comparison only.
pub fn lsi_upper_bound_shifted_log(len: usize, params: &ModelParams) -> Result<f64> {
    let (gap, pi_star) = gap_and_pi_star(len, params)?;
    Ok(((1.0 / pi_star).ln() - 1.0) / (1.0 - 2.0 * pi_star) / gap)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LsiBounds {
    pub lower: LowerBound,
    pub upper: f64,
    /// Same bound with `log(1/π*) - 1` in place of `log(1/π* - 1)`.
    pub upper_shifted_log: f64,
}

pub fn lsi_bounds(len: usize, params: &ModelParams, alpha: f64) -> Result<LsiBounds> {
    Ok(LsiBounds {
        lower: lsi_lower_bound(len, params, alpha)?,
        upper: lsi_upper_bound(len, params)?,
        upper_shifted_log: lsi_upper_bound_shifted_log(len, params)?,
    })
}
