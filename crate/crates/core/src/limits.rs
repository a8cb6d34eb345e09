//! Limit laws for the rescaled domain length `X̃` and first-zero position `Ỹ`.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn check_c0(c0: f64) -> Result<()> {
    if !(c0 > 0.0 && c0 <= 1.0) {
        return Err(Error::OutOfRange {
            name: "c0",
            value: c0,
            expected: "(0, 1]",
        });
    }
    Ok(())
}

fn check_s(s: f64) -> Result<()> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::OutOfRange {
            name: "s",
            value: s,
            expected: "(0, ∞)",
        });
    }
    Ok(())
}

/// `Ein(s) = ∫_0^s (1 - e^{-t})/t dt` by its power series, for `s <= 2`.
fn ein_series(s: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..200 {
        term *= -s / k as f64;
        let t = -term / k as f64;
        sum += t;
        if t.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// `E₁(s) = ∫_1^∞ e^{-sx}/x dx`.
pub fn e1(s: f64) -> Result<f64> {
    check_s(s)?;
    if s <= 1.0 {
        return Ok(ein_series(s) - EULER_GAMMA - s.ln());
    }
    // modified Lentz on the continued fraction e^{-s} / (s + 1/(1 + 1/(s + 2/(1 + ...))))
    let tiny = 1e-300;
    let mut b = s + 1.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..1000 {
        let a = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            return Ok(h * (-s).exp());
        }
    }
    Err(Error::NoConvergence {
        iterations: 1000,
        residual: f64::NAN,
    })
}

/// `Ein(s) = ∫_0^1 (1 - e^{-sx})/x dx`.
pub fn ein(s: f64) -> Result<f64> {
    if s == 0.0 {
        return Ok(0.0);
    }
    check_s(s)?;
    if s <= 2.0 {
        Ok(ein_series(s))
    } else {
        Ok(e1(s)? + EULER_GAMMA + s.ln())
    }
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = GK_WEIGHTS[7] * fc;
    let mut gauss = GAUSS_WEIGHTS[3] * fc;
    for i in 0..7 {
        let x = h * GK_NODES[i];
        let s = f(c - x) + f(c + x);
        kronrod += GK_WEIGHTS[i] * s;
        if i % 2 == 1 {
            gauss += GAUSS_WEIGHTS[i / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod 7-15 on `[a, b]`, returning `(value, error estimate)`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Precondition("finite interval expected".into()));
    }
    if a == b {
        return Ok((0.0, 0.0));
    }
    let mut stack: Vec<(f64, f64, f64)> = Vec::new();
    stack.push((a, b, tol));
    let (mut total, mut err) = (0.0, 0.0);
    let mut evals = 0usize;
    while let Some((lo, hi, t)) = stack.pop() {
        let (v, e) = gk15(&f, lo, hi);
        evals += 1;
        if e <= t.max(1e-15 * v.abs()) || (hi - lo).abs() < 1e-13 * (1.0 + lo.abs()) {
            total += v;
            err += e;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, 0.5 * t));
            stack.push((mid, hi, 0.5 * t));
        }
        if evals > 200_000 {
            return Err(Error::NoConvergence {
                iterations: evals,
                residual: err,
            });
        }
    }
    if !total.is_finite() {
        return Err(Error::Precondition(format!("integral over [{a}, {b}] is not finite")));
    }
    Ok((total, err))
}

/// `∫_a^∞ f` through `x = a + t/(1-t)`.
pub fn integrate_to_infinity(f: impl Fn(f64) -> f64, a: f64, tol: f64) -> Result<(f64, f64)> {
    integrate(
        |t| {
            let u = 1.0 - t;
            let v = f(a + t / u) / (u * u);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        tol,
    )
}

/// `E e^{-s X̃} = 1 - exp{-c₀ E₁(s)}`; `s = 0` gives the limit value 1.
pub fn laplace_x(s: f64, c0: f64) -> Result<f64> {
    check_c0(c0)?;
    if s == 0.0 {
        return Ok(1.0);
    }
    Ok(-(-c0 * e1(s)?).exp_m1())
}

/// How to read `1 - exp{-c₀ ∫_0^1 e^{-sx}/x dx}`, whose integral diverges at 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum YTransform {
    /// Evaluate as written; always refused.
    #[default]
    Literal,
    /// `exp{-c₀ ∫_0^1 (1 - e^{-sx})/x dx}`, the generalized Dickman law.
    DickmanRegularized,
}

pub fn laplace_y(s: f64, c0: f64, reading: YTransform) -> Result<f64> {
    check_c0(c0)?;
    match reading {
        YTransform::Literal => Err(Error::Refused(
            "∫_0^1 e^{-sx}/x dx diverges; choose a regularized reading explicitly".into(),
        )),
        YTransform::DickmanRegularized => {
            if s < 0.0 {
                check_s(s)?;
            }
            Ok((-c0 * ein(s)?).exp())
        }
    }
}

/// `ρ₂(x) = ∫_1^{x-1} dx₁ / (x₁ (x - x₁))` for `x >= 2`, zero below.
pub fn rho2(x: f64) -> Result<f64> {
    if x < 2.0 {
        return Ok(0.0);
    }
    Ok(integrate(|u| 1.0 / (u * (x - u)), 1.0, x - 1.0, 1e-12)?.0)
}

/// `ρ₃(x) = ∫_1^{x-2} ρ₂(x - x₁) / x₁ dx₁` for `x >= 3`, zero below.
pub fn rho3(x: f64) -> Result<f64> {
    if x < 3.0 {
        return Ok(0.0);
    }
    // ρ₂ vanishes linearly at 2, so the outer integrand has no endpoint singularity
    Ok(integrate(|u| rho2(x - u).unwrap_or(f64::NAN) / u, 1.0, x - 2.0, 1e-10)?.0)
}

pub const MAX_DENSITY_ORDER: usize = 3;

/// `Σ_{k=1}^{K} (-1)^{k+1} c₀^k / k! ρ_k(x) 1_{x >= k}`.
pub fn density_p(x: f64, c0: f64, order: usize) -> Result<f64> {
    check_c0(c0)?;
    if !(x >= 1.0) {
        return Err(Error::OutOfRange {
            name: "x",
            value: x,
            expected: "[1, ∞)",
        });
    }
    if order == 0 || order > MAX_DENSITY_ORDER {
        return Err(Error::UnsupportedSize {
            got: order,
            min: 1,
            max: MAX_DENSITY_ORDER,
        });
    }
    let mut p = c0 / x;
    if order >= 2 {
        p -= c0 * c0 / 2.0 * rho2(x)?;
    }
    if order >= 3 {
        p += c0 * c0 * c0 / 6.0 * rho3(x)?;
    }
    Ok(p)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DensityMass {
    pub upper: f64,
    pub mass: f64,
    /// `Σ_{k=K+1}^{⌊upper⌋} (c₀ log(upper - k + 1))^k / k!`, which bounds the
    /// mass of the dropped terms on `[1, upper]`.
    pub truncation_budget: f64,
}

/// `∫_1^{upper} p_{c₀}` for the truncated density.
pub fn density_mass(c0: f64, order: usize, upper: f64) -> Result<DensityMass> {
    density_p(1.0, c0, order)?;
    if !(upper >= 1.0) {
        return Err(Error::OutOfRange {
            name: "upper",
            value: upper,
            expected: "[1, ∞)",
        });
    }
    // split at the integers where new terms switch on
    let mut mass = 0.0;
    let mut lo = 1.0;
    while lo < upper {
        let hi = (lo + 1.0).min(upper);
        mass += integrate(|x| density_p(x, c0, order).unwrap_or(f64::NAN), lo, hi, 1e-9)?.0;
        lo = hi;
    }
    let mut budget = 0.0;
    let mut k = order + 1;
    while (k as f64) <= upper {
        let l = c0 * (upper - k as f64 + 1.0).ln();
        let fact: f64 = (1..=k).map(|j| j as f64).product();
        budget += l.powi(k as i32) / fact;
        k += 1;
    }
    Ok(DensityMass {
        upper,
        mass,
        truncation_budget: budget,
    })
}
