//! Quench experiments from renewal and Bernoulli initial laws.
//!
//! Each experiment returns an [`ExperimentReport`] whose verdict bands are
//! fixed before any replica runs.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{semigroup_apply, spectral_gap, Flavor, SparseGenerator};
use crate::limits::laplace_x;
use crate::model::{Boundary, Interval, ModelParams, TimeScale};
use crate::renewal::{sample_renewal, RenewalKind, RenewalLaw};
use crate::rng::{Purpose, StreamSeed};
use crate::runner::ReplicaRunner;
use crate::simulate::{run_graphical, Mode, Probes};
use crate::stats::{slope, EstimateCI};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(i64),
    Float(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub observed: f64,
    pub target: f64,
    /// Accepted interval for `observed`.
    pub lower: f64,
    pub upper: f64,
    /// How the interval was built.
    pub tolerance: String,
    pub passed: bool,
}

impl Verdict {
    fn band(name: impl Into<String>, observed: f64, target: f64, lower: f64, upper: f64, tolerance: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            observed,
            target,
            lower,
            upper,
            tolerance: tolerance.into(),
            passed: observed >= lower && observed <= upper,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub id: String,
    pub parameters: Vec<(String, ParamValue)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub verdicts: Vec<Verdict>,
    /// Replicas left out of the statistics, with the reason.
    pub excluded: Vec<(String, u64)>,
}

impl ExperimentReport {
    fn new(id: &str, columns: &[&str]) -> Self {
        Self {
            id: id.into(),
            parameters: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            verdicts: Vec::new(),
            excluded: Vec::new(),
        }
    }

    fn param(&mut self, name: &str, v: ParamValue) {
        self.parameters.push((name.into(), v));
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }
}

fn describe(mu: &RenewalLaw) -> String {
    match mu.kind() {
        RenewalKind::PointMass(d) => format!("point_mass({d})"),
        RenewalKind::Geometric(r) => format!("geometric({r})"),
        RenewalKind::Table => "table".into(),
        RenewalKind::ParetoTail { alpha, cutoff } => format!("pareto({alpha}, {cutoff})"),
    }
}

fn common_params(report: &mut ExperimentReport, mu: &RenewalLaw, q: f64, epsilon: f64, replicas: u64, seed: u64) {
    report.param("mu", ParamValue::Text(describe(mu)));
    report.param("c0", ParamValue::Float(mu.c0()));
    report.param("q", ParamValue::Float(q));
    report.param("epsilon", ParamValue::Float(epsilon));
    report.param("replicas", ParamValue::Int(replicas as i64));
    report.param("seed", ParamValue::Int(seed as i64));
}

fn check_quench(q: f64, n_max: u32, scales: &TimeScale) -> Result<()> {
    if !(q > 0.0 && q <= 0.1) {
        return Err(Error::OutOfRange {
            name: "q",
            value: q,
            expected: "(0, 0.1]",
        });
    }
    if n_max > 3 {
        return Err(Error::UnsupportedSize {
            got: n_max as usize,
            min: 0,
            max: 3,
        });
    }
    if scales.t_plus(n_max) >= scales.t_minus(n_max + 1) {
        return Err(Error::Precondition(format!(
            "stalling period {n_max} is empty at epsilon = {}",
            scales.epsilon()
        )));
    }
    Ok(())
}

/// `k` log-spaced times inside stalling period `n`, excluding the endpoints.
pub fn stalling_grid(scales: &TimeScale, n: u32, k: usize) -> Vec<f64> {
    let (lo, hi) = scales.stalling_period(n);
    let (a, b) = (lo.max(1e-9).ln(), hi.ln());
    (1..=k)
        .map(|i| (a + (b - a) * i as f64 / (k + 1) as f64).exp())
        .collect()
}

/// Limit level `(2^n + 1)^{-c₀}`.
pub fn plateau_level(n: u32, c0: f64) -> f64 {
    (1.0 / ((1u64 << n) as f64 + 1.0)).powf(c0)
}

/// Relative half-width of the plateau band at scale `n`.
pub fn plateau_band(n: u32) -> f64 {
    if n <= 2 {
        0.25
    } else {
        0.4
    }
}

/// Sites right of the origin kept in the window at largest scale `n`.
fn right_extent(n: u32) -> i64 {
    16 << (n + 1)
}

pub const PLATEAU_POINTS: usize = 5;

/// Vacancy probability and persistence at the origin across stalling periods.
#[allow(clippy::too_many_arguments)]
pub fn plateau_experiment<R: ReplicaRunner>(
    mu: &RenewalLaw,
    q: f64,
    epsilon: f64,
    n_max: u32,
    replicas: u64,
    seed: u64,
    runner: &R,
) -> Result<ExperimentReport> {
    let params = ModelParams::new(q)?;
    let scales = TimeScale::new(epsilon, q)?;
    check_quench(q, n_max, &scales)?;
    let n_min = mu.n_d().min(n_max);
    let c0 = mu.c0();
    let mut report = ExperimentReport::new(
        "quench-plateau",
        &["n", "t", "p_vacant", "p_vacant_se", "persistent", "persistent_se"],
    );
    common_params(&mut report, mu, q, epsilon, replicas, seed);
    report.param("n_min", ParamValue::Int(n_min as i64));
    report.param("n_max", ParamValue::Int(n_max as i64));

    let window = Interval::new(0, right_extent(n_max))?;
    report.param("window_b", ParamValue::Int(window.b()));
    let periods: Vec<u32> = (n_min..=n_max).collect();
    let times: Vec<f64> = periods
        .iter()
        .flat_map(|&n| stalling_grid(&scales, n, PLATEAU_POINTS))
        .collect();
    let horizon = *times.last().unwrap();
    let probes = Probes {
        sample_times: times.clone(),
        sites: vec![0],
        ..Probes::default()
    };
    let runs: Vec<Result<(Vec<bool>, Vec<bool>)>> = runner.run(replicas, |r| {
        let s = StreamSeed::new(seed, r);
        let init = sample_renewal(mu, window, Boundary::FrozenZeroRight, &mut s.rng(Purpose::Initial))?;
        let st = run_graphical(&init, &params, horizon, &probes, s, Mode::RejectionFree)?;
        Ok((
            st.occupation.iter().map(|o| !o[0]).collect(),
            st.persistent.iter().map(|p| p[0]).collect(),
        ))
    });
    let runs: Vec<(Vec<bool>, Vec<bool>)> = runs.into_iter().collect::<Result<_>>()?;

    let column = |k: usize, pick: usize| -> EstimateCI {
        let xs: Vec<f64> = runs
            .iter()
            .map(|(v, p)| if pick == 0 { v[k] } else { p[k] } as u8 as f64)
            .collect();
        EstimateCI::from_samples(&xs)
    };
    for (k, &t) in times.iter().enumerate() {
        let n = periods[k / PLATEAU_POINTS];
        let (v, p) = (column(k, 0), column(k, 1));
        report.rows.push(vec![n as f64, t, v.mean, v.stderr, p.mean, p.stderr]);
    }

    let mut means: Vec<EstimateCI> = Vec::new();
    for (j, &n) in periods.iter().enumerate() {
        let range = j * PLATEAU_POINTS..(j + 1) * PLATEAU_POINTS;
        let per_replica = |pick: usize| -> Vec<f64> {
            runs.iter()
                .map(|(v, p)| {
                    let src = if pick == 0 { v } else { p };
                    src[range.clone()].iter().filter(|&&b| b).count() as f64 / PLATEAU_POINTS as f64
                })
                .collect()
        };
        let mean = EstimateCI::from_samples(&per_replica(0));
        let persist = EstimateCI::from_samples(&per_replica(1));
        let target = plateau_level(n, c0);
        let w = plateau_band(n);
        let pct = (w * 100.0).round();
        report.verdicts.push(Verdict::band(
            format!("plateau_n{n}"),
            mean.mean,
            target,
            target * (1.0 - w),
            target * (1.0 + w),
            format!("±{pct}% of (2^n+1)^-c0"),
        ));
        report.verdicts.push(Verdict::band(
            format!("persistence_n{n}"),
            persist.mean,
            target,
            target * (1.0 - w),
            target * (1.0 + w),
            format!("±{pct}% of (2^n+1)^-c0"),
        ));
        let levels: Vec<f64> = report.rows[range.clone()].iter().map(|r| r[2]).collect();
        let spread = levels.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - levels.iter().cloned().fold(f64::INFINITY, f64::min);
        report.verdicts.push(Verdict::band(
            format!("spread_n{n}"),
            spread,
            0.0,
            0.0,
            0.1 * mean.mean,
            "max-min over the period <= 0.1 x plateau mean",
        ));
        means.push(mean);
    }
    for (j, w) in means.windows(2).enumerate() {
        let se = (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt();
        report.verdicts.push(Verdict::band(
            format!("nonincreasing_n{}_n{}", periods[j], periods[j + 1]),
            w[1].mean - w[0].mean,
            0.0,
            f64::NEG_INFINITY,
            3.0 * se,
            "later plateau minus earlier <= 3 combined stderr",
        ));
    }
    Ok(report)
}

/// Two-time covariance of the vacancy indicator at `x`.
#[allow(clippy::too_many_arguments)]
pub fn aging_experiment<R: ReplicaRunner>(
    mu: &RenewalLaw,
    q: f64,
    epsilon: f64,
    pairs: &[(u32, u32)],
    x: i64,
    replicas: u64,
    seed: u64,
    runner: &R,
) -> Result<ExperimentReport> {
    let params = ModelParams::new(q)?;
    let scales = TimeScale::new(epsilon, q)?;
    if pairs.is_empty() || pairs.iter().any(|&(m, n)| m > n) {
        return Err(Error::Precondition("pairs (m, n) need m <= n".into()));
    }
    if x < 0 {
        return Err(Error::OutOfRange {
            name: "x",
            value: x as f64,
            expected: "x >= 0",
        });
    }
    let n_max = pairs.iter().map(|p| p.1).max().unwrap();
    check_quench(q, n_max, &scales)?;
    let c0 = mu.c0();
    let rho = mu.renewal_probability(x as u64);
    let mut report = ExperimentReport::new(
        "quench-aging",
        &["m", "n", "s", "t", "cov", "cov_se", "target"],
    );
    common_params(&mut report, mu, q, epsilon, replicas, seed);
    report.param("x", ParamValue::Int(x));
    report.param("rho_x", ParamValue::Float(rho));

    // s early in period m, t late in period n
    let at = |n: u32, frac: f64| {
        let (lo, hi) = scales.stalling_period(n);
        (lo.ln() + frac * (hi.ln() - lo.ln())).exp()
    };
    let st: Vec<(f64, f64)> = pairs.iter().map(|&(m, n)| (at(m, 1.0 / 3.0), at(n, 2.0 / 3.0))).collect();
    let mut times: Vec<f64> = st.iter().flat_map(|&(s, t)| [s, t]).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let horizon = *times.last().unwrap();
    let window = Interval::new(0, x + right_extent(n_max))?;
    let probes = Probes {
        sample_times: times.clone(),
        sites: vec![x],
        ..Probes::default()
    };
    let runs: Vec<Result<Vec<bool>>> = runner.run(replicas, |r| {
        let s = StreamSeed::new(seed, r);
        let init = sample_renewal(mu, window, Boundary::FrozenZeroRight, &mut s.rng(Purpose::Initial))?;
        let tr = run_graphical(&init, &params, horizon, &probes, s, Mode::RejectionFree)?;
        Ok(tr.occupation.iter().map(|o| !o[0]).collect())
    });
    let runs: Vec<Vec<bool>> = runs.into_iter().collect::<Result<_>>()?;
    let idx = |t: f64| times.iter().position(|&u| u == t).unwrap();
    let rn = runs.len() as f64;
    let mut covs = Vec::new();
    for (&(m, n), &(s, t)) in pairs.iter().zip(&st) {
        let (is, it) = (idx(s), idx(t));
        let a: Vec<f64> = runs.iter().map(|v| v[is] as u8 as f64).collect();
        let b: Vec<f64> = runs.iter().map(|v| v[it] as u8 as f64).collect();
        let ma = a.iter().sum::<f64>() / rn;
        let mb = b.iter().sum::<f64>() / rn;
        let z: Vec<f64> = a
            .iter()
            .zip(&b)
            .map(|(u, v)| (u - ma) * (v - mb) * rn / (rn - 1.0))
            .collect();
        let cov = EstimateCI::from_samples(&z);
        let target = rho * plateau_level(n, c0) * (1.0 - rho * plateau_level(m, c0));
        report.rows.push(vec![m as f64, n as f64, s, t, cov.mean, cov.stderr, target]);
        let slack = 0.4 * target + 3.0 * cov.stderr;
        report.verdicts.push(Verdict::band(
            format!("cov_m{m}_n{n}"),
            cov.mean,
            target,
            target - slack,
            target + slack,
            "±40% of target + 3 stderr",
        ));
        covs.push((m, n, cov));
    }
    for i in 0..covs.len() {
        for j in i + 1..covs.len() {
            let (m1, n1, c1) = covs[i];
            let (m2, n2, c2) = covs[j];
            if m1 == m2 && n1 != n2 {
                let se = (c1.stderr.powi(2) + c2.stderr.powi(2)).sqrt();
                report.verdicts.push(Verdict::band(
                    format!("aging_m{m1}_n{n1}_vs_n{n2}"),
                    (c1.mean - c2.mean).abs(),
                    0.0,
                    3.0 * se,
                    f64::INFINITY,
                    "covariances differ by more than 3 combined stderr",
                ));
            }
        }
    }
    Ok(report)
}

/// Rescaled length of the domain containing the origin at one time in stalling period `n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainSample {
    pub t: f64,
    /// `(x₁ - x₀) / (2^n + 1)` for every usable replica, `x₀` the leftmost zero and `x₁` the next one.
    pub values: Vec<f64>,
    /// `x₀ / (2^n + 1)` for the same replicas.
    pub first_zero: Vec<f64>,
    /// Replicas whose `x₁` lies past the window and is replaced by the frozen zero.
    /// Their `e^{-sX̄}` is below `e^{-DOMAIN_TAIL}` at every grid point.
    pub censored: u64,
    /// Replicas with no zero inside the window.
    pub excluded: u64,
}

pub const DOMAIN_TAIL: f64 = 20.0;

#[allow(clippy::too_many_arguments)]
pub fn sample_domain_lengths<R: ReplicaRunner>(
    mu: &RenewalLaw,
    q: f64,
    epsilon: f64,
    n: u32,
    s_min: f64,
    replicas: u64,
    seed: u64,
    runner: &R,
) -> Result<DomainSample> {
    let params = ModelParams::new(q)?;
    let scales = TimeScale::new(epsilon, q)?;
    check_quench(q, n, &scales)?;
    let scale = (1u64 << n) as f64 + 1.0;
    // zeros spawned left of the origin stay within 2^n - 1 sites of it
    let left = 4i64 << (n + 1);
    // domains reaching past the window weigh at most e^{-DOMAIN_TAIL}
    let right = right_extent(n).max((DOMAIN_TAIL * scale / s_min).ceil() as i64);
    let window = Interval::new(-left, right)?;
    let (lo, hi) = scales.stalling_period(n);
    let t = (lo * hi).sqrt();
    let probes = Probes {
        sample_times: vec![t],
        zeros: false,
        ..Probes::default()
    };
    let out: Vec<Result<Option<(i64, i64)>>> = runner.run(replicas, |r| {
        let s = StreamSeed::new(seed, r);
        let init = sample_renewal(mu, window, Boundary::FrozenZeroRight, &mut s.rng(Purpose::Initial))?;
        let tr = run_graphical(&init, &params, t, &probes, s, Mode::RejectionFree)?;
        let end = tr.final_state.unwrap();
        let a = window.a();
        let mut zeros = end
            .occupancy()
            .into_iter()
            .enumerate()
            .filter(|&(_, o)| o == 0)
            .map(|(i, _)| i as i64 + a);
        Ok(zeros.next().map(|x0| (x0, zeros.next().unwrap_or(right + 1))))
    });
    let mut sample = DomainSample {
        t,
        values: Vec::new(),
        first_zero: Vec::new(),
        censored: 0,
        excluded: 0,
    };
    for o in out {
        match o? {
            Some((x0, x1)) => {
                sample.censored += (x1 == right + 1) as u64;
                sample.values.push((x1 - x0) as f64 / scale);
                sample.first_zero.push(x0 as f64 / scale);
            }
            None => sample.excluded += 1,
        }
    }
    Ok(sample)
}

fn empirical_laplace(values: &[f64], s: f64) -> EstimateCI {
    let xs: Vec<f64> = values.iter().map(|v| (-s * v).exp()).collect();
    EstimateCI::from_samples(&xs)
}

/// Largest `|Ê e^{-sX̄} - laplace_x(s, c0)|` over the grid.
pub fn laplace_distance(values: &[f64], s_grid: &[f64], c0: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &s in s_grid {
        worst = worst.max((empirical_laplace(values, s).mean - laplace_x(s, c0)?).abs());
    }
    Ok(worst)
}

pub const DOMAIN_TOLERANCE: f64 = 0.05;

#[allow(clippy::too_many_arguments)]
pub fn domain_length_experiment<R: ReplicaRunner>(
    mu: &RenewalLaw,
    q: f64,
    epsilon: f64,
    n: u32,
    s_grid: &[f64],
    replicas: u64,
    seed: u64,
    runner: &R,
) -> Result<ExperimentReport> {
    if s_grid.is_empty() || s_grid.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::Precondition("s grid must be nonempty and positive".into()));
    }
    let s_min = s_grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let sample = sample_domain_lengths(mu, q, epsilon, n, s_min, replicas, seed, runner)?;
    let c0 = mu.c0();
    let mut report = ExperimentReport::new(
        "quench-domains",
        &["s", "empirical", "empirical_se", "limit_c0", "limit_c0_1", "limit_c0_half"],
    );
    common_params(&mut report, mu, q, epsilon, replicas, seed);
    report.param("n", ParamValue::Int(n as i64));
    report.param("t", ParamValue::Float(sample.t));
    report.param("censored", ParamValue::Int(sample.censored as i64));
    report.excluded.push(("no zero in the window".into(), sample.excluded));
    for &s in s_grid {
        let e = empirical_laplace(&sample.values, s);
        report.rows.push(vec![
            s,
            e.mean,
            e.stderr,
            laplace_x(s, c0)?,
            laplace_x(s, 1.0)?,
            laplace_x(s, 0.5)?,
        ]);
    }
    let own = laplace_distance(&sample.values, s_grid, c0)?;
    report.verdicts.push(Verdict::band(
        "laplace_distance",
        own,
        0.0,
        0.0,
        DOMAIN_TOLERANCE,
        "max over s of |empirical - limit| <= 0.05",
    ));
    if c0 < 1.0 {
        let finite_mean = laplace_distance(&sample.values, s_grid, 1.0)?;
        report.verdicts.push(Verdict::band(
            "heavy_tail_prefers_own_c0",
            own,
            finite_mean,
            0.0,
            finite_mean * (1.0 - 1e-12),
            "distance to own c0 curve < distance to c0 = 1 curve",
        ));
    }
    let floor = mu.d_min() as f64 / ((1u64 << n) as f64 + 1.0);
    let smallest = sample.values.iter().cloned().fold(f64::INFINITY, f64::min);
    report.verdicts.push(Verdict::band(
        "positivity",
        smallest,
        floor,
        1.0 / ((1u64 << n) as f64 + 1.0),
        f64::INFINITY,
        "every rescaled domain holds at least one site",
    ));
    Ok(report)
}

/// Whether `α` in Bernoulli(`α`) is the probability of an occupied or of an empty site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ConvergenceConvention {
    #[default]
    Occupancy,
    Vacancy,
}

/// `m = ½ gap min(1, log(1/α)/log(α/(p∧q)))`, with the factor taken as 1
/// when `α < p∧q` makes the ratio negative.
pub fn convergence_rate(gap: f64, alpha: f64, params: &ModelParams) -> f64 {
    let ratio = (1.0 / alpha).ln() / (alpha / params.min_pq()).ln();
    let factor = if ratio > 0.0 { ratio.min(1.0) } else { 1.0 };
    0.5 * gap * factor
}

pub const CONVERGENCE_WINDOW: usize = 8;

/// `∫ dQ |E_σ f(σ_t) - π(f)|` for `f = 1{σ(0) = 0}` on `[0, L-1]`, computed exactly.
pub fn convergence_experiment(
    alpha: f64,
    q: f64,
    times: &[f64],
    len: usize,
    convention: ConvergenceConvention,
) -> Result<ExperimentReport> {
    let params = ModelParams::new(q)?;
    let p = params.p();
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            expected: "(0, 1)",
        });
    }
    if alpha == p {
        return Err(Error::Precondition("alpha = p is excluded".into()));
    }
    let occupied = match convention {
        ConvergenceConvention::Occupancy => alpha,
        ConvergenceConvention::Vacancy => 1.0 - alpha,
    };
    if occupied == p {
        return Err(Error::Precondition("Bernoulli(alpha) equals the equilibrium measure".into()));
    }
    if times.len() < 2 || times.windows(2).any(|w| w[1] <= w[0]) || times[0] < 0.0 {
        return Err(Error::Precondition("need at least two increasing times".into()));
    }
    let gen = SparseGenerator::build(len, &params, Flavor::Plain)?;
    let gap = spectral_gap(&gen)?.gap;
    let m = convergence_rate(gap, alpha, &params);
    let c_f = 1.0 / params.min_pq() / (q - alpha).abs();
    let f: Vec<f64> = (0..gen.states()).map(|s| (s & 1 == 0) as u8 as f64).collect();
    let qw: Vec<f64> = (0..gen.states())
        .map(|s| {
            (0..len)
                .map(|x| if (s >> x) & 1 == 1 { occupied } else { 1.0 - occupied })
                .product()
        })
        .collect();
    let mut report = ExperimentReport::new("converge", &["t", "deviation", "bound"]);
    report.param("alpha", ParamValue::Float(alpha));
    report.param("q", ParamValue::Float(q));
    report.param("len", ParamValue::Int(len as i64));
    report.param(
        "convention",
        ParamValue::Text(match convention {
            ConvergenceConvention::Occupancy => "occupancy".into(),
            ConvergenceConvention::Vacancy => "vacancy".into(),
        }),
    );
    report.param("gap", ParamValue::Float(gap));
    report.param("m", ParamValue::Float(m));
    report.param("c_f", ParamValue::Float(c_f));
    let mut logs = Vec::new();
    for &t in times {
        let pt = semigroup_apply(&gen, t, &f)?;
        let d: f64 = qw.iter().zip(&pt).map(|(w, v)| w * (v - q).abs()).sum();
        report.rows.push(vec![t, d, c_f * (-m * t).exp()]);
        logs.push(d.max(f64::MIN_POSITIVE).ln());
    }
    let rate = -slope(times, &logs);
    report.verdicts.push(Verdict::band(
        "decay_rate",
        rate,
        m,
        0.5 * m,
        f64::INFINITY,
        "fitted exponential rate >= m/2",
    ));
    let worst = report
        .rows
        .iter()
        .map(|r| r[1] - r[2])
        .fold(f64::NEG_INFINITY, f64::max);
    report.verdicts.push(Verdict::band(
        "prefactor_bound",
        worst,
        0.0,
        f64::NEG_INFINITY,
        1e-12,
        "deviation <= C_f e^{-mt} at every t",
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::Sequential;

    #[test]
    fn plateau_targets() {
        assert!((plateau_level(1, 1.0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((plateau_level(2, 1.0) - 0.2).abs() < 1e-15);
        let t = 0.5 * 0.2 * (1.0 - 0.5 / 3.0);
        assert!((t - 0.083_333).abs() < 1e-6);
    }

    #[test]
    fn grid_inside_period() {
        let sc = TimeScale::new(0.1, 0.05).unwrap();
        let (lo, hi) = sc.stalling_period(2);
        for t in stalling_grid(&sc, 2, 5) {
            assert!(t > lo && t < hi);
        }
    }

    #[test]
    fn convergence_excludes_equilibrium() {
        assert!(convergence_experiment(0.7, 0.3, &[1.0, 2.0], 4, ConvergenceConvention::Occupancy).is_err());
        assert!(convergence_experiment(0.3, 0.3, &[1.0, 2.0], 4, ConvergenceConvention::Vacancy).is_err());
        assert!(convergence_experiment(0.3, 0.3, &[1.0, 2.0], 4, ConvergenceConvention::Occupancy).is_ok());
    }

    #[test]
    fn convergence_decays() {
        let r = convergence_experiment(0.9, 0.3, &[1.0, 2.0, 4.0, 8.0], 6, ConvergenceConvention::Occupancy).unwrap();
        assert!(r.passed(), "{:?}", r.verdicts);
        let d: Vec<f64> = r.rows.iter().map(|row| row[1]).collect();
        assert!(d.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn small_plateau_run_is_reproducible() {
        let mu = RenewalLaw::geometric(0.5).unwrap();
        let a = plateau_experiment(&mu, 0.1, 0.1, 1, 40, 7, &Sequential).unwrap();
        let b = plateau_experiment(&mu, 0.1, 0.1, 1, 40, 7, &Sequential).unwrap();
        assert_eq!(a.rows, b.rows);
        assert!(a.verdicts.iter().all(|v| !v.tolerance.is_empty()));
    }

    #[test]
    fn domain_lengths_are_positive() {
        let mu = RenewalLaw::geometric(0.5).unwrap();
        let s = sample_domain_lengths(&mu, 0.1, 0.1, 1, 0.5, 30, 3, &Sequential).unwrap();
        assert!(s.values.iter().all(|&v| v >= 1.0 / 3.0));
    }

    #[test]
    fn rejects_bad_inputs() {
        let mu = RenewalLaw::geometric(0.5).unwrap();
        assert!(plateau_experiment(&mu, 0.3, 0.1, 1, 10, 0, &Sequential).is_err());
        assert!(plateau_experiment(&mu, 0.05, 0.1, 4, 10, 0, &Sequential).is_err());
        assert!(aging_experiment(&mu, 0.05, 0.1, &[(2, 1)], 1, 10, 0, &Sequential).is_err());
    }
}
