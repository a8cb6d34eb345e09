//! One function per subcommand.

use east_core::exact::{
    activity_scgf, lsi_bounds, persistence_bound_check, phi, spectral_gap, Flavor, Method, SparseGenerator,
};
use east_core::experiments::{
    aging_experiment, convergence_experiment, domain_length_experiment, plateau_experiment, ConvergenceConvention,
    ExperimentReport, Verdict,
};
use east_core::limits::{e1, laplace_x, laplace_y, YTransform};
use east_core::reach::{certify_energy_barrier, enumerate_reachable, Barrier};
use east_core::simulate::{measure_activity, measure_persistence, Mode};
use east_core::{Error, ModelParams, RenewalLaw};
use serde_json::json;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{Cell, Outcome};
use crate::runner::RayonRunner;

fn verdict(name: &str, observed: f64, target: f64, lower: f64, upper: f64, tolerance: &str) -> Verdict {
    Verdict {
        name: name.into(),
        observed,
        target,
        lower,
        upper,
        tolerance: tolerance.into(),
        passed: observed >= lower && observed <= upper,
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Dense => "dense",
        Method::Iterative => "iterative",
    }
}

fn params(cfg: &RunConfig) -> Result<ModelParams, CliError> {
    Ok(ModelParams::new(cfg.get("q")?)?)
}

/// `point:D`, `geometric:R`, `geometric_mean:M` or `pareto:ALPHA:CUTOFF`.
pub fn parse_mu(spec: &str) -> Result<RenewalLaw, CliError> {
    let bad = || CliError::Usage(format!("--mu: cannot parse `{spec}`"));
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    let num = |i: usize| parts.get(i).and_then(|s| s.parse::<f64>().ok()).ok_or_else(bad);
    let int = |i: usize| parts.get(i).and_then(|s| s.parse::<u64>().ok()).ok_or_else(bad);
    let law = match (parts[0], parts.len()) {
        ("point", 2) => RenewalLaw::point_mass(int(1)?),
        ("geometric", 2) => RenewalLaw::geometric(num(1)?),
        ("geometric_mean", 2) => RenewalLaw::geometric_with_mean(num(1)?),
        ("pareto", 3) => RenewalLaw::pareto(num(1)?, int(2)?),
        _ => return Err(bad()),
    };
    Ok(law?)
}

fn parse_mode(raw: &str) -> Result<Mode, CliError> {
    match raw {
        "faithful" => Ok(Mode::Faithful),
        "rejection-free" => Ok(Mode::RejectionFree),
        _ => Err(CliError::Usage(format!("--mode: expected faithful or rejection-free, got `{raw}`"))),
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let runner = RayonRunner::new(cfg.get("threads")?)
        .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    match cfg.command.as_str() {
        "gap" => gap(cfg),
        "lsi" => lsi(cfg),
        "persistence" => persistence(cfg, &runner),
        "activity" => activity(cfg, &runner),
        "reach" => reach(cfg),
        "quench-plateau" => {
            let r = plateau_experiment(
                &parse_mu(cfg.raw("mu"))?,
                cfg.get("q")?,
                cfg.get("epsilon")?,
                cfg.get("n_max")?,
                cfg.get("replicas")?,
                cfg.get("seed")?,
                &runner,
            )?;
            Ok(from_report(r))
        }
        "quench-aging" => {
            let pairs = cfg
                .list::<String>("pairs")?
                .iter()
                .map(|p| {
                    p.split_once('-')
                        .and_then(|(m, n)| Some((m.trim().parse().ok()?, n.trim().parse().ok()?)))
                        .ok_or_else(|| CliError::Usage(format!("--pairs: cannot parse `{p}`")))
                })
                .collect::<Result<Vec<(u32, u32)>, _>>()?;
            let r = aging_experiment(
                &parse_mu(cfg.raw("mu"))?,
                cfg.get("q")?,
                cfg.get("epsilon")?,
                &pairs,
                cfg.get("x")?,
                cfg.get("replicas")?,
                cfg.get("seed")?,
                &runner,
            )?;
            Ok(from_report(r))
        }
        "quench-domains" => {
            let r = domain_length_experiment(
                &parse_mu(cfg.raw("mu"))?,
                cfg.get("q")?,
                cfg.get("epsilon")?,
                cfg.get("n")?,
                &cfg.list("s_grid")?,
                cfg.get("replicas")?,
                cfg.get("seed")?,
                &runner,
            )?;
            Ok(from_report(r))
        }
        "converge" => {
            let convention = match cfg.raw("convention") {
                "occupancy" => ConvergenceConvention::Occupancy,
                "vacancy" => ConvergenceConvention::Vacancy,
                other => {
                    return Err(CliError::Usage(format!(
                        "--convention: expected occupancy or vacancy, got `{other}`"
                    )))
                }
            };
            let r = convergence_experiment(
                cfg.get("alpha")?,
                cfg.get("q")?,
                &cfg.list("times")?,
                cfg.get("L")?,
                convention,
            )?;
            Ok(from_report(r))
        }
        "limits-eval" => limits_eval(cfg),
        "selftest" => selftest(),
        other => Err(CliError::Usage(format!("unknown subcommand `{other}`"))),
    }
}

fn from_report(r: ExperimentReport) -> Outcome {
    let cols: Vec<&str> = r.columns.iter().map(String::as_str).collect();
    let mut out = Outcome::new(&cols);
    // period indices are whole numbers
    let index: Vec<bool> = cols.iter().map(|c| matches!(*c, "n" | "m")).collect();
    for row in &r.rows {
        out.push(row.iter().zip(&index).map(|(&v, &i)| if i { Cell::Int(v as i64) } else { Cell::Num(v) }).collect());
    }
    out.results = json!({ "id": r.id, "parameters": r.parameters, "excluded": r.excluded });
    out.verdicts = r.verdicts;
    out
}

fn gap(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = params(cfg)?;
    let max_len: usize = cfg.get("L")?;
    if max_len == 0 {
        return Err(CliError::Usage("--L must be at least 1".into()));
    }
    let mut out = Outcome::new(&["L", "q", "gap", "residual", "method"]);
    let mut gaps = Vec::new();
    for len in 1..=max_len {
        let r = spectral_gap(&SparseGenerator::build(len, &p, Flavor::Plain)?)?;
        out.push(vec![len.into(), p.q().into(), r.gap.into(), r.residual.into(), method_name(r.method).into()]);
        gaps.push(r.gap);
    }
    let rise = gaps.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    if gaps.len() > 1 {
        out.verdicts.push(verdict(
            "gap_nonincreasing",
            rise,
            0.0,
            f64::NEG_INFINITY,
            1e-8,
            "largest gap(L+1) - gap(L) <= 1e-8",
        ));
    }
    out.results = json!({ "gaps": gaps });
    Ok(out)
}

fn lsi(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = params(cfg)?;
    let alpha: f64 = cfg.get("alpha")?;
    let (lo, hi): (usize, usize) = (cfg.get("L_min")?, cfg.get("L_max")?);
    let mut out = Outcome::new(&["L", "q", "alpha", "lower", "lambda", "upper", "upper_shifted_log"]);
    let mut margin = f64::INFINITY;
    for len in lo..=hi {
        let b = lsi_bounds(len, &p, alpha)?;
        margin = margin.min(b.upper - b.lower.value);
        out.push(vec![
            len.into(),
            p.q().into(),
            alpha.into(),
            b.lower.value.into(),
            b.lower.lambda.into(),
            b.upper.into(),
            b.upper_shifted_log.into(),
        ]);
    }
    out.verdicts.push(verdict(
        "upper_above_lower",
        margin,
        0.0,
        0.0,
        f64::INFINITY,
        "min over L of upper - lower >= 0",
    ));
    Ok(out)
}

fn persistence(cfg: &RunConfig, runner: &RayonRunner) -> Result<Outcome, CliError> {
    let p = params(cfg)?;
    let len: usize = cfg.get("L")?;
    let horizon: f64 = cfg.get("horizon")?;
    let points: usize = cfg.get("points")?;
    if points == 0 {
        return Err(CliError::Usage("--points must be positive".into()));
    }
    let grid: Vec<f64> = (1..=points).map(|k| horizon * k as f64 / points as f64).collect();
    let gap = spectral_gap(&SparseGenerator::build(len, &p, Flavor::Plain)?)?.gap;
    let curve = measure_persistence(
        &p,
        len,
        horizon,
        &grid,
        cfg.get("replicas")?,
        cfg.get("seed")?,
        parse_mode(cfg.raw("mode"))?,
        runner,
    )?;
    let mut out = Outcome::new(&["t", "F", "F_se", "bound"]);
    let mut worst = f64::NEG_INFINITY;
    for (t, f) in grid.iter().zip(&curve.f) {
        let bound = 2.0 * (-gap * p.min_pq() * t / 4.0).exp();
        worst = worst.max(f.mean - bound - 3.0 * f.stderr);
        out.push(vec![(*t).into(), f.mean.into(), f.stderr.into(), bound.into()]);
    }
    out.verdicts.push(verdict(
        "persistence_bound",
        worst,
        0.0,
        f64::NEG_INFINITY,
        0.0,
        "F(t) - 2exp(-gap min(p,q) t/4) <= 3 stderr at every t",
    ));
    let fk = persistence_bound_check(len, &p, 0)?;
    out.verdicts.push(verdict(
        "feynman_kac_ratio",
        fk.ratio,
        fk.bound,
        f64::NEG_INFINITY,
        fk.bound + 1e-8,
        "beta(gap/2)/(gap/2) <= pq/(1+p) + p + 1e-8",
    ));
    out.results = json!({ "gap": gap, "feynman_kac": fk });
    Ok(out)
}

/// Tilts at which the large-negative branch of `φ_N` is sampled.
pub const FLAT_ALPHAS: [f64; 4] = [-40.0, -80.0, -160.0, -320.0];

/// Largest slope of `φ_N` past `α = -40`, relative to its slope at the origin.
pub const FLATNESS: f64 = 1e-3;

fn activity(cfg: &RunConfig, runner: &RayonRunner) -> Result<Outcome, CliError> {
    let p = params(cfg)?;
    let n: usize = cfg.get("N")?;
    let est = measure_activity(&p, n, cfg.get("horizon")?, cfg.get("replicas")?, cfg.get("seed")?, runner)?;
    let scgf_n: usize = cfg.get("scgf_N")?;
    let lambdas: Vec<f64> = cfg.list("lambdas")?;
    let pts = activity_scgf(scgf_n, &p, &lambdas)?;
    let mut out = Outcome::new(&["lambda", "psi", "residual", "alpha", "phi"]);
    for pt in &pts {
        let a = pt.lambda * scgf_n as f64;
        out.push(vec![
            pt.lambda.into(),
            pt.psi.into(),
            pt.residual.into(),
            a.into(),
            (pt.psi * scgf_n as f64).into(),
        ]);
    }
    let bulk = est.bulk_rate;
    out.verdicts.push(verdict(
        "bulk_activity",
        bulk.mean,
        est.bulk_expected,
        est.bulk_expected - 3.0 * bulk.stderr,
        est.bulk_expected + 3.0 * bulk.stderr,
        "changes per site per time off the boundary = 2p(1-p)^2 within 3 stderr",
    ));
    let h = 1e-4;
    let d = activity_scgf(scgf_n, &p, &[-h, 0.0, h])?;
    let slope = (d[2].psi - d[0].psi) / (2.0 * h);
    out.verdicts.push(verdict(
        "psi_at_zero",
        d[1].psi,
        0.0,
        -1e-10,
        1e-10,
        "|psi_N(0)| <= 1e-10",
    ));
    let total = est.total_rate;
    let slack = 3.0 * total.stderr + 0.02;
    out.verdicts.push(verdict(
        "psi_slope_vs_monte_carlo",
        slope,
        total.mean,
        total.mean - slack,
        total.mean + slack,
        "dpsi_N/dlambda(0) = A(t)/(Nt) within 3 stderr + 0.02",
    ));
    let flat = phi(scgf_n, &p, &FLAT_ALPHAS)?;
    let far_slope = (flat[0] - flat[1]).abs() / (FLAT_ALPHAS[0] - FLAT_ALPHAS[1]).abs();
    out.verdicts.push(verdict(
        "phi_flattening",
        far_slope,
        0.0,
        0.0,
        FLATNESS * slope,
        "mean |dphi/dalpha| on [-80, -40] <= 1e-3 x dphi/dalpha(0)",
    ));
    out.results = json!({
        "monte_carlo": est,
        "psi_slope_at_zero": slope,
        "phi_negative_branch": FLAT_ALPHAS.iter().zip(&flat).map(|(a, v)| json!({"alpha": a, "phi": v})).collect::<Vec<_>>(),
    });
    Ok(out)
}

fn reach(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n_max: u32 = cfg.get("n")?;
    let mut out = Outcome::new(&[
        "n",
        "ell",
        "total",
        "counts",
        "ell_tilde",
        "bfs_depth",
        "states_visited",
        "box_len",
        "cardinality_bound",
        "bound_holds",
    ]);
    let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(";");
    let mut results = Vec::new();
    let mut prev_top: Option<u32> = None;
    for n in 1..=n_max {
        let r = enumerate_reachable(n)?;
        out.push(vec![
            n.into(),
            r.ell.into(),
            r.total.into(),
            join(&r.counts).into(),
            join(&r.ell_tilde.iter().map(|&x| x as u64).collect::<Vec<_>>()).into(),
            r.bfs_depth.into(),
            r.states_visited.into(),
            r.box_len.into(),
            r.cardinality_bound.into(),
            r.bound_holds.into(),
        ]);
        let target = (1u64 << n) - 1;
        out.verdicts.push(verdict(
            &format!("ell_{n}"),
            r.ell as f64,
            target as f64,
            target as f64,
            target as f64,
            "exact: ell(n) = 2^n - 1",
        ));
        if let Some(top) = prev_top {
            out.verdicts.push(verdict(
                &format!("ell_tilde_recursion_{n}"),
                r.ell_tilde[0] as f64,
                (top + 1) as f64,
                (top + 1) as f64,
                (top + 1) as f64,
                "exact: ell~(n,1) = ell~(n-1,n-1) + 1",
            ));
        }
        let barrier = certify_energy_barrier(target as u32 + 1, n)? == Barrier::Unreachable
            && certify_energy_barrier(target as u32, n)? == Barrier::Reachable;
        out.verdicts.push(verdict(
            &format!("barrier_{n}"),
            barrier as u8 as f64,
            1.0,
            1.0,
            1.0,
            "depth 2^n - 1 reachable and 2^n not",
        ));
        prev_top = r.ell_tilde.last().copied();
        results.push(r);
    }
    out.results = serde_json::to_value(&results)?;
    Ok(out)
}

fn limits_eval(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let c0: f64 = cfg.get("c0")?;
    let reading = match cfg.raw("y_reading") {
        "literal" => YTransform::Literal,
        "dickman" => YTransform::DickmanRegularized,
        other => return Err(CliError::Usage(format!("--y_reading: expected literal or dickman, got `{other}`"))),
    };
    let mut out = Outcome::new(&["s", "e1", "laplace_x", "laplace_y"]);
    let mut refused = None;
    for s in cfg.list::<f64>("s_grid")? {
        let y = match laplace_y(s, c0, reading) {
            Ok(v) => Cell::Num(v),
            Err(Error::Refused(why)) => {
                refused = Some(why);
                Cell::Text("refused".into())
            }
            Err(e) => return Err(e.into()),
        };
        out.push(vec![s.into(), e1(s)?.into(), laplace_x(s, c0)?.into(), y]);
    }
    out.results = json!({ "c0": c0, "laplace_y_refused": refused });
    Ok(out)
}

/// Quick checks with known answers; each becomes one row and one verdict.
pub fn selftest() -> Result<Outcome, CliError> {
    let mut out = Outcome::new(&["check", "value", "target", "passed"]);
    let mut add = |name: &str, value: f64, target: f64, tol: f64| {
        let v = verdict(name, value, target, target - tol, target + tol, &format!("|value - target| <= {tol:e}"));
        out.push(vec![name.into(), value.into(), target.into(), v.passed.into()]);
        out.verdicts.push(v);
    };
    for q in [0.2, 0.5] {
        let p = ModelParams::new(q)?;
        let mut rows: f64 = 0.0;
        let mut balance: f64 = 0.0;
        for len in 1..=8 {
            let g = SparseGenerator::build(len, &p, Flavor::Plain)?;
            rows = rows.max(g.max_row_sum());
            balance = balance.max(g.max_detailed_balance_defect());
        }
        add(&format!("row_sums_q{q}"), rows, 0.0, 1e-12);
        add(&format!("detailed_balance_q{q}"), balance, 0.0, 1e-14);
        let single = spectral_gap(&SparseGenerator::build(1, &p, Flavor::Plain)?)?.gap;
        add(&format!("single_site_gap_q{q}"), single, 1.0, 1e-12);
    }
    for n in 1..=3 {
        add(&format!("ell_{n}"), enumerate_reachable(n)?.ell as f64, ((1u32 << n) - 1) as f64, 0.0);
    }
    add("e1_at_1", e1(1.0)?, 0.219_383_934_395_520_3, 1e-12);
    add("laplace_x_at_1", laplace_x(1.0, 1.0)?, 1.0 - (-0.219_383_934_395_520_3f64).exp(), 1e-12);
    let p = ModelParams::new(0.5)?;
    let m = east_core::exact::leftmost_zero_law(5, &ModelParams::new(0.4)?)?;
    add("leftmost_zero_law_mass", m.iter().sum(), 1.0, 1e-12);
    add(
        "block_eigenvalue",
        east_core::exact::block_dynamics_eigenvalue(1, &p)?,
        -1.0 + 0.5f64.sqrt(),
        1e-15,
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu_specs() {
        assert_eq!(parse_mu("point:3").unwrap().d_min(), 3);
        assert_eq!(parse_mu("geometric_mean:2").unwrap().mean(), 2.0);
        assert_eq!(parse_mu("pareto:0.5:1024").unwrap().c0(), 0.5);
        assert!(parse_mu("pareto:0.5").is_err());
        assert!(parse_mu("cauchy:1").is_err());
    }

    #[test]
    fn selftest_passes() {
        assert!(selftest().unwrap().passed());
    }
}
