//! Layered run configuration.
//!
//! Values resolve in the order defaults, config file, `EAST_*` environment,
//! command-line flags; later layers win. Every value is kept as text and
//! parsed on use, so the resolved map can be written back out verbatim.

use std::collections::BTreeMap;
use std::path::Path;

use clap::parser::ValueSource;
use clap::{Arg, ArgMatches, Command};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub struct Key {
    pub name: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

const fn key(name: &'static str, default: &'static str, help: &'static str) -> Key {
    Key { name, default, help }
}

/// Keys accepted by every subcommand.
pub const COMMON: &[Key] = &[
    key("seed", "0", "base seed for all random streams"),
    key("threads", "0", "worker cap, 0 = all cores"),
    key("out", "", "output directory; empty prints to stdout"),
    key("format", "csv", "stdout format when no output directory is set: csv or json"),
];

pub struct Subcommand {
    pub name: &'static str,
    pub about: &'static str,
    pub columns: &'static str,
    pub keys: &'static [Key],
}

pub const SUBCOMMANDS: &[Subcommand] = &[
    Subcommand {
        name: "gap",
        about: "Spectral gap of the finite-volume generator for L = 1..L",
        columns: "L, q, gap, residual, method",
        keys: &[key("q", "0.5", "vacancy density"), key("L", "10", "largest window length")],
    },
    Subcommand {
        name: "lsi",
        about: "Log-Sobolev lower and upper bounds",
        columns: "L, q, alpha, lower, lambda, upper, upper_shifted_log",
        keys: &[
            key("q", "0.5", "vacancy density"),
            key("L_min", "3", "smallest window length"),
            key("L_max", "9", "largest window length"),
            key("alpha", "2", "exponent alpha in (0, 2]"),
        ],
    },
    Subcommand {
        name: "persistence",
        about: "Monte Carlo persistence of site 0 against the exponential bound",
        columns: "t, F, F_se, bound",
        keys: &[
            key("q", "0.5", "vacancy density"),
            key("L", "12", "window length"),
            key("horizon", "30", "largest time"),
            key("points", "16", "number of grid times"),
            key("replicas", "10000", "Monte Carlo replicas"),
            key("mode", "rejection-free", "faithful or rejection-free"),
        ],
    },
    Subcommand {
        name: "activity",
        about: "Activity rate and the tilted-generator cumulant function",
        columns: "lambda, psi, residual, alpha, phi",
        keys: &[
            key("q", "0.5", "vacancy density"),
            key("N", "64", "Monte Carlo window length"),
            key("horizon", "200", "Monte Carlo time"),
            key("replicas", "200", "Monte Carlo replicas"),
            key("scgf_N", "12", "window length of the tilted generator"),
            key("lambdas", "-1,-0.5,-0.1,0,0.1,0.5", "tilts for psi_N"),
        ],
    },
    Subcommand {
        name: "reach",
        about: "Configurations reachable from the full state under a zero budget",
        columns: "n, ell, total, counts, ell_tilde, bfs_depth, states_visited, box_len, cardinality_bound, bound_holds",
        keys: &[key("n", "4", "largest zero budget, 1..=5")],
    },
    Subcommand {
        name: "quench-plateau",
        about: "Vacancy and persistence plateaux after a renewal quench",
        columns: "n, t, p_vacant, p_vacant_se, persistent, persistent_se",
        keys: &[
            key("mu", "geometric:0.5", "gap law: point:D, geometric:R or pareto:ALPHA:CUTOFF"),
            key("q", "0.05", "vacancy density"),
            key("epsilon", "0.1", "time-scale exponent"),
            key("n_max", "2", "last stalling period"),
            key("replicas", "20000", "Monte Carlo replicas"),
        ],
    },
    Subcommand {
        name: "quench-aging",
        about: "Two-time vacancy covariance after a renewal quench",
        columns: "m, n, s, t, cov, cov_se, target",
        keys: &[
            key("mu", "geometric:0.5", "gap law: point:D, geometric:R or pareto:ALPHA:CUTOFF"),
            key("q", "0.05", "vacancy density"),
            key("epsilon", "0.1", "time-scale exponent"),
            key("pairs", "1-1,1-2,1-3", "stalling-period pairs m-n with m <= n"),
            key("x", "0", "observed site"),
            key("replicas", "20000", "Monte Carlo replicas"),
        ],
    },
    Subcommand {
        name: "quench-domains",
        about: "Laplace transform of the rescaled domain length after a renewal quench",
        columns: "s, empirical, empirical_se, limit_c0, limit_c0_1, limit_c0_half",
        keys: &[
            key("mu", "geometric:0.5", "gap law: point:D, geometric:R or pareto:ALPHA:CUTOFF"),
            key("q", "0.05", "vacancy density"),
            key("epsilon", "0.1", "time-scale exponent"),
            key("n", "2", "stalling period"),
            key("s_grid", "0.5,1,2", "Laplace arguments"),
            key("replicas", "20000", "Monte Carlo replicas"),
        ],
    },
    Subcommand {
        name: "converge",
        about: "Exact relaxation from a Bernoulli product law",
        columns: "t, deviation, bound",
        keys: &[
            key("alpha", "0.9", "Bernoulli parameter"),
            key("q", "0.3", "vacancy density"),
            key("L", "8", "window length"),
            key("times", "1,2,4,8,16", "evaluation times"),
            key("convention", "occupancy", "alpha is the occupancy or vacancy probability"),
        ],
    },
    Subcommand {
        name: "limits-eval",
        about: "Exponential integral and the coarsening limit transforms",
        columns: "s, e1, laplace_x, laplace_y",
        keys: &[
            key("c0", "1", "exponent class in (0, 1]"),
            key("s_grid", "0.25,0.5,1,2,4", "Laplace arguments"),
            key("y_reading", "literal", "literal (refused) or dickman"),
        ],
    },
    Subcommand {
        name: "selftest",
        about: "Fast internal consistency checks",
        columns: "check, value, target, passed",
        keys: &[],
    },
];

pub fn subcommand(name: &str) -> Option<&'static Subcommand> {
    SUBCOMMANDS.iter().find(|s| s.name == name)
}

fn env_name(key: &str) -> String {
    format!("EAST_{}", key.to_uppercase().replace('-', "_"))
}

pub fn command() -> Command {
    let mut root = Command::new("east")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Simulation and exact analysis of the East model")
        .after_help(
            "Every key can also come from a config file (--config, key = value lines or JSON)\n\
             or from an EAST_<KEY> environment variable, e.g. EAST_Q=0.3.\n\
             Flags override the environment, which overrides the file.",
        )
        .subcommand_required(true)
        .arg_required_else_help(true);
    for sub in SUBCOMMANDS {
        let mut cmd = Command::new(sub.name)
            .about(sub.about)
            .after_help(format!("CSV columns: {}", sub.columns))
            .arg(
                Arg::new("config")
                    .long("config")
                    .value_name("FILE")
                    .help("config file: key = value lines, or JSON (a previous summary works)"),
            );
        for k in sub.keys.iter().chain(COMMON) {
            cmd = cmd.arg(
                Arg::new(k.name)
                    .long(k.name)
                    .env(env_name(k.name))
                    .value_name("VALUE")
                    .allow_hyphen_values(true)
                    .help(format!("{} [default: {}]", k.help, k.default)),
            );
        }
        root = root.subcommand(cmd);
    }
    root
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub params: BTreeMap<String, String>,
}

fn scalar_text(v: &serde_json::Value) -> Option<String> {
    match v {
        serde_json::Value::String(s) => Some(s.clone()),
        serde_json::Value::Number(n) => Some(n.to_string()),
        serde_json::Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

/// Parse a config file body into key/value pairs.
///
/// JSON input may be a flat object, a `{command, params}` object, or a full
/// summary with a `config` member.
pub fn parse_file(text: &str) -> Result<(Option<String>, BTreeMap<String, String>), CliError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let mut v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config file: {e}")))?;
        if let Some(inner) = v.get("config") {
            v = inner.clone();
        }
        let command = v.get("command").and_then(|c| c.as_str()).map(String::from);
        let obj = match v.get("params") {
            Some(p) => p.clone(),
            None => v,
        };
        let obj = obj
            .as_object()
            .ok_or_else(|| CliError::Usage("config file: expected a JSON object".into()))?;
        let mut out = BTreeMap::new();
        for (k, val) in obj {
            if k == "command" {
                continue;
            }
            let s = scalar_text(val)
                .ok_or_else(|| CliError::Usage(format!("config file: `{k}` must be a scalar")))?;
            out.insert(k.clone(), s);
        }
        return Ok((command, out));
    }
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config file line {}: expected key = value", i + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok((None, out))
}

/// Merge the layers for one subcommand.
pub fn resolve(
    sub: &Subcommand,
    file: Option<(Option<String>, BTreeMap<String, String>)>,
    matches: &ArgMatches,
) -> Result<RunConfig, CliError> {
    let known = |k: &str| sub.keys.iter().chain(COMMON).any(|key| key.name == k);
    let mut params: BTreeMap<String, String> = sub
        .keys
        .iter()
        .chain(COMMON)
        .map(|k| (k.name.to_string(), k.default.to_string()))
        .collect();
    if let Some((command, values)) = file {
        if let Some(c) = command {
            if c != sub.name {
                return Err(CliError::Usage(format!(
                    "config file is for `{c}`, not `{}`",
                    sub.name
                )));
            }
        }
        for (k, v) in values {
            if !known(&k) {
                return Err(CliError::Usage(format!("unknown key `{k}` for `{}`", sub.name)));
            }
            params.insert(k, v);
        }
    }
    for source in [ValueSource::EnvVariable, ValueSource::CommandLine] {
        for k in sub.keys.iter().chain(COMMON) {
            if matches.value_source(k.name) == Some(source) {
                if let Some(v) = matches.get_one::<String>(k.name) {
                    params.insert(k.name.to_string(), v.clone());
                }
            }
        }
    }
    Ok(RunConfig {
        command: sub.name.to_string(),
        params,
    })
}

/// Reject `EAST_*` variables that no subcommand knows.
pub fn check_environment(vars: impl Iterator<Item = (String, String)>) -> Result<(), CliError> {
    for (name, _) in vars {
        if let Some(rest) = name.strip_prefix("EAST_") {
            let known = SUBCOMMANDS
                .iter()
                .flat_map(|s| s.keys.iter())
                .chain(COMMON)
                .any(|k| env_name(k.name) == name);
            if !known {
                return Err(CliError::Usage(format!("unknown environment key `{name}` ({rest})")));
            }
        }
    }
    Ok(())
}

pub fn load_file(path: &Path) -> Result<(Option<String>, BTreeMap<String, String>), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_file(&text)
}

impl RunConfig {
    pub fn raw(&self, key: &str) -> &str {
        self.params.get(key).map(String::as_str).unwrap_or("")
    }

    pub fn get<T: std::str::FromStr>(&self, key: &str) -> Result<T, CliError> {
        let raw = self.raw(key);
        raw.trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("--{key}: cannot parse `{raw}`")))
    }

    pub fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Vec<T>, CliError> {
        let raw = self.raw(key);
        if raw.trim().is_empty() {
            return Ok(Vec::new());
        }
        raw.split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|_| CliError::Usage(format!("--{key}: cannot parse `{}`", s.trim())))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> Result<RunConfig, CliError> {
        let m = command().try_get_matches_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
        let (name, sub_m) = m.subcommand().unwrap();
        resolve(subcommand(name).unwrap(), None, sub_m)
    }

    #[test]
    fn defaults_fill_every_key() {
        let c = run(&["east", "gap"]).unwrap();
        assert_eq!(c.raw("q"), "0.5");
        assert_eq!(c.raw("L"), "10");
        assert_eq!(c.raw("seed"), "0");
    }

    #[test]
    fn flags_beat_file() {
        let m = command().try_get_matches_from(["east", "gap", "--q", "0.3"]).unwrap();
        let (_, sub_m) = m.subcommand().unwrap();
        let file = parse_file("q = 0.2\nL = 4\n").unwrap();
        let c = resolve(subcommand("gap").unwrap(), Some(file), sub_m).unwrap();
        assert_eq!(c.raw("q"), "0.3");
        assert_eq!(c.raw("L"), "4");
    }

    #[test]
    fn unknown_file_key_rejected() {
        let m = command().try_get_matches_from(["east", "gap"]).unwrap();
        let (_, sub_m) = m.subcommand().unwrap();
        let file = parse_file("bogus = 1").unwrap();
        assert!(resolve(subcommand("gap").unwrap(), Some(file), sub_m).is_err());
    }

    #[test]
    fn unknown_flag_rejected() {
        assert!(run(&["east", "gap", "--bogus", "1"]).is_err());
    }

    #[test]
    fn summary_json_round_trips() {
        let c = run(&["east", "reach", "--n", "3"]).unwrap();
        let summary = serde_json::json!({ "config": c, "results": [] }).to_string();
        let (command, params) = parse_file(&summary).unwrap();
        assert_eq!(command.as_deref(), Some("reach"));
        assert_eq!(params, c.params);
    }

    #[test]
    fn env_names() {
        assert_eq!(env_name("L_min"), "EAST_L_MIN");
        assert!(check_environment([("EAST_Q".to_string(), String::new())].into_iter()).is_ok());
        assert!(check_environment([("EAST_NOPE".to_string(), String::new())].into_iter()).is_err());
    }
}
