use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use east::config::{self, RunConfig};
use east::output::{summary, write_csv, Outcome};
use east::{commands, CliError};

fn parse() -> Result<RunConfig, CliError> {
    let matches = match config::command().try_get_matches() {
        Ok(m) => m,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            std::process::exit(0);
        }
        Err(e) => return Err(CliError::Usage(e.render().to_string())),
    };
    config::check_environment(std::env::vars())?;
    let (name, sub_matches) = matches.subcommand().expect("subcommand is required");
    let sub = config::subcommand(name).expect("registered subcommand");
    let file = sub_matches
        .get_one::<String>("config")
        .map(|p| config::load_file(&PathBuf::from(p)))
        .transpose()?;
    config::resolve(sub, file, sub_matches)
}

fn emit(cfg: &RunConfig, outcome: &Outcome, wall: f64) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(&summary(cfg, outcome, wall))?;
    let out = cfg.raw("out");
    if out.is_empty() {
        let stdout = io::stdout();
        match cfg.raw("format") {
            "json" => writeln!(stdout.lock(), "{json}")?,
            "csv" => write_csv(stdout.lock(), outcome)?,
            other => return Err(CliError::Usage(format!("--format: expected csv or json, got `{other}`"))),
        }
        return Ok(());
    }
    let dir = PathBuf::from(out);
    fs::create_dir_all(&dir)?;
    write_csv(fs::File::create(dir.join(format!("{}.csv", cfg.command)))?, outcome)?;
    fs::write(dir.join(format!("{}.json", cfg.command)), json + "\n")?;
    Ok(())
}

fn main() -> ExitCode {
    let started = Instant::now();
    let result = parse().and_then(|cfg| {
        let outcome = commands::run(&cfg)?;
        emit(&cfg, &outcome, started.elapsed().as_secs_f64())?;
        Ok(outcome)
    });
    match result {
        Ok(outcome) => {
            for v in outcome.verdicts.iter().filter(|v| !v.passed) {
                eprintln!(
                    "FAIL {}: observed {} outside [{}, {}] ({})",
                    v.name, v.observed, v.lower, v.upper, v.tolerance
                );
            }
            ExitCode::from(if outcome.passed() { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("east: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
