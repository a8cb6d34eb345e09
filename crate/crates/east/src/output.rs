//! CSV tables and JSON summaries.

use std::io::Write;

use east_core::experiments::Verdict;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Shortest text that parses back to the same double.
pub fn format_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:?}")
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Num(v) => format_f64(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// What a subcommand hands back for serialization.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub results: serde_json::Value,
    pub verdicts: Vec<Verdict>,
}

impl Outcome {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            results: serde_json::Value::Null,
            verdicts: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }
}

pub fn write_csv<W: Write>(out: W, outcome: &Outcome) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out);
    w.write_record(&outcome.columns)?;
    for row in &outcome.rows {
        w.write_record(row.iter().map(Cell::text))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct Meta {
    pub east_version: &'static str,
    pub seed: String,
    pub threads: String,
    pub wall_time_s: f64,
}

#[derive(Debug, Serialize)]
pub struct Summary<'a> {
    pub config: &'a RunConfig,
    pub results: &'a serde_json::Value,
    pub verdicts: &'a [Verdict],
    pub meta: Meta,
}

pub fn summary<'a>(config: &'a RunConfig, outcome: &'a Outcome, wall_time_s: f64) -> Summary<'a> {
    Summary {
        config,
        results: &outcome.results,
        verdicts: &outcome.verdicts,
        meta: Meta {
            east_version: env!("CARGO_PKG_VERSION"),
            seed: config.raw("seed").to_string(),
            threads: config.raw("threads").to_string(),
            wall_time_s,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn floats_round_trip(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            prop_assert_eq!(format_f64(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn csv_has_header_and_crlf() {
        let mut o = Outcome::new(&["a", "b"]);
        o.push(vec![Cell::Num(0.1), Cell::Text("x,y".into())]);
        let mut buf = Vec::new();
        write_csv(&mut buf, &o).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\r\n0.1,\"x,y\"\r\n");
    }
}
