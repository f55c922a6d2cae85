use std::path::Path;

use crate::error::{CboError, Result};
use crate::space::Combination;
use crate::strategies::{IterationRecord, RunTrace};

pub const TRACE_HEADER: [&str; 9] = [
    "method",
    "repeat",
    "seed",
    "iteration",
    "combination",
    "y",
    "best_so_far",
    "inst_regret",
    "cum_regret",
];

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt_float(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

/// Writes every record of every trace, sorted by `(method, repeat, iteration)`.
pub fn write_traces_csv(traces: &[RunTrace], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if traces.is_empty() {
        return Err(CboError::Config("no traces to write".into()));
    }
    let mut order: Vec<&RunTrace> = traces.iter().collect();
    order.sort_by(|a, b| a.method.cmp(&b.method).then(a.repeat.cmp(&b.repeat)));
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(TRACE_HEADER)?;
    for t in order {
        let mut records: Vec<&IterationRecord> = t.records.iter().collect();
        records.sort_by_key(|r| r.iteration);
        for r in records {
            w.write_record([
                t.method.clone(),
                t.repeat.to_string(),
                t.seed.to_string(),
                r.iteration.to_string(),
                r.combination.to_string(),
                format_float(r.y),
                format_float(r.best_so_far),
                opt_float(r.inst_regret),
                opt_float(r.cum_regret),
            ])?;
        }
    }
    w.flush().map_err(|e| CboError::io(path, e))
}

fn parse_field<T: std::str::FromStr>(field: &str, name: &str, line: u64) -> Result<T> {
    field
        .parse()
        .map_err(|_| CboError::Config(format!("line {line}: bad {name} {field:?}")))
}

/// Reads a trace CSV back into traces (without wall time, warnings or
/// selection paths, which the file does not carry).
pub fn read_traces_csv(path: impl AsRef<Path>) -> Result<Vec<RunTrace>> {
    let mut r = csv::Reader::from_path(path.as_ref())?;
    let header = r.headers()?.clone();
    if header.iter().ne(TRACE_HEADER) {
        return Err(CboError::Config(format!("unexpected trace header {header:?}")));
    }
    let mut traces: Vec<RunTrace> = Vec::new();
    for row in r.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let method = &row[0];
        let repeat: usize = parse_field(&row[1], "repeat", line)?;
        let seed: u64 = parse_field(&row[2], "seed", line)?;
        let opt = |i: usize, name: &str| -> Result<Option<f64>> {
            if row[i].is_empty() {
                Ok(None)
            } else {
                parse_field(&row[i], name, line).map(Some)
            }
        };
        let record = IterationRecord {
            iteration: parse_field(&row[3], "iteration", line)?,
            combination: row[4]
                .parse::<Combination>()
                .map_err(|_| CboError::Config(format!("line {line}: bad combination {:?}", &row[4])))?,
            y: parse_field(&row[5], "y", line)?,
            best_so_far: parse_field(&row[6], "best_so_far", line)?,
            inst_regret: opt(7, "inst_regret")?,
            cum_regret: opt(8, "cum_regret")?,
            path: None,
        };
        match traces.last_mut() {
            Some(t) if t.method == method && t.repeat == repeat => t.records.push(record),
            _ => traces.push(RunTrace {
                method: method.to_string(),
                repeat,
                seed,
                records: vec![record],
                wall_time_secs: 0.0,
                warnings: Vec::new(),
                failure: None,
            }),
        }
    }
    Ok(traces)
}
