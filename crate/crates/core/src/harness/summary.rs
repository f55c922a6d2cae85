use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::output::format_float;
use crate::error::{CboError, Result};
use crate::strategies::RunTrace;

/// Mean and sample standard deviation of `best_so_far` (and of the
/// cumulative regret, when every run carries it) at one iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: String,
    pub iteration: usize,
    pub runs: usize,
    pub mean_best: f64,
    pub std_best: f64,
    pub mean_cum_regret: Option<f64>,
    pub std_cum_regret: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub runs: usize,
    pub final_best_mean: f64,
    pub final_best_std: f64,
    /// Mean over runs of `R_T / T`.
    pub mean_regret: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Summary {
    /// Sorted by `(method, iteration)`.
    pub rows: Vec<SummaryRow>,
    pub methods: Vec<MethodSummary>,
}

pub const SUMMARY_HEADER: [&str; 7] = [
    "method",
    "iteration",
    "runs",
    "mean_best",
    "std_best",
    "mean_cum_regret",
    "std_cum_regret",
];

/// Sample mean and standard deviation; the deviation of one value is 0.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

pub fn summarize(traces: &[RunTrace]) -> Summary {
    let mut by_method: BTreeMap<&str, Vec<&RunTrace>> = BTreeMap::new();
    for t in traces {
        by_method.entry(t.method.as_str()).or_default().push(t);
    }
    let mut summary = Summary::default();
    for (method, runs) in by_method {
        let longest = runs.iter().map(|t| t.records.len()).max().unwrap_or(0);
        for i in 0..longest {
            let records: Vec<_> = runs.iter().filter_map(|t| t.records.get(i)).collect();
            let best: Vec<f64> = records.iter().map(|r| r.best_so_far).collect();
            let (mean_best, std_best) = mean_std(&best);
            let regrets: Option<Vec<f64>> = records.iter().map(|r| r.cum_regret).collect();
            let (mean_cum_regret, std_cum_regret) = match regrets {
                Some(v) => {
                    let (m, s) = mean_std(&v);
                    (Some(m), Some(s))
                }
                None => (None, None),
            };
            summary.rows.push(SummaryRow {
                method: method.to_string(),
                iteration: records[0].iteration,
                runs: records.len(),
                mean_best,
                std_best,
                mean_cum_regret,
                std_cum_regret,
            });
        }
        let finals: Vec<f64> = runs.iter().filter_map(|t| t.final_best()).collect();
        let (final_best_mean, final_best_std) = mean_std(&finals);
        let regrets: Option<Vec<f64>> = runs.iter().map(|t| t.mean_regret()).collect();
        summary.methods.push(MethodSummary {
            method: method.to_string(),
            runs: runs.len(),
            final_best_mean,
            final_best_std,
            mean_regret: regrets.map(|v| mean_std(&v).0),
        });
    }
    summary
}

impl Summary {
    pub fn method_names(&self) -> Vec<&str> {
        self.methods.iter().map(|m| m.method.as_str()).collect()
    }

    pub fn rows_for<'a>(&'a self, method: &'a str) -> impl Iterator<Item = &'a SummaryRow> + 'a {
        self.rows.iter().filter(move |r| r.method == method)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(SUMMARY_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.method.clone(),
                r.iteration.to_string(),
                r.runs.to_string(),
                format_float(r.mean_best),
                format_float(r.std_best),
                r.mean_cum_regret.map(format_float).unwrap_or_default(),
                r.std_cum_regret.map(format_float).unwrap_or_default(),
            ])?;
        }
        w.flush().map_err(|e| CboError::io(path, e))
    }

    /// Per-method final results: `method,runs,final_best_mean,final_best_std,mean_regret`.
    pub fn write_methods_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["method", "runs", "final_best_mean", "final_best_std", "mean_regret"])?;
        for m in &self.methods {
            w.write_record([
                m.method.clone(),
                m.runs.to_string(),
                format_float(m.final_best_mean),
                format_float(m.final_best_std),
                m.mean_regret.map(format_float).unwrap_or_default(),
            ])?;
        }
        w.flush().map_err(|e| CboError::io(path, e))
    }

    /// Reads a per-iteration summary CSV. Method-level fields are rebuilt
    /// from the last row of each method (regret averages are not recoverable).
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut r = csv::Reader::from_path(path.as_ref())?;
        let header = r.headers()?.clone();
        if header.iter().ne(SUMMARY_HEADER) {
            return Err(CboError::Config(format!("unexpected summary header {header:?}")));
        }
        let bad = |what: &str, v: &str| CboError::Config(format!("bad {what} {v:?} in summary"));
        let float = |v: &str, what: &str| v.parse::<f64>().map_err(|_| bad(what, v));
        let opt = |v: &str, what: &str| {
            if v.is_empty() {
                Ok(None)
            } else {
                float(v, what).map(Some)
            }
        };
        let mut summary = Summary::default();
        for row in r.records() {
            let row = row?;
            summary.rows.push(SummaryRow {
                method: row[0].to_string(),
                iteration: row[1].parse().map_err(|_| bad("iteration", &row[1]))?,
                runs: row[2].parse().map_err(|_| bad("runs", &row[2]))?,
                mean_best: float(&row[3], "mean_best")?,
                std_best: float(&row[4], "std_best")?,
                mean_cum_regret: opt(&row[5], "mean_cum_regret")?,
                std_cum_regret: opt(&row[6], "std_cum_regret")?,
            });
        }
        let mut last: BTreeMap<String, &SummaryRow> = BTreeMap::new();
        for r in &summary.rows {
            last.insert(r.method.clone(), r);
        }
        summary.methods = last
            .into_values()
            .map(|r| MethodSummary {
                method: r.method.clone(),
                runs: r.runs,
                final_best_mean: r.mean_best,
                final_best_std: r.std_best,
                mean_regret: None,
            })
            .collect();
        Ok(summary)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Combination;
    use crate::strategies::IterationRecord;

    fn trace(method: &str, repeat: usize, best: &[f64], regret: Option<&[f64]>) -> RunTrace {
        RunTrace {
            method: method.into(),
            repeat,
            seed: 0,
            records: best
                .iter()
                .enumerate()
                .map(|(i, &b)| IterationRecord {
                    iteration: i,
                    combination: Combination(vec![0]),
                    y: b,
                    best_so_far: b,
                    inst_regret: None,
                    cum_regret: regret.map(|r| r[i]),
                    path: None,
                })
                .collect(),
            wall_time_secs: 0.0,
            warnings: vec![],
            failure: None,
        }
    }

    #[test]
    fn two_repeats_hand_checked() {
        let s = summarize(&[trace("a", 0, &[1.0], None), trace("a", 1, &[3.0], None)]);
        assert_eq!(s.rows.len(), 1);
        assert_eq!(s.rows[0].mean_best, 2.0);
        assert!((s.rows[0].std_best - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.rows[0].mean_cum_regret, None);
    }

    #[test]
    fn single_repeat_has_zero_std() {
        let s = summarize(&[trace("a", 0, &[5.0, 4.0, 4.0], Some(&[0.0, 1.0, 2.0]))]);
        assert!(s.rows.iter().all(|r| r.std_best == 0.0));
        assert_eq!(s.methods[0].final_best_mean, 4.0);
        assert_eq!(s.methods[0].mean_regret, Some(1.0));
    }

    #[test]
    fn constant_traces() {
        let traces: Vec<_> = (0..4).map(|j| trace("c", j, &[7.5; 5], None)).collect();
        let s = summarize(&traces);
        assert!(s.rows.iter().all(|r| r.mean_best == 7.5 && r.std_best == 0.0 && r.runs == 4));
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        let s = summarize(&[
            trace("b", 0, &[2.0, 1.0], Some(&[0.0, 0.5])),
            trace("a", 0, &[0.3, 0.1], None),
            trace("a", 1, &[0.7, 0.2], None),
        ]);
        s.write_csv(&p).unwrap();
        let back = Summary::read_csv(&p).unwrap();
        assert_eq!(back.rows, s.rows);
        assert_eq!(back.method_names(), vec!["a", "b"]);
        s.write_methods_csv(dir.path().join("m.csv")).unwrap();
    }
}
