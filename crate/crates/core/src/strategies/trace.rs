use serde::{Deserialize, Serialize};

use crate::acquisition::SelectionPath;
use crate::space::Combination;

/// One row of a run: iteration 0 is the shared initial observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub combination: Combination,
    pub y: f64,
    pub best_so_far: f64,
    /// `f(c_t) - f(c*)`, present only when the optimum is known.
    pub inst_regret: Option<f64>,
    /// Sum of `inst_regret` over queries `1..=t`; zero at the initial row.
    pub cum_regret: Option<f64>,
    pub path: Option<SelectionPath>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub method: String,
    pub repeat: usize,
    pub seed: u64,
    pub records: Vec<IterationRecord>,
    pub wall_time_secs: f64,
    pub warnings: Vec<String>,
    /// Set when the run stopped early; the records are then partial.
    pub failure: Option<String>,
}

impl RunTrace {
    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }

    pub fn best(&self) -> Option<(&Combination, f64)> {
        let mut best: Option<&IterationRecord> = None;
        for r in &self.records {
            if best.is_none_or(|b| r.y < b.y) {
                best = Some(r);
            }
        }
        best.map(|r| (&r.combination, r.y))
    }

    pub fn final_best(&self) -> Option<f64> {
        self.records.last().map(|r| r.best_so_far)
    }

    /// Number of queries after the initial observation.
    pub fn budget_used(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    /// `R_T / T` at the last query, if regrets are tracked.
    pub fn mean_regret(&self) -> Option<f64> {
        let t = self.budget_used();
        if t == 0 {
            return None;
        }
        self.records.last().and_then(|r| r.cum_regret).map(|c| c / t as f64)
    }
}

/// `r_t = y_t - f(c*)`.
pub fn instantaneous_regret(value: f64, optimum: f64) -> f64 {
    value - optimum
}

/// Fills `inst_regret` and `cum_regret` from a known optimum, or clears
/// them when the optimum is unknown.
pub fn attach_regrets(records: &mut [IterationRecord], optimum: Option<f64>) {
    let mut cumulative = 0.0;
    for r in records.iter_mut() {
        match optimum {
            Some(opt) => {
                let inst = instantaneous_regret(r.y, opt);
                if r.iteration > 0 {
                    cumulative += inst;
                }
                r.inst_regret = Some(inst);
                r.cum_regret = Some(cumulative);
            }
            None => {
                r.inst_regret = None;
                r.cum_regret = None;
            }
        }
    }
}

/// `R_t` for `t = 0..=T`, or `None` if the trace carries no regrets.
pub fn cumulative_regret(trace: &RunTrace) -> Option<Vec<f64>> {
    trace.records.iter().map(|r| r.cum_regret).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(iteration: usize, y: f64, best: f64) -> IterationRecord {
        IterationRecord {
            iteration,
            combination: Combination(vec![iteration]),
            y,
            best_so_far: best,
            inst_regret: None,
            cum_regret: None,
            path: None,
        }
    }

    #[test]
    fn regrets_from_optimum() {
        let mut recs = vec![record(0, -3.0, -3.0), record(1, -10.0, -10.0), record(2, -7.0, -10.0)];
        attach_regrets(&mut recs, Some(-10.0));
        assert_eq!(recs[1].inst_regret, Some(0.0));
        let cum: Vec<f64> = recs.iter().map(|r| r.cum_regret.unwrap()).collect();
        assert_eq!(cum, vec![0.0, 0.0, 3.0]);
        assert_eq!(recs[0].inst_regret, Some(7.0));

        attach_regrets(&mut recs, None);
        assert!(recs.iter().all(|r| r.inst_regret.is_none() && r.cum_regret.is_none()));
    }

    #[test]
    fn mean_regret_over_queries() {
        let mut recs = vec![record(0, 0.0, 0.0), record(1, 1.0, 0.0), record(2, 3.0, 0.0)];
        attach_regrets(&mut recs, Some(0.0));
        let trace = RunTrace {
            method: "x".into(),
            repeat: 0,
            seed: 0,
            records: recs,
            wall_time_secs: 0.0,
            warnings: vec![],
            failure: None,
        };
        assert_eq!(trace.mean_regret(), Some(2.0));
        assert_eq!(cumulative_regret(&trace), Some(vec![0.0, 1.0, 4.0]));
        assert_eq!(trace.best().unwrap().1, 0.0);
    }
}
