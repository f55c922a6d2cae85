//! The optimization loop and the seven strategies behind one interface.
//!
//! Every strategy sees the same [`ObservationHistory`] and returns the next
//! combination to evaluate. GP-based strategies keep their own training
//! inputs (bits, codes or embedded points) aligned with the history.

mod history;
mod kinds;
mod surrogate;
mod trace;

pub use history::ObservationHistory;
pub use trace::{attach_regrets, cumulative_regret, instantaneous_regret, IterationRecord, RunTrace};

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::acquisition::{AcquisitionSpec, BetaSchedule, SelectionConfig, SelectionPath};
use crate::benchmarks::Objective;
use crate::embedding::{RECON_THRESHOLD, REMBO_THRESHOLD};
use crate::error::{CboError, Result};
use crate::lookup::DEFAULT_TABLE_CAP;
use crate::rng::{derive_seed, rng_from_seed};
use crate::space::{CategoricalSpace, Combination};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    Random,
    BinAa,
    BinRound,
    DecRound,
    Rembo,
    CboRecon,
    CboLookup,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 7] = [
        StrategyKind::Random,
        StrategyKind::BinAa,
        StrategyKind::BinRound,
        StrategyKind::DecRound,
        StrategyKind::Rembo,
        StrategyKind::CboRecon,
        StrategyKind::CboLookup,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            StrategyKind::Random => "random",
            StrategyKind::BinAa => "bin_aa",
            StrategyKind::BinRound => "bin_round",
            StrategyKind::DecRound => "dec_round",
            StrategyKind::Rembo => "rembo",
            StrategyKind::CboRecon => "cbo_recon",
            StrategyKind::CboLookup => "cbo_lookup",
        }
    }

    /// Rounding threshold used when none is configured; `None` for kinds
    /// that do not round.
    pub fn default_threshold(&self) -> Option<f64> {
        match self {
            StrategyKind::BinRound => Some(0.5),
            StrategyKind::Rembo => Some(REMBO_THRESHOLD),
            StrategyKind::CboRecon => Some(RECON_THRESHOLD),
            _ => None,
        }
    }

    pub fn default_acquisition(&self) -> Option<AcquisitionKind> {
        match self {
            StrategyKind::Random => None,
            StrategyKind::BinRound | StrategyKind::DecRound => Some(AcquisitionKind::Ei),
            _ => Some(AcquisitionKind::Ucb),
        }
    }

    pub fn uses_embedding(&self) -> bool {
        matches!(self, StrategyKind::Rembo | StrategyKind::CboRecon | StrategyKind::CboLookup)
    }
}

impl std::fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for StrategyKind {
    type Err = CboError;

    fn from_str(s: &str) -> Result<Self> {
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| CboError::Config(format!("unknown strategy {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AcquisitionKind {
    Ucb,
    Ei,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyConfig {
    pub kind: StrategyKind,
    /// Name used in traces; defaults to the kind.
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default = "default_d")]
    pub d: usize,
    /// Rounding threshold; only valid for `bin_round`, `rembo` and `cbo_recon`.
    #[serde(default)]
    pub threshold: Option<f64>,
    /// Overrides the kind's default acquisition function.
    #[serde(default)]
    pub acquisition: Option<AcquisitionKind>,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_xi")]
    pub xi: f64,
    /// Skip already-observed candidates (`bin_aa`, `cbo_lookup`).
    #[serde(default = "default_true")]
    pub exclude_observed: bool,
    /// Refit GP hyperparameters every this many iterations.
    #[serde(default = "default_one")]
    pub refit_every: usize,
    /// Local-search restarts and steps for continuous acquisition searches.
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_selection_cap")]
    pub enumeration_cap: u64,
    #[serde(default = "default_subsample")]
    pub subsample: usize,
    #[serde(default = "default_table_cap")]
    pub table_cap: u64,
}

fn default_d() -> usize {
    20
}
fn default_kappa() -> f64 {
    1.0
}
fn default_delta() -> f64 {
    0.1
}
fn default_xi() -> f64 {
    0.01
}
fn default_true() -> bool {
    true
}
fn default_one() -> usize {
    1
}
fn default_restarts() -> usize {
    10
}
fn default_steps() -> usize {
    100
}
fn default_selection_cap() -> u64 {
    crate::acquisition::DEFAULT_SELECTION_CAP
}
fn default_subsample() -> usize {
    crate::acquisition::DEFAULT_SUBSAMPLE
}
fn default_table_cap() -> u64 {
    DEFAULT_TABLE_CAP
}

impl StrategyConfig {
    pub fn new(kind: StrategyKind) -> Self {
        Self {
            kind,
            label: None,
            d: default_d(),
            threshold: kind.default_threshold(),
            acquisition: None,
            kappa: default_kappa(),
            delta: default_delta(),
            xi: default_xi(),
            exclude_observed: true,
            refit_every: 1,
            restarts: default_restarts(),
            steps: default_steps(),
            enumeration_cap: default_selection_cap(),
            subsample: default_subsample(),
            table_cap: default_table_cap(),
        }
    }

    pub fn with_d(mut self, d: usize) -> Self {
        self.d = d;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(self.kind.as_str())
    }

    pub fn threshold(&self) -> Option<f64> {
        self.threshold.or(self.kind.default_threshold())
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(CboError::Config("embedding dimension d must be >= 1".into()));
        }
        match (self.kind.default_threshold(), self.threshold) {
            (None, Some(_)) => {
                return Err(CboError::Config(format!(
                    "{} does not round; remove its threshold",
                    self.kind
                )))
            }
            (Some(_), Some(t)) if !(t > 0.0 && t < 1.0) => {
                return Err(CboError::Config(format!("threshold must be in (0, 1), got {t}")))
            }
            _ => {}
        }
        if self.refit_every == 0 || self.restarts == 0 || self.steps == 0 || self.subsample == 0 {
            return Err(CboError::Config(
                "refit_every, restarts, steps and subsample must be >= 1".into(),
            ));
        }
        if !(self.xi >= 0.0) {
            return Err(CboError::Config(format!("xi must be >= 0, got {}", self.xi)));
        }
        BetaSchedule {
            delta: self.delta,
            kappa: self.kappa,
            cardinality: 2,
        }
        .validate()
    }

    /// Acquisition for a space with `cardinality` combinations, or `None` for `random`.
    pub fn acquisition_spec(&self, cardinality: u64) -> Option<AcquisitionSpec> {
        Some(match self.acquisition.or(self.kind.default_acquisition())? {
            AcquisitionKind::Ucb => AcquisitionSpec::GpUcb {
                schedule: BetaSchedule {
                    delta: self.delta,
                    kappa: self.kappa,
                    cardinality: cardinality.max(2),
                },
            },
            AcquisitionKind::Ei => AcquisitionSpec::ExpectedImprovement { xi: self.xi },
        })
    }

    pub(crate) fn selection_config(&self, seed: u64) -> SelectionConfig {
        SelectionConfig {
            enumeration_cap: self.enumeration_cap,
            subsample: self.subsample,
            refine_restarts: self.restarts,
            refine_steps: self.steps,
            seed,
        }
    }
}

/// One proposal with its bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct Suggestion {
    pub combination: Combination,
    /// Which selection path was taken, for candidate-based strategies.
    pub path: Option<SelectionPath>,
    pub warnings: Vec<String>,
}

pub trait Strategy: Send {
    fn kind(&self) -> StrategyKind;

    fn space(&self) -> &CategoricalSpace;

    /// Next combination to evaluate at iteration `t >= 1`, given at least
    /// one observation.
    fn suggest(&mut self, history: &ObservationHistory, t: usize) -> Result<Suggestion>;

    /// Warnings raised while building the strategy.
    fn setup_warnings(&self) -> Vec<String> {
        Vec::new()
    }
}

/// Builds the strategy state for `space`. Randomness (embedding matrices,
/// search starts, random proposals) derives from `seed`.
pub fn build_strategy(
    config: &StrategyConfig,
    space: &CategoricalSpace,
    seed: u64,
) -> Result<Box<dyn Strategy>> {
    config.validate()?;
    kinds::build(config, space, seed)
}

/// Runs `budget` iterations from one seeded uniform initial combination.
pub fn run_bo(
    problem: &dyn Objective,
    config: &StrategyConfig,
    budget: usize,
    seed: u64,
) -> Result<RunTrace> {
    let mut rng = rng_from_seed(derive_seed(seed, "init", 0));
    let initial = problem.space().sample(&mut rng);
    run_bo_from(problem, config, budget, seed, initial)
}

/// Like [`run_bo`] with a given initial combination, so several methods
/// can share one initialization.
///
/// An objective or strategy failure stops the loop and returns the partial
/// trace with `failure` set.
pub fn run_bo_from(
    problem: &dyn Objective,
    config: &StrategyConfig,
    budget: usize,
    seed: u64,
    initial: Combination,
) -> Result<RunTrace> {
    if budget == 0 {
        return Err(CboError::Config("budget must be >= 1".into()));
    }
    let start = Instant::now();
    let space = problem.space();
    space.validate(&initial)?;
    let mut strategy = build_strategy(config, space, seed)?;
    let mut trace = RunTrace {
        method: config.label().to_string(),
        repeat: 0,
        seed,
        records: Vec::with_capacity(budget + 1),
        wall_time_secs: 0.0,
        warnings: strategy.setup_warnings(),
        failure: None,
    };
    let mut history = ObservationHistory::new();

    let observe = |c: Combination,
                       t: usize,
                       path: Option<SelectionPath>,
                       history: &mut ObservationHistory,
                       trace: &mut RunTrace|
     -> Result<()> {
        let y = problem.evaluate(&c)?;
        if !y.is_finite() {
            return Err(CboError::Objective(format!("non-finite value {y} at {c}")));
        }
        history.push(c.clone(), y);
        let best = history.best().map(|(_, v)| v).unwrap_or(y);
        trace.records.push(IterationRecord {
            iteration: t,
            combination: c,
            y,
            best_so_far: best,
            inst_regret: None,
            cum_regret: None,
            path,
        });
        Ok(())
    };

    if let Err(e) = observe(initial, 0, None, &mut history, &mut trace) {
        trace.failure = Some(format!("initial evaluation: {e}"));
    } else {
        for t in 1..=budget {
            let suggestion = match strategy.suggest(&history, t) {
                Ok(s) => s,
                Err(e) => {
                    trace.failure = Some(format!("iteration {t}: suggest failed: {e}"));
                    break;
                }
            };
            trace
                .warnings
                .extend(suggestion.warnings.into_iter().map(|w| format!("iteration {t}: {w}")));
            if let Err(e) = observe(suggestion.combination, t, suggestion.path, &mut history, &mut trace) {
                trace.failure = Some(format!("iteration {t}: evaluation failed: {e}"));
                break;
            }
        }
    }
    if let Some(reason) = &trace.failure {
        log::warn!("{} run (seed {seed}) stopped early: {reason}", trace.method);
    }
    attach_regrets(&mut trace.records, problem.optimum_value());
    trace.wall_time_secs = start.elapsed().as_secs_f64();
    Ok(trace)
}
