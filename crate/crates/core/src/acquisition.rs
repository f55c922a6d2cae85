//! Acquisition functions and candidate selection.
//!
//! GP-UCB is used in its minimization form, `mu - beta_t * sigma`, lower is
//! better. Expected improvement is also for minimization and higher is
//! better; internally both are turned into a "lower is better" score so a
//! single argmin handles selection. Ties always go to the lowest rank.

use std::borrow::Cow;
use std::collections::{BTreeSet, HashSet};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CboError, Result};
use crate::gp::GpModel;
use crate::local_search::minimize_in_box;
use crate::lookup::LookupTable;
use crate::rng::rng_from_seed;
use crate::space::CategoricalSpace;

pub const DEFAULT_SELECTION_CAP: u64 = 1 << 16;
pub const DEFAULT_SUBSAMPLE: usize = 1 << 14;

/// `beta_t = kappa * sqrt(ln(N t / delta))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaSchedule {
    pub delta: f64,
    pub kappa: f64,
    pub cardinality: u64,
}

impl BetaSchedule {
    pub fn new(delta: f64, kappa: f64, cardinality: u64) -> Result<Self> {
        let s = Self {
            delta,
            kappa,
            cardinality,
        };
        s.validate()?;
        Ok(s)
    }

    /// `kappa = 1`, `delta = 0.1`.
    pub fn with_defaults(cardinality: u64) -> Self {
        Self {
            delta: 0.1,
            kappa: 1.0,
            cardinality,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(CboError::InvalidParameter(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(CboError::InvalidParameter(format!(
                "kappa must be positive, got {}",
                self.kappa
            )));
        }
        if self.cardinality < 2 {
            return Err(CboError::InvalidParameter("beta schedule needs N >= 2".into()));
        }
        Ok(())
    }

    /// Exploration weight at iteration `t >= 1` (`t = 0` is treated as 1).
    pub fn beta(&self, t: usize) -> f64 {
        let t = t.max(1) as f64;
        self.kappa * (self.cardinality as f64 * t / self.delta).ln().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AcquisitionSpec {
    GpUcb { schedule: BetaSchedule },
    ExpectedImprovement { xi: f64 },
}

impl AcquisitionSpec {
    pub fn ucb(cardinality: u64) -> Self {
        AcquisitionSpec::GpUcb {
            schedule: BetaSchedule::with_defaults(cardinality),
        }
    }

    pub fn ei() -> Self {
        AcquisitionSpec::ExpectedImprovement { xi: 0.01 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            AcquisitionSpec::GpUcb { schedule } => schedule.validate(),
            AcquisitionSpec::ExpectedImprovement { xi } => {
                if *xi >= 0.0 && xi.is_finite() {
                    Ok(())
                } else {
                    Err(CboError::InvalidParameter(format!("EI xi must be >= 0, got {xi}")))
                }
            }
        }
    }

    /// Acquisition at a posterior `(mu, sigma)`, in its natural orientation.
    pub fn value(&self, mu: f64, sigma: f64, t: usize, y_best: f64) -> f64 {
        match *self {
            AcquisitionSpec::GpUcb { schedule } => ucb_score(mu, sigma, schedule.beta(t)),
            AcquisitionSpec::ExpectedImprovement { xi } => ei_score(mu, sigma, y_best, xi),
        }
    }

    /// Lower-is-better version of [`value`](Self::value).
    pub fn cost(&self, mu: f64, sigma: f64, t: usize, y_best: f64) -> f64 {
        match self {
            AcquisitionSpec::GpUcb { .. } => self.value(mu, sigma, t, y_best),
            AcquisitionSpec::ExpectedImprovement { .. } => -self.value(mu, sigma, t, y_best),
        }
    }
}

pub fn ucb_score(mu: f64, sigma: f64, beta: f64) -> f64 {
    mu - beta * sigma
}

pub fn standard_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

pub fn standard_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Expected improvement below `y_best - xi`.
pub fn ei_score(mu: f64, sigma: f64, y_best: f64, xi: f64) -> f64 {
    let gap = y_best - xi - mu;
    if sigma <= 0.0 {
        return gap.max(0.0);
    }
    let z = gap / sigma;
    (gap * standard_normal_cdf(z) + sigma * standard_normal_pdf(z)).max(0.0)
}

/// A finite, rank-indexed set of candidate points.
pub trait CandidateSource: Sync {
    fn count(&self) -> u64;

    fn point(&self, rank: u64) -> Cow<'_, [f64]>;

    /// Axis-aligned bounds of the candidate points, for continuous refinement.
    fn bounds(&self) -> (Vec<f64>, Vec<f64>);

    /// Candidate closest to a continuous point, skipping `exclude`.
    fn snap(&self, x: &[f64], exclude: &HashSet<u64>) -> Option<u64>;
}

impl CandidateSource for LookupTable {
    fn count(&self) -> u64 {
        self.len() as u64
    }

    fn point(&self, rank: u64) -> Cow<'_, [f64]> {
        Cow::Borrowed(self.row(rank))
    }

    fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        self.bounding_box()
    }

    fn snap(&self, x: &[f64], exclude: &HashSet<u64>) -> Option<u64> {
        self.nearest_rank_excluding(x, exclude).ok().flatten()
    }
}

/// Every in-image Boolean code of a space, as 0/1 vectors.
#[derive(Debug, Clone)]
pub struct BooleanCandidates {
    space: CategoricalSpace,
}

impl BooleanCandidates {
    pub fn new(space: CategoricalSpace) -> Self {
        Self { space }
    }
}

impl CandidateSource for BooleanCandidates {
    fn count(&self) -> u64 {
        self.space.cardinality()
    }

    fn point(&self, rank: u64) -> Cow<'_, [f64]> {
        Cow::Owned(self.space.rank_to_bits(rank).to_f64())
    }

    fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let m = self.space.code_length();
        (vec![0.0; m], vec![1.0; m])
    }

    fn snap(&self, x: &[f64], exclude: &HashSet<u64>) -> Option<u64> {
        let rank = x
            .iter()
            .fold(0u64, |acc, &v| (acc << 1) | u64::from(v >= 0.5));
        let rank = rank % self.space.cardinality();
        (!exclude.contains(&rank)).then_some(rank)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionPath {
    Exhaustive,
    Subsampled,
}

impl SelectionPath {
    pub fn as_str(&self) -> &'static str {
        match self {
            SelectionPath::Exhaustive => "exhaustive",
            SelectionPath::Subsampled => "subsampled",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    /// Candidate sets above this size are subsampled.
    pub enumeration_cap: u64,
    pub subsample: usize,
    pub refine_restarts: usize,
    pub refine_steps: usize,
    pub seed: u64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            enumeration_cap: DEFAULT_SELECTION_CAP,
            subsample: DEFAULT_SUBSAMPLE,
            refine_restarts: 10,
            refine_steps: 100,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub rank: u64,
    pub point: Vec<f64>,
    /// Acquisition value in its natural orientation (UCB: lower is better, EI: higher).
    pub value: f64,
    pub path: SelectionPath,
    pub exclusion_lifted: bool,
}

/// Picks the best candidate under `spec` at iteration `t`.
///
/// Ranks in `exclude` are skipped unless that would leave nothing, in which
/// case exclusion is lifted and flagged on the result.
pub fn select_candidate<C: CandidateSource + ?Sized>(
    model: &GpModel,
    spec: &AcquisitionSpec,
    candidates: &C,
    exclude: &HashSet<u64>,
    t: usize,
    config: &SelectionConfig,
) -> Result<Selection> {
    let n = candidates.count();
    if n == 0 {
        return Err(CboError::EmptyCandidates);
    }
    let excluded_in_range = exclude.iter().filter(|&&r| r < n).count() as u64;
    let exclusion_lifted = excluded_in_range >= n;
    if exclusion_lifted {
        log::warn!("every candidate already observed; lifting exclusion");
    }
    let empty = HashSet::new();
    let exclude = if exclusion_lifted { &empty } else { exclude };
    let y_best = model.targets().iter().copied().fold(f64::INFINITY, f64::min);
    let cost = |x: &[f64]| {
        let (mu, sigma) = model.predict_unchecked(x);
        spec.cost(mu, sigma, t, y_best)
    };
    let dim = model.input_dim();
    if candidates.point(0).len() != dim {
        return Err(CboError::DimensionMismatch {
            expected: dim,
            actual: candidates.point(0).len(),
        });
    }

    let (ranks, path): (Vec<u64>, SelectionPath) = if n <= config.enumeration_cap {
        ((0..n).filter(|r| !exclude.contains(r)).collect(), SelectionPath::Exhaustive)
    } else {
        let mut rng = rng_from_seed(config.seed);
        let mut picked = BTreeSet::new();
        let mut attempts = 0usize;
        while picked.len() < config.subsample && attempts < 4 * config.subsample {
            attempts += 1;
            let r = rng.random_range(0..n);
            if !exclude.contains(&r) {
                picked.insert(r);
            }
        }
        (picked.into_iter().collect(), SelectionPath::Subsampled)
    };
    if ranks.is_empty() {
        return Err(CboError::EmptyCandidates);
    }

    let costs: Vec<f64> = ranks
        .par_iter()
        .map(|&r| cost(&candidates.point(r)))
        .collect();
    let (mut best_rank, best_cost) = argmin(&ranks, &costs);

    if path == SelectionPath::Subsampled {
        let (lo, hi) = candidates.bounds();
        let mut order: Vec<usize> = (0..ranks.len()).collect();
        order.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(ranks[a].cmp(&ranks[b])));
        let starts: Vec<Vec<f64>> = order
            .iter()
            .take(config.refine_restarts.max(1))
            .map(|&i| candidates.point(ranks[i]).into_owned())
            .collect();
        let (x, _) = minimize_in_box(&cost, &lo, &hi, &starts, config.refine_steps);
        if let Some(snapped) = candidates.snap(&x, exclude) {
            let c = cost(&candidates.point(snapped));
            if c < best_cost || (c == best_cost && snapped < best_rank) {
                best_rank = snapped;
            }
        }
    }

    let point = candidates.point(best_rank).into_owned();
    let (mu, sigma) = model.predict_unchecked(&point);
    Ok(Selection {
        rank: best_rank,
        value: spec.value(mu, sigma, t, y_best),
        point,
        path,
        exclusion_lifted,
    })
}

fn argmin(ranks: &[u64], costs: &[f64]) -> (u64, f64) {
    let mut best = (ranks[0], costs[0]);
    for (&r, &c) in ranks.iter().zip(costs).skip(1) {
        // NaN never wins
        if c < best.1 || (c == best.1 && r < best.0) || best.1.is_nan() {
            best = (r, c);
        }
    }
    best
}
