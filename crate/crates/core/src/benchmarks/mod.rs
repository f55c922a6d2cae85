//! Benchmark objectives over Boolean vectors, with seeded instance
//! generators and brute-force optimum oracles.
//!
//! All objectives are minimized and are pure functions of the bit vector.
//! Instances serialize to JSON carrying the kind, seed, and every generated
//! parameter, so a run can be replayed without regenerating anything.

mod bqp;
mod ising;
mod seesaw;
mod sparse_regression;

pub use bqp::Bqp;
pub use ising::{grid_edges, IsingSparsification, MAX_ISING_NODES};
pub use seesaw::Seesaw;
pub use sparse_regression::{beta_type_two, correlation_matrix, SparseRegression};

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CboError, Result};
use crate::space::{BooleanVector, CategoricalSpace, Combination};

/// Instances with more than this many combinations get no brute-force optimum by default.
pub const DEFAULT_ORACLE_CAP: u64 = 1 << 16;

/// A black-box objective to minimize over a categorical space.
pub trait Objective: Sync {
    fn space(&self) -> &CategoricalSpace;

    fn evaluate(&self, c: &Combination) -> Result<f64>;

    /// Exact minimum value, when known. Enables regret tracking.
    fn optimum_value(&self) -> Option<f64> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchmarkKind {
    ThumbsUp,
    Seesaw,
    Bqp,
    Ising,
    SparseRegression,
}

impl BenchmarkKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BenchmarkKind::ThumbsUp => "thumbs_up",
            BenchmarkKind::Seesaw => "seesaw",
            BenchmarkKind::Bqp => "bqp",
            BenchmarkKind::Ising => "ising",
            BenchmarkKind::SparseRegression => "sparse_regression",
        }
    }

    /// Whether instances are drawn from a seed (and so differ per repeat).
    pub fn is_randomized(&self) -> bool {
        !matches!(self, BenchmarkKind::ThumbsUp)
    }
}

impl std::str::FromStr for BenchmarkKind {
    type Err = CboError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "thumbs_up" => BenchmarkKind::ThumbsUp,
            "seesaw" => BenchmarkKind::Seesaw,
            "bqp" => BenchmarkKind::Bqp,
            "ising" => BenchmarkKind::Ising,
            "sparse_regression" => BenchmarkKind::SparseRegression,
            other => return Err(CboError::Config(format!("unknown problem kind {other:?}"))),
        })
    }
}

/// `-sum(b)`: maximizing the number of thumbs-up out of `m`.
pub fn thumbs_up(b: &[u8]) -> f64 {
    -(b.iter().filter(|&&v| v != 0).count() as f64)
}

/// Problem description as written in experiment configs. Instances are
/// generated from it with [`ProblemSpec::generate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub kind: BenchmarkKind,
    /// Number of Boolean variables (`p` for sparse regression). Ignored for Ising.
    #[serde(default)]
    pub dimension: Option<usize>,
    /// L1 coefficient on the number of active bits.
    #[serde(default)]
    pub lambda: f64,
    /// Seesaw: penalize the empty selection.
    #[serde(default = "default_true")]
    pub forbid_empty: bool,
    /// BQP correlation length.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Ising grid `[rows, cols]`.
    #[serde(default = "default_grid")]
    pub grid: [usize; 2],
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_sparsity")]
    pub sparsity: usize,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "default_nu")]
    pub nu: f64,
}

fn default_true() -> bool {
    true
}
fn default_alpha() -> f64 {
    10.0
}
fn default_grid() -> [usize; 2] {
    [3, 3]
}
fn default_samples() -> usize {
    200
}
fn default_sparsity() -> usize {
    5
}
fn default_rho() -> f64 {
    0.01
}
fn default_nu() -> f64 {
    1.0
}

impl ProblemSpec {
    pub fn new(kind: BenchmarkKind) -> Self {
        Self {
            kind,
            dimension: None,
            lambda: 0.0,
            forbid_empty: true,
            alpha: default_alpha(),
            grid: default_grid(),
            samples: default_samples(),
            sparsity: default_sparsity(),
            rho: default_rho(),
            nu: default_nu(),
        }
    }

    pub fn with_dimension(mut self, m: usize) -> Self {
        self.dimension = Some(m);
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_grid(mut self, rows: usize, cols: usize) -> Self {
        self.grid = [rows, cols];
        self
    }

    fn dimension_or(&self, default: usize) -> usize {
        self.dimension.unwrap_or(default)
    }

    /// Number of Boolean variables of the generated instances.
    pub fn resolved_dimension(&self) -> usize {
        match self.kind {
            BenchmarkKind::ThumbsUp => self.dimension_or(20),
            BenchmarkKind::Seesaw => self.dimension_or(24),
            BenchmarkKind::Bqp => self.dimension_or(10),
            BenchmarkKind::Ising => ising::grid_edges(self.grid[0], self.grid[1]).len(),
            BenchmarkKind::SparseRegression => self.dimension_or(20),
        }
    }

    pub fn generate(&self, seed: u64) -> Result<BenchmarkInstance> {
        if !(self.lambda >= 0.0) {
            return Err(CboError::Config(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        let objective = match self.kind {
            BenchmarkKind::ThumbsUp => {
                let m = self.dimension_or(20);
                if m == 0 {
                    return Err(CboError::Config("thumbs_up needs dimension >= 1".into()));
                }
                ObjectiveParams::ThumbsUp { dimension: m }
            }
            BenchmarkKind::Seesaw => ObjectiveParams::Seesaw(Seesaw::generate(
                self.dimension_or(24),
                self.forbid_empty,
                seed,
            )?),
            BenchmarkKind::Bqp => ObjectiveParams::Bqp(Bqp::generate(
                self.dimension_or(10),
                self.alpha,
                self.lambda,
                seed,
            )?),
            BenchmarkKind::Ising => ObjectiveParams::Ising(IsingSparsification::generate(
                self.grid[0],
                self.grid[1],
                self.lambda,
                seed,
            )?),
            BenchmarkKind::SparseRegression => {
                ObjectiveParams::SparseRegression(SparseRegression::generate(
                    self.samples,
                    self.dimension_or(20),
                    self.sparsity,
                    self.rho,
                    self.nu,
                    self.lambda,
                    seed,
                )?)
            }
        };
        BenchmarkInstance::new(objective, seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObjectiveParams {
    ThumbsUp { dimension: usize },
    Seesaw(Seesaw),
    Bqp(Bqp),
    Ising(IsingSparsification),
    SparseRegression(SparseRegression),
}

impl ObjectiveParams {
    pub fn dimension(&self) -> usize {
        match self {
            ObjectiveParams::ThumbsUp { dimension } => *dimension,
            ObjectiveParams::Seesaw(s) => s.dimension(),
            ObjectiveParams::Bqp(q) => q.dimension(),
            ObjectiveParams::Ising(i) => i.num_edges(),
            ObjectiveParams::SparseRegression(r) => r.dimension(),
        }
    }

    pub fn kind(&self) -> BenchmarkKind {
        match self {
            ObjectiveParams::ThumbsUp { .. } => BenchmarkKind::ThumbsUp,
            ObjectiveParams::Seesaw(_) => BenchmarkKind::Seesaw,
            ObjectiveParams::Bqp(_) => BenchmarkKind::Bqp,
            ObjectiveParams::Ising(_) => BenchmarkKind::Ising,
            ObjectiveParams::SparseRegression(_) => BenchmarkKind::SparseRegression,
        }
    }

    pub fn evaluate_bits(&self, b: &[u8]) -> f64 {
        match self {
            ObjectiveParams::ThumbsUp { .. } => thumbs_up(b),
            ObjectiveParams::Seesaw(s) => s.evaluate(b),
            ObjectiveParams::Bqp(q) => q.evaluate(b),
            ObjectiveParams::Ising(i) => i.evaluate(b),
            ObjectiveParams::SparseRegression(r) => r.evaluate(b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub combination: Combination,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkInstance {
    pub seed: u64,
    pub objective: ObjectiveParams,
    #[serde(default)]
    pub optimum: Option<Optimum>,
    #[serde(skip)]
    space: Option<CategoricalSpace>,
}

impl BenchmarkInstance {
    pub fn new(objective: ObjectiveParams, seed: u64) -> Result<Self> {
        let space = CategoricalSpace::binary(objective.dimension())?;
        Ok(Self {
            seed,
            objective,
            optimum: None,
            space: Some(space),
        })
    }

    pub fn kind(&self) -> BenchmarkKind {
        self.objective.kind()
    }

    pub fn dimension(&self) -> usize {
        self.objective.dimension()
    }

    pub fn evaluate_bits(&self, b: &BooleanVector) -> Result<f64> {
        if b.len() != self.dimension() {
            return Err(CboError::DimensionMismatch {
                expected: self.dimension(),
                actual: b.len(),
            });
        }
        Ok(self.objective.evaluate_bits(&b.0))
    }

    /// Enumerates the space (if within `cap`) and records the exact minimum.
    pub fn compute_optimum(&mut self, cap: u64) -> Result<Option<&Optimum>> {
        self.optimum = brute_force_optimum(self, cap)?;
        Ok(self.optimum.as_ref())
    }

    pub fn with_optimum(mut self, cap: u64) -> Result<Self> {
        self.compute_optimum(cap)?;
        Ok(self)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self)?;
        fs::write(path, text).map_err(|e| CboError::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| CboError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut inst: Self = serde_json::from_str(text)?;
        inst.space = Some(CategoricalSpace::binary(inst.objective.dimension())?);
        Ok(inst)
    }
}

impl Objective for BenchmarkInstance {
    fn space(&self) -> &CategoricalSpace {
        self.space.as_ref().expect("space set at construction")
    }

    fn evaluate(&self, c: &Combination) -> Result<f64> {
        self.space().validate(c)?;
        Ok(self
            .objective
            .evaluate_bits(&BooleanVector::from_binary_combination(c).0))
    }

    fn optimum_value(&self) -> Option<f64> {
        self.optimum.as_ref().map(|o| o.value)
    }
}

/// Exact minimum by enumeration, or `None` above `cap`. Ties go to the
/// lowest rank.
pub fn brute_force_optimum<O: Objective + ?Sized>(objective: &O, cap: u64) -> Result<Option<Optimum>> {
    let space = objective.space();
    let n = space.cardinality();
    if n > cap {
        return Ok(None);
    }
    let values = (0..n)
        .into_par_iter()
        .map(|r| objective.evaluate(&space.unrank(r)?))
        .collect::<Result<Vec<f64>>>()?;
    let (rank, value) = values
        .iter()
        .enumerate()
        .fold((0usize, f64::INFINITY), |(br, bv), (r, &v)| {
            if v < bv {
                (r, v)
            } else {
                (br, bv)
            }
        });
    Ok(Some(Optimum {
        combination: space.unrank(rank as u64)?,
        value,
    }))
}
