//! Combinatorial Bayesian optimization over categorical search spaces.
//!
//! A categorical space is encoded to Boolean vectors, embedded into a
//! compact convex polytope by a bounded random matrix, and searched with a
//! Gaussian-process surrogate. The primary strategy, [`StrategyKind::CboLookup`],
//! materializes the embedding of every combination in a [`LookupTable`] and
//! recovers proposals by exact nearest-neighbor search, so no rounding
//! threshold is needed.
//!
//! Module map:
//!
//! - [`space`]: categorical spaces, mixed-radix ranks, Boolean encoding.
//! - [`embedding`]: the random map, its pseudo-inverse, and rounding recovery.
//! - [`lookup`]: the lookup table and its binary file format.
//! - [`gp`]: Gaussian-process regression with Matérn 5/2 and Aitchison–Aitken kernels.
//! - [`acquisition`]: GP-UCB, expected improvement, candidate selection.
//! - [`strategies`]: the optimization loop and the seven strategies.
//! - [`benchmarks`]: objective families with brute-force optimum oracles.
//! - [`harness`]: experiment configuration, CSV traces, summaries and SVG plots.

pub mod acquisition;
pub mod benchmarks;
pub mod embedding;
pub mod error;
pub mod gp;
pub mod harness;
pub mod lookup;
pub mod rng;
pub mod space;
pub mod strategies;

mod local_search;

pub use acquisition::{AcquisitionSpec, BetaSchedule, Selection, SelectionPath};
pub use benchmarks::{BenchmarkInstance, BenchmarkKind, Objective};
pub use embedding::RandomEmbedding;
pub use error::{CboError, Result};
pub use gp::{GpModel, KernelSpec};
pub use harness::{ExperimentConfig, RunTrace};
pub use lookup::LookupTable;
pub use space::{BooleanVector, CategoricalSpace, Combination};
pub use strategies::{run_bo, StrategyConfig, StrategyKind};
