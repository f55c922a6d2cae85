use rayon::prelude::*;

use super::ExperimentConfig;
use crate::benchmarks::{BenchmarkInstance, Objective};
use crate::error::{CboError, Result};
use crate::rng::{derive_seed, rng_from_seed};
use crate::space::Combination;
use crate::strategies::{run_bo_from, RunTrace};

#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub method: String,
    pub repeat: usize,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    /// Completed runs sorted by `(method, repeat)`.
    pub traces: Vec<RunTrace>,
    /// Runs that failed or stopped early; they are left out of `traces`.
    pub failures: Vec<RunFailure>,
    /// One instance per repeat, in repeat order.
    pub instances: Vec<BenchmarkInstance>,
}

/// Seed of the problem instance for `repeat`.
pub fn instance_seed(config: &ExperimentConfig, repeat: usize) -> u64 {
    let index = if config.fix_instance || !config.problem.kind.is_randomized() {
        0
    } else {
        repeat as u64
    };
    derive_seed(config.base_seed, "instance", index)
}

/// Initial combination of `repeat`, shared by every method.
pub fn initial_combination(
    config: &ExperimentConfig,
    instance: &BenchmarkInstance,
    repeat: usize,
) -> Combination {
    let mut rng = rng_from_seed(derive_seed(config.base_seed, "init", repeat as u64));
    instance.space().sample(&mut rng)
}

/// Seed of one `(method, repeat)` run.
pub fn run_seed(config: &ExperimentConfig, method: &str, repeat: usize) -> u64 {
    derive_seed(config.base_seed, method, repeat as u64)
}

/// Generates the instances and runs every method on every repeat.
///
/// Output is independent of scheduling: runs are sorted afterwards and each
/// owns its seeds. Fails only when some method has no successful run.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| CboError::Config(format!("cannot build worker pool: {e}")))?;
    pool.install(|| run_in_pool(config))
}

fn run_in_pool(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let instances = (0..config.repeats)
        .into_par_iter()
        .map(|j| {
            config
                .problem
                .generate(instance_seed(config, j))?
                .with_optimum(config.oracle_cap)
        })
        .collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(usize, usize)> = (0..config.methods.len())
        .flat_map(|i| (0..config.repeats).map(move |j| (i, j)))
        .collect();
    let results: Vec<std::result::Result<RunTrace, RunFailure>> = jobs
        .par_iter()
        .map(|&(i, j)| {
            let method = &config.methods[i];
            let instance = &instances[j];
            let init = initial_combination(config, instance, j);
            let seed = run_seed(config, method.label(), j);
            log::info!("running {} repeat {j}", method.label());
            let failure = |reason: String| RunFailure {
                method: method.label().to_string(),
                repeat: j,
                reason,
            };
            match run_bo_from(instance, method, config.budget, seed, init) {
                Ok(mut trace) => {
                    trace.repeat = j;
                    match trace.failure.take() {
                        Some(reason) => Err(failure(reason)),
                        None => Ok(trace),
                    }
                }
                Err(e) => Err(failure(e.to_string())),
            }
        })
        .collect();

    let mut traces = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(t) => traces.push(t),
            Err(f) => {
                log::warn!("{} repeat {} failed: {}", f.method, f.repeat, f.reason);
                failures.push(f);
            }
        }
    }
    for m in &config.methods {
        if !traces.iter().any(|t| t.method == m.label()) {
            let reason = failures
                .iter()
                .find(|f| f.method == m.label())
                .map(|f| f.reason.clone())
                .unwrap_or_default();
            return Err(CboError::Config(format!(
                "every run of {} failed; first failure: {reason}",
                m.label()
            )));
        }
    }
    traces.sort_by(|a, b| a.method.cmp(&b.method).then(a.repeat.cmp(&b.repeat)));
    failures.sort_by(|a, b| a.method.cmp(&b.method).then(a.repeat.cmp(&b.repeat)));
    Ok(ExperimentOutcome {
        traces,
        failures,
        instances,
    })
}
