//! GP-UCB selection over a lookup table, with and without exclusion of
//! observed candidates, and the `beta_t` schedule.
//!
//! Run with `cargo run --release --example acquisition`.

use std::collections::HashSet;

use cbo::acquisition::{select_candidate, SelectionConfig};
use cbo::benchmarks::{BenchmarkKind, Objective, ProblemSpec};
use cbo::{AcquisitionSpec, BetaSchedule, GpModel, KernelSpec, LookupTable, RandomEmbedding};

fn main() -> cbo::Result<()> {
    let problem = ProblemSpec::new(BenchmarkKind::Bqp)
        .with_dimension(10)
        .with_lambda(1.0)
        .generate(3)?;
    let space = problem.space().clone();
    let table = LookupTable::build(&space, &RandomEmbedding::new(&space, 20, 0)?)?;

    let schedule = BetaSchedule::with_defaults(space.cardinality());
    for t in [1, 10, 100] {
        println!("beta_{t} = {:.4}", schedule.beta(t));
    }

    let observed: Vec<u64> = vec![0, 17, 512, 1000];
    let inputs = observed.iter().map(|&r| table.row(r).to_vec()).collect();
    let targets = observed
        .iter()
        .map(|&r| problem.evaluate(&space.unrank(r)?))
        .collect::<cbo::Result<Vec<f64>>>()?;
    let model = GpModel::fit(KernelSpec::matern52(2.0, 10.0)?, 1e-2, inputs, targets)?;

    let spec = AcquisitionSpec::GpUcb { schedule };
    let config = SelectionConfig::default();
    let open = select_candidate(&model, &spec, &table, &HashSet::new(), 5, &config)?;
    let exclude: HashSet<u64> = observed.iter().copied().collect();
    let fresh = select_candidate(&model, &spec, &table, &exclude, 5, &config)?;
    println!(
        "UCB pick: {} (value {:.4}, path {})",
        space.unrank(open.rank)?,
        open.value,
        open.path.as_str()
    );
    println!("UCB pick excluding observed: {}", space.unrank(fresh.rank)?);

    let ei = select_candidate(&model, &AcquisitionSpec::ei(), &table, &exclude, 5, &config)?;
    println!("EI pick: {} (EI {:.4})", space.unrank(ei.rank)?, ei.value);
    Ok(())
}
