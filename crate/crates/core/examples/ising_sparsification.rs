//! Sparsify a 3x3 Ising model: exact KL of a few edge subsets, the
//! brute-force optimum, and a CBO-Lookup run.
//!
//! Run with `cargo run --release --example ising_sparsification`.

use cbo::benchmarks::{BenchmarkKind, IsingSparsification, ObjectiveParams, ProblemSpec};
use cbo::{run_bo, StrategyConfig, StrategyKind};

fn main() -> cbo::Result<()> {
    let instance = ProblemSpec::new(BenchmarkKind::Ising)
        .with_grid(3, 3)
        .with_lambda(0.01)
        .generate(11)?
        .with_optimum(1 << 16)?;
    let ObjectiveParams::Ising(model) = &instance.objective else {
        unreachable!("generated from an ising spec")
    };
    let model: &IsingSparsification = model;
    println!("{} nodes, {} edges", model.num_nodes, model.num_edges());
    for (e, ((a, b), j)) in model.edges.iter().zip(&model.couplings).enumerate() {
        println!("  edge {e:>2}: ({a}, {b}) J = {j:+.3}");
    }

    let all = vec![1u8; model.num_edges()];
    let none = vec![0u8; model.num_edges()];
    println!("KL keeping all edges: {:.3e}", model.kl_divergence(&all));
    println!("KL dropping all edges: {:.4}", model.kl_divergence(&none));

    let opt = instance.optimum.as_ref().expect("4096 subsets fit under the cap");
    println!("optimum {} with objective {:.4}", opt.combination, opt.value);

    let trace = run_bo(&instance, &StrategyConfig::new(StrategyKind::CboLookup), 60, 0)?;
    let (best, value) = trace.best().expect("nonempty trace");
    println!("CBO-Lookup after 60 queries: {best} with {value:.4}");
    Ok(())
}
