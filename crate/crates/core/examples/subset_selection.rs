//! Best-subset selection for sparse regression: the true support versus
//! what Random and CBO-Lookup find, with and without an L1 penalty.
//!
//! Run with `cargo run --release --example subset_selection`.

use cbo::benchmarks::{BenchmarkKind, ObjectiveParams, ProblemSpec};
use cbo::{run_bo, StrategyConfig, StrategyKind};

fn main() -> cbo::Result<()> {
    for lambda in [0.0, 0.05] {
        let mut spec = ProblemSpec::new(BenchmarkKind::SparseRegression)
            .with_dimension(12)
            .with_lambda(lambda);
        spec.sparsity = 4;
        let instance = spec.generate(2)?.with_optimum(1 << 16)?;
        let ObjectiveParams::SparseRegression(reg) = &instance.objective else {
            unreachable!()
        };
        let truth: Vec<u8> = reg.beta.iter().map(|&b| u8::from(b != 0.0)).collect();
        println!("lambda = {lambda}");
        println!("  true support  score {:.4}  test MSE {:.4}", reg.evaluate(&truth), reg.test_mse(&truth));
        for kind in [StrategyKind::Random, StrategyKind::CboLookup] {
            let trace = run_bo(&instance, &StrategyConfig::new(kind), 60, 5)?;
            let (c, y) = trace.best().expect("nonempty trace");
            let bits: Vec<u8> = c.0.iter().map(|&v| v as u8).collect();
            println!(
                "  {:<11} score {y:.4}  test MSE {:.4}  support {c}",
                kind.as_str(),
                reg.test_mse(&bits)
            );
        }
    }
    Ok(())
}
