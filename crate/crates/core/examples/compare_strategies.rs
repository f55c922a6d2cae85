//! All seven strategies on one seesaw instance, from a shared start.
//!
//! Run with `cargo run --release --example compare_strategies`.

use cbo::benchmarks::{BenchmarkKind, Objective, ProblemSpec};
use cbo::strategies::run_bo_from;
use cbo::{StrategyConfig, StrategyKind};

fn main() -> cbo::Result<()> {
    let problem = ProblemSpec::new(BenchmarkKind::Seesaw)
        .with_dimension(12)
        .generate(4)?
        .with_optimum(1 << 16)?;
    let optimum = problem.optimum.as_ref().map(|o| o.value).unwrap_or(f64::NAN);
    let start = problem.space().unrank(0)?;
    println!("seesaw 12D, optimum {optimum:.4}");

    for kind in StrategyKind::ALL {
        let config = StrategyConfig::new(kind).with_d(10);
        let trace = run_bo_from(&problem, &config, 40, 9, start.clone())?;
        println!(
            "{:<11} best {:>9.4}  R_T/T {:>8.4}  {:.2}s",
            kind.as_str(),
            trace.final_best().unwrap_or(f64::NAN),
            trace.mean_regret().unwrap_or(f64::NAN),
            trace.wall_time_secs
        );
    }
    Ok(())
}
