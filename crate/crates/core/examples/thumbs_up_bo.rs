//! One CBO-Lookup run on the 10D thumbs-up problem, printing the trace.
//!
//! Run with `cargo run --release --example thumbs_up_bo`.

use cbo::benchmarks::{BenchmarkKind, ProblemSpec};
use cbo::{run_bo, StrategyConfig, StrategyKind};

fn main() -> cbo::Result<()> {
    let problem = ProblemSpec::new(BenchmarkKind::ThumbsUp)
        .with_dimension(10)
        .generate(0)?
        .with_optimum(1 << 16)?;
    let config = StrategyConfig::new(StrategyKind::CboLookup);
    let trace = run_bo(&problem, &config, 30, 1)?;

    println!("{:>4} {:>22} {:>6} {:>6} {:>7}", "t", "combination", "y", "best", "R_t");
    for r in &trace.records {
        println!(
            "{:>4} {:>22} {:>6} {:>6} {:>7}",
            r.iteration,
            r.combination.to_string(),
            r.y,
            r.best_so_far,
            r.cum_regret.unwrap_or(f64::NAN)
        );
    }
    println!(
        "best {:?} after {} queries, R_T/T = {:.3}",
        trace.best().map(|(c, y)| (c.to_string(), y)),
        trace.budget_used(),
        trace.mean_regret().unwrap_or(f64::NAN)
    );
    Ok(())
}
