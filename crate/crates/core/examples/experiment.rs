//! A small config-driven experiment: traces CSV, summary and SVG chart.
//!
//! Run with `cargo run --release --example experiment [OUT_DIR]`.

use cbo::harness::{plot_svg, run_experiment, summarize, write_traces_csv};
use cbo::ExperimentConfig;

const CONFIG: &str = r#"
budget = 25
repeats = 3
base_seed = 2024
d = 12
methods = ["random", "bin_aa", { kind = "cbo_lookup", label = "cbo_lookup_d6", d = 6 }, "cbo_lookup"]

[problem]
kind = "bqp"
dimension = 8
lambda = 1.0
"#;

fn main() -> cbo::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join("cbo_experiment"));
    std::fs::create_dir_all(&out).map_err(|e| cbo::CboError::Io { path: out.clone(), source: e })?;

    let config = ExperimentConfig::from_toml(CONFIG)?;
    let outcome = run_experiment(&config)?;
    write_traces_csv(&outcome.traces, out.join("traces.csv"))?;
    let summary = summarize(&outcome.traces);
    summary.write_csv(out.join("summary.csv"))?;
    plot_svg(&summary, out.join("best_so_far.svg"))?;

    for m in &summary.methods {
        println!(
            "{:<14} final best {:>8.3} ± {:<7.3} R_T/T {:.3}",
            m.method,
            m.final_best_mean,
            m.final_best_std,
            m.mean_regret.unwrap_or(f64::NAN)
        );
    }
    println!("outputs in {}", out.display());
    Ok(())
}
