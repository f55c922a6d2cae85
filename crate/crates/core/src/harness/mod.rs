//! Configuration-driven experiments: instances and shared initializations
//! per repeat, every method on every repeat, CSV traces, summaries and
//! SVG charts.

mod config;
mod experiment;
mod output;
mod plot;
mod summary;

pub use crate::strategies::RunTrace;
pub use config::{default_budget, ExperimentConfig};
pub use experiment::{
    initial_combination, instance_seed, run_experiment, run_seed, ExperimentOutcome, RunFailure,
};
pub use output::{format_float, read_traces_csv, write_traces_csv, TRACE_HEADER};
pub use plot::{plot_svg, plot_svg_metric, render_svg, PlotMetric};
pub use summary::{mean_std, summarize, MethodSummary, Summary, SummaryRow, SUMMARY_HEADER};
