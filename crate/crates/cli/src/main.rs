use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cbo::benchmarks::{BenchmarkInstance, Objective};
use cbo::harness::{
    instance_seed, plot_svg_metric, read_traces_csv, run_experiment, summarize, write_traces_csv,
    ExperimentConfig, PlotMetric, Summary,
};
use cbo::{CategoricalSpace, LookupTable, RandomEmbedding};

#[derive(Parser)]
#[command(name = "cbo", version, about = "Combinatorial Bayesian optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write traces, summaries and plots.
    Run(RunArgs),
    /// Summarize a traces CSV.
    Summarize {
        input: PathBuf,
        /// Per-iteration summary CSV.
        #[arg(long, default_value = "summary.csv")]
        out: PathBuf,
        /// Per-method final results CSV.
        #[arg(long)]
        methods_out: Option<PathBuf>,
    },
    /// Plot a summary CSV as SVG.
    Plot {
        input: PathBuf,
        #[arg(long, default_value = "best_so_far.svg")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Metric::Best)]
        metric: Metric,
    },
    /// Brute-force optimum of a problem instance.
    Oracle(OracleArgs),
    /// Build or inspect lookup tables.
    #[command(subcommand)]
    Table(TableCommand),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// Base seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    fix_instance: bool,
    /// Comma-separated method labels or kinds.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    repeats: Option<usize>,
}

#[derive(Args)]
struct OracleArgs {
    /// Experiment config whose problem section defines the instance.
    #[arg(long, conflicts_with = "instance")]
    config: Option<PathBuf>,
    /// Instance JSON written by `run`.
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    repeat: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    fix_instance: bool,
    #[arg(long, default_value_t = cbo::benchmarks::DEFAULT_ORACLE_CAP)]
    cap: u64,
    /// Save the instance with its optimum as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum TableCommand {
    /// Embed every combination of a space and save the table.
    Build {
        /// Comma-separated arities, e.g. `3,4,5,2`.
        #[arg(long, value_delimiter = ',', required_unless_present = "binary")]
        arities: Option<Vec<usize>>,
        /// Binary space with this many variables.
        #[arg(long, conflicts_with = "arities")]
        binary: Option<usize>,
        #[arg(long, default_value_t = 20)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = cbo::lookup::DEFAULT_TABLE_CAP)]
        cap: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print a table's header and image bounds.
    Inspect {
        file: PathBuf,
        /// Also print the row of this rank.
        #[arg(long)]
        rank: Option<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    Best,
    Regret,
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CBO_LOG", "warn")).init();
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Summarize {
            input,
            out,
            methods_out,
        } => {
            let traces = read_traces_csv(&input)
                .with_context(|| format!("reading {}", input.display()))?;
            let summary = summarize(&traces);
            summary.write_csv(&out)?;
            if let Some(p) = methods_out {
                summary.write_methods_csv(p)?;
            }
            print_methods(&summary);
            Ok(())
        }
        Command::Plot { input, out, metric } => {
            let summary = Summary::read_csv(&input)
                .with_context(|| format!("reading {}", input.display()))?;
            let metric = match metric {
                Metric::Best => PlotMetric::BestSoFar,
                Metric::Regret => PlotMetric::CumulativeRegret,
            };
            plot_svg_metric(&summary, metric, &out)?;
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::Oracle(args) => oracle(args),
        Command::Table(cmd) => table(cmd),
    }
}

fn load_config(path: &Path) -> Result<ExperimentConfig> {
    ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))
}

fn run(args: RunArgs) -> Result<()> {
    let mut config = load_config(&args.config)?;
    if let Some(out) = args.out {
        config.out = out;
    }
    if let Some(w) = args.workers {
        config.workers = w;
    }
    if let Some(s) = args.seed {
        config.base_seed = s;
    }
    if args.fix_instance {
        config.fix_instance = true;
    }
    if let Some(b) = args.budget {
        config.budget = b;
    }
    if let Some(r) = args.repeats {
        config.repeats = r;
    }
    if let Some(names) = args.methods {
        config.select_methods(&names)?;
    }
    config.validate()?;

    let outcome = run_experiment(&config)?;
    let out = &config.out;
    fs::create_dir_all(out.join("instances"))
        .with_context(|| format!("creating {}", out.display()))?;
    for (j, inst) in outcome.instances.iter().enumerate() {
        inst.save(out.join("instances").join(format!("repeat_{j}.json")))?;
    }
    write_traces_csv(&outcome.traces, out.join("traces.csv"))?;
    let summary = summarize(&outcome.traces);
    summary.write_csv(out.join("summary.csv"))?;
    summary.write_methods_csv(out.join("methods.csv"))?;
    plot_svg_metric(&summary, PlotMetric::BestSoFar, out.join("best_so_far.svg"))?;
    if summary.rows.iter().all(|r| r.mean_cum_regret.is_some()) {
        plot_svg_metric(&summary, PlotMetric::CumulativeRegret, out.join("regret.svg"))?;
    }
    for f in &outcome.failures {
        eprintln!("failed: {} repeat {}: {}", f.method, f.repeat, f.reason);
    }
    print_methods(&summary);
    println!("wrote {}", out.display());
    Ok(())
}

fn print_methods(summary: &Summary) {
    println!("{:<16} {:>5} {:>14} {:>12} {:>12}", "method", "runs", "final best", "std", "R_T/T");
    for m in &summary.methods {
        let regret = m
            .mean_regret
            .map(|r| format!("{r:.4}"))
            .unwrap_or_else(|| "-".into());
        println!(
            "{:<16} {:>5} {:>14.6} {:>12.6} {:>12}",
            m.method, m.runs, m.final_best_mean, m.final_best_std, regret
        );
    }
}

fn oracle(args: OracleArgs) -> Result<()> {
    let mut instance = match (&args.config, &args.instance) {
        (Some(path), None) => {
            let mut config = load_config(path)?;
            if let Some(s) = args.seed {
                config.base_seed = s;
            }
            config.fix_instance |= args.fix_instance;
            config.problem.generate(instance_seed(&config, args.repeat))?
        }
        (None, Some(path)) => BenchmarkInstance::load(path)
            .with_context(|| format!("loading {}", path.display()))?,
        _ => bail!("pass exactly one of --config or --instance"),
    };
    let n = instance.space().cardinality();
    let (kind, m) = (instance.kind(), instance.dimension());
    match instance.compute_optimum(args.cap)? {
        Some(opt) => println!(
            "{} m={} N={n} optimum {} value {:.16e}",
            kind.as_str(),
            m,
            opt.combination,
            opt.value
        ),
        None => bail!("N = {n} exceeds the oracle cap {}", args.cap),
    }
    if let Some(out) = args.out {
        instance.save(&out)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn table(cmd: TableCommand) -> Result<()> {
    match cmd {
        TableCommand::Build {
            arities,
            binary,
            d,
            seed,
            cap,
            out,
        } => {
            let space = match (arities, binary) {
                (Some(a), _) => CategoricalSpace::new(a)?,
                (None, Some(m)) => CategoricalSpace::binary(m)?,
                (None, None) => bail!("pass --arities or --binary"),
            };
            let embedding = RandomEmbedding::new(&space, d, seed)?;
            let table = LookupTable::build_with_cap(&space, &embedding, cap)?;
            table.save(&out)?;
            println!(
                "wrote {} ({} rows, m={}, d={d})",
                out.display(),
                table.len(),
                space.code_length()
            );
            if embedding.regenerations() > 0 {
                println!("embedding redrawn {} time(s)", embedding.regenerations());
            }
            Ok(())
        }
        TableCommand::Inspect { file, rank } => {
            let table =
                LookupTable::load(&file).with_context(|| format!("loading {}", file.display()))?;
            let space = table.space();
            println!("arities  {:?}", space.arities());
            println!("N        {}", space.cardinality());
            println!("m        {}", space.code_length());
            println!("d        {}", table.dim());
            println!("seed     {}", table.embedding().seed());
            let (lo, hi) = table.bounding_box();
            for (i, (l, h)) in lo.iter().zip(&hi).enumerate() {
                println!("x[{i}]     [{l:.6}, {h:.6}]");
            }
            if let Some(r) = rank {
                if r >= space.cardinality() {
                    bail!("rank {r} out of range");
                }
                println!("rank {r} = {} -> {:?}", space.unrank(r)?, table.row(r));
            }
            Ok(())
        }
    }
}
