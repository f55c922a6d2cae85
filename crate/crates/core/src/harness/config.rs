use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::benchmarks::{ProblemSpec, DEFAULT_ORACLE_CAP};
use crate::error::{CboError, Result};
use crate::strategies::{StrategyConfig, StrategyKind};

/// A full experiment: one problem family, several methods, `repeats` runs each.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub methods: Vec<StrategyConfig>,
    pub budget: usize,
    pub repeats: usize,
    pub base_seed: u64,
    /// Embedding dimension given to methods that do not set their own.
    pub d: usize,
    /// Use one instance for every repeat instead of regenerating per repeat.
    pub fix_instance: bool,
    pub out: PathBuf,
    /// Worker threads; 0 uses the available parallelism.
    pub workers: usize,
    /// Brute-force optimum (and so regret) only for spaces up to this size.
    pub oracle_cap: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    problem: ProblemSpec,
    methods: Vec<toml::Value>,
    budget: Option<usize>,
    #[serde(default = "default_repeats")]
    repeats: usize,
    #[serde(default)]
    base_seed: u64,
    #[serde(default = "default_d")]
    d: usize,
    #[serde(default)]
    fix_instance: bool,
    #[serde(default = "default_out")]
    out: PathBuf,
    #[serde(default)]
    workers: usize,
    #[serde(default = "default_oracle_cap")]
    oracle_cap: u64,
}

fn default_repeats() -> usize {
    10
}
fn default_d() -> usize {
    20
}
fn default_out() -> PathBuf {
    PathBuf::from("results")
}
fn default_oracle_cap() -> u64 {
    DEFAULT_ORACLE_CAP
}

/// 100 iterations for problems up to 10 variables, 250 above.
pub fn default_budget(dimension: usize) -> usize {
    if dimension <= 10 {
        100
    } else {
        250
    }
}

impl ExperimentConfig {
    pub fn new(problem: ProblemSpec, methods: Vec<StrategyConfig>) -> Self {
        let budget = default_budget(problem.resolved_dimension());
        Self {
            problem,
            methods,
            budget,
            repeats: default_repeats(),
            base_seed: 0,
            d: default_d(),
            fix_instance: false,
            out: default_out(),
            workers: 0,
            oracle_cap: DEFAULT_ORACLE_CAP,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| CboError::Config(format!("bad config: {e}")))?;
        let methods = raw
            .methods
            .into_iter()
            .map(|v| method_from_value(v, raw.d))
            .collect::<Result<Vec<_>>>()?;
        let budget = raw
            .budget
            .unwrap_or_else(|| default_budget(raw.problem.resolved_dimension()));
        let config = Self {
            problem: raw.problem,
            methods,
            budget,
            repeats: raw.repeats,
            base_seed: raw.base_seed,
            d: raw.d,
            fix_instance: raw.fix_instance,
            out: raw.out,
            workers: raw.workers,
            oracle_cap: raw.oracle_cap,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| CboError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(CboError::Config("repeats must be >= 1".into()));
        }
        if self.budget == 0 {
            return Err(CboError::Config("budget must be >= 1".into()));
        }
        if self.methods.is_empty() {
            return Err(CboError::Config("at least one method is required".into()));
        }
        let mut labels: Vec<&str> = self.methods.iter().map(|m| m.label()).collect();
        labels.sort_unstable();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(CboError::Config(format!(
                "duplicate method label {:?}; set `label` to tell them apart",
                w[0]
            )));
        }
        for m in &self.methods {
            m.validate()?;
        }
        Ok(())
    }

    /// Keeps only the listed methods, by label or kind name. Names not in
    /// the config are added with default settings.
    pub fn select_methods(&mut self, names: &[String]) -> Result<()> {
        let mut picked = Vec::with_capacity(names.len());
        for name in names {
            let name = name.trim();
            if let Some(m) = self.methods.iter().find(|m| m.label() == name) {
                picked.push(m.clone());
            } else {
                let kind: StrategyKind = name.parse()?;
                picked.push(StrategyConfig::new(kind).with_d(self.d));
            }
        }
        self.methods = picked;
        self.validate()
    }
}

fn method_from_value(value: toml::Value, d: usize) -> Result<StrategyConfig> {
    match value {
        toml::Value::String(name) => Ok(StrategyConfig::new(name.parse()?).with_d(d)),
        toml::Value::Table(mut table) => {
            table
                .entry("d")
                .or_insert_with(|| toml::Value::Integer(d as i64));
            toml::Value::Table(table)
                .try_into()
                .map_err(|e| CboError::Config(format!("bad method entry: {e}")))
        }
        other => Err(CboError::Config(format!(
            "method entries are names or tables, got {other}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::BenchmarkKind;

    const EXAMPLE: &str = r#"
repeats = 3
base_seed = 42
d = 8
methods = ["random", { kind = "cbo_recon", threshold = 0.05 }, { kind = "cbo_lookup", d = 12 }]

[problem]
kind = "bqp"
dimension = 10
lambda = 1.0
"#;

    #[test]
    fn parses_names_and_tables() {
        let c = ExperimentConfig::from_toml(EXAMPLE).unwrap();
        assert_eq!(c.problem.kind, BenchmarkKind::Bqp);
        assert_eq!(c.problem.lambda, 1.0);
        assert_eq!(c.budget, 100);
        assert_eq!(c.repeats, 3);
        let d: Vec<usize> = c.methods.iter().map(|m| m.d).collect();
        assert_eq!(d, vec![8, 8, 12]);
        assert_eq!(c.methods[1].threshold(), Some(0.05));
        assert_eq!(c.out, PathBuf::from("results"));
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::from_toml("methods = []\n[problem]\nkind = \"bqp\"").is_err());
        assert!(ExperimentConfig::from_toml(
            "methods = [\"random\", \"random\"]\n[problem]\nkind = \"bqp\""
        )
        .is_err());
        assert!(ExperimentConfig::from_toml(
            "methods = [\"random\"]\nrepeats = 0\n[problem]\nkind = \"bqp\""
        )
        .is_err());
        assert!(ExperimentConfig::from_toml(
            "methods = [\"random\"]\ncolour = 1\n[problem]\nkind = \"bqp\""
        )
        .is_err());
        assert!(ExperimentConfig::from_toml("methods = [\"cbo\"]\n[problem]\nkind = \"bqp\"").is_err());
    }

    #[test]
    fn default_budget_by_dimension() {
        let c = ExperimentConfig::from_toml("methods = [\"random\"]\n[problem]\nkind = \"seesaw\"").unwrap();
        assert_eq!(c.budget, 250);
        assert_eq!(default_budget(10), 100);
    }

    #[test]
    fn method_selection() {
        let mut c = ExperimentConfig::from_toml(EXAMPLE).unwrap();
        c.select_methods(&["cbo_lookup".into(), "bin_aa".into()]).unwrap();
        assert_eq!(c.methods.len(), 2);
        assert_eq!(c.methods[0].d, 12);
        assert_eq!(c.methods[1].d, 8);
        assert!(c.select_methods(&["nope".into()]).is_err());
    }
}
