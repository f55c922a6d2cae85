use crate::error::Result;
use crate::gp::{
    optimize_hyperparameters, GpModel, HyperparameterBounds, KernelKind, KernelSpec,
    DEFAULT_NOISE_VARIANCE,
};
use crate::rng::derive_seed;

/// GP training data plus the most recent hyperparameters.
#[derive(Debug, Clone)]
pub(crate) struct Surrogate {
    kind: KernelKind,
    inputs: Vec<Vec<f64>>,
    targets: Vec<f64>,
    hyper: Option<(KernelSpec, f64)>,
    fitted_at: usize,
    refit_every: usize,
    seed: u64,
    bounds: HyperparameterBounds,
}

impl Surrogate {
    pub(crate) fn new(kind: KernelKind, refit_every: usize, seed: u64) -> Self {
        Self {
            kind,
            inputs: Vec::new(),
            targets: Vec::new(),
            hyper: None,
            fitted_at: 0,
            refit_every: refit_every.max(1),
            seed,
            bounds: HyperparameterBounds::default(),
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.inputs.len()
    }

    pub(crate) fn push(&mut self, x: Vec<f64>, y: f64) {
        self.inputs.push(x);
        self.targets.push(y);
    }

    pub(crate) fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    /// Fits the GP for iteration `t`, refreshing hyperparameters every
    /// `refit_every` iterations once there are at least two observations.
    /// Returns the model and whether the hyperparameter search fell back.
    pub(crate) fn model(&mut self, t: usize) -> Result<(GpModel, bool)> {
        let mut fell_back = false;
        if self.inputs.len() >= 2 {
            let due = self.hyper.is_none() || t >= self.fitted_at + self.refit_every;
            if due {
                let fit = optimize_hyperparameters(
                    self.kind,
                    &self.inputs,
                    &self.targets,
                    &self.bounds,
                    derive_seed(self.seed, "hyper", t as u64),
                )?;
                fell_back = fit.fell_back_to_defaults;
                self.hyper = Some((fit.kernel, fit.noise_variance));
                self.fitted_at = t;
            }
        }
        let (kernel, noise) = self
            .hyper
            .unwrap_or((KernelSpec::default_for(self.kind), DEFAULT_NOISE_VARIANCE));
        let model = GpModel::fit(kernel, noise, self.inputs.clone(), self.targets.clone())?;
        Ok((model, fell_back))
    }
}
