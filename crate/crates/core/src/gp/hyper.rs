//! Marginal-likelihood hyperparameter fitting.
//!
//! Search runs in transformed coordinates (log for positive scales, linear
//! for the AA `lambda`) with Nelder–Mead from five restarts. Every evaluated
//! point is projected onto the bounds first, so the returned parameters are
//! always feasible.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{lml_from_stats, pair_stats, KernelKind, KernelSpec};
#[cfg(test)]
use super::GpModel;
use crate::error::{CboError, Result};
use crate::local_search::nelder_mead;
use crate::rng::rng_from_seed;

pub const RESTARTS: usize = 5;
const EVALS_PER_RESTART: usize = 120;

pub const DEFAULT_NOISE_VARIANCE: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperparameterBounds {
    pub lengthscale: (f64, f64),
    pub signal_variance: (f64, f64),
    pub noise_variance: (f64, f64),
    pub aa_lambda: (f64, f64),
}

impl Default for HyperparameterBounds {
    fn default() -> Self {
        Self {
            lengthscale: (1e-2, 1e3),
            signal_variance: (1e-3, 1e3),
            noise_variance: (1e-6, 1.0),
            // open at 0.5
            aa_lambda: (0.5 + 1e-6, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperFit {
    pub kernel: KernelSpec,
    pub noise_variance: f64,
    pub log_marginal_likelihood: f64,
    /// Set when no restart improved on the defaults and the defaults were returned.
    pub fell_back_to_defaults: bool,
}

impl HyperparameterBounds {
    fn first(&self, kind: KernelKind) -> (f64, f64) {
        match kind {
            KernelKind::Matern52 => (self.lengthscale.0.ln(), self.lengthscale.1.ln()),
            KernelKind::AitchisonAitken => self.aa_lambda,
        }
    }

    fn boxes(&self, kind: KernelKind) -> [(f64, f64); 3] {
        [
            self.first(kind),
            (self.signal_variance.0.ln(), self.signal_variance.1.ln()),
            (self.noise_variance.0.ln(), self.noise_variance.1.ln()),
        ]
    }
}

fn decode(kind: KernelKind, theta: &[f64], boxes: &[(f64, f64); 3]) -> (KernelSpec, f64) {
    let p: Vec<f64> = theta
        .iter()
        .zip(boxes)
        .map(|(v, (lo, hi))| v.clamp(*lo, *hi))
        .collect();
    let signal_variance = p[1].exp();
    let kernel = match kind {
        KernelKind::Matern52 => KernelSpec::Matern52 {
            lengthscale: p[0].exp(),
            signal_variance,
        },
        KernelKind::AitchisonAitken => KernelSpec::AitchisonAitken {
            lambda: p[0],
            signal_variance,
        },
    };
    (kernel, p[2].exp())
}

fn encode_defaults(kind: KernelKind) -> Vec<f64> {
    let first = match kind {
        KernelKind::Matern52 => 1f64.ln(),
        KernelKind::AitchisonAitken => 0.9,
    };
    vec![first, 1f64.ln(), DEFAULT_NOISE_VARIANCE.ln()]
}

/// Maximizes the log marginal likelihood over kernel and noise parameters.
///
/// Deterministic given `seed`. Restart 0 starts from the defaults
/// (`lengthscale = 1`, `sigma_f^2 = 1`, `sigma_n^2 = 1e-2`, `lambda = 0.9`);
/// the rest start uniformly inside the bounds. Ties between restarts go to
/// the lower restart index.
pub fn optimize_hyperparameters(
    kind: KernelKind,
    inputs: &[Vec<f64>],
    targets: &[f64],
    bounds: &HyperparameterBounds,
    seed: u64,
) -> Result<HyperFit> {
    if inputs.len() < 2 {
        return Err(CboError::InvalidParameter(
            "hyperparameter fitting needs at least two observations".into(),
        ));
    }
    if inputs.len() != targets.len() {
        return Err(CboError::DimensionMismatch {
            expected: inputs.len(),
            actual: targets.len(),
        });
    }
    let stats = pair_stats(kind, inputs);
    let dim = inputs[0].len();
    let boxes = bounds.boxes(kind);
    let negative_lml = |theta: &[f64]| -> f64 {
        let (kernel, noise) = decode(kind, theta, &boxes);
        match lml_from_stats(&kernel, noise, targets, &stats, dim) {
            Ok(v) => -v,
            Err(_) => f64::INFINITY,
        }
    };

    let defaults = encode_defaults(kind);
    let default_value = negative_lml(&defaults);
    let mut rng = rng_from_seed(seed);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for restart in 0..RESTARTS {
        let start = if restart == 0 {
            defaults.clone()
        } else {
            boxes.iter().map(|(lo, hi)| rng.random_range(*lo..=*hi)).collect()
        };
        let step = match kind {
            KernelKind::AitchisonAitken => 0.5,
            KernelKind::Matern52 => 1.0,
        };
        let mut objective = |theta: &[f64]| negative_lml(theta);
        let (theta, value) = nelder_mead(&mut objective, &start, step, EVALS_PER_RESTART);
        if best.as_ref().is_none_or(|(_, bv)| value < *bv) {
            best = Some((theta, value));
        }
    }
    let (theta, value) = best.expect("at least one restart");
    if !(value < default_value) {
        log::warn!("hyperparameter search did not improve on defaults; keeping them");
        let (kernel, noise_variance) = decode(kind, &defaults, &boxes);
        return Ok(HyperFit {
            kernel,
            noise_variance,
            log_marginal_likelihood: -default_value,
            fell_back_to_defaults: true,
        });
    }
    let (kernel, noise_variance) = decode(kind, &theta, &boxes);
    Ok(HyperFit {
        kernel,
        noise_variance,
        log_marginal_likelihood: -value,
        fell_back_to_defaults: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_data() -> (Vec<Vec<f64>>, Vec<f64>) {
        let x: Vec<Vec<f64>> = (0..12).map(|i| vec![i as f64 * 0.5]).collect();
        let y = x.iter().map(|p| (p[0] * 0.8).sin() * 2.0).collect();
        (x, y)
    }

    #[test]
    fn respects_bounds() {
        let (x, y) = toy_data();
        let b = HyperparameterBounds::default();
        let fit = optimize_hyperparameters(KernelKind::Matern52, &x, &y, &b, 3).unwrap();
        let KernelSpec::Matern52 {
            lengthscale,
            signal_variance,
        } = fit.kernel
        else {
            panic!("wrong kind")
        };
        assert!((b.lengthscale.0..=b.lengthscale.1).contains(&lengthscale));
        assert!((b.signal_variance.0..=b.signal_variance.1).contains(&signal_variance));
        assert!((b.noise_variance.0..=b.noise_variance.1).contains(&fit.noise_variance));

        let bits: Vec<Vec<f64>> = (0..10u32)
            .map(|r| (0..4).map(|j| f64::from((r >> j) & 1)).collect())
            .collect();
        let targets: Vec<f64> = bits.iter().map(|b| b.iter().sum()).collect();
        let fit = optimize_hyperparameters(KernelKind::AitchisonAitken, &bits, &targets, &b, 3).unwrap();
        let KernelSpec::AitchisonAitken { lambda, .. } = fit.kernel else {
            panic!("wrong kind")
        };
        assert!(lambda > 0.5 && lambda <= 1.0);
    }

    #[test]
    fn deterministic_for_seed() {
        let (x, y) = toy_data();
        let b = HyperparameterBounds::default();
        let a = optimize_hyperparameters(KernelKind::Matern52, &x, &y, &b, 11).unwrap();
        let c = optimize_hyperparameters(KernelKind::Matern52, &x, &y, &b, 11).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn improves_on_defaults() {
        let (x, y) = toy_data();
        let b = HyperparameterBounds::default();
        let fit = optimize_hyperparameters(KernelKind::Matern52, &x, &y, &b, 0).unwrap();
        let default_gp = GpModel::fit(
            KernelSpec::default_for(KernelKind::Matern52),
            DEFAULT_NOISE_VARIANCE,
            x.clone(),
            y.clone(),
        )
        .unwrap();
        assert!(fit.log_marginal_likelihood >= default_gp.log_marginal_likelihood());
        let refit = GpModel::fit(fit.kernel, fit.noise_variance, x, y).unwrap();
        assert!((refit.log_marginal_likelihood() - fit.log_marginal_likelihood).abs() < 1e-9);
    }

    #[test]
    fn needs_two_points() {
        let b = HyperparameterBounds::default();
        assert!(optimize_hyperparameters(KernelKind::Matern52, &[vec![0.0]], &[1.0], &b, 0).is_err());
    }
}
