//! Gaussian-process regression with Cholesky-based inference.
//!
//! Targets are centered by their mean before fitting and the mean is added
//! back in [`GpModel::predict`]. A fixed jitter of `1e-6` is added to the
//! diagonal together with the noise variance; if the factorization still
//! fails the jitter is raised tenfold up to `1e-2`.

mod hyper;
mod kernel;

pub use hyper::{optimize_hyperparameters, HyperFit, HyperparameterBounds, DEFAULT_NOISE_VARIANCE};
pub use kernel::{KernelKind, KernelSpec};

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{CboError, Result};

pub const BASE_JITTER: f64 = 1e-6;
pub const MAX_JITTER: f64 = 1e-2;

#[derive(Debug, Clone)]
pub struct GpModel {
    kernel: KernelSpec,
    noise_variance: f64,
    jitter: f64,
    inputs: Vec<Vec<f64>>,
    targets: Vec<f64>,
    target_mean: f64,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
}

impl GpModel {
    pub fn fit(
        kernel: KernelSpec,
        noise_variance: f64,
        inputs: Vec<Vec<f64>>,
        targets: Vec<f64>,
    ) -> Result<Self> {
        kernel.validate()?;
        if !(noise_variance > 0.0 && noise_variance.is_finite()) {
            return Err(CboError::InvalidParameter(format!(
                "noise variance must be positive, got {noise_variance}"
            )));
        }
        if inputs.is_empty() {
            return Err(CboError::InvalidParameter("GP needs at least one observation".into()));
        }
        if inputs.len() != targets.len() {
            return Err(CboError::DimensionMismatch {
                expected: inputs.len(),
                actual: targets.len(),
            });
        }
        let dim = inputs[0].len();
        if let Some(bad) = inputs.iter().find(|x| x.len() != dim) {
            return Err(CboError::DimensionMismatch {
                expected: dim,
                actual: bad.len(),
            });
        }
        let stats = pair_stats(kernel.kind(), &inputs);
        Self::fit_from_stats(kernel, noise_variance, inputs, targets, &stats)
    }

    /// Fit with a precomputed pairwise statistic matrix (distances or mismatch
    /// counts); lets hyperparameter search skip recomputing them.
    pub(crate) fn fit_from_stats(
        kernel: KernelSpec,
        noise_variance: f64,
        inputs: Vec<Vec<f64>>,
        targets: Vec<f64>,
        stats: &DMatrix<f64>,
    ) -> Result<Self> {
        let t = inputs.len();
        let dim = inputs[0].len();
        let gram = DMatrix::from_fn(t, t, |i, j| kernel.from_stat(stats[(i, j)], dim));
        let (chol, jitter) = factorize(&gram, noise_variance)?;
        let target_mean = targets.iter().sum::<f64>() / t as f64;
        let centered = DVector::from_iterator(t, targets.iter().map(|y| y - target_mean));
        let alpha = chol.solve(&centered);
        Ok(Self {
            kernel,
            noise_variance,
            jitter,
            inputs,
            targets,
            target_mean,
            chol,
            alpha,
        })
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    /// Jitter actually added to the diagonal (after any escalation).
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn target_mean(&self) -> f64 {
        self.target_mean
    }

    pub fn input_dim(&self) -> usize {
        self.inputs[0].len()
    }

    /// Lower-triangular Cholesky factor of `K + (noise + jitter) I`.
    pub fn cholesky_factor(&self) -> DMatrix<f64> {
        self.chol.l()
    }

    /// `(K + (noise + jitter) I)^-1 (y - mean)`.
    pub fn alpha(&self) -> &DVector<f64> {
        &self.alpha
    }

    /// Posterior mean and standard deviation at `x`.
    pub fn predict(&self, x: &[f64]) -> Result<(f64, f64)> {
        if x.len() != self.input_dim() {
            return Err(CboError::DimensionMismatch {
                expected: self.input_dim(),
                actual: x.len(),
            });
        }
        Ok(self.predict_unchecked(x))
    }

    pub(crate) fn predict_unchecked(&self, x: &[f64]) -> (f64, f64) {
        let t = self.inputs.len();
        let k_star = DVector::from_iterator(
            t,
            self.inputs
                .iter()
                .map(|xi| self.kernel.from_stat(self.kernel.pair_stat(x, xi), x.len())),
        );
        let mean = k_star.dot(&self.alpha) + self.target_mean;
        let v = self
            .chol
            .l_dirty()
            .solve_lower_triangular(&k_star)
            .expect("Cholesky factor has a positive diagonal");
        let prior = self.kernel.from_stat(0.0, x.len());
        let var = (prior - v.norm_squared()).max(0.0);
        (mean, var.sqrt())
    }

    pub fn log_marginal_likelihood(&self) -> f64 {
        let t = self.inputs.len();
        let centered = DVector::from_iterator(t, self.targets.iter().map(|y| y - self.target_mean));
        let log_det_half: f64 = self.chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum();
        -0.5 * centered.dot(&self.alpha)
            - log_det_half
            - 0.5 * t as f64 * (2.0 * std::f64::consts::PI).ln()
    }
}

/// Log marginal likelihood without building a model, for hyperparameter search.
pub(crate) fn lml_from_stats(
    kernel: &KernelSpec,
    noise_variance: f64,
    targets: &[f64],
    stats: &DMatrix<f64>,
    dim: usize,
) -> Result<f64> {
    let t = targets.len();
    let gram = DMatrix::from_fn(t, t, |i, j| kernel.from_stat(stats[(i, j)], dim));
    let (chol, _) = factorize(&gram, noise_variance)?;
    let mean = targets.iter().sum::<f64>() / t as f64;
    let centered = DVector::from_iterator(t, targets.iter().map(|y| y - mean));
    let alpha = chol.solve(&centered);
    let log_det_half: f64 = chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum();
    Ok(-0.5 * centered.dot(&alpha) - log_det_half - 0.5 * t as f64 * (2.0 * std::f64::consts::PI).ln())
}

pub(crate) fn pair_stats(kind: KernelKind, inputs: &[Vec<f64>]) -> DMatrix<f64> {
    let t = inputs.len();
    let mut stats = DMatrix::zeros(t, t);
    for i in 0..t {
        for j in 0..i {
            let s = kernel::pair_stat(kind, &inputs[i], &inputs[j]);
            stats[(i, j)] = s;
            stats[(j, i)] = s;
        }
    }
    stats
}

fn factorize(gram: &DMatrix<f64>, noise_variance: f64) -> Result<(Cholesky<f64, Dyn>, f64)> {
    let t = gram.nrows();
    let mut jitter = BASE_JITTER;
    loop {
        let mut a = gram.clone();
        for i in 0..t {
            a[(i, i)] += noise_variance + jitter;
        }
        if let Some(chol) = Cholesky::new(a) {
            return Ok((chol, jitter));
        }
        if jitter >= MAX_JITTER {
            let min_diag = gram.diagonal().min() + noise_variance + jitter;
            return Err(CboError::NotPositiveDefinite { jitter, min_diag });
        }
        jitter = (jitter * 10.0).min(MAX_JITTER);
        log::debug!("Cholesky failed, raising jitter to {jitter:e}");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matern(l: f64, s: f64) -> KernelSpec {
        KernelSpec::matern52(l, s).unwrap()
    }

    #[test]
    fn single_point_interpolates() {
        let gp = GpModel::fit(matern(1.0, 1.0), 1e-6, vec![vec![0.3, 0.4]], vec![3.0]).unwrap();
        let (mu, _) = gp.predict(&[0.3, 0.4]).unwrap();
        assert!((mu - 3.0).abs() < 1e-3);
    }

    #[test]
    fn two_by_two_alpha_matches_closed_form() {
        let k = matern(0.5, 2.0);
        let x = vec![vec![0.0], vec![0.8]];
        let y = vec![1.0, -0.5];
        let noise = 0.1;
        let gp = GpModel::fit(k, noise, x.clone(), y.clone()).unwrap();
        let diag = 2.0 + noise + gp.jitter();
        let off = k.eval(&x[0], &x[1]).unwrap();
        let det = diag * diag - off * off;
        let mean = 0.25;
        let (c0, c1) = (y[0] - mean, y[1] - mean);
        let a0 = (diag * c0 - off * c1) / det;
        let a1 = (-off * c0 + diag * c1) / det;
        assert!((gp.alpha()[0] - a0).abs() < 1e-10);
        assert!((gp.alpha()[1] - a1).abs() < 1e-10);
    }

    #[test]
    fn constant_targets_revert_to_constant() {
        let x = vec![vec![0.0], vec![0.5], vec![1.0]];
        let gp = GpModel::fit(matern(0.2, 1.0), 1e-4, x, vec![4.2; 3]).unwrap();
        let (mu, _) = gp.predict(&[50.0]).unwrap();
        assert!((mu - 4.2).abs() < 1e-6);
    }

    #[test]
    fn far_point_reverts_to_prior() {
        let x = vec![vec![0.0, 0.0], vec![0.1, 0.0]];
        let gp = GpModel::fit(matern(0.05, 2.0), 1e-4, x, vec![1.0, 3.0]).unwrap();
        let (mu, sd) = gp.predict(&[10.0, 10.0]).unwrap();
        assert!((mu - 2.0).abs() < 1e-9);
        assert!((sd - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn variance_bounded_by_prior() {
        let x: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64 * 0.3, (i * i) as f64 * 0.1]).collect();
        let y: Vec<f64> = x.iter().map(|p| p[0].sin() + p[1]).collect();
        let k = matern(0.7, 1.3);
        let gp = GpModel::fit(k, 1e-3, x, y).unwrap();
        for q in [[0.1, 0.2], [1.0, 1.0], [-3.0, 2.0]] {
            let (_, sd) = gp.predict(&q).unwrap();
            assert!(sd >= 0.0);
            assert!(k.eval(&q, &q).unwrap() - sd * sd >= 0.0);
        }
        assert!(gp.predict(&[0.0]).is_err());
    }

    #[test]
    fn lml_single_point() {
        // sigma_f^2 + noise + jitter = 1 and centered target 0
        let gp = GpModel::fit(matern(1.0, 0.5), 0.5 - BASE_JITTER, vec![vec![0.0]], vec![7.0]).unwrap();
        let want = -0.5 * (2.0 * std::f64::consts::PI).ln();
        assert!((gp.log_marginal_likelihood() - want).abs() < 1e-12);
        assert!((want + 0.9189).abs() < 1e-4);
    }

    #[test]
    fn cholesky_reconstructs_regularized_gram() {
        let x: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64 * 0.21, 1.0 - i as f64 * 0.1]).collect();
        let k = matern(0.4, 1.7);
        let gp = GpModel::fit(k, 0.01, x.clone(), vec![0.0, 1.0, 0.5, -0.2, 0.3]).unwrap();
        let l = gp.cholesky_factor();
        let rebuilt = &l * l.transpose();
        for i in 0..5 {
            for j in 0..5 {
                let mut want = k.eval(&x[i], &x[j]).unwrap();
                if i == j {
                    want += 0.01 + gp.jitter();
                }
                assert!((rebuilt[(i, j)] - want).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn duplicate_inputs_are_regularized() {
        let x = vec![vec![0.5], vec![0.5], vec![0.5]];
        let gp = GpModel::fit(matern(1.0, 1.0), 1e-6, x, vec![1.0, 1.0, 1.0]).unwrap();
        assert!(gp.predict(&[0.5]).unwrap().0.is_finite());
    }

    #[test]
    fn fit_rejects_bad_input() {
        assert!(GpModel::fit(matern(1.0, 1.0), 0.0, vec![vec![0.0]], vec![1.0]).is_err());
        assert!(GpModel::fit(matern(1.0, 1.0), 0.1, vec![], vec![]).is_err());
        assert!(GpModel::fit(matern(1.0, 1.0), 0.1, vec![vec![0.0]], vec![1.0, 2.0]).is_err());
        assert!(GpModel::fit(matern(1.0, 1.0), 0.1, vec![vec![0.0], vec![0.0, 1.0]], vec![1.0, 2.0]).is_err());
    }
}
