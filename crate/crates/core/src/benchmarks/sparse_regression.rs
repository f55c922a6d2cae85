//! Subset selection for sparse linear regression on synthetic data.
//!
//! Data follow the usual best-subset benchmark protocol: `beta` is
//! beta-type 2 (first `s` entries one, the rest zero), rows of `X` are
//! `N(0, Sigma)` with `Sigma_ij = rho^|i-j|`, and `y ~ N(X beta, sigma^2 I)`
//! with `sigma^2 = beta^T Sigma beta / nu`. Samples are split 50/25/25 into
//! train, validation and test.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{CboError, Result};
use crate::rng::rng_from_seed;

const RIDGE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseRegression {
    pub samples: usize,
    pub sparsity: usize,
    pub rho: f64,
    pub nu: f64,
    pub lambda: f64,
    pub beta: Vec<f64>,
    pub noise_variance: f64,
    /// Row-major design matrix, `samples x p`.
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub train: usize,
    pub validation: usize,
}

pub fn beta_type_two(p: usize, s: usize) -> Vec<f64> {
    (0..p).map(|i| if i < s { 1.0 } else { 0.0 }).collect()
}

pub fn correlation_matrix(p: usize, rho: f64) -> DMatrix<f64> {
    DMatrix::from_fn(p, p, |i, j| rho.powi((i as i32 - j as i32).abs()))
}

impl SparseRegression {
    pub fn generate(
        samples: usize,
        p: usize,
        sparsity: usize,
        rho: f64,
        nu: f64,
        lambda: f64,
        seed: u64,
    ) -> Result<Self> {
        if p == 0 || sparsity > p {
            return Err(CboError::Config(format!(
                "sparse regression needs 1 <= p and s <= p, got p={p}, s={sparsity}"
            )));
        }
        if samples < 8 {
            return Err(CboError::Config(format!("need at least 8 samples, got {samples}")));
        }
        if !(rho.abs() < 1.0) || !(nu > 0.0) {
            return Err(CboError::Config(format!(
                "need |rho| < 1 and nu > 0, got rho={rho}, nu={nu}"
            )));
        }
        let sigma = correlation_matrix(p, rho);
        let chol = sigma
            .clone()
            .cholesky()
            .ok_or_else(|| CboError::Config("correlation matrix not positive definite".into()))?;
        let l = chol.l();
        let beta = beta_type_two(p, sparsity);
        let beta_v = DVector::from_column_slice(&beta);
        let signal = (beta_v.transpose() * &sigma * &beta_v)[(0, 0)];
        let noise_variance = signal / nu;
        let noise_sd = noise_variance.sqrt();

        let mut rng = rng_from_seed(seed);
        let mut x = Vec::with_capacity(samples);
        let mut y = Vec::with_capacity(samples);
        for _ in 0..samples {
            let z = DVector::from_fn(p, |_, _| rng.sample::<f64, _>(StandardNormal));
            let row = &l * z;
            let mean = row.dot(&beta_v);
            y.push(mean + noise_sd * rng.sample::<f64, _>(StandardNormal));
            x.push(row.iter().copied().collect());
        }
        let train = samples / 2;
        let validation = samples / 4;
        Ok(Self {
            samples,
            sparsity,
            rho,
            nu,
            lambda,
            beta,
            noise_variance,
            x,
            y,
            train,
            validation,
        })
    }

    pub fn dimension(&self) -> usize {
        self.beta.len()
    }

    fn fit(&self, b: &[u8]) -> (Vec<usize>, DVector<f64>, f64) {
        let cols: Vec<usize> = b
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(i, _)| i)
            .collect();
        let n = self.train;
        let y_mean = self.y[..n].iter().sum::<f64>() / n as f64;
        if cols.is_empty() {
            return (cols, DVector::zeros(0), y_mean);
        }
        let k = cols.len();
        let x_mean: Vec<f64> = cols
            .iter()
            .map(|&c| self.x[..n].iter().map(|row| row[c]).sum::<f64>() / n as f64)
            .collect();
        let xc = DMatrix::from_fn(n, k, |i, j| self.x[i][cols[j]] - x_mean[j]);
        let yc = DVector::from_fn(n, |i, _| self.y[i] - y_mean);
        let mut gram = xc.transpose() * &xc;
        for i in 0..k {
            gram[(i, i)] += RIDGE;
        }
        let rhs = xc.transpose() * yc;
        let coef = match gram.clone().cholesky() {
            Some(ch) => ch.solve(&rhs),
            None => gram
                .lu()
                .solve(&rhs)
                .unwrap_or_else(|| DVector::zeros(k)),
        };
        let intercept = y_mean - coef.iter().zip(&x_mean).map(|(c, m)| c * m).sum::<f64>();
        (cols, coef, intercept)
    }

    fn mse_on(&self, b: &[u8], range: std::ops::Range<usize>) -> f64 {
        let (cols, coef, intercept) = self.fit(b);
        let len = range.len() as f64;
        range
            .map(|i| {
                let pred = intercept + cols.iter().zip(coef.iter()).map(|(&c, w)| w * self.x[i][c]).sum::<f64>();
                (self.y[i] - pred).powi(2)
            })
            .sum::<f64>()
            / len
    }

    /// Least squares (with intercept) on the training split, scored by
    /// validation MSE plus `lambda * |selection|`.
    pub fn evaluate(&self, b: &[u8]) -> f64 {
        let kept = b.iter().filter(|&&v| v != 0).count();
        self.validation_mse(b) + self.lambda * kept as f64
    }

    pub fn validation_mse(&self, b: &[u8]) -> f64 {
        self.mse_on(b, self.train..self.train + self.validation)
    }

    /// Held-out test MSE of the same fit, for reporting.
    pub fn test_mse(&self, b: &[u8]) -> f64 {
        self.mse_on(b, self.train + self.validation..self.samples)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_type_two_layout() {
        assert_eq!(beta_type_two(10, 5), vec![1., 1., 1., 1., 1., 0., 0., 0., 0., 0.]);
    }

    #[test]
    fn correlation_plug_in() {
        assert_eq!(correlation_matrix(4, 0.0), DMatrix::identity(4, 4));
        let s = correlation_matrix(4, 0.01);
        let off = &s - DMatrix::<f64>::identity(4, 4);
        assert!((off.amax() - 0.01).abs() < 1e-15);
        assert!((s[(0, 2)] - 1e-4).abs() < 1e-18);
    }

    #[test]
    fn split_sizes() {
        let r = SparseRegression::generate(200, 20, 5, 0.01, 1.0, 0.0, 1).unwrap();
        assert_eq!((r.train, r.validation, r.samples - r.train - r.validation), (100, 50, 50));
        assert_eq!(r.x.len(), 200);
        assert!(r.x.iter().all(|row| row.len() == 20));
    }

    #[test]
    fn noiseless_true_support_is_exact() {
        let r = SparseRegression::generate(200, 10, 5, 0.01, 1e12, 0.0, 3).unwrap();
        let truth: Vec<u8> = r.beta.iter().map(|&v| u8::from(v != 0.0)).collect();
        assert!(r.evaluate(&truth) <= 1e-6);
        let wrong = [0u8, 0, 0, 0, 0, 1, 1, 1, 1, 1];
        assert!(r.evaluate(&wrong) > 1.0);
    }

    #[test]
    fn empty_selection_uses_train_mean() {
        let r = SparseRegression::generate(40, 6, 2, 0.3, 1.0, 0.0, 9).unwrap();
        let mean = r.y[..r.train].iter().sum::<f64>() / r.train as f64;
        let want = r.y[r.train..r.train + r.validation]
            .iter()
            .map(|y| (y - mean).powi(2))
            .sum::<f64>()
            / r.validation as f64;
        assert!((r.evaluate(&[0; 6]) - want).abs() < 1e-12);
    }

    #[test]
    fn lambda_penalizes_selection() {
        let a = SparseRegression::generate(60, 6, 2, 0.0, 2.0, 0.0, 4).unwrap();
        let b = SparseRegression {
            lambda: 0.5,
            ..a.clone()
        };
        let sel = [1u8, 1, 0, 1, 0, 0];
        assert!((b.evaluate(&sel) - a.evaluate(&sel) - 1.5).abs() < 1e-12);
        assert!(a.test_mse(&sel).is_finite());
    }
}
