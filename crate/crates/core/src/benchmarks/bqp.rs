use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{CboError, Result};
use crate::rng::rng_from_seed;

/// Binary quadratic programming, `b^T Q b + lambda * sum(b)`.
///
/// `Q_ij = M_ij * exp(-(i - j)^2 / alpha^2)` with `M_ij ~ N(0, 1)`, then
/// symmetrized as `(Q + Q^T) / 2`. `q` is stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bqp {
    pub q: Vec<Vec<f64>>,
    pub lambda: f64,
    pub alpha: f64,
}

impl Bqp {
    pub fn generate(m: usize, alpha: f64, lambda: f64, seed: u64) -> Result<Self> {
        if m == 0 {
            return Err(CboError::Config("bqp needs dimension >= 1".into()));
        }
        if !(alpha > 0.0) {
            return Err(CboError::Config(format!("bqp alpha must be positive, got {alpha}")));
        }
        let mut rng = rng_from_seed(seed);
        let mut raw = vec![vec![0.0; m]; m];
        for (i, row) in raw.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                let decay = (-((i as f64 - j as f64).powi(2)) / (alpha * alpha)).exp();
                *v = rng.sample::<f64, _>(StandardNormal) * decay;
            }
        }
        let q = (0..m)
            .map(|i| (0..m).map(|j| 0.5 * (raw[i][j] + raw[j][i])).collect())
            .collect();
        Ok(Self { q, lambda, alpha })
    }

    pub fn from_matrix(q: Vec<Vec<f64>>, lambda: f64) -> Result<Self> {
        let m = q.len();
        if m == 0 || q.iter().any(|row| row.len() != m) {
            return Err(CboError::Config("bqp matrix must be square and nonempty".into()));
        }
        Ok(Self {
            q,
            lambda,
            alpha: f64::NAN,
        })
    }

    pub fn dimension(&self) -> usize {
        self.q.len()
    }

    pub fn evaluate(&self, b: &[u8]) -> f64 {
        let mut quad = 0.0;
        let mut ones = 0usize;
        for (i, &bi) in b.iter().enumerate() {
            if bi == 0 {
                continue;
            }
            ones += 1;
            for (j, &bj) in b.iter().enumerate() {
                if bj != 0 {
                    quad += self.q[i][j];
                }
            }
        }
        quad + self.lambda * ones as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::{brute_force_optimum, BenchmarkKind, ProblemSpec};

    #[test]
    fn zero_vector_is_zero() {
        let q = Bqp::generate(10, 10.0, 1.0, 4).unwrap();
        assert_eq!(q.evaluate(&[0; 10]), 0.0);
    }

    #[test]
    fn hand_example() {
        let q = Bqp::from_matrix(vec![vec![2.0, -1.0], vec![-1.0, 2.0]], 1.0).unwrap();
        assert_eq!(q.evaluate(&[1, 0]), 3.0);
        assert_eq!(q.evaluate(&[1, 1]), 4.0);
    }

    #[test]
    fn generated_matrix_is_symmetric() {
        let q = Bqp::generate(12, 10.0, 0.0, 8).unwrap();
        for i in 0..12 {
            for j in 0..12 {
                assert_eq!(q.q[i][j], q.q[j][i]);
            }
        }
    }

    #[test]
    fn symmetrization_does_not_change_objective() {
        let asym = vec![
            vec![0.3, 1.2, -0.7],
            vec![-2.0, 0.1, 0.4],
            vec![0.5, 0.9, -1.1],
        ];
        let sym: Vec<Vec<f64>> = (0..3)
            .map(|i| (0..3).map(|j| 0.5 * (asym[i][j] + asym[j][i])).collect())
            .collect();
        let a = Bqp::from_matrix(asym, 0.5).unwrap();
        let s = Bqp::from_matrix(sym, 0.5).unwrap();
        for code in 0u8..8 {
            let b: Vec<u8> = (0..3).map(|i| (code >> i) & 1).collect();
            assert!((a.evaluate(&b) - s.evaluate(&b)).abs() < 1e-12);
        }
    }

    #[test]
    fn ten_dim_oracle_is_exhaustive_minimum() {
        let inst = ProblemSpec::new(BenchmarkKind::Bqp)
            .with_dimension(10)
            .with_lambda(1.0)
            .generate(5)
            .unwrap();
        let crate::benchmarks::ObjectiveParams::Bqp(q) = &inst.objective else {
            unreachable!()
        };
        let mut best = f64::INFINITY;
        for code in 0u32..1024 {
            let b: Vec<f64> = (0..10).map(|i| f64::from((code >> (9 - i)) & 1)).collect();
            let mut v = 0.0;
            for i in 0..10 {
                for j in 0..10 {
                    v += b[i] * q.q[i][j] * b[j];
                }
            }
            v += b.iter().sum::<f64>();
            best = best.min(v);
        }
        let opt = brute_force_optimum(&inst, 1 << 16).unwrap().unwrap();
        assert!((opt.value - best).abs() < 1e-12);
    }
}
