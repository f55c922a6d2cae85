use serde::{Deserialize, Serialize};

use crate::error::{CboError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Matern52,
    AitchisonAitken,
}

/// Covariance function with its hyperparameters.
///
/// The Aitchison–Aitken kernel is the per-dimension product form for binary
/// data, `sigma_f^2 * prod_i (lambda if a_i == b_i else 1 - lambda)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    Matern52 {
        lengthscale: f64,
        signal_variance: f64,
    },
    AitchisonAitken {
        lambda: f64,
        signal_variance: f64,
    },
}

impl KernelSpec {
    pub fn matern52(lengthscale: f64, signal_variance: f64) -> Result<Self> {
        let k = KernelSpec::Matern52 {
            lengthscale,
            signal_variance,
        };
        k.validate()?;
        Ok(k)
    }

    pub fn aitchison_aitken(lambda: f64, signal_variance: f64) -> Result<Self> {
        let k = KernelSpec::AitchisonAitken {
            lambda,
            signal_variance,
        };
        k.validate()?;
        Ok(k)
    }

    pub fn default_for(kind: KernelKind) -> Self {
        match kind {
            KernelKind::Matern52 => KernelSpec::Matern52 {
                lengthscale: 1.0,
                signal_variance: 1.0,
            },
            KernelKind::AitchisonAitken => KernelSpec::AitchisonAitken {
                lambda: 0.9,
                signal_variance: 1.0,
            },
        }
    }

    pub fn kind(&self) -> KernelKind {
        match self {
            KernelSpec::Matern52 { .. } => KernelKind::Matern52,
            KernelSpec::AitchisonAitken { .. } => KernelKind::AitchisonAitken,
        }
    }

    pub fn signal_variance(&self) -> f64 {
        match *self {
            KernelSpec::Matern52 { signal_variance, .. }
            | KernelSpec::AitchisonAitken { signal_variance, .. } => signal_variance,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CboError::InvalidParameter(msg));
        let sf = self.signal_variance();
        if !(sf > 0.0 && sf.is_finite()) {
            return bad(format!("signal variance must be positive, got {sf}"));
        }
        match *self {
            KernelSpec::Matern52 { lengthscale, .. } => {
                if !(lengthscale > 0.0 && lengthscale.is_finite()) {
                    return bad(format!("lengthscale must be positive, got {lengthscale}"));
                }
            }
            KernelSpec::AitchisonAitken { lambda, .. } => {
                if !(lambda > 0.5 && lambda <= 1.0) {
                    return bad(format!("AA lambda must lie in (0.5, 1], got {lambda}"));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        if a.len() != b.len() {
            return Err(CboError::DimensionMismatch {
                expected: a.len(),
                actual: b.len(),
            });
        }
        Ok(self.from_stat(self.pair_stat(a, b), a.len()))
    }

    /// The hyperparameter-free pair statistic the kernel depends on:
    /// Euclidean distance for Matérn, mismatch count for Aitchison–Aitken.
    pub(crate) fn pair_stat(&self, a: &[f64], b: &[f64]) -> f64 {
        pair_stat(self.kind(), a, b)
    }

    pub(crate) fn from_stat(&self, stat: f64, dim: usize) -> f64 {
        match *self {
            KernelSpec::Matern52 {
                lengthscale,
                signal_variance,
            } => {
                let s = 5f64.sqrt() * stat / lengthscale;
                signal_variance * (1.0 + s + s * s / 3.0) * (-s).exp()
            }
            KernelSpec::AitchisonAitken {
                lambda,
                signal_variance,
            } => {
                let agree = dim as f64 - stat;
                signal_variance * lambda.powf(agree) * (1.0 - lambda).powf(stat)
            }
        }
    }
}

pub(crate) fn pair_stat(kind: KernelKind, a: &[f64], b: &[f64]) -> f64 {
    match kind {
        KernelKind::Matern52 => a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt(),
        KernelKind::AitchisonAitken => a.iter().zip(b).filter(|(x, y)| x != y).count() as f64,
    }
}
