use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CboError, Result};
use crate::rng::rng_from_seed;

/// Seesaw balancing: bit `i` places weight `w_i` at signed distance `r_i`
/// from the pivot, and the objective is the absolute net torque.
///
/// Positions are `i - m/2` on the left half and `i - m/2 + 1` on the right,
/// so no weight sits on the pivot. The empty selection is trivially
/// balanced; with `forbid_empty` it is charged `10 * max_torque`, where
/// `max_torque = sum_i |r_i| w_i` bounds every achievable net torque.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Seesaw {
    pub weights: Vec<f64>,
    pub positions: Vec<f64>,
    pub forbid_empty: bool,
}

pub fn seesaw_positions(m: usize) -> Vec<f64> {
    let half = (m / 2) as f64;
    (0..m)
        .map(|i| {
            let i = i as f64;
            if i < half {
                i - half
            } else {
                i - half + 1.0
            }
        })
        .collect()
}

impl Seesaw {
    pub fn generate(m: usize, forbid_empty: bool, seed: u64) -> Result<Self> {
        if m == 0 || !m.is_multiple_of(2) {
            return Err(CboError::Config(format!("seesaw needs an even dimension, got {m}")));
        }
        let mut rng = rng_from_seed(seed);
        let weights = (0..m).map(|_| rng.random_range(0.5..=2.5)).collect();
        Ok(Self {
            weights,
            positions: seesaw_positions(m),
            forbid_empty,
        })
    }

    pub fn with_weights(weights: Vec<f64>, forbid_empty: bool) -> Result<Self> {
        let m = weights.len();
        if m == 0 || !m.is_multiple_of(2) {
            return Err(CboError::Config(format!("seesaw needs an even dimension, got {m}")));
        }
        Ok(Self {
            weights,
            positions: seesaw_positions(m),
            forbid_empty,
        })
    }

    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    pub fn max_torque(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.positions)
            .map(|(w, r)| w * r.abs())
            .sum()
    }

    pub fn evaluate(&self, b: &[u8]) -> f64 {
        let mut torque = 0.0;
        let mut any = false;
        for ((&bit, w), r) in b.iter().zip(&self.weights).zip(&self.positions) {
            if bit != 0 {
                torque += w * r;
                any = true;
            }
        }
        let value = torque.abs();
        if self.forbid_empty && !any {
            value + 10.0 * self.max_torque()
        } else {
            value
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::{brute_force_optimum, BenchmarkKind, Objective, ProblemSpec};

    #[test]
    fn positions_skip_the_pivot() {
        assert_eq!(seesaw_positions(4), vec![-2.0, -1.0, 1.0, 2.0]);
        assert_eq!(seesaw_positions(6), vec![-3.0, -2.0, -1.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn symmetric_cancellation() {
        let s = Seesaw::with_weights(vec![1.0; 4], false).unwrap();
        assert_eq!(s.evaluate(&[1, 0, 0, 1]), 0.0);
        assert_eq!(s.evaluate(&[1, 1, 0, 0]), 3.0);
        assert_eq!(s.evaluate(&[0, 0, 0, 0]), 0.0);
    }

    #[test]
    fn empty_penalty() {
        let s = Seesaw::with_weights(vec![1.0; 4], true).unwrap();
        assert_eq!(s.evaluate(&[0, 0, 0, 0]), 60.0);
        assert!(s.evaluate(&[0, 0, 0, 0]) > s.evaluate(&[1, 1, 1, 0]));
    }

    #[test]
    fn weights_in_range_and_odd_rejected() {
        let s = Seesaw::generate(24, true, 3).unwrap();
        assert!(s.weights.iter().all(|w| (0.5..=2.5).contains(w)));
        assert!(Seesaw::generate(7, true, 3).is_err());
    }

    #[test]
    fn six_dim_oracle_matches_enumeration() {
        let inst = ProblemSpec::new(BenchmarkKind::Seesaw)
            .with_dimension(6)
            .generate(12)
            .unwrap();
        let crate::benchmarks::ObjectiveParams::Seesaw(s) = &inst.objective else {
            unreachable!()
        };
        // independent enumeration with explicit torque sums
        let mut best = f64::INFINITY;
        let mut best_bits = 0u32;
        for code in 0u32..64 {
            let bits: Vec<u8> = (0..6).map(|i| ((code >> (5 - i)) & 1) as u8).collect();
            let mut torque = 0.0;
            for i in 0..6 {
                if bits[i] == 1 {
                    torque += s.weights[i] * s.positions[i];
                }
            }
            let mut v = f64::abs(torque);
            if code == 0 {
                v += 10.0 * s.max_torque();
            }
            if v < best {
                best = v;
                best_bits = code;
            }
        }
        let opt = brute_force_optimum(&inst, 1 << 16).unwrap().unwrap();
        assert_eq!(opt.value, best);
        assert_eq!(inst.space().rank(&opt.combination).unwrap(), u64::from(best_bits));
        assert_eq!(inst.evaluate(&opt.combination).unwrap(), best);
    }
}
