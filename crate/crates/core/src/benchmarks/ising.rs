use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CboError, Result};
use crate::rng::rng_from_seed;

pub const MAX_ISING_NODES: usize = 16;

/// Ising model sparsification on a grid.
///
/// The reference model `p(s) ∝ exp(s^T J s)` has one coupling per grid edge
/// (so each edge contributes `2 J_e s_i s_j`). Bit `e` keeps edge `e` in the
/// approximating model `q` with the same coupling; dropped edges are zeroed.
/// The objective is `KL(p || q) + lambda * (kept edges)`, with both
/// partition functions computed by enumerating all `2^n` spin states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingSparsification {
    pub num_nodes: usize,
    pub edges: Vec<(usize, usize)>,
    pub couplings: Vec<f64>,
    pub lambda: f64,
}

/// Grid edges: horizontal edges row by row, then vertical edges row by row.
pub fn grid_edges(rows: usize, cols: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols.saturating_sub(1) {
            edges.push((r * cols + c, r * cols + c + 1));
        }
    }
    for r in 0..rows.saturating_sub(1) {
        for c in 0..cols {
            edges.push((r * cols + c, (r + 1) * cols + c));
        }
    }
    edges
}

impl IsingSparsification {
    /// Couplings `|J_e| ~ U[0.05, 5]` with a fair random sign.
    pub fn generate(rows: usize, cols: usize, lambda: f64, seed: u64) -> Result<Self> {
        let edges = grid_edges(rows, cols);
        let mut rng = rng_from_seed(seed);
        let couplings = edges
            .iter()
            .map(|_| {
                let magnitude = rng.random_range(0.05..=5.0);
                if rng.random_bool(0.5) {
                    -magnitude
                } else {
                    magnitude
                }
            })
            .collect();
        Self::new(rows * cols, edges, couplings, lambda)
    }

    pub fn new(
        num_nodes: usize,
        edges: Vec<(usize, usize)>,
        couplings: Vec<f64>,
        lambda: f64,
    ) -> Result<Self> {
        if num_nodes > MAX_ISING_NODES {
            return Err(CboError::EnumerationCap {
                cardinality: 1u64 << num_nodes.min(63),
                cap: 1 << MAX_ISING_NODES,
            });
        }
        if edges.is_empty() {
            return Err(CboError::Config("ising model needs at least one edge".into()));
        }
        if edges.len() != couplings.len() {
            return Err(CboError::DimensionMismatch {
                expected: edges.len(),
                actual: couplings.len(),
            });
        }
        if let Some(&(a, b)) = edges.iter().find(|(a, b)| *a >= num_nodes || *b >= num_nodes || a == b) {
            return Err(CboError::Config(format!("bad edge ({a}, {b}) for {num_nodes} nodes")));
        }
        Ok(Self {
            num_nodes,
            edges,
            couplings,
            lambda,
        })
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Exponent `s^T J s` of a spin state; bit `i` of `state` set means `s_i = +1`.
    fn energy(&self, state: u32, keep: &[u8]) -> f64 {
        let mut e = 0.0;
        for ((&(a, b), &j), &k) in self.edges.iter().zip(&self.couplings).zip(keep) {
            if k != 0 {
                let aligned = ((state >> a) & 1) == ((state >> b) & 1);
                e += if aligned { 2.0 * j } else { -2.0 * j };
            }
        }
        e
    }

    pub fn kl_divergence(&self, keep: &[u8]) -> f64 {
        let all = vec![1u8; self.num_edges()];
        let states = 1u32 << self.num_nodes;
        let ep: Vec<f64> = (0..states).map(|s| self.energy(s, &all)).collect();
        let eq: Vec<f64> = (0..states).map(|s| self.energy(s, keep)).collect();
        let log_zp = log_sum_exp(&ep);
        let log_zq = log_sum_exp(&eq);
        let cross: f64 = ep
            .iter()
            .zip(&eq)
            .map(|(a, b)| (a - log_zp).exp() * (a - b))
            .sum();
        cross - log_zp + log_zq
    }

    pub fn evaluate(&self, b: &[u8]) -> f64 {
        let kept = b.iter().filter(|&&v| v != 0).count();
        self.kl_divergence(b) + self.lambda * kept as f64
    }
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_edge_counts() {
        assert_eq!(grid_edges(3, 3).len(), 12);
        assert_eq!(grid_edges(2, 3).len(), 7);
        assert_eq!(grid_edges(4, 4).len(), 24);
        assert_eq!(grid_edges(1, 2), vec![(0, 1)]);
    }

    #[test]
    fn full_model_has_zero_kl() {
        let m = IsingSparsification::generate(3, 3, 0.0, 7).unwrap();
        assert_eq!(m.evaluate(&[1; 12]), 0.0);
        let m = IsingSparsification::generate(3, 3, 1.0, 7).unwrap();
        assert_eq!(m.evaluate(&[1; 12]), 12.0);
    }

    #[test]
    fn two_node_hand_enumeration() {
        let m = IsingSparsification::new(2, vec![(0, 1)], vec![0.5], 0.0).unwrap();
        // p over 4 states with exponent 2 * 0.5 * s0 s1, q uniform
        let weights = [1f64.exp(), (-1f64).exp(), (-1f64).exp(), 1f64.exp()];
        let z: f64 = weights.iter().sum();
        let kl: f64 = weights.iter().map(|w| (w / z) * ((w / z) / 0.25).ln()).sum();
        assert!((m.evaluate(&[0]) - kl).abs() < 1e-14);
        assert_eq!(m.evaluate(&[1]), 0.0);
    }

    #[test]
    fn kl_is_nonnegative() {
        let m = IsingSparsification::generate(3, 3, 0.0, 1).unwrap();
        for code in 0u32..4096 {
            let b: Vec<u8> = (0..12).map(|i| ((code >> i) & 1) as u8).collect();
            assert!(m.evaluate(&b) >= -1e-12);
        }
    }

    #[test]
    fn couplings_in_range() {
        let m = IsingSparsification::generate(4, 4, 0.0, 2).unwrap();
        assert!(m.couplings.iter().all(|j| (0.05..=5.0).contains(&j.abs())));
        assert!(IsingSparsification::generate(5, 4, 0.0, 2).is_err());
    }
}
