//! The random linear map from Boolean codes into `R^d`, and rounding-based
//! recovery from embedded points.
//!
//! Entries of `R` are i.i.d. `U(-1, 1)` scaled by `sqrt(3/d)`, which makes
//! `E ||R u||^2 = ||u||^2` for any fixed `u`. For Boolean differences
//! `||u||^2 = ||u||_1`, so squared embedded distances are unbiased estimates
//! of Hamming distances. Bounded entries keep the image polytope compact.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{CboError, Result};
use crate::rng::rng_from_seed;
use crate::space::{BooleanVector, CategoricalSpace};

/// Rounding threshold used by the pseudo-inverse recovery.
pub const RECON_THRESHOLD: f64 = 0.02;
/// Rounding threshold used by the Gaussian generative recovery.
pub const REMBO_THRESHOLD: f64 = 0.25;

const MAX_REGENERATIONS: u32 = 32;

#[derive(Debug, Clone)]
pub struct RandomEmbedding {
    matrix: DMatrix<f64>,
    pseudo_inverse: DMatrix<f64>,
    seed: u64,
    /// Seed actually used for `matrix`; differs from `seed` after a rank-deficient draw.
    effective_seed: u64,
    regenerations: u32,
}

impl RandomEmbedding {
    /// Draws `R` (`d x m`) for `space` from `seed`.
    ///
    /// When `d >= m` and the draw is rank deficient, the matrix is redrawn
    /// from `seed + 1`, `seed + 2`, ... and the count is kept in
    /// [`regenerations`](Self::regenerations).
    pub fn new(space: &CategoricalSpace, d: usize, seed: u64) -> Result<Self> {
        Self::with_code_length(space.code_length(), d, seed)
    }

    pub fn with_code_length(m: usize, d: usize, seed: u64) -> Result<Self> {
        if d == 0 || m == 0 {
            return Err(CboError::InvalidParameter(format!(
                "embedding needs d >= 1 and m >= 1, got d={d}, m={m}"
            )));
        }
        let scale = (3.0 / d as f64).sqrt();
        for regenerations in 0..=MAX_REGENERATIONS {
            let effective_seed = seed.wrapping_add(u64::from(regenerations));
            let mut rng = rng_from_seed(effective_seed);
            // row-major draw order so the matrix does not depend on storage layout
            let mut matrix = DMatrix::zeros(d, m);
            for i in 0..d {
                for j in 0..m {
                    matrix[(i, j)] = rng.random_range(-1.0..1.0) * scale;
                }
            }
            if d >= m && !has_full_column_rank(&matrix) {
                log::warn!("rank-deficient embedding for seed {effective_seed}, redrawing");
                continue;
            }
            let pseudo_inverse = pseudo_inverse(&matrix)?;
            return Ok(Self {
                matrix,
                pseudo_inverse,
                seed,
                effective_seed,
                regenerations,
            });
        }
        Err(CboError::InvalidParameter(format!(
            "no full-rank {d}x{m} embedding within {MAX_REGENERATIONS} redraws of seed {seed}"
        )))
    }

    /// Wraps an explicit `d x m` matrix. Mostly useful for constructed tests.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(CboError::InvalidParameter("empty embedding matrix".into()));
        }
        let pseudo_inverse = pseudo_inverse(&matrix)?;
        Ok(Self {
            matrix,
            pseudo_inverse,
            seed: 0,
            effective_seed: 0,
            regenerations: 0,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn pseudo_inverse(&self) -> &DMatrix<f64> {
        &self.pseudo_inverse
    }

    pub fn target_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn code_length(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn effective_seed(&self) -> u64 {
        self.effective_seed
    }

    pub fn regenerations(&self) -> u32 {
        self.regenerations
    }

    /// `R b`, summed in column order so repeated calls agree bit for bit.
    pub fn embed(&self, b: &BooleanVector) -> Result<Vec<f64>> {
        self.check_code(b.len())?;
        let mut out = vec![0.0; self.target_dim()];
        self.embed_into(b, &mut out);
        Ok(out)
    }

    pub(crate) fn embed_into(&self, b: &BooleanVector, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (j, &bit) in b.0.iter().enumerate() {
            if bit != 0 {
                for (i, v) in out.iter_mut().enumerate() {
                    *v += self.matrix[(i, j)];
                }
            }
        }
    }

    /// Axis-aligned box containing `R [0,1]^m`, and so the whole polytope.
    pub fn hypercube_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        self.matrix
            .row_iter()
            .map(|row| {
                row.iter().fold((0.0, 0.0), |(lo, hi), &v| {
                    if v < 0.0 {
                        (lo + v, hi)
                    } else {
                        (lo, hi + v)
                    }
                })
            })
            .unzip()
    }

    /// Pseudo-inverse reconstruction followed by min-max scaling and thresholding.
    pub fn recon_recover(&self, x: &[f64], threshold: f64) -> Result<BooleanVector> {
        check_threshold(threshold)?;
        if x.len() != self.target_dim() {
            return Err(CboError::DimensionMismatch {
                expected: self.target_dim(),
                actual: x.len(),
            });
        }
        let u = &self.pseudo_inverse * DVector::from_column_slice(x);
        Ok(threshold_scaled(u.as_slice(), threshold))
    }

    fn check_code(&self, len: usize) -> Result<()> {
        if len != self.code_length() {
            return Err(CboError::DimensionMismatch {
                expected: self.code_length(),
                actual: len,
            });
        }
        Ok(())
    }
}

/// Gaussian generative matrix `g` (`m x d`) mapping a low-dimensional point
/// back to the Boolean cube, as in random-embedding BO.
#[derive(Debug, Clone)]
pub struct GenerativeMatrix {
    matrix: DMatrix<f64>,
    pseudo_inverse: DMatrix<f64>,
}

impl GenerativeMatrix {
    pub fn new(m: usize, d: usize, seed: u64) -> Result<Self> {
        if d == 0 || m == 0 {
            return Err(CboError::InvalidParameter(format!(
                "generative matrix needs d >= 1 and m >= 1, got d={d}, m={m}"
            )));
        }
        let mut rng = rng_from_seed(seed);
        let mut matrix = DMatrix::zeros(m, d);
        for i in 0..m {
            for j in 0..d {
                matrix[(i, j)] = rng.sample::<f64, _>(StandardNormal);
            }
        }
        let pseudo_inverse = pseudo_inverse(&matrix)?;
        Ok(Self {
            matrix,
            pseudo_inverse,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn low_dim(&self) -> usize {
        self.matrix.ncols()
    }

    /// Least-squares preimage of a Boolean code mapped to `{-1, 1}`, shrunk into `[-1, 1]^d`.
    pub fn preimage(&self, b: &BooleanVector) -> Vec<f64> {
        let signed = DVector::from_iterator(b.len(), b.0.iter().map(|&v| 2.0 * f64::from(v) - 1.0));
        let x = &self.pseudo_inverse * signed;
        let scale = x.amax().max(1.0);
        x.iter().map(|v| v / scale).collect()
    }
}

/// `v = g x`, min-max scaled to `[0, 1]`, then thresholded.
pub fn rembo_recover(g: &GenerativeMatrix, x: &[f64], threshold: f64) -> Result<BooleanVector> {
    check_threshold(threshold)?;
    if x.len() != g.low_dim() {
        return Err(CboError::DimensionMismatch {
            expected: g.low_dim(),
            actual: x.len(),
        });
    }
    let v = &g.matrix * DVector::from_column_slice(x);
    Ok(threshold_scaled(v.as_slice(), threshold))
}

/// Min-max scales `u` to `[0, 1]` and sets bit `i` iff the scaled value is
/// at least `threshold`. A constant vector maps to all zeros.
pub fn threshold_scaled(u: &[f64], threshold: f64) -> BooleanVector {
    let (lo, hi) = u
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let span = hi - lo;
    if !(span > 0.0) {
        return BooleanVector(vec![0; u.len()]);
    }
    BooleanVector(
        u.iter()
            .map(|&v| u8::from((v - lo) / span >= threshold))
            .collect(),
    )
}

fn check_threshold(threshold: f64) -> Result<()> {
    if threshold > 0.0 && threshold < 1.0 {
        Ok(())
    } else {
        Err(CboError::InvalidParameter(format!(
            "rounding threshold must lie in (0, 1), got {threshold}"
        )))
    }
}

fn singular_tolerance(a: &DMatrix<f64>, max_sv: f64) -> f64 {
    a.nrows().max(a.ncols()) as f64 * f64::EPSILON * max_sv
}

fn has_full_column_rank(a: &DMatrix<f64>) -> bool {
    let sv = a.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    max > 0.0 && min > singular_tolerance(a, max)
}

fn pseudo_inverse(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let svd = a.clone().svd(true, true);
    let eps = singular_tolerance(a, svd.singular_values.max());
    svd.pseudo_inverse(eps)
        .map_err(|e| CboError::InvalidParameter(format!("pseudo-inverse failed: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Combination;

    #[test]
    fn one_by_one_is_bounded() {
        for seed in 0..50 {
            let e = RandomEmbedding::with_code_length(1, 1, seed).unwrap();
            let v = e.matrix()[(0, 0)];
            assert!(v.abs() <= 3f64.sqrt());
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = RandomEmbedding::with_code_length(20, 64, 42).unwrap();
        let b = RandomEmbedding::with_code_length(20, 64, 42).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        assert_eq!(a.pseudo_inverse(), b.pseudo_inverse());
        let c = RandomEmbedding::with_code_length(20, 64, 43).unwrap();
        assert_ne!(a.matrix(), c.matrix());
    }

    #[test]
    fn entries_bounded() {
        let e = RandomEmbedding::with_code_length(24, 20, 3).unwrap();
        let bound = (3.0f64 / 20.0).sqrt();
        assert!(e.matrix().iter().all(|v| v.abs() <= bound));
    }

    #[test]
    fn pseudo_inverse_is_left_inverse() {
        for (m, d) in [(5, 5), (12, 20), (20, 64), (24, 848)] {
            let e = RandomEmbedding::with_code_length(m, d, 11).unwrap();
            let residual = e.pseudo_inverse() * e.matrix() - DMatrix::<f64>::identity(m, m);
            assert!(residual.amax() <= 1e-8, "m={m} d={d}: {}", residual.amax());
        }
    }

    #[test]
    fn rank_deficient_matrix_detected() {
        let mut a = DMatrix::from_element(4, 3, 1.0);
        a[(0, 0)] = 2.0;
        assert!(!has_full_column_rank(&a));
        assert!(has_full_column_rank(&DMatrix::<f64>::identity(4, 3)));
    }

    #[test]
    fn embed_is_linear() {
        let space = CategoricalSpace::binary(6).unwrap();
        let e = RandomEmbedding::new(&space, 8, 1).unwrap();
        assert_eq!(e.embed(&BooleanVector(vec![0; 6])).unwrap(), vec![0.0; 8]);
        for j in 0..6 {
            let mut bits = vec![0; 6];
            bits[j] = 1;
            let col: Vec<f64> = e.matrix().column(j).iter().copied().collect();
            assert_eq!(e.embed(&BooleanVector(bits)).unwrap(), col);
        }
        let b1 = BooleanVector(vec![1, 0, 1, 0, 0, 0]);
        let b2 = BooleanVector(vec![0, 1, 0, 0, 0, 1]);
        let both = BooleanVector(vec![1, 1, 1, 0, 0, 1]);
        let sum: Vec<f64> = e
            .embed(&b1)
            .unwrap()
            .iter()
            .zip(e.embed(&b2).unwrap())
            .map(|(a, b)| a + b)
            .collect();
        for (a, b) in sum.iter().zip(e.embed(&both).unwrap()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(e.embed(&BooleanVector(vec![1; 5])).is_err());
    }

    #[test]
    fn recon_recovers_embedded_codes() {
        let space = CategoricalSpace::binary(8).unwrap();
        let e = RandomEmbedding::new(&space, 20, 5).unwrap();
        for rank in 1..255u64 {
            let b = space.rank_to_bits(rank);
            let x = e.embed(&b).unwrap();
            for threshold in [0.02, 0.5, 0.9] {
                assert_eq!(e.recon_recover(&x, threshold).unwrap(), b);
            }
        }
        let c = space.unrank(0).unwrap();
        assert_eq!(c, Combination(vec![0; 8]));
    }

    #[test]
    fn threshold_rules() {
        assert_eq!(threshold_scaled(&[0.3, 0.3, 0.3], 0.02).0, vec![0, 0, 0]);
        // already scaled: min 0.01 maps to 0, so scale with explicit endpoints
        let scaled = threshold_scaled(&[0.0, 0.01, 0.5, 0.03, 1.0], 0.02);
        assert_eq!(scaled.0, vec![0, 0, 1, 1, 1]);
        let scaled = threshold_scaled(&[0.0, 0.3, 0.1, 0.9, 1.0], 0.25);
        assert_eq!(scaled.0, vec![0, 1, 0, 1, 1]);
        assert_eq!(threshold_scaled(&[0.01, 0.5, 0.03], 0.02).0, vec![0, 1, 1]);
    }

    #[test]
    fn rembo_recover_rules() {
        let g = GenerativeMatrix::new(10, 4, 9).unwrap();
        assert_eq!(rembo_recover(&g, &[0.0; 4], 0.25).unwrap().0, vec![0; 10]);
        let x = [0.3, -0.7, 0.1, 0.9];
        let a = rembo_recover(&g, &x, REMBO_THRESHOLD).unwrap();
        let g2 = GenerativeMatrix::new(10, 4, 9).unwrap();
        assert_eq!(a, rembo_recover(&g2, &x, REMBO_THRESHOLD).unwrap());
        assert!(rembo_recover(&g, &x, 1.0).is_err());
        assert!(rembo_recover(&g, &x[..3], 0.25).is_err());
    }

    #[test]
    fn hypercube_bounds_contain_images() {
        let space = CategoricalSpace::binary(6).unwrap();
        let e = RandomEmbedding::new(&space, 4, 2).unwrap();
        let (lo, hi) = e.hypercube_bounds();
        for rank in 0..64 {
            let x = e.embed(&space.rank_to_bits(rank)).unwrap();
            for i in 0..4 {
                assert!(lo[i] - 1e-12 <= x[i] && x[i] <= hi[i] + 1e-12);
            }
        }
    }
}
