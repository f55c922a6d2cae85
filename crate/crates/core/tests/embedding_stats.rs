use rand::Rng;

use cbo::rng::rng_from_seed;
use cbo::{BooleanVector, RandomEmbedding};

#[test]
fn squared_distance_ratio_averages_near_one() {
    let (m, d) = (20, 64);
    let embedding = RandomEmbedding::with_code_length(m, d, 7).unwrap();
    let mut rng = rng_from_seed(11);
    let mut ratios = Vec::new();
    while ratios.len() < 100 {
        let a = BooleanVector((0..m).map(|_| rng.random_range(0..2u8)).collect());
        let b = BooleanVector((0..m).map(|_| rng.random_range(0..2u8)).collect());
        let h = a.hamming(&b);
        if h == 0 {
            continue;
        }
        let xa = embedding.embed(&a).unwrap();
        let xb = embedding.embed(&b).unwrap();
        let sq: f64 = xa.iter().zip(&xb).map(|(u, v)| (u - v).powi(2)).sum();
        ratios.push(sq / h as f64);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    assert!((0.8..=1.2).contains(&mean), "mean ratio {mean}");
}

#[test]
fn entries_have_unit_row_variance_scale() {
    let d = 400;
    let e = RandomEmbedding::with_code_length(30, d, 3).unwrap();
    let r = e.matrix();
    let bound = (3.0 / d as f64).sqrt();
    assert!(r.iter().all(|v| v.abs() <= bound));
    // E[R_ij^2] = 1/d, so each column has unit expected squared norm.
    for j in 0..r.ncols() {
        let norm2: f64 = r.column(j).iter().map(|v| v * v).sum();
        assert!((norm2 - 1.0).abs() < 0.25, "column {j} norm^2 {norm2}");
    }
}

#[test]
fn pseudo_inverse_is_a_left_inverse_when_tall() {
    let e = RandomEmbedding::with_code_length(8, 30, 5).unwrap();
    let prod = e.pseudo_inverse() * e.matrix();
    for i in 0..8 {
        for j in 0..8 {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((prod[(i, j)] - want).abs() < 1e-9);
        }
    }
}
