use std::collections::HashSet;

use proptest::prelude::*;

use cbo::acquisition::{ei_score, ucb_score};
use cbo::embedding::threshold_scaled;
use cbo::harness::mean_std;
use cbo::strategies::run_bo_from;
use cbo::{
    BenchmarkKind, CategoricalSpace, GpModel, KernelSpec, LookupTable, Objective, RandomEmbedding,
    StrategyConfig, StrategyKind,
};
use cbo::benchmarks::ProblemSpec;

fn arities() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(2usize..7, 1..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_and_code_round_trip(arities in arities(), seed in any::<u64>()) {
        let space = CategoricalSpace::new(arities.clone()).unwrap();
        let rank = seed % space.cardinality();
        let c = space.unrank(rank).unwrap();
        prop_assert_eq!(space.rank(&c).unwrap(), rank);
        let bits = space.encode(&c).unwrap();
        let n: u64 = arities.iter().map(|&k| k as u64).product();
        let expected = (u64::BITS - (n - 1).leading_zeros()) as usize;
        prop_assert_eq!(bits.len(), expected);
        prop_assert_eq!(space.decode(&bits).unwrap(), c);
    }

    #[test]
    fn thresholding_is_monotone(u in prop::collection::vec(-0.5f64..1.5, 1..20), t in 0.01f64..0.99) {
        let b = threshold_scaled(&u, t);
        let lo = u.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for (bit, v) in b.0.iter().zip(&u) {
            let on = hi > lo && (v - lo) / (hi - lo) >= t;
            prop_assert_eq!(*bit == 1, on);
        }
        let lower = threshold_scaled(&u, t / 2.0);
        prop_assert!(b.0.iter().zip(&lower.0).all(|(hi, lo)| hi <= lo));
    }

    #[test]
    fn embedded_points_recover_themselves(arities in prop::collection::vec(2usize..5, 1..4), d in 4usize..12, seed in 0u64..1000) {
        let space = CategoricalSpace::new(arities).unwrap();
        let table = LookupTable::build(&space, &RandomEmbedding::new(&space, d, seed).unwrap()).unwrap();
        for c in space.iter() {
            let x = table.embedding().embed(&space.encode(&c).unwrap()).unwrap();
            let r = table.nearest_rank(&x).unwrap();
            prop_assert_eq!(table.row(r), x.as_slice());
        }
    }

    #[test]
    fn nearest_respects_exclusion(seed in 0u64..500, excluded in prop::collection::hash_set(0u64..16, 0..16)) {
        let space = CategoricalSpace::binary(4).unwrap();
        let table = LookupTable::build(&space, &RandomEmbedding::new(&space, 5, seed).unwrap()).unwrap();
        let got = table.nearest_rank_excluding(&[0.1; 5], &excluded).unwrap();
        match got {
            None => prop_assert_eq!(excluded.len(), 16),
            Some(r) => prop_assert!(!excluded.contains(&r)),
        }
    }

    #[test]
    fn posterior_variance_is_bounded(
        points in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 2), 1..8),
        query in prop::collection::vec(-3.0f64..3.0, 2),
        lengthscale in 0.1f64..5.0,
        signal in 0.1f64..5.0,
    ) {
        let targets: Vec<f64> = points.iter().map(|p| p[0].sin() + p[1]).collect();
        let model = GpModel::fit(KernelSpec::matern52(lengthscale, signal).unwrap(), 1e-3, points, targets).unwrap();
        let (mu, sd) = model.predict(&query).unwrap();
        prop_assert!(mu.is_finite());
        prop_assert!(sd >= 0.0);
        prop_assert!(sd * sd <= signal * (1.0 + 1e-9));
    }

    #[test]
    fn acquisition_scores_are_monotone(mu in -5.0f64..5.0, sigma in 0.0f64..3.0, beta in 0.0f64..4.0, best in -5.0f64..5.0) {
        prop_assert!(ucb_score(mu, sigma, beta + 0.5) <= ucb_score(mu, sigma, beta));
        prop_assert!(ucb_score(mu + 0.5, sigma, beta) > ucb_score(mu, sigma, beta));
        let ei = ei_score(mu, sigma, best, 0.01);
        prop_assert!(ei >= 0.0);
        prop_assert!(ei_score(mu - 0.5, sigma, best, 0.01) >= ei);
    }

    #[test]
    fn mean_std_is_shift_invariant(values in prop::collection::vec(-100.0f64..100.0, 1..30), shift in -50.0f64..50.0) {
        let (m, s) = mean_std(&values);
        let shifted: Vec<f64> = values.iter().map(|v| v + shift).collect();
        let (m2, s2) = mean_std(&shifted);
        prop_assert!((m2 - m - shift).abs() < 1e-9);
        prop_assert!((s2 - s).abs() < 1e-9);
        prop_assert!(s >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_search_trace_invariants(seed in any::<u64>(), budget in 1usize..25) {
        let instance = ProblemSpec::new(BenchmarkKind::Bqp)
            .with_dimension(6)
            .generate(seed)
            .unwrap()
            .with_optimum(1 << 16)
            .unwrap();
        let start = instance.space().sample(&mut cbo::rng::rng_from_seed(seed));
        let trace = run_bo_from(&instance, &StrategyConfig::new(StrategyKind::Random), budget, seed, start.clone()).unwrap();
        prop_assert_eq!(trace.records.len(), budget + 1);
        prop_assert_eq!(&trace.records[0].combination, &start);
        prop_assert_eq!(trace.records[0].cum_regret, Some(0.0));
        let mut seen = HashSet::new();
        let mut best = f64::INFINITY;
        for r in &trace.records {
            best = best.min(r.y);
            prop_assert_eq!(r.best_so_far, best);
            prop_assert!(r.inst_regret.unwrap() >= 0.0);
            seen.insert(r.combination.clone());
        }
        prop_assert!(!seen.is_empty());
    }
}
