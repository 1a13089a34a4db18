//! Distributional sanity, determinism, and order-statistic correctness
//! of the Monte-Carlo calibration layer.

use graphtest_core::calibrate::{bh_fdr, mc_null, randomization_null, NullSample};
use graphtest_core::graph::{Graph, GraphKind};
use graphtest_core::rng::{stream, Purpose};
use graphtest_core::stats::{GraphContext, Statistic};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn chi2_null_matches_chi_square_moments() {
    let g = Graph::generate(GraphKind::ErdosRenyi { n: 20, p: 0.2 }, 5).unwrap();
    let ctx = GraphContext::new(g).unwrap();
    let b = 20_000usize;
    let null = mc_null(&ctx, Statistic::Chi2, b, 99).unwrap();
    let n = 20.0f64;
    let mean: f64 = null.values().iter().sum::<f64>() / b as f64;
    let var: f64 = null.values().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / b as f64;
    // chi^2_n: mean n, variance 2n; allow 4 standard errors.
    assert!((mean - n).abs() <= 4.0 * (2.0 * n / b as f64).sqrt(), "mean {mean}");
    assert!((var - 2.0 * n).abs() <= 0.1 * 2.0 * n, "var {var}");
}

#[test]
fn tmax_null_on_empty_graph_is_centered() {
    // With no edges every T_lambda collapses to T_0, which has mean 0 and
    // variance 2 under the null.
    let g = Graph::generate(GraphKind::Empty { n: 30 }, 0).unwrap();
    let ctx = GraphContext::new(g).unwrap();
    let b = 4000usize;
    let null = mc_null(&ctx, Statistic::TMax, b, 17).unwrap();
    let mean: f64 = null.values().iter().sum::<f64>() / b as f64;
    assert!(mean.abs() <= 3.0 * (2.0 / b as f64).sqrt(), "mean {mean}");
}

#[test]
fn calibration_is_independent_of_thread_count() {
    let g = Graph::generate(GraphKind::ErdosRenyi { n: 25, p: 0.25 }, 3).unwrap();
    let ctx = GraphContext::new(g).unwrap();
    let run = |threads: usize| -> Vec<u64> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                mc_null(&ctx, Statistic::TMax, 400, 21)
                    .unwrap()
                    .values()
                    .iter()
                    .map(|v| v.to_bits())
                    .collect()
            })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn randomization_null_draws_from_universe() {
    let g = Graph::generate(GraphKind::Cycle { n: 6 }, 0).unwrap();
    let ctx = GraphContext::new(g).unwrap();
    let universe: Vec<f64> = (0..40).map(|i| i as f64 / 7.0).collect();
    let null = randomization_null(&ctx, Statistic::Z, &universe, 500, 8).unwrap();
    // Every draw's z-statistic is attainable from a 6-subset of the
    // universe, so it must stay within the extreme-subset envelope.
    let mut sorted = universe.clone();
    sorted.sort_by(f64::total_cmp);
    let hi: f64 = sorted[34..].iter().sum::<f64>() / 6.0 * 6.0f64.sqrt();
    let lo: f64 = sorted[..6].iter().sum::<f64>() / 6.0 * 6.0f64.sqrt();
    for &v in null.values() {
        assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
    }
}

#[test]
fn p_value_matches_brute_force_count() {
    let mut rng = stream(11, Purpose::ChildSeed, 0, 0);
    // Coarse grid forces ties, the case the add-one count must handle
    // conservatively.
    let values: Vec<f64> = (0..257).map(|_| (rng.random::<f64>() * 10.0).round() / 2.0).collect();
    let null = NullSample::from_draws("probe".into(), 0, values.clone()).unwrap();
    let b = values.len();
    for k in 0..200 {
        let obs = (k as f64 - 100.0) / 15.0;
        let count = values.iter().filter(|&&v| v >= obs).count();
        let brute = (1 + count) as f64 / (b + 1) as f64;
        assert_eq!(null.p_value(obs), brute, "obs={obs}");
    }
}

#[test]
fn critical_value_is_the_upper_order_statistic() {
    let values: Vec<f64> = (1..=100).map(|i| i as f64).collect();
    let null = NullSample::from_draws("probe".into(), 0, values).unwrap();
    let cv = null.critical_value(0.05).unwrap();
    assert_eq!(cv, 96.0);
    // Duality at the stated level: p(obs) <= alpha iff obs > cv.
    for k in 0..400 {
        let obs = k as f64 / 4.0 + 0.125;
        assert_eq!(null.p_value(obs) <= 0.05, obs > cv, "obs={obs}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn bh_rejections_grow_with_alpha(
        pvals in proptest::collection::vec(0.0f64..=1.0, 1..40),
        a1 in 0.01f64..0.5,
        a2 in 0.01f64..0.5,
    ) {
        let (lo, hi) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
        let small = bh_fdr(&pvals, lo).unwrap();
        let large = bh_fdr(&pvals, hi).unwrap();
        for i in 0..pvals.len() {
            prop_assert!(!small.rejected[i] || large.rejected[i]);
        }
        // q-values are a property of the family alone.
        prop_assert_eq!(small.q, large.q);
    }

    #[test]
    fn bh_q_bounds_and_null_family(
        pvals in proptest::collection::vec(0.0f64..=1.0, 1..40),
    ) {
        let out = bh_fdr(&pvals, 0.1).unwrap();
        for (i, &q) in out.q.iter().enumerate() {
            prop_assert!(q >= pvals[i] - 1e-12);
            prop_assert!(q <= 1.0 + 1e-12);
            prop_assert_eq!(out.rejected[i], q <= 0.1);
        }
    }
}
