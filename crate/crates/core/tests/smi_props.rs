use infoloss::smi::{
    average_questions, build_question_tree, curve_peak, plogp_curve, smi, surprisal, ProbabilityDistribution,
    QuestionTree, Strategy as TreeStrategy,
};
use proptest::prelude::*;

// Reference SMI written directly from the definition.
fn naive_smi(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln() / std::f64::consts::LN_2).sum()
}

fn dist_strategy() -> impl Strategy<Value = ProbabilityDistribution> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.0..1.0f64, 1e-6..1e-3f64], 1..24)
        .prop_filter_map("all-zero weights", |w| ProbabilityDistribution::normalized(w).ok())
}

fn positive_dist_strategy() -> impl Strategy<Value = ProbabilityDistribution> {
    prop::collection::vec(prop_oneof![1e-6..1.0f64, 1e-9..1e-4f64], 1..24)
        .prop_map(|w| ProbabilityDistribution::normalized(w).unwrap())
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(1000)
}

#[test]
fn uniform_is_log2_n() {
    for n in 1..=1024usize {
        let h = smi(&ProbabilityDistribution::uniform(n).unwrap()).value();
        assert!((h - (n as f64).log2()).abs() < 1e-9, "n={n}: {h}");
    }
}

#[test]
fn dyadic_optimal_tree_is_exact() {
    let cases: &[&[f64]] = &[
        &[1.0],
        &[0.5, 0.5],
        &[0.5, 0.25, 0.125, 0.125],
        &[0.25, 0.25, 0.25, 0.125, 0.0625, 0.0625],
        &[0.125; 8],
        &[0.5, 0.125, 0.125, 0.0625, 0.0625, 0.03125, 0.03125, 0.0625],
    ];
    for probs in cases {
        let d = ProbabilityDistribution::new(probs.to_vec()).unwrap();
        let tree = build_question_tree(&d, TreeStrategy::Optimal);
        let avg = average_questions(&tree, &d).unwrap().value();
        assert_eq!(avg, smi(&d).value(), "{probs:?}");
    }
}

#[test]
fn impossible_events_can_reach_the_upper_bound() {
    // The event with probability 0 still needs its own leaf.
    let d = ProbabilityDistribution::new(vec![1.0, 0.0]).unwrap();
    let avg = average_questions(&build_question_tree(&d, TreeStrategy::Optimal), &d).unwrap();
    assert_eq!(smi(&d).value(), 0.0);
    assert_eq!(avg.value(), 1.0);
}

#[test]
fn curve_peak_near_inverse_e() {
    for points in [100, 999, 10_000] {
        let curve = plogp_curve(points).unwrap();
        let peak = curve_peak(&curve).unwrap();
        let step = 1.0 / (points as f64 + 1.0);
        assert!((peak.p - (-1f64).exp()).abs() <= step, "points={points}: {}", peak.p);
        assert!((peak.neg_p_log2_p - 0.5307).abs() < 1e-3);
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn smi_within_bounds(d in dist_strategy()) {
        let h = smi(&d).value();
        prop_assert!(h >= 0.0);
        prop_assert!(h <= (d.len() as f64).log2() + 1e-9);
        prop_assert!((h - naive_smi(d.probs())).abs() < 1e-9);
    }

    #[test]
    fn smi_is_permutation_invariant(d in dist_strategy(), seed in any::<u64>()) {
        let mut p = d.probs().to_vec();
        // deterministic shuffle driven by the seed
        let mut s = seed | 1;
        for i in (1..p.len()).rev() {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            p.swap(i, (s % (i as u64 + 1)) as usize);
        }
        let q = ProbabilityDistribution::new(p).unwrap();
        prop_assert!((smi(&q).value() - smi(&d).value()).abs() < 1e-12);
    }

    #[test]
    fn optimal_average_obeys_coding_bound(d in positive_dist_strategy()) {
        let h = smi(&d).value();
        let tree = build_question_tree(&d, TreeStrategy::Optimal);
        let avg = average_questions(&tree, &d).unwrap().value();
        prop_assert!(avg >= h - 1e-9, "avg {avg} < H {h}");
        prop_assert!(avg < h + 1.0, "avg {avg} >= H+1 {}", h + 1.0);
    }

    #[test]
    fn bisect_never_beats_optimal(d in dist_strategy()) {
        let opt = average_questions(&build_question_tree(&d, TreeStrategy::Optimal), &d).unwrap().value();
        let bis = average_questions(&build_question_tree(&d, TreeStrategy::BisectMass), &d).unwrap().value();
        prop_assert!(bis >= opt - 1e-12);
    }

    #[test]
    fn trees_cover_every_event_once(d in dist_strategy()) {
        for strategy in [TreeStrategy::Optimal, TreeStrategy::BisectMass] {
            let tree = build_question_tree(&d, strategy);
            let mut events = tree.events();
            events.sort_unstable();
            prop_assert_eq!(events, (0..d.len()).collect::<Vec<_>>());
            if d.len() == 1 {
                prop_assert_eq!(&tree, &QuestionTree::Leaf(0));
            }
        }
    }

    #[test]
    fn surprisal_matches_definition(p in 1e-300..=1.0f64) {
        prop_assert!((surprisal(p).unwrap().value() + p.log2()).abs() < 1e-9);
    }
}
