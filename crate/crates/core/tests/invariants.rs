mod common;

use std::collections::BTreeSet;

use common::*;
use graphrule::matcher::{enumerate_conjunct_values, match_pattern, MatchDirection};
use graphrule::miner::{anchors, mine, MineOptions};
use graphrule::parser::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn step(rel: RelStep) -> PatternSpec {
    PatternSpec {
        min_card: 1,
        max_card: 1,
        anchor: "p".into(),
        steps: vec![Step {
            rel,
            node: NodeSpec {
                variable: "X".into(),
                label: "Item".into(),
            },
        }],
    }
}

fn targets(
    g: &graphrule::graph::PropertyGraph,
    p: &PatternSpec,
    anchor: graphrule::graph::NodeId,
) -> BTreeSet<graphrule::graph::NodeId> {
    match_pattern(g, p, anchor, None, MatchDirection::Directed)
        .unwrap()
        .into_iter()
        .map(|b| b["X"])
        .collect()
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn grouping() -> GroupingSpec {
    GroupingSpec {
        anchor_var: "p".into(),
        anchor_label: "Person".into(),
        anchor_predicate: None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn count_zero_equals_single(seed in 0u64..10_000) {
        let g = random_graph(seed);
        let single = step(RelStep::Single { rel_type: "BUY".into() });
        let count = step(RelStep::Count { rel_type: "BUY".into(), min_count: 0 });
        for a in anchors(&g, &grouping()).unwrap() {
            prop_assert_eq!(targets(&g, &single, a), targets(&g, &count, a));
        }
    }

    #[test]
    fn any_path_covers_single(seed in 0u64..10_000) {
        let g = random_graph(seed);
        let single = step(RelStep::Single { rel_type: "BUY".into() });
        let any = step(RelStep::Any { max_len: 2 });
        for a in anchors(&g, &grouping()).unwrap() {
            let s = targets(&g, &single, a);
            prop_assert!(s.is_subset(&targets(&g, &any, a)));
        }
    }

    #[test]
    fn value_count_is_binomial(seed in 0u64..10_000, k in 1usize..4) {
        let g = random_graph(seed);
        let single = step(RelStep::Single { rel_type: "BUY".into() });
        for a in anchors(&g, &grouping()).unwrap() {
            let bindings = match_pattern(&g, &single, a, None, MatchDirection::Directed).unwrap();
            let d = bindings.len();
            let values = enumerate_conjunct_values(&g, &bindings, k, &["X"], "name");
            prop_assert_eq!(values.len(), binomial(d, k));
        }
    }

    #[test]
    fn raising_thresholds_keeps_a_subset(seed in 0u64..10_000, ds in 0.0f64..0.1, dc in 0.0f64..0.5) {
        let g = random_graph(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_query(&mut rng);
        let mut stricter = q.clone();
        stricter.min_support = (q.min_support + ds).min(0.99);
        stricter.min_confidence = (q.min_confidence + dc).min(0.99);
        let (loose, _) = mine(&g, &q, &MineOptions::default()).unwrap();
        let (tight, _) = mine(&g, &stricter, &MineOptions::default()).unwrap();
        let loose: BTreeSet<String> = exact(&loose).into_iter().collect();
        for r in exact(&tight) {
            prop_assert!(loose.contains(&r), "{}", r);
        }
    }

    #[test]
    fn mining_is_deterministic(seed in 0u64..10_000) {
        let g = random_graph(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_query(&mut rng);
        let (a, _) = mine(&g, &q, &MineOptions::default()).unwrap();
        let (b, _) = mine(&g, &q, &MineOptions::default()).unwrap();
        prop_assert_eq!(exact(&a), exact(&b));
    }
}
