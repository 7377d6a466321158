use std::time::Instant;

use graphrule::synthgen::*;

fn cfg(kind: GenKind, total_nodes: usize, anchor_ratio: f64, seed: u64) -> GenConfig {
    GenConfig {
        kind,
        total_nodes,
        anchor_ratio,
        seed,
        ..GenConfig::default()
    }
}

const KINDS: [GenKind; 3] = [
    GenKind::Uniform,
    GenKind::ScaleFree,
    GenKind::LargeScaleFree,
];
const RATIOS: [f64; 5] = [0.5, 0.6, 0.7, 0.8, 0.9];

fn mean_buys(kind: GenKind, ratio: f64) -> f64 {
    let total: usize = (0..10)
        .map(|seed| {
            generate(&cfg(kind, 2000, ratio, seed))
                .unwrap()
                .type_count("BUY")
        })
        .sum();
    total as f64 / 10.0
}

#[test]
fn same_seed_same_graph() {
    for kind in KINDS {
        let a = generate(&cfg(kind, 1500, 0.7, 42)).unwrap();
        let b = generate(&cfg(kind, 1500, 0.7, 42)).unwrap();
        let c = generate(&cfg(kind, 1500, 0.7, 43)).unwrap();
        assert_eq!(a.to_json_string(), b.to_json_string());
        assert_ne!(a.to_json_string(), c.to_json_string());
    }
}

#[test]
fn node_counts_follow_config() {
    let g = generate(&cfg(GenKind::Uniform, 1000, 0.8, 1)).unwrap();
    assert_eq!(g.node_count(), 1000);
    let persons = g.nodes_with_label("Person").len();
    assert_eq!(persons, 800);
    assert_eq!(g.nodes_with_label("Category").len(), 10);
    assert_eq!(g.nodes_with_label("Item").len(), 190);
}

#[test]
fn uniform_buys_fall_with_ratio() {
    let means: Vec<f64> = RATIOS
        .iter()
        .map(|&r| mean_buys(GenKind::Uniform, r))
        .collect();
    assert!(means.windows(2).all(|w| w[1] < w[0]), "{means:?}");
}

#[test]
fn scale_free_buys_rise_with_ratio() {
    for kind in [GenKind::ScaleFree, GenKind::LargeScaleFree] {
        let means: Vec<f64> = RATIOS.iter().map(|&r| mean_buys(kind, r)).collect();
        assert!(means.windows(2).all(|w| w[1] > w[0]), "{kind:?} {means:?}");
    }
}

#[test]
fn large_scale_free_is_denser() {
    let sf = mean_buys(GenKind::ScaleFree, 0.7);
    let lsf = mean_buys(GenKind::LargeScaleFree, 0.7);
    assert!(lsf > 2.0 * sf);
}

#[test]
fn heavy_tail_at_10k() {
    let start = Instant::now();
    let g = generate(&cfg(GenKind::ScaleFree, 10_000, 0.8, 11)).unwrap();
    assert!(start.elapsed().as_secs() < 60);
    let share = top_item_share(&g, 0.01);
    assert!(share >= 0.20, "{share}");
    let uniform = generate(&cfg(GenKind::Uniform, 10_000, 0.8, 11)).unwrap();
    assert!(top_item_share(&uniform, 0.01) < 0.05);
}

#[test]
fn config_from_json() {
    let c: GenConfig = serde_json::from_str(
        r#"{"kind":"large-scale-free","totalNodes":300,"anchorRatio":0.6,"seed":5}"#,
    )
    .unwrap();
    assert_eq!(c.kind, GenKind::LargeScaleFree);
    assert_eq!(c.total_nodes, 300);
    assert!(serde_json::from_str::<GenConfig>(r#"{"bogus":1}"#).is_err());
    assert_eq!("scale-free".parse::<GenKind>().unwrap(), GenKind::ScaleFree);
}

#[test]
fn infeasible_configs_are_rejected() {
    assert!(generate(&cfg(GenKind::Uniform, 1000, 1.0, 0)).is_err());
    assert!(generate(&cfg(GenKind::Uniform, 5, 0.5, 0)).is_err());
    assert!(generate(&cfg(GenKind::Uniform, 1000, 0.0, 0)).is_err());
}
