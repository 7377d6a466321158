#![allow(dead_code)]

pub mod astgen;
pub mod tables;

use std::collections::HashMap;
use std::path::PathBuf;

use graphrule::graph::{load_graph, PropertyGraph};
use graphrule::parser::{parse_query, MineRuleQuery};
use graphrule::rules::{AssociationRule, ConjunctItems};
use graphrule::synthgen::{generate, GenConfig, GenKind};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn fixture() -> PropertyGraph {
    let f = std::fs::File::open(root().join("fixtures/running_example.json")).unwrap();
    load_graph(f).unwrap()
}

pub const LISTINGS: &[&str] = &[
    "simple",
    "many_items",
    "conditioned1",
    "conditioned2",
    "count_items",
    "any_path",
    "path1",
    "path2",
    "ignore",
    "complex_body",
    "more_complex_body",
    "influencer_rome",
];

pub fn listing_text(name: &str) -> String {
    std::fs::read_to_string(root().join(format!("queries/{name}.mgr"))).unwrap()
}

pub fn listing(name: &str) -> MineRuleQuery {
    parse_query(&listing_text(name)).unwrap()
}

/// Rules as comparable tuples with exact counters.
pub fn exact(rules: &[AssociationRule]) -> Vec<String> {
    rules
        .iter()
        .map(|r| {
            format!(
                "{:?} -> {:?} [{}/{}/{}]",
                r.body, r.head, r.rule_count, r.body_count, r.anchor_count
            )
        })
        .collect()
}

/// A small seeded graph: at most 200 nodes, kind and density varying with
/// the seed.
pub fn random_graph(seed: u64) -> PropertyGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let kind = [
        GenKind::Uniform,
        GenKind::ScaleFree,
        GenKind::LargeScaleFree,
    ][rng.random_range(0..3)];
    let cfg = GenConfig {
        kind,
        total_nodes: rng.random_range(40..=200),
        anchor_ratio: rng.random_range(0.3..0.8),
        seed,
        buy_per_person: rng.random_range(1.0..4.0),
        recommend_per_person: rng.random_range(0.5..2.0),
        follow_per_person: rng.random_range(0.5..2.5),
        categories: rng.random_range(2..6),
        density_factor: 1.5,
        ..GenConfig::default()
    };
    generate(&cfg).unwrap()
}

/// Schema edges as (from label, type, to label).
const EDGES: &[(&str, &str, &str)] = &[
    ("Person", "BUY", "Item"),
    ("Person", "RECOMMEND", "Item"),
    ("Person", "FOLLOW", "Person"),
    ("Item", "OF", "Category"),
];

struct PatternGen {
    text: String,
    vars: Vec<(String, String)>,
}

fn random_pattern(rng: &mut ChaCha8Rng, vars: &mut usize, allow_multi: bool) -> PatternGen {
    let mut label = "Person";
    let mut text = String::new();
    let mut out = Vec::new();
    let len = if rng.random_bool(0.35) { 2 } else { 1 };
    let mut any_used = false;
    for _ in 0..len {
        let choices: Vec<_> = EDGES.iter().filter(|e| e.0 == label).collect();
        if choices.is_empty() {
            break;
        }
        let &&(_, ty, to) = choices.choose(rng).unwrap();
        let rel = match rng.random_range(0..10) {
            0 | 1 => format!("-[:{ty}>{}]-", rng.random_range(0..2)),
            2 if !any_used => {
                any_used = true;
                format!("-[*<{}]-", rng.random_range(2..4))
            }
            _ => format!("-[:{ty}]-"),
        };
        *vars += 1;
        let v = format!("V{}", *vars);
        text.push_str(&format!("{rel}({v}:{to})"));
        out.push((v, to.to_string()));
        label = to;
    }
    let card = if allow_multi && !any_used && rng.random_bool(0.4) {
        format!("1..{} ", rng.random_range(2..4))
    } else {
        String::new()
    };
    PatternGen {
        text: format!("{card}(p){text}"),
        vars: out,
    }
}

/// A random valid query over the synthetic schema, exercising every step
/// kind, cardinalities, WHERE splitting and IGNORE.
pub fn random_query(rng: &mut ChaCha8Rng) -> MineRuleQuery {
    loop {
        let mut n = 0;
        let nb = rng.random_range(1..=2);
        let nh = if rng.random_bool(0.2) { 2 } else { 1 };
        let body: Vec<PatternGen> = (0..nb).map(|_| random_pattern(rng, &mut n, true)).collect();
        let head: Vec<PatternGen> = (0..nh).map(|_| random_pattern(rng, &mut n, true)).collect();
        let all: Vec<&(String, String)> = body.iter().chain(&head).flat_map(|p| &p.vars).collect();

        let mut conds = Vec::new();
        if rng.random_bool(0.3) {
            if let Some((v, _)) = all.iter().find(|(_, l)| l == "Item") {
                conds.push(format!("{v}.price > {}", rng.random_range(20..150)));
            }
        }
        if rng.random_bool(0.3) {
            let b = body.iter().flat_map(|p| &p.vars).last().unwrap();
            let h = head.iter().flat_map(|p| &p.vars).find(|x| x.1 == b.1);
            if let Some(h) = h {
                let op = if rng.random_bool(0.5) { "<>" } else { "=" };
                if rng.random_bool(0.5) {
                    conds.push(format!("{} {op} {}", b.0, h.0));
                } else {
                    conds.push(format!("{}.name {op} {}.name", b.0, h.0));
                }
            }
        }
        if rng.random_bool(0.15) {
            conds.push(format!("p.age > {}", rng.random_range(20..60)));
        }
        let mut ignore = Vec::new();
        for p in body.iter().chain(&head) {
            if p.vars.len() == 2 && rng.random_bool(0.3) {
                ignore.push(p.vars[0].0.clone());
            }
        }

        let grouping = if rng.random_bool(0.2) {
            "(p:Person) WHERE p.city <> \"Rome\""
        } else {
            "(p:Person)"
        };
        let text = format!(
            "MINE GRAPH RULE R GROUPING ON {grouping}\nDEFINING BODY AS {}\nHEAD AS {}\n{}{}EXTRACTING RULES WITH SUPPORT > {} AND CONFIDENCE > {}",
            body.iter().map(|p| p.text.as_str()).collect::<Vec<_>>().join(" AND "),
            head.iter().map(|p| p.text.as_str()).collect::<Vec<_>>().join(" AND "),
            if conds.is_empty() { String::new() } else { format!("WHERE {}\n", conds.join(" AND ")) },
            if ignore.is_empty() { String::new() } else { format!("IGNORE {}\n", ignore.join(", ")) },
            [0.0, 0.01, 0.02, 0.05][rng.random_range(0..4)],
            [0.0, 0.1, 0.3][rng.random_range(0..3)],
        );
        if let Ok(q) = parse_query(&text) {
            return q;
        }
    }
}

fn contains(big: &ConjunctItems, small: &ConjunctItems) -> bool {
    small.iter().all(|t| big.contains(t))
}

fn strictly_contains(big: &[ConjunctItems], small: &[ConjunctItems]) -> bool {
    big.len() == small.len()
        && big.iter().zip(small).all(|(b, s)| contains(b, s))
        && big.iter().zip(small).any(|(b, s)| b.len() > s.len())
}

/// Asserts support never grows when a body strictly grows under the same
/// head. Returns the number of (larger, smaller) body pairs compared.
pub fn antimonotone_pairs(rules: &[AssociationRule]) -> usize {
    let mut by_head: HashMap<&Vec<ConjunctItems>, Vec<&AssociationRule>> = HashMap::new();
    for r in rules {
        by_head.entry(&r.head).or_default().push(r);
    }
    let mut compared = 0;
    for group in by_head.values() {
        for r1 in group {
            for r2 in group {
                if strictly_contains(&r1.body, &r2.body) {
                    compared += 1;
                    assert!(
                        r1.rule_count <= r2.rule_count && r1.support <= r2.support,
                        "{r1:?} vs {r2:?}"
                    );
                }
            }
        }
    }
    compared
}
