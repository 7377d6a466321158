//! Strategies for random syntax trees and a mutator for malformed input.

use graphrule::graph::PropertyValue;
use graphrule::parser::*;
use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn ident() -> impl Strategy<Value = String> {
    "[A-Za-z_][A-Za-z0-9_]{0,6}".prop_filter("keyword", |s| !is_keyword(s))
}

pub fn literal() -> impl Strategy<Value = PropertyValue> {
    prop_oneof![
        any::<bool>().prop_map(PropertyValue::Boolean),
        any::<i64>().prop_map(PropertyValue::Integer),
        any::<f64>()
            .prop_filter("finite", |d| d.is_finite())
            .prop_map(PropertyValue::Decimal),
        "[ -~\\n\\t\\r]{0,8}".prop_map(PropertyValue::Text),
    ]
}

pub fn operand() -> impl Strategy<Value = Operand> {
    prop_oneof![
        (ident(), ident()).prop_map(|(var, prop)| Operand::Property { var, prop }),
        ident().prop_map(Operand::Variable),
        literal().prop_map(Operand::Literal),
    ]
}

pub fn compare_op() -> impl Strategy<Value = CompareOp> {
    prop_oneof![
        Just(CompareOp::Eq),
        Just(CompareOp::Ne),
        Just(CompareOp::Lt),
        Just(CompareOp::Le),
        Just(CompareOp::Gt),
        Just(CompareOp::Ge),
    ]
}

pub fn predicate() -> impl Strategy<Value = Predicate> {
    let leaf = (operand(), compare_op(), operand())
        .prop_map(|(left, op, right)| Predicate::Compare { left, op, right });
    leaf.prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Predicate::And(a.into(), b.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Predicate::Or(a.into(), b.into())),
            inner.prop_map(|a| Predicate::Not(a.into())),
        ]
    })
}

pub fn rel_step() -> impl Strategy<Value = RelStep> {
    prop_oneof![
        ident().prop_map(|rel_type| RelStep::Single { rel_type }),
        (ident(), 0u32..100).prop_map(|(rel_type, min_count)| RelStep::Count {
            rel_type,
            min_count
        }),
        (1u32..100).prop_map(|max_len| RelStep::Any { max_len }),
    ]
}

pub fn pattern(anchor: String) -> impl Strategy<Value = PatternSpec> {
    (
        1u32..4,
        0u32..3,
        prop::collection::vec((rel_step(), ident(), ident()), 1..4),
    )
        .prop_map(move |(min_card, extra, steps)| PatternSpec {
            min_card,
            max_card: min_card + extra,
            anchor: anchor.clone(),
            steps: steps
                .into_iter()
                .map(|(rel, variable, label)| Step {
                    rel,
                    node: NodeSpec { variable, label },
                })
                .collect(),
        })
}

pub fn item_set(anchor: String) -> impl Strategy<Value = ItemSetSpec> {
    prop::collection::vec(pattern(anchor), 1..3).prop_map(|conjuncts| ItemSetSpec { conjuncts })
}

pub fn threshold() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), (0.0f64..1.0)]
}

pub fn query() -> impl Strategy<Value = MineRuleQuery> {
    (ident(), ident(), ident()).prop_flat_map(|(name, anchor_var, anchor_label)| {
        (
            prop::option::of(predicate()),
            item_set(anchor_var.clone()),
            item_set(anchor_var.clone()),
            prop::option::of(predicate()),
            prop::collection::vec(ident(), 0..3),
            threshold(),
            threshold(),
        )
            .prop_map(
                move |(anchor_predicate, body, head, where_predicate, ignore, s, c)| {
                    MineRuleQuery {
                        name: name.clone(),
                        grouping: GroupingSpec {
                            anchor_var: anchor_var.clone(),
                            anchor_label: anchor_label.clone(),
                            anchor_predicate,
                        },
                        body,
                        head,
                        where_predicate,
                        ignore,
                        min_support: s,
                        min_confidence: c,
                    }
                },
            )
    })
}

pub const TOKENS: &[&str] = &[
    "(",
    ")",
    "[",
    "]",
    "-",
    ">",
    "<",
    "*",
    ":",
    ".",
    "..",
    ",",
    "=",
    "<>",
    "\"",
    "\\",
    "AND",
    "OR",
    "NOT",
    "WHERE",
    "HEAD",
    "BODY",
    "1",
    "-7",
    "2.5e",
    "0..",
    "p",
    "x",
    "SUPPORT >",
    "\u{e9}",
    "\n",
    "",
];

pub fn mutate(text: &str, rng: &mut ChaCha8Rng) -> String {
    let mut chars: Vec<char> = text.chars().collect();
    for _ in 0..rng.random_range(1..6) {
        let at = rng.random_range(0..=chars.len());
        match rng.random_range(0..5) {
            0 => chars.truncate(at),
            1 if at < chars.len() => {
                chars.remove(at);
            }
            2 => {
                let tok = TOKENS.choose(rng).unwrap();
                for (i, c) in tok.chars().enumerate() {
                    chars.insert(at + i, c);
                }
            }
            3 if at < chars.len() => chars[at] = char::from(rng.random_range(0x20u8..0x7f)),
            _ => {
                let end = rng.random_range(at..=chars.len().min(at + 12));
                let piece: Vec<char> = chars[at..end].to_vec();
                chars.splice(at..at, piece);
            }
        }
    }
    chars.into_iter().collect()
}

/// Feeds `cases` mutated or token-soup inputs to the parser. Accepted inputs
/// must survive a render/parse round trip. Returns how many were rejected.
pub fn fuzz_parser(sources: &[String], cases: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rejected = 0;
    for i in 0..cases {
        let text = if i % 10 == 0 {
            (0..rng.random_range(0..40))
                .map(|_| *TOKENS.choose(&mut rng).unwrap())
                .collect::<Vec<_>>()
                .join(" ")
        } else {
            mutate(sources.choose(&mut rng).unwrap(), &mut rng)
        };
        match parse_query(&text) {
            Ok(q) => {
                let again = parse_query(&render_query(&q)).unwrap();
                assert_eq!(again, q, "{text}");
            }
            Err(e) => {
                assert!(!e.to_string().is_empty());
                rejected += 1;
            }
        }
    }
    rejected
}
