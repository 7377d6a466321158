//! Mined rules and their tabular layout.

use std::cmp::Ordering;

use indexmap::IndexMap;
use serde::Serialize;

use crate::parser::{ItemSetSpec, MineRuleQuery};

/// Item tuples of one conjunct: each tuple holds the display values of the
/// conjunct's visible variables, tuples sorted lexicographically.
pub type ConjunctItems = Vec<Vec<String>>;

#[derive(Debug, Clone, PartialEq)]
pub struct AssociationRule {
    pub body: Vec<ConjunctItems>,
    pub head: Vec<ConjunctItems>,
    /// anchors supporting body and head
    pub rule_count: u64,
    /// anchors supporting the body
    pub body_count: u64,
    pub anchor_count: u64,
    pub support: f64,
    pub confidence: f64,
}

impl AssociationRule {
    pub fn new(
        body: Vec<ConjunctItems>,
        head: Vec<ConjunctItems>,
        rule_count: u64,
        body_count: u64,
        anchor_count: u64,
    ) -> Self {
        AssociationRule {
            body,
            head,
            rule_count,
            body_count,
            anchor_count,
            support: rule_count as f64 / anchor_count as f64,
            confidence: rule_count as f64 / body_count as f64,
        }
    }

    /// Body values in column order, then head values.
    fn sort_key(&self) -> (Vec<&str>, Vec<&str>) {
        fn flat(side: &[ConjunctItems]) -> Vec<&str> {
            side.iter()
                .flatten()
                .flatten()
                .map(String::as_str)
                .collect()
        }
        (flat(&self.body), flat(&self.head))
    }

    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.sort_key()
            .cmp(&other.sort_key())
            .then_with(|| self.body.cmp(&other.body))
            .then_with(|| self.head.cmp(&other.head))
    }
}

pub fn sort_canonical(rules: &mut [AssociationRule]) {
    rules.sort_by(AssociationRule::canonical_cmp);
}

/// One column group per conjunct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnGroup {
    /// `ItemsetB<k>` or `ItemsetH<k>`
    pub name: String,
    pub columns: Vec<String>,
    pub visible: usize,
    pub max_card: usize,
}

/// Column names derived from a query: visible variable names, suffixed with
/// the item slot (`X_1`, `X_2`) when a conjunct can hold several items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnLayout {
    pub body: Vec<ColumnGroup>,
    pub head: Vec<ColumnGroup>,
}

/// Output record: column maps plus the two measures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuleRecord {
    pub body: IndexMap<String, String>,
    pub head: IndexMap<String, String>,
    pub support: f64,
    pub confidence: f64,
}

fn groups(q: &MineRuleQuery, set: &ItemSetSpec, prefix: &str) -> Vec<ColumnGroup> {
    set.conjuncts
        .iter()
        .enumerate()
        .map(|(i, pat)| {
            let vars: Vec<&str> = pat.variables().filter(|v| !q.is_ignored(v)).collect();
            let max_card = pat.max_card as usize;
            let mut columns = Vec::new();
            for slot in 1..=max_card {
                for v in &vars {
                    columns.push(if max_card > 1 {
                        format!("{v}_{slot}")
                    } else {
                        v.to_string()
                    });
                }
            }
            ColumnGroup {
                name: format!("{prefix}{}", i + 1),
                columns,
                visible: vars.len(),
                max_card,
            }
        })
        .collect()
}

impl ColumnLayout {
    pub fn new(q: &MineRuleQuery) -> Self {
        ColumnLayout {
            body: groups(q, &q.body, "ItemsetB"),
            head: groups(q, &q.head, "ItemsetH"),
        }
    }

    fn side_map(groups: &[ColumnGroup], side: &[ConjunctItems]) -> IndexMap<String, String> {
        let mut map = IndexMap::new();
        for (g, items) in groups.iter().zip(side) {
            let vals = items.iter().flatten();
            for (col, val) in g.columns.iter().zip(vals) {
                map.insert(col.clone(), val.clone());
            }
        }
        map
    }

    /// Cells of one side in column order; slots a lower cardinality leaves
    /// empty are `None`.
    pub fn cells<'a>(groups: &[ColumnGroup], side: &'a [ConjunctItems]) -> Vec<Option<&'a str>> {
        let mut out = Vec::new();
        for (g, items) in groups.iter().zip(side) {
            let mut vals = items.iter().flatten().map(String::as_str);
            for _ in &g.columns {
                out.push(vals.next());
            }
        }
        out
    }

    pub fn record(&self, rule: &AssociationRule) -> RuleRecord {
        RuleRecord {
            body: Self::side_map(&self.body, &rule.body),
            head: Self::side_map(&self.head, &rule.head),
            support: rule.support,
            confidence: rule.confidence,
        }
    }
}
