//! Brute-force reference miner.
//!
//! Enumerates every binding by plain depth-first search over the public
//! graph API, materializes every body/head value at every cardinality
//! combination for every anchor, and counts supporting anchors in ordered
//! sets. Nothing here is shared with the pruned miner beyond the query AST,
//! predicate evaluation, and the output record type.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use itertools::Itertools;
use thiserror::Error;

use crate::graph::{lookup_property, Direction, NodeId, PropertyGraph, RelId};
use crate::matcher::{eval_predicate, Binding, EvalError, MatchDirection};
use crate::parser::{validate, MineRuleQuery, PatternSpec, Predicate, RelStep, Severity};
use crate::rules::{sort_canonical, AssociationRule, ConjunctItems};

#[derive(Debug, Clone)]
pub struct OracleOptions {
    pub id_property: String,
    pub direction: MatchDirection,
    pub max_nodes: usize,
    pub max_relationships: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            id_property: "name".into(),
            direction: MatchDirection::Directed,
            max_nodes: 500,
            max_relationships: 5_000,
        }
    }
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("graph too large for the oracle: {nodes} nodes / {relationships} relationships (limits {max_nodes} / {max_relationships})")]
    TooLarge {
        nodes: usize,
        relationships: usize,
        max_nodes: usize,
        max_relationships: usize,
    },
    #[error("no `{label}` node satisfies the grouping condition")]
    EmptyAnchors { label: String },
    #[error("invalid query")]
    Invalid,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Every bindings list of one pattern for one anchor, grouped by visible
/// projection.
type Projections = BTreeMap<Vec<String>, Vec<Binding>>;

struct Oracle<'a> {
    g: &'a PropertyGraph,
    q: &'a MineRuleQuery,
    opts: &'a OracleOptions,
    patterns: Vec<&'a PatternSpec>,
    n_body: usize,
    /// adjacency for untyped paths: node -> (relationship, far end)
    walk: HashMap<NodeId, Vec<(RelId, NodeId)>>,
}

pub fn oracle_mine(
    g: &PropertyGraph,
    q: &MineRuleQuery,
    opts: &OracleOptions,
) -> Result<Vec<AssociationRule>, OracleError> {
    if g.node_count() > opts.max_nodes || g.relationship_count() > opts.max_relationships {
        return Err(OracleError::TooLarge {
            nodes: g.node_count(),
            relationships: g.relationship_count(),
            max_nodes: opts.max_nodes,
            max_relationships: opts.max_relationships,
        });
    }
    if validate(q).iter().any(|d| d.severity == Severity::Error) {
        return Err(OracleError::Invalid);
    }

    let mut walk: HashMap<NodeId, Vec<(RelId, NodeId)>> = HashMap::new();
    for r in g.relationships() {
        walk.entry(r.start).or_default().push((r.id, r.end));
        if opts.direction == MatchDirection::Undirected && r.start != r.end {
            walk.entry(r.end).or_default().push((r.id, r.start));
        }
    }
    let o = Oracle {
        g,
        q,
        opts,
        patterns: q.patterns().collect(),
        n_body: q.body.conjuncts.len(),
        walk,
    };
    o.run()
}

impl Oracle<'_> {
    fn direction(&self) -> Direction {
        match self.opts.direction {
            MatchDirection::Directed => Direction::Outgoing,
            MatchDirection::Undirected => Direction::Both,
        }
    }

    fn has_label(&self, n: NodeId, label: &str) -> bool {
        self.g
            .node(n)
            .is_some_and(|node| node.labels.iter().any(|l| l == label))
    }

    fn display(&self, n: NodeId) -> String {
        let node = self.g.node(n).expect("bound nodes exist");
        lookup_property(&node.properties, &self.opts.id_property)
            .map(|v| v.to_string())
            .unwrap_or_else(|| format!("#{}", n.0))
    }

    /// Ends of relationship-distinct walks of 1..=`max` hops from `start`,
    /// excluding `start` itself.
    fn walk_ends(&self, start: NodeId, max: usize) -> BTreeSet<NodeId> {
        fn go(
            o: &Oracle<'_>,
            at: NodeId,
            left: usize,
            used: &mut Vec<RelId>,
            out: &mut BTreeSet<NodeId>,
        ) {
            if left == 0 {
                return;
            }
            for &(rel, next) in o.walk.get(&at).map(Vec::as_slice).unwrap_or(&[]) {
                if used.contains(&rel) {
                    continue;
                }
                out.insert(next);
                used.push(rel);
                go(o, next, left - 1, used, out);
                used.pop();
            }
        }
        let mut out = BTreeSet::new();
        go(self, start, max, &mut Vec::new(), &mut out);
        out.remove(&start);
        out
    }

    fn step_targets(&self, from: NodeId, rel: &RelStep) -> BTreeSet<NodeId> {
        match rel {
            RelStep::Single { rel_type } => self
                .g
                .neighbors_via(from, rel_type, self.direction())
                .into_iter()
                .map(|(n, _)| n)
                .collect(),
            RelStep::Count {
                rel_type,
                min_count,
            } => self
                .g
                .neighbors_via(from, rel_type, self.direction())
                .into_iter()
                .map(|(n, _)| n)
                .filter(|&n| {
                    self.g
                        .rel_count_between(from, n, rel_type, self.direction())
                        > *min_count as usize
                })
                .collect(),
            RelStep::Any { max_len } => self.walk_ends(from, max_len.saturating_sub(1) as usize),
        }
    }

    fn bindings(&self, p: &PatternSpec, anchor: NodeId) -> Vec<Binding> {
        let mut partial = vec![{
            let mut b = Binding::new();
            b.insert(p.anchor.clone(), anchor);
            (anchor, b)
        }];
        for step in &p.steps {
            let mut next = Vec::new();
            for (at, b) in &partial {
                for n in self.step_targets(*at, &step.rel) {
                    if self.has_label(n, &step.node.label) {
                        let mut b2 = b.clone();
                        b2.insert(step.node.variable.clone(), n);
                        next.push((n, b2));
                    }
                }
            }
            partial = next;
        }
        partial.into_iter().map(|(_, b)| b).collect()
    }

    fn owner(&self, var: &str) -> Option<usize> {
        self.patterns
            .iter()
            .position(|p| p.variables().any(|v| v == var))
    }

    fn run(&self) -> Result<Vec<AssociationRule>, OracleError> {
        let q = self.q;
        let mut anchors = Vec::new();
        for n in self.g.nodes() {
            if !n.labels.contains(&q.grouping.anchor_label) {
                continue;
            }
            let mut env = Binding::new();
            env.insert(q.grouping.anchor_var.clone(), n.id);
            let ok = match &q.grouping.anchor_predicate {
                Some(p) => eval_predicate(p, &env, self.g)?,
                None => true,
            };
            if ok {
                anchors.push(n.id);
            }
        }
        anchors.sort();
        if anchors.is_empty() {
            return Err(OracleError::EmptyAnchors {
                label: q.grouping.anchor_label.clone(),
            });
        }

        // WHERE conjuncts keyed by the set of patterns they mention
        let mut by_patterns: Vec<(BTreeSet<usize>, &Predicate)> = Vec::new();
        if let Some(w) = &q.where_predicate {
            for c in w.conjuncts() {
                let set: BTreeSet<usize> =
                    c.variables().iter().filter_map(|v| self.owner(v)).collect();
                by_patterns.push((set, c));
            }
        }

        let visible: Vec<Vec<String>> = self
            .patterns
            .iter()
            .map(|p| {
                p.variables()
                    .filter(|v| !q.is_ignored(v))
                    .map(String::from)
                    .collect()
            })
            .collect();

        // per anchor: None if an anchor-only condition fails, else the
        // projections of every pattern
        let mut profiles: Vec<(NodeId, Option<Vec<Projections>>)> = Vec::new();
        for &a in &anchors {
            let mut env = Binding::new();
            env.insert(q.grouping.anchor_var.clone(), a);
            let mut alive = true;
            for (set, c) in &by_patterns {
                if set.is_empty() && !eval_predicate(c, &env, self.g)? {
                    alive = false;
                }
            }
            if !alive {
                profiles.push((a, None));
                continue;
            }
            let mut per = Vec::new();
            for (i, p) in self.patterns.iter().enumerate() {
                let mut proj = Projections::new();
                'binding: for b in self.bindings(p, a) {
                    for (set, c) in &by_patterns {
                        if set.len() == 1 && set.contains(&i) && !eval_predicate(c, &b, self.g)? {
                            continue 'binding;
                        }
                    }
                    let key = visible[i]
                        .iter()
                        .map(|v| self.display(b[v.as_str()]))
                        .collect();
                    proj.entry(key).or_default().push(b);
                }
                per.push(proj);
            }
            profiles.push((a, Some(per)));
        }

        let ranges: Vec<Vec<u32>> = self
            .patterns
            .iter()
            .map(|p| (p.min_card..=p.max_card).collect())
            .collect();

        let mut rule_anchors: BTreeMap<(Vec<ConjunctItems>, Vec<ConjunctItems>), BTreeSet<NodeId>> =
            BTreeMap::new();
        let mut body_anchors: BTreeMap<Vec<ConjunctItems>, BTreeSet<NodeId>> = BTreeMap::new();

        for (a, per) in &profiles {
            let Some(per) = per else { continue };
            // all values of every pattern at every cardinality, as subsets of
            // projection keys
            let values: Vec<Vec<Vec<&Vec<String>>>> = per
                .iter()
                .zip(&ranges)
                .map(|(proj, range)| {
                    range
                        .iter()
                        .flat_map(|&k| proj.keys().combinations(k as usize))
                        .collect()
                })
                .collect();

            for choice in values.iter().map(|v| v.iter()).multi_cartesian_product() {
                if !self.cross_ok(&by_patterns, per, &choice, usize::MAX)? {
                    continue;
                }
                let items: Vec<ConjunctItems> = choice
                    .iter()
                    .map(|v| v.iter().map(|t| (*t).clone()).collect())
                    .collect();
                let head = items[self.n_body..].to_vec();
                let body = items[..self.n_body].to_vec();
                rule_anchors.entry((body, head)).or_default().insert(*a);
            }
            for choice in values[..self.n_body]
                .iter()
                .map(|v| v.iter())
                .multi_cartesian_product()
            {
                if !self.cross_ok(&by_patterns, per, &choice, self.n_body)? {
                    continue;
                }
                let body: Vec<ConjunctItems> = choice
                    .iter()
                    .map(|v| v.iter().map(|t| (*t).clone()).collect())
                    .collect();
                body_anchors.entry(body).or_default().insert(*a);
            }
        }

        let total = anchors.len() as u64;
        let mut out = Vec::new();
        for ((body, head), who) in rule_anchors {
            let rc = who.len() as u64;
            let bc = body_anchors.get(&body).map_or(0, |s| s.len()) as u64;
            if rc as f64 / total as f64 <= q.min_support
                || rc as f64 / bc as f64 <= q.min_confidence
            {
                continue;
            }
            if self.tautological(&body, &head) {
                continue;
            }
            out.push(AssociationRule::new(body, head, rc, bc, total));
        }
        sort_canonical(&mut out);
        Ok(out)
    }

    /// Conditions spanning several patterns must hold for every combination
    /// of chosen tuples, each with some witnessing bindings. Only
    /// conditions over patterns below `limit` are checked.
    fn cross_ok(
        &self,
        conds: &[(BTreeSet<usize>, &Predicate)],
        per: &[Projections],
        choice: &[&Vec<&Vec<String>>],
        limit: usize,
    ) -> Result<bool, OracleError> {
        for (set, c) in conds {
            if set.len() < 2 || set.iter().any(|&p| p >= limit) {
                continue;
            }
            let pats: Vec<usize> = set.iter().copied().collect();
            for tuples in pats
                .iter()
                .map(|&p| choice[p].iter())
                .multi_cartesian_product()
            {
                let witnesses: Vec<&Vec<Binding>> = tuples
                    .iter()
                    .zip(&pats)
                    .map(|(t, &p)| &per[p][**t])
                    .collect();
                let mut found = false;
                for combo in witnesses.iter().map(|w| w.iter()).multi_cartesian_product() {
                    let mut env = Binding::new();
                    for b in combo {
                        env.extend(b.iter().map(|(k, v)| (k.clone(), *v)));
                    }
                    if eval_predicate(c, &env, self.g)? {
                        found = true;
                        break;
                    }
                }
                if !found {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn tautological(&self, body: &[ConjunctItems], head: &[ConjunctItems]) -> bool {
        let mut b: Vec<&Vec<String>> = body.iter().flatten().collect();
        let mut h: Vec<&Vec<String>> = head.iter().flatten().collect();
        b.sort();
        h.sort();
        if b == h {
            return true;
        }
        // same value at the same hop from the anchor
        let hops = |p: &PatternSpec| -> Vec<usize> {
            p.variables()
                .enumerate()
                .filter(|(_, v)| !self.q.is_ignored(v))
                .map(|(i, _)| i)
                .collect()
        };
        for (bi, bv) in body.iter().enumerate() {
            let bh = hops(self.patterns[bi]);
            for (hi, hv) in head.iter().enumerate() {
                let hh = hops(self.patterns[self.n_body + hi]);
                for (bx, hop) in bh.iter().enumerate() {
                    if let Some(hx) = hh.iter().position(|x| x == hop) {
                        for bt in bv {
                            for ht in hv {
                                if bt[bx] == ht[hx] {
                                    return true;
                                }
                            }
                        }
                    }
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::load_graph;
    use crate::parser::parse_query;

    fn fixture() -> PropertyGraph {
        load_graph(include_str!("../../../fixtures/running_example.json").as_bytes()).unwrap()
    }

    fn query(file: &str) -> MineRuleQuery {
        let path = format!("{}/../../queries/{file}.mgr", env!("CARGO_MANIFEST_DIR"));
        parse_query(&std::fs::read_to_string(path).unwrap()).unwrap()
    }

    #[test]
    fn simple_listing() {
        let rules = oracle_mine(&fixture(), &query("simple"), &OracleOptions::default()).unwrap();
        assert_eq!(rules.len(), 8);
        let ds = rules
            .iter()
            .find(|r| r.body[0][0][0] == "Dress" && r.head[0][0][0] == "Shoes")
            .unwrap();
        assert_eq!((ds.support, ds.confidence), (0.5, 1.0));
    }

    #[test]
    fn empty_graph_has_no_anchors() {
        assert!(matches!(
            oracle_mine(
                &PropertyGraph::empty(),
                &query("simple"),
                &OracleOptions::default()
            ),
            Err(OracleError::EmptyAnchors { .. })
        ));
    }

    #[test]
    fn size_guard() {
        let opts = OracleOptions {
            max_nodes: 3,
            ..OracleOptions::default()
        };
        assert!(matches!(
            oracle_mine(&fixture(), &query("simple"), &opts),
            Err(OracleError::TooLarge { .. })
        ));
    }
}
