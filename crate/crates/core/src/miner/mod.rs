//! Rule mining with pair-lattice pruning.
//!
//! Mining runs in four phases:
//!
//! 1. count the anchors `C(A)`;
//! 2. match every body and head pattern once per anchor and keep the
//!    distinct visible projections (the per-anchor profile);
//! 3. walk the cardinality lattice breadth-first, building for each pair a
//!    rule table (kept only where support clears the threshold) and a body
//!    table; a pair with an empty rule table removes all pairs above it;
//! 4. join rule and body tables, compute confidence, drop tautologies.
//!
//! Counters use set semantics: an anchor contributes at most once to any
//! body or rule value, however many bindings produce it.

mod dag;

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use itertools::Itertools;
use serde::Serialize;
use thiserror::Error;

pub use dag::{build_pair_dag, PairDag, PairSpec};

use crate::graph::{lookup_property, NodeId, PropertyGraph};
use crate::matcher::{eval_with, CompiledPattern, EvalError, MatchDirection};
use crate::parser::{validate, Diagnostic, GroupingSpec, MineRuleQuery, Predicate, Severity};
use crate::rules::{sort_canonical, AssociationRule, ConjunctItems};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MineOptions {
    /// Remove lattice descendants of pairs without supported rules.
    pub prune: bool,
    /// Property used as a node's display value.
    pub id_property: String,
    pub direction: MatchDirection,
}

impl Default for MineOptions {
    fn default() -> Self {
        MineOptions {
            prune: true,
            id_property: "name".to_string(),
            direction: MatchDirection::Directed,
        }
    }
}

#[derive(Debug, Error)]
pub enum MineError {
    #[error("no `{label}` node satisfies the grouping condition, so support is undefined")]
    EmptyAnchors { label: String },
    #[error("invalid query: {}", .0.iter().filter(|d| d.severity == Severity::Error).map(|d| d.message.as_str()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MiningStats {
    pub anchor_count: u64,
    pub pairs_generated: usize,
    pub pairs_mined: usize,
    pub pairs_pruned: usize,
    /// supported (body, head) values over all mined pairs, tautologies included
    pub rule_candidates: usize,
    pub body_entries: usize,
    pub tautologies_dropped: usize,
    pub rules_emitted: usize,
    pub anchors_ms: f64,
    pub matching_ms: f64,
    pub pairs_ms: f64,
    pub assembly_ms: f64,
}

/// A supported (body, head) value pair of one lattice pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleCandidate {
    pub body: Vec<ConjunctItems>,
    pub head: Vec<ConjunctItems>,
    pub rule_count: u64,
    pub body_count: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairTables {
    /// candidates whose support clears the threshold, canonically sorted
    pub rules: Vec<RuleCandidate>,
    /// every body value with its anchor count, canonically sorted
    pub bodies: Vec<(Vec<ConjunctItems>, u64)>,
}

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn anchor_positions(g: &PropertyGraph, grouping: &GroupingSpec) -> Result<Vec<u32>, MineError> {
    let Some(label) = g.label_id(&grouping.anchor_label) else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    for &pos in g.label_positions(label) {
        let keep = match &grouping.anchor_predicate {
            None => true,
            Some(p) => eval_with(p, g, &|v: &str| (v == grouping.anchor_var).then_some(pos))?,
        };
        if keep {
            out.push(pos);
        }
    }
    Ok(out)
}

/// Anchors: nodes carrying the grouping label that satisfy the grouping
/// condition, ascending by id.
pub fn anchors(g: &PropertyGraph, grouping: &GroupingSpec) -> Result<Vec<NodeId>, MineError> {
    Ok(anchor_positions(g, grouping)?
        .into_iter()
        .map(|p| g.node_at(p).id)
        .collect())
}

/// `C(A)`. Zero anchors is an error because support would be undefined.
pub fn count_anchors(g: &PropertyGraph, grouping: &GroupingSpec) -> Result<u64, MineError> {
    let n = anchor_positions(g, grouping)?.len() as u64;
    if n == 0 {
        return Err(MineError::EmptyAnchors {
            label: grouping.anchor_label.clone(),
        });
    }
    Ok(n)
}

/// Mines `q` over `g`. Rules come back in canonical order.
pub fn mine(
    g: &PropertyGraph,
    q: &MineRuleQuery,
    opts: &MineOptions,
) -> Result<(Vec<AssociationRule>, MiningStats), MineError> {
    let t = Instant::now();
    check_query(q)?;
    let anchors = anchor_positions(g, &q.grouping)?;
    if anchors.is_empty() {
        return Err(MineError::EmptyAnchors {
            label: q.grouping.anchor_label.clone(),
        });
    }
    let anchors_ms = elapsed_ms(t);
    let mut m = Miner::new(g, q, opts, anchors)?;
    m.stats.anchors_ms = anchors_ms;
    Ok(m.run())
}

/// Rule and body tables of a single lattice pair over the given anchors.
pub fn mine_pair(
    g: &PropertyGraph,
    q: &MineRuleQuery,
    pair: &PairSpec,
    anchors: &[NodeId],
    opts: &MineOptions,
) -> Result<PairTables, MineError> {
    check_query(q)?;
    if anchors.is_empty() {
        return Err(MineError::EmptyAnchors {
            label: q.grouping.anchor_label.clone(),
        });
    }
    let positions = anchors.iter().filter_map(|&a| g.position(a)).collect();
    let mut m = Miner::new(g, q, opts, positions)?;
    let mined = m.mine_pair(pair);
    m.ensure_body_table(pair);
    let mut rules: Vec<RuleCandidate> = mined
        .supported
        .iter()
        .map(|(key, count)| {
            let (body, head) = m.split_key(key);
            RuleCandidate {
                body,
                head,
                rule_count: *count as u64,
                body_count: m.body_tables[&pair.body_cards][&key[..m.n_body]] as u64,
            }
        })
        .collect();
    rules.sort_by(|a, b| (&a.body, &a.head).cmp(&(&b.body, &b.head)));
    let mut bodies: Vec<(Vec<ConjunctItems>, u64)> = m.body_tables[&pair.body_cards]
        .iter()
        .map(|(key, &c)| (m.side_items(key, 0), c as u64))
        .collect();
    bodies.sort();
    Ok(PairTables { rules, bodies })
}

fn check_query(q: &MineRuleQuery) -> Result<(), MineError> {
    let diags = validate(q);
    if diags.iter().any(|d| d.severity == Severity::Error) {
        return Err(MineError::Invalid(diags));
    }
    Ok(())
}

/// Display values interned as small integers.
#[derive(Default)]
struct Symbols {
    ids: HashMap<String, u32>,
    names: Vec<String>,
    node_sym: Vec<u32>,
}

impl Symbols {
    fn of(&mut self, g: &PropertyGraph, pos: u32, id_property: &str) -> u32 {
        if self.node_sym.is_empty() {
            self.node_sym = vec![u32::MAX; g.node_count()];
        }
        let cached = self.node_sym[pos as usize];
        if cached != u32::MAX {
            return cached;
        }
        let node = g.node_at(pos);
        let text = match lookup_property(&node.properties, id_property) {
            Some(v) => v.to_string(),
            None => format!("#{}", node.id),
        };
        let next = self.names.len() as u32;
        let id = *self.ids.entry(text.clone()).or_insert_with(|| {
            self.names.push(text);
            next
        });
        self.node_sym[pos as usize] = id;
        id
    }
}

/// Interner for per-pattern tuples and conjunct values.
#[derive(Default)]
struct Table {
    ids: HashMap<Vec<u32>, u32>,
    items: Vec<Vec<u32>>,
}

impl Table {
    fn intern(&mut self, key: Vec<u32>) -> u32 {
        if let Some(&id) = self.ids.get(&key) {
            return id;
        }
        let id = self.items.len() as u32;
        self.items.push(key.clone());
        self.ids.insert(key, id);
        id
    }
}

struct CrossFilter<'q> {
    pred: &'q Predicate,
    patterns: Vec<usize>,
}

struct PatternInfo {
    /// step indices of visible variables
    visible: Vec<usize>,
}

/// What one anchor contributes, computed once and reused for every pair.
struct Profile {
    /// anchor passes the WHERE conjuncts that mention no pattern variable
    active: bool,
    /// per pattern: distinct tuple ids, ascending
    tuples: Vec<Vec<u32>>,
    /// per cross filter: satisfiable combinations of local tuple indices
    cross: Vec<HashSet<Vec<u32>>>,
}

/// A conjunct value as seen from one anchor.
#[derive(Clone)]
struct LocalValue {
    id: u32,
    local: Vec<u32>,
}

struct MinedPair {
    supported: Vec<(Vec<u32>, u32)>,
}

struct Miner<'a> {
    g: &'a PropertyGraph,
    q: &'a MineRuleQuery,
    opts: &'a MineOptions,
    anchor_count: u64,
    n_body: usize,
    patterns: Vec<PatternInfo>,
    cross: Vec<CrossFilter<'a>>,
    profiles: Vec<Profile>,
    symbols: Symbols,
    tuples: Vec<Table>,
    values: Vec<Table>,
    value_cache: HashMap<(usize, u32), Vec<Vec<LocalValue>>>,
    body_tables: HashMap<Vec<u32>, HashMap<Vec<u32>, u32>>,
    stats: MiningStats,
}

impl<'a> Miner<'a> {
    fn new(
        g: &'a PropertyGraph,
        q: &'a MineRuleQuery,
        opts: &'a MineOptions,
        anchors: Vec<u32>,
    ) -> Result<Self, MineError> {
        let t = Instant::now();
        let specs: Vec<_> = q.patterns().collect();
        let n_body = q.body.conjuncts.len();

        // which pattern each variable belongs to
        let mut owner: HashMap<&str, (usize, usize)> = HashMap::new();
        for (i, p) in specs.iter().enumerate() {
            for (j, v) in p.variables().enumerate() {
                owner.insert(v, (i, j));
            }
        }

        let mut anchor_filters = Vec::new();
        let mut single: Vec<Vec<&Predicate>> = vec![Vec::new(); specs.len()];
        let mut cross = Vec::new();
        if let Some(w) = &q.where_predicate {
            for c in w.conjuncts() {
                let pats: Vec<usize> = c
                    .variables()
                    .into_iter()
                    .filter_map(|v| owner.get(v).map(|o| o.0))
                    .sorted()
                    .dedup()
                    .collect();
                match pats.len() {
                    0 => anchor_filters.push(c),
                    1 => single[pats[0]].push(c),
                    _ => cross.push(CrossFilter {
                        pred: c,
                        patterns: pats,
                    }),
                }
            }
        }

        let patterns: Vec<PatternInfo> = specs
            .iter()
            .map(|p| PatternInfo {
                visible: p
                    .variables()
                    .enumerate()
                    .filter(|(_, v)| !q.is_ignored(v))
                    .map(|(j, _)| j)
                    .collect(),
            })
            .collect();
        let compiled: Vec<CompiledPattern> = specs
            .iter()
            .map(|p| CompiledPattern::new(g, p, opts.direction))
            .collect();

        let anchor_var = q.grouping.anchor_var.as_str();
        let mut symbols = Symbols::default();
        let mut tuples: Vec<Table> = specs.iter().map(|_| Table::default()).collect();
        let mut profiles = Vec::with_capacity(anchors.len());
        for &a in &anchors {
            let anchor_env = |v: &str| (v == anchor_var).then_some(a);
            let mut active = true;
            for f in &anchor_filters {
                if !eval_with(f, g, &anchor_env)? {
                    active = false;
                    break;
                }
            }
            if !active {
                profiles.push(Profile {
                    active,
                    tuples: vec![Vec::new(); specs.len()],
                    cross: vec![HashSet::new(); cross.len()],
                });
                continue;
            }

            // bindings that pass the single-pattern filters, grouped by tuple
            let mut kept: Vec<Vec<(Vec<u32>, u32)>> = Vec::with_capacity(specs.len());
            let mut profile_tuples = Vec::with_capacity(specs.len());
            for (i, cp) in compiled.iter().enumerate() {
                let mut rows = Vec::new();
                for b in cp.bindings(g, a) {
                    let env = |v: &str| {
                        if v == anchor_var {
                            return Some(a);
                        }
                        match owner.get(v) {
                            Some(&(pi, j)) if pi == i => Some(b[j]),
                            _ => None,
                        }
                    };
                    let mut ok = true;
                    for f in &single[i] {
                        if !eval_with(f, g, &env)? {
                            ok = false;
                            break;
                        }
                    }
                    if !ok {
                        continue;
                    }
                    let proj: Vec<u32> = patterns[i]
                        .visible
                        .iter()
                        .map(|&j| symbols.of(g, b[j], &opts.id_property))
                        .collect();
                    rows.push((b, tuples[i].intern(proj)));
                }
                let mut ids: Vec<u32> = rows.iter().map(|r| r.1).collect();
                ids.sort_unstable();
                ids.dedup();
                profile_tuples.push(ids);
                kept.push(rows);
            }

            let mut cross_sets = Vec::with_capacity(cross.len());
            for f in &cross {
                let mut ok = HashSet::new();
                let lists: Vec<&Vec<(Vec<u32>, u32)>> =
                    f.patterns.iter().map(|&p| &kept[p]).collect();
                for combo in lists.iter().map(|l| l.iter()).multi_cartesian_product() {
                    let local: Vec<u32> = combo
                        .iter()
                        .zip(&f.patterns)
                        .map(|(row, &p)| profile_tuples[p].binary_search(&row.1).unwrap() as u32)
                        .collect();
                    if ok.contains(&local) {
                        continue;
                    }
                    let env = |v: &str| {
                        if v == anchor_var {
                            return Some(a);
                        }
                        let &(pi, j) = owner.get(v)?;
                        let slot = f.patterns.iter().position(|&p| p == pi)?;
                        Some(combo[slot].0[j])
                    };
                    if eval_with(f.pred, g, &env)? {
                        ok.insert(local);
                    }
                }
                cross_sets.push(ok);
            }
            profiles.push(Profile {
                active,
                tuples: profile_tuples,
                cross: cross_sets,
            });
        }

        let stats = MiningStats {
            anchor_count: anchors.len() as u64,
            matching_ms: elapsed_ms(t),
            ..MiningStats::default()
        };
        Ok(Miner {
            g,
            q,
            opts,
            anchor_count: anchors.len() as u64,
            n_body,
            values: patterns.iter().map(|_| Table::default()).collect(),
            patterns,
            cross,
            profiles,
            symbols,
            tuples,
            value_cache: HashMap::new(),
            body_tables: HashMap::new(),
            stats,
        })
    }

    /// Values of pattern `p` at cardinality `k` for every anchor.
    fn ensure_values(&mut self, p: usize, k: u32) {
        if self.value_cache.contains_key(&(p, k)) {
            return;
        }
        let need_local = self.cross.iter().any(|f| f.patterns.contains(&p));
        let mut per_anchor = Vec::with_capacity(self.profiles.len());
        for prof in &self.profiles {
            let ts = &prof.tuples[p];
            let mut vals = Vec::new();
            if prof.active && ts.len() >= k as usize {
                for combo in (0..ts.len() as u32).combinations(k as usize) {
                    let key: Vec<u32> = combo.iter().map(|&i| ts[i as usize]).collect();
                    let id = self.values[p].intern(key);
                    vals.push(LocalValue {
                        id,
                        local: if need_local { combo } else { Vec::new() },
                    });
                }
            }
            per_anchor.push(vals);
        }
        self.value_cache.insert((p, k), per_anchor);
    }

    fn passes_cross(&self, prof: &Profile, chosen: &[&LocalValue], limit: usize) -> bool {
        for (f, ok) in self.cross.iter().zip(&prof.cross) {
            if f.patterns.iter().any(|&p| p >= limit) {
                continue;
            }
            let lists: Vec<&Vec<u32>> = f.patterns.iter().map(|&p| &chosen[p].local).collect();
            for combo in lists
                .iter()
                .map(|l| l.iter().copied())
                .multi_cartesian_product()
            {
                if !ok.contains(&combo) {
                    return false;
                }
            }
        }
        true
    }

    /// Counts every combination of the first `limit` patterns' values at
    /// `cards`, one per anchor.
    fn count(&self, cards: &[u32], limit: usize) -> HashMap<Vec<u32>, u32> {
        let lists: Vec<&Vec<Vec<LocalValue>>> = (0..limit)
            .map(|p| &self.value_cache[&(p, cards[p])])
            .collect();
        let mut table: HashMap<Vec<u32>, u32> = HashMap::new();
        for (a, prof) in self.profiles.iter().enumerate() {
            if !prof.active || lists.iter().any(|l| l[a].is_empty()) {
                continue;
            }
            let per: Vec<&Vec<LocalValue>> = lists.iter().map(|l| &l[a]).collect();
            for chosen in per.iter().map(|v| v.iter()).multi_cartesian_product() {
                if !self.cross.is_empty() && !self.passes_cross(prof, &chosen, limit) {
                    continue;
                }
                let key: Vec<u32> = chosen.iter().map(|v| v.id).collect();
                *table.entry(key).or_insert(0) += 1;
            }
        }
        table
    }

    fn mine_pair(&mut self, pair: &PairSpec) -> MinedPair {
        let cards: Vec<u32> = pair.cards().collect();
        for (p, &k) in cards.iter().enumerate() {
            self.ensure_values(p, k);
        }
        let all = self.count(&cards, cards.len());
        let n = self.anchor_count as f64;
        let min = self.q.min_support;
        let supported: Vec<(Vec<u32>, u32)> = all
            .into_iter()
            .filter(|(_, c)| *c as f64 / n > min)
            .collect();
        if !supported.is_empty() {
            self.ensure_body_table(pair);
        }
        MinedPair { supported }
    }

    fn ensure_body_table(&mut self, pair: &PairSpec) {
        if self.body_tables.contains_key(&pair.body_cards) {
            return;
        }
        let cards: Vec<u32> = pair.cards().collect();
        let bodies = self.count(&cards, self.n_body);
        self.stats.body_entries += bodies.len();
        self.body_tables.insert(pair.body_cards.clone(), bodies);
    }

    fn conjunct_items(&self, p: usize, value: u32) -> ConjunctItems {
        let mut items: ConjunctItems = self.values[p].items[value as usize]
            .iter()
            .map(|&t| {
                self.tuples[p].items[t as usize]
                    .iter()
                    .map(|&s| self.symbols.names[s as usize].clone())
                    .collect()
            })
            .collect();
        items.sort();
        items
    }

    fn side_items(&self, key: &[u32], offset: usize) -> Vec<ConjunctItems> {
        key.iter()
            .enumerate()
            .map(|(i, &v)| self.conjunct_items(offset + i, v))
            .collect()
    }

    fn split_key(&self, key: &[u32]) -> (Vec<ConjunctItems>, Vec<ConjunctItems>) {
        (
            self.side_items(&key[..self.n_body], 0),
            self.side_items(&key[self.n_body..], self.n_body),
        )
    }

    fn is_tautology(&self, body: &[ConjunctItems], head: &[ConjunctItems]) -> bool {
        fn flat(side: &[ConjunctItems]) -> Vec<&Vec<String>> {
            let mut v: Vec<&Vec<String>> = side.iter().flatten().collect();
            v.sort();
            v
        }
        if flat(body) == flat(head) {
            return true;
        }
        for (bi, b) in body.iter().enumerate() {
            let bv = &self.patterns[bi].visible;
            for (hi, h) in head.iter().enumerate() {
                let hv = &self.patterns[self.n_body + hi].visible;
                for (bpos, step) in bv.iter().enumerate() {
                    let Some(hpos) = hv.iter().position(|s| s == step) else {
                        continue;
                    };
                    let shared = b.iter().any(|bt| h.iter().any(|ht| bt[bpos] == ht[hpos]));
                    if shared {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn run(mut self) -> (Vec<AssociationRule>, MiningStats) {
        let t = Instant::now();
        let dag = build_pair_dag(&self.q.body, &self.q.head);
        self.stats.pairs_generated = dag.len();
        let mut removed = vec![false; dag.len()];
        let mut mined: Vec<(usize, MinedPair)> = Vec::new();
        for i in 0..dag.len() {
            if removed[i] {
                continue;
            }
            let result = self.mine_pair(&dag.pairs[i]);
            self.stats.pairs_mined += 1;
            self.stats.rule_candidates += result.supported.len();
            if result.supported.is_empty() && self.opts.prune {
                for d in dag.descendants(i) {
                    if !removed[d] {
                        removed[d] = true;
                        self.stats.pairs_pruned += 1;
                    }
                }
            }
            mined.push((i, result));
        }
        self.stats.pairs_ms = elapsed_ms(t);

        let t = Instant::now();
        let mut rules = Vec::new();
        for (i, result) in &mined {
            let pair = &dag.pairs[*i];
            for (key, count) in &result.supported {
                let body_count = self.body_tables[&pair.body_cards][&key[..self.n_body]];
                let conf = *count as f64 / body_count as f64;
                if conf <= self.q.min_confidence {
                    continue;
                }
                let (body, head) = self.split_key(key);
                if self.is_tautology(&body, &head) {
                    self.stats.tautologies_dropped += 1;
                    continue;
                }
                rules.push(AssociationRule::new(
                    body,
                    head,
                    *count as u64,
                    body_count as u64,
                    self.anchor_count,
                ));
            }
        }
        sort_canonical(&mut rules);
        self.stats.rules_emitted = rules.len();
        self.stats.assembly_ms = elapsed_ms(t);
        let _ = self.g;
        (rules, self.stats)
    }
}
