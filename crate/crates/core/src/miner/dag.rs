//! Lattice of body-head cardinality pairs.

use std::collections::{HashMap, VecDeque};

use crate::parser::ItemSetSpec;

/// Item count chosen for each conjunct, body conjuncts first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairSpec {
    pub body_cards: Vec<u32>,
    pub head_cards: Vec<u32>,
}

impl PairSpec {
    pub fn cards(&self) -> impl Iterator<Item = u32> + '_ {
        self.body_cards.iter().chain(&self.head_cards).copied()
    }

    pub fn total(&self) -> u32 {
        self.cards().sum()
    }

    /// True when `other` is reachable from `self` by adding items, and
    /// differs from it.
    pub fn is_strict_ancestor_of(&self, other: &PairSpec) -> bool {
        self != other && self.cards().zip(other.cards()).all(|(a, b)| a <= b)
    }
}

/// Pairs in breadth-first order from the all-minimum root. `children[i]`
/// lists the pairs one item larger than `pairs[i]`, body coordinates first.
#[derive(Debug, Clone)]
pub struct PairDag {
    pub pairs: Vec<PairSpec>,
    pub children: Vec<Vec<usize>>,
}

impl PairDag {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Every pair strictly above `i` in the lattice.
    pub fn descendants(&self, i: usize) -> Vec<usize> {
        let mut seen = vec![false; self.pairs.len()];
        let mut stack = self.children[i].clone();
        let mut out = Vec::new();
        while let Some(j) = stack.pop() {
            if !seen[j] {
                seen[j] = true;
                out.push(j);
                stack.extend(&self.children[j]);
            }
        }
        out.sort_unstable();
        out
    }
}

pub fn build_pair_dag(body: &ItemSetSpec, head: &ItemSetSpec) -> PairDag {
    let ranges: Vec<(u32, u32)> = body
        .conjuncts
        .iter()
        .chain(&head.conjuncts)
        .map(|p| (p.min_card, p.max_card.max(p.min_card)))
        .collect();
    let split = body.conjuncts.len();
    let to_pair = |cards: &[u32]| PairSpec {
        body_cards: cards[..split].to_vec(),
        head_cards: cards[split..].to_vec(),
    };

    let root: Vec<u32> = ranges.iter().map(|r| r.0).collect();
    let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut order: Vec<Vec<u32>> = Vec::new();
    let mut children: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    index.insert(root.clone(), 0);
    order.push(root.clone());
    children.push(Vec::new());
    queue.push_back(root);
    while let Some(cur) = queue.pop_front() {
        let me = index[&cur];
        for (c, &(_, hi)) in ranges.iter().enumerate() {
            if cur[c] >= hi {
                continue;
            }
            let mut next = cur.clone();
            next[c] += 1;
            let id = *index.entry(next.clone()).or_insert_with(|| {
                order.push(next.clone());
                children.push(Vec::new());
                queue.push_back(next.clone());
                order.len() - 1
            });
            children[me].push(id);
        }
    }
    PairDag {
        pairs: order.iter().map(|c| to_pair(c)).collect(),
        children,
    }
}
