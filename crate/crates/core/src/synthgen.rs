//! Seeded synthetic graphs over the Person/Item/Category schema.
//!
//! Three families are supported. `uniform` spreads BUY relationships evenly
//! over persons and items; `scale-free` draws the item end of every BUY
//! from a Zipf law over item ranks so that a few items are bought far more
//! often than the rest; `large-scale-free` does the same with more BUY
//! relationships per person. RECOMMEND and FOLLOW are uniform in every
//! family, and every item belongs to at least one category.

use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Node, NodeId, PropertyGraph, PropertyValue, RelId, Relationship};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    #[default]
    Uniform,
    ScaleFree,
    LargeScaleFree,
}

impl std::str::FromStr for GenKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(GenKind::Uniform),
            "scale-free" => Ok(GenKind::ScaleFree),
            "large-scale-free" => Ok(GenKind::LargeScaleFree),
            other => Err(format!(
                "unknown graph kind `{other}` (expected uniform, scale-free or large-scale-free)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase", deny_unknown_fields)]
pub struct GenConfig {
    pub kind: GenKind,
    pub total_nodes: usize,
    /// share of nodes that are persons
    pub anchor_ratio: f64,
    pub seed: u64,
    pub buy_per_person: f64,
    pub recommend_per_person: f64,
    pub follow_per_person: f64,
    pub categories: usize,
    /// degree exponent of the item popularity law (scale-free kinds)
    pub power_law_exponent: f64,
    /// BUY multiplier of `large-scale-free`
    pub density_factor: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            kind: GenKind::Uniform,
            total_nodes: 1_000,
            anchor_ratio: 0.5,
            seed: 0,
            buy_per_person: 5.0,
            recommend_per_person: 1.0,
            follow_per_person: 2.0,
            categories: 10,
            power_law_exponent: 2.5,
            density_factor: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("infeasible generator configuration: {0}")]
    Infeasible(String),
}

/// Node counts implied by a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Population {
    pub persons: usize,
    pub items: usize,
    pub categories: usize,
}

impl GenConfig {
    pub fn population(&self) -> Result<Population, GenError> {
        let bad = |m: String| Err(GenError::Infeasible(m));
        if !(self.anchor_ratio > 0.0 && self.anchor_ratio < 1.0) {
            return bad(format!(
                "anchor ratio {} is outside (0, 1)",
                self.anchor_ratio
            ));
        }
        if self.categories == 0 {
            return bad("at least one category is required".into());
        }
        let persons = (self.anchor_ratio * self.total_nodes as f64).round() as usize;
        if persons == 0 {
            return bad(format!(
                "{} nodes at ratio {} leave no persons",
                self.total_nodes, self.anchor_ratio
            ));
        }
        let Some(items) = self
            .total_nodes
            .checked_sub(persons + self.categories)
            .filter(|&i| i > 0)
        else {
            return bad(format!(
                "{} nodes with {persons} persons and {} categories leave no items",
                self.total_nodes, self.categories
            ));
        };
        for (name, v) in [
            ("buyPerPerson", self.buy_per_person),
            ("recommendPerPerson", self.recommend_per_person),
            ("followPerPerson", self.follow_per_person),
            ("densityFactor", self.density_factor),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be a non-negative number, got {v}"));
            }
        }
        if self.kind != GenKind::Uniform
            && self.power_law_exponent.partial_cmp(&1.0) != Some(std::cmp::Ordering::Greater)
        {
            return bad(format!(
                "power-law exponent must exceed 1, got {}",
                self.power_law_exponent
            ));
        }
        Ok(Population {
            persons,
            items,
            categories: self.categories,
        })
    }

    /// Number of BUY relationships the configuration asks for.
    pub fn buy_count(&self) -> Result<usize, GenError> {
        let p = self.population()?;
        let n = self.total_nodes as f64;
        let total = match self.kind {
            // peaks when persons and items are balanced
            GenKind::Uniform => self.buy_per_person * 2.0 * p.persons as f64 * p.items as f64 / n,
            GenKind::ScaleFree => self.buy_per_person * p.persons as f64,
            GenKind::LargeScaleFree => self.buy_per_person * self.density_factor * p.persons as f64,
        };
        Ok(total.round() as usize)
    }
}

const CITIES: &[&str] = &["Rome", "Milan", "Turin", "Naples", "Florence", "Bologna"];
const COLORS: &[&str] = &["red", "blue", "green", "black", "white", "yellow"];

struct Builder {
    nodes: Vec<Node>,
    rels: Vec<Relationship>,
}

impl Builder {
    fn node(&mut self, label: &str, props: Vec<(&str, PropertyValue)>) -> NodeId {
        let id = NodeId(self.nodes.len() as u64);
        self.nodes.push(Node {
            id,
            labels: vec![label.to_string()],
            properties: props
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect::<IndexMap<_, _>>(),
        });
        id
    }

    fn rel(&mut self, ty: &str, start: NodeId, end: NodeId) {
        self.rels.push(Relationship {
            id: RelId(self.rels.len() as u64),
            rel_type: ty.to_string(),
            start,
            end,
            properties: IndexMap::new(),
        });
    }
}

pub fn generate(cfg: &GenConfig) -> Result<PropertyGraph, GenError> {
    let pop = cfg.population()?;
    let buys = cfg.buy_count()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut b = Builder {
        nodes: Vec::with_capacity(cfg.total_nodes),
        rels: Vec::new(),
    };

    let persons: Vec<NodeId> = (0..pop.persons)
        .map(|i| {
            let age = rng.random_range(18..80i64);
            let city = CITIES[rng.random_range(0..CITIES.len())];
            b.node(
                "Person",
                vec![
                    ("name", PropertyValue::Text(format!("Person{i}"))),
                    ("age", PropertyValue::Integer(age)),
                    ("city", PropertyValue::Text(city.into())),
                ],
            )
        })
        .collect();
    let items: Vec<NodeId> = (0..pop.items)
        .map(|i| {
            let cents = rng.random_range(100..20_000i64);
            let color = COLORS[rng.random_range(0..COLORS.len())];
            b.node(
                "Item",
                vec![
                    ("name", PropertyValue::Text(format!("Item{i}"))),
                    ("color", PropertyValue::Text(color.into())),
                    ("price", PropertyValue::Decimal(cents as f64 / 100.0)),
                ],
            )
        })
        .collect();
    let categories: Vec<NodeId> = (0..pop.categories)
        .map(|i| {
            b.node(
                "Category",
                vec![("name", PropertyValue::Text(format!("Category{i}")))],
            )
        })
        .collect();

    match cfg.kind {
        GenKind::Uniform => {
            for _ in 0..buys {
                let p = persons[rng.random_range(0..persons.len())];
                let i = items[rng.random_range(0..items.len())];
                b.rel("BUY", p, i);
            }
        }
        GenKind::ScaleFree | GenKind::LargeScaleFree => {
            // popularity rank -> item, so popular items are spread over ids
            let mut ranked = items.clone();
            ranked.shuffle(&mut rng);
            let zipf = Zipf::new(items.len() as f64, cfg.power_law_exponent - 1.0)
                .map_err(|e| GenError::Infeasible(e.to_string()))?;
            for _ in 0..buys {
                let p = persons[rng.random_range(0..persons.len())];
                let rank = zipf.sample(&mut rng) as usize;
                b.rel("BUY", p, ranked[rank.clamp(1, items.len()) - 1]);
            }
        }
    }

    let recommends = (cfg.recommend_per_person * pop.persons as f64).round() as usize;
    for _ in 0..recommends {
        let p = persons[rng.random_range(0..persons.len())];
        let i = items[rng.random_range(0..items.len())];
        b.rel("RECOMMEND", p, i);
    }
    if persons.len() > 1 {
        let follows = (cfg.follow_per_person * pop.persons as f64).round() as usize;
        for _ in 0..follows {
            let a = rng.random_range(0..persons.len());
            let mut c = rng.random_range(0..persons.len() - 1);
            if c >= a {
                c += 1;
            }
            b.rel("FOLLOW", persons[a], persons[c]);
        }
    }
    for &i in &items {
        let first = rng.random_range(0..categories.len());
        b.rel("OF", i, categories[first]);
        if categories.len() > 1 && rng.random_bool(0.2) {
            let mut second = rng.random_range(0..categories.len() - 1);
            if second >= first {
                second += 1;
            }
            b.rel("OF", i, categories[second]);
        }
    }

    Ok(PropertyGraph::from_parts(b.nodes, b.rels).expect("generated ids and endpoints are valid"))
}

/// Share of BUY relationships received by the most-bought `fraction` of
/// items.
pub fn top_item_share(g: &PropertyGraph, fraction: f64) -> f64 {
    let items = g.nodes_with_label("Item");
    if items.is_empty() {
        return 0.0;
    }
    let mut degree: std::collections::HashMap<NodeId, usize> = std::collections::HashMap::new();
    let mut total = 0usize;
    for r in g.relationships_of_type("BUY") {
        *degree.entry(r.end).or_default() += 1;
        total += 1;
    }
    if total == 0 {
        return 0.0;
    }
    let mut d: Vec<usize> = items
        .iter()
        .map(|i| degree.get(i).copied().unwrap_or(0))
        .collect();
    d.sort_unstable_by(|a, b| b.cmp(a));
    let top = ((items.len() as f64 * fraction).ceil() as usize).max(1);
    d[..top].iter().sum::<usize>() as f64 / total as f64
}
