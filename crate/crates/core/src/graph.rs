//! Immutable in-memory property graph.
//!
//! Nodes and relationships are stored in load order and addressed internally
//! by dense positions. Label and type indexes plus per-node adjacency lists
//! (sorted by relationship type, then neighbor) are built once at load time;
//! after that the graph is read-only and can be shared across threads.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::io::{Read, Write};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// External node identifier, as it appears in graph-JSON.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u64);

/// External relationship identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RelId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A property value carried by a node or relationship.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PropertyValue {
    Boolean(bool),
    Integer(i64),
    Decimal(f64),
    Text(String),
}

/// Returned when two property values of incomparable variants are compared.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot compare {left} with {right}")]
pub struct IncomparableValues {
    pub left: &'static str,
    pub right: &'static str,
}

impl PropertyValue {
    pub fn kind(&self) -> &'static str {
        match self {
            PropertyValue::Boolean(_) => "boolean",
            PropertyValue::Integer(_) => "integer",
            PropertyValue::Decimal(_) => "decimal",
            PropertyValue::Text(_) => "text",
        }
    }

    /// Orders two values. Integers and decimals compare numerically; every
    /// other cross-variant comparison is an error.
    pub fn compare(&self, other: &PropertyValue) -> Result<Ordering, IncomparableValues> {
        use PropertyValue::*;
        match (self, other) {
            (Boolean(a), Boolean(b)) => Ok(a.cmp(b)),
            (Integer(a), Integer(b)) => Ok(a.cmp(b)),
            (Decimal(a), Decimal(b)) => Ok(a.total_cmp(b)),
            (Integer(a), Decimal(b)) => Ok((*a as f64).total_cmp(b)),
            (Decimal(a), Integer(b)) => Ok(a.total_cmp(&(*b as f64))),
            (Text(a), Text(b)) => Ok(a.cmp(b)),
            _ => Err(IncomparableValues {
                left: self.kind(),
                right: other.kind(),
            }),
        }
    }
}

impl fmt::Display for PropertyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyValue::Boolean(b) => write!(f, "{b}"),
            PropertyValue::Integer(i) => write!(f, "{i}"),
            PropertyValue::Decimal(d) => write!(f, "{d}"),
            PropertyValue::Text(s) => f.write_str(s),
        }
    }
}

pub type Properties = IndexMap<String, PropertyValue>;

/// Looks a property up by exact name, falling back to an ASCII
/// case-insensitive match.
pub fn lookup_property<'a>(props: &'a Properties, name: &str) -> Option<&'a PropertyValue> {
    props.get(name).or_else(|| {
        props
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub labels: Vec<String>,
    #[serde(default)]
    pub properties: Properties,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Relationship {
    pub id: RelId,
    #[serde(rename = "type")]
    pub rel_type: String,
    pub start: NodeId,
    pub end: NodeId,
    #[serde(default)]
    pub properties: Properties,
}

/// Which stored direction a traversal follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Outgoing,
    Incoming,
    Both,
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("malformed graph JSON at line {line}, column {column}: {message}")]
    Malformed {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{location}: duplicate node id {id}")]
    DuplicateNode { location: String, id: u64 },
    #[error("{location}: duplicate relationship id {id}")]
    DuplicateRelationship { location: String, id: u64 },
    #[error("{location}: relationship {rel} references missing node {node}")]
    DanglingEndpoint {
        location: String,
        rel: u64,
        node: u64,
    },
    #[error("{location}: node {id} has no labels")]
    NoLabels { location: String, id: u64 },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Adjacency entry. `ty` is the interned relationship type, `other` the
/// position of the node at the far end, `rel` the relationship position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct Adj {
    pub ty: u32,
    pub other: u32,
    pub rel: u32,
}

#[derive(Debug, Clone)]
pub struct PropertyGraph {
    nodes: Vec<Node>,
    relationships: Vec<Relationship>,
    node_pos: HashMap<NodeId, u32>,
    labels: BTreeMap<String, u32>,
    types: BTreeMap<String, u32>,
    /// label id -> node positions, ascending by node id
    label_index: Vec<Vec<u32>>,
    /// type id -> relationship positions, ascending by relationship id
    type_index: Vec<Vec<u32>>,
    node_labels: Vec<Vec<u32>>,
    out_adj: Vec<Vec<Adj>>,
    in_adj: Vec<Vec<Adj>>,
}

#[derive(Deserialize)]
struct GraphDocument {
    nodes: Vec<Node>,
    relationships: Vec<Relationship>,
}

#[derive(Serialize)]
struct GraphDocumentRef<'a> {
    nodes: &'a [Node],
    relationships: &'a [Relationship],
}

/// Parses a graph-JSON document and builds its indexes.
pub fn load_graph<R: Read>(source: R) -> Result<PropertyGraph, GraphError> {
    let doc: GraphDocument = serde_json::from_reader(source).map_err(|e| {
        if e.is_io() {
            return GraphError::Io(e.into());
        }
        GraphError::Malformed {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    })?;
    PropertyGraph::from_parts(doc.nodes, doc.relationships)
}

impl PropertyGraph {
    pub fn empty() -> Self {
        Self::from_parts(Vec::new(), Vec::new()).expect("empty graph is valid")
    }

    /// Builds a graph from owned node and relationship lists, validating ids
    /// and endpoints.
    pub fn from_parts(
        nodes: Vec<Node>,
        relationships: Vec<Relationship>,
    ) -> Result<Self, GraphError> {
        let mut node_pos = HashMap::with_capacity(nodes.len());
        let mut labels: BTreeMap<String, u32> = BTreeMap::new();
        let mut node_labels = Vec::with_capacity(nodes.len());
        for (i, node) in nodes.iter().enumerate() {
            if node_pos.insert(node.id, i as u32).is_some() {
                return Err(GraphError::DuplicateNode {
                    location: format!("nodes[{i}]"),
                    id: node.id.0,
                });
            }
            if node.labels.is_empty() {
                return Err(GraphError::NoLabels {
                    location: format!("nodes[{i}]"),
                    id: node.id.0,
                });
            }
            let mut ids: Vec<u32> = node
                .labels
                .iter()
                .map(|l| {
                    let next = labels.len() as u32;
                    *labels.entry(l.clone()).or_insert(next)
                })
                .collect();
            ids.sort_unstable();
            ids.dedup();
            node_labels.push(ids);
        }

        let mut types: BTreeMap<String, u32> = BTreeMap::new();
        let mut rel_seen = HashMap::with_capacity(relationships.len());
        let mut out_adj = vec![Vec::new(); nodes.len()];
        let mut in_adj = vec![Vec::new(); nodes.len()];
        let mut rel_types = Vec::with_capacity(relationships.len());
        for (i, rel) in relationships.iter().enumerate() {
            if rel_seen.insert(rel.id, ()).is_some() {
                return Err(GraphError::DuplicateRelationship {
                    location: format!("relationships[{i}]"),
                    id: rel.id.0,
                });
            }
            let endpoint = |n: NodeId| {
                node_pos
                    .get(&n)
                    .copied()
                    .ok_or_else(|| GraphError::DanglingEndpoint {
                        location: format!("relationships[{i}]"),
                        rel: rel.id.0,
                        node: n.0,
                    })
            };
            let s = endpoint(rel.start)?;
            let e = endpoint(rel.end)?;
            let next = types.len() as u32;
            let ty = *types.entry(rel.rel_type.clone()).or_insert(next);
            rel_types.push(ty);
            out_adj[s as usize].push(Adj {
                ty,
                other: e,
                rel: i as u32,
            });
            in_adj[e as usize].push(Adj {
                ty,
                other: s,
                rel: i as u32,
            });
        }
        for list in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            list.sort_unstable();
        }

        let mut label_index = vec![Vec::new(); labels.len()];
        for (pos, ls) in node_labels.iter().enumerate() {
            for &l in ls {
                label_index[l as usize].push(pos as u32);
            }
        }
        for list in &mut label_index {
            list.sort_unstable_by_key(|&p| nodes[p as usize].id);
        }
        let mut type_index = vec![Vec::new(); types.len()];
        for (pos, &ty) in rel_types.iter().enumerate() {
            type_index[ty as usize].push(pos as u32);
        }
        for list in &mut type_index {
            list.sort_unstable_by_key(|&p| relationships[p as usize].id);
        }

        Ok(Self {
            nodes,
            relationships,
            node_pos,
            labels,
            types,
            label_index,
            type_index,
            node_labels,
            out_adj,
            in_adj,
        })
    }

    /// Writes the graph back out as graph-JSON.
    pub fn write_json<W: Write>(&self, out: W, pretty: bool) -> serde_json::Result<()> {
        let doc = GraphDocumentRef {
            nodes: &self.nodes,
            relationships: &self.relationships,
        };
        if pretty {
            serde_json::to_writer_pretty(out, &doc)
        } else {
            serde_json::to_writer(out, &doc)
        }
    }

    pub fn to_json_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_json(&mut buf, false)
            .expect("serializing to memory cannot fail");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn relationship_count(&self) -> usize {
        self.relationships.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn relationships(&self) -> &[Relationship] {
        &self.relationships
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.node_pos.get(&id).map(|&p| &self.nodes[p as usize])
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.node_pos.contains_key(&id)
    }

    pub fn label_names(&self) -> impl Iterator<Item = &str> {
        self.labels.keys().map(String::as_str)
    }

    pub fn type_names(&self) -> impl Iterator<Item = &str> {
        self.types.keys().map(String::as_str)
    }

    /// Number of relationships of the given type.
    pub fn type_count(&self, rel_type: &str) -> usize {
        self.types
            .get(rel_type)
            .map_or(0, |&t| self.type_index[t as usize].len())
    }

    /// Ids of every node carrying `label`, ascending.
    pub fn nodes_with_label(&self, label: &str) -> Vec<NodeId> {
        self.labels
            .get(label)
            .map(|&l| {
                self.label_index[l as usize]
                    .iter()
                    .map(|&p| self.nodes[p as usize].id)
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Relationships of `rel_type`, ascending by id.
    pub fn relationships_of_type(&self, rel_type: &str) -> Vec<&Relationship> {
        self.types
            .get(rel_type)
            .map(|&t| {
                self.type_index[t as usize]
                    .iter()
                    .map(|&p| &self.relationships[p as usize])
                    .collect()
            })
            .unwrap_or_default()
    }

    /// One `(neighbor, relationship)` entry per relationship of `rel_type`
    /// touching `node` in the requested direction. A self-loop is reported
    /// once even for `Direction::Both`.
    pub fn neighbors_via(
        &self,
        node: NodeId,
        rel_type: &str,
        direction: Direction,
    ) -> Vec<(NodeId, RelId)> {
        let (Some(&pos), Some(&ty)) = (self.node_pos.get(&node), self.types.get(rel_type)) else {
            return Vec::new();
        };
        self.adjacent(pos, Some(ty), direction)
            .into_iter()
            .map(|a| {
                (
                    self.nodes[a.other as usize].id,
                    self.relationships[a.rel as usize].id,
                )
            })
            .collect()
    }

    /// Number of `rel_type` relationships between `a` and `b` in the given
    /// direction (relative to `a`).
    pub fn rel_count_between(
        &self,
        a: NodeId,
        b: NodeId,
        rel_type: &str,
        direction: Direction,
    ) -> usize {
        let (Some(&pa), Some(&pb), Some(&ty)) = (
            self.node_pos.get(&a),
            self.node_pos.get(&b),
            self.types.get(rel_type),
        ) else {
            return 0;
        };
        self.adjacent(pa, Some(ty), direction)
            .iter()
            .filter(|adj| adj.other == pb)
            .count()
    }

    /// Every node other than `start` reachable over 1..=`max_len`
    /// relationships of any type.
    pub fn reachable_within(
        &self,
        start: NodeId,
        max_len: usize,
        direction: Direction,
    ) -> BTreeSet<NodeId> {
        let Some(&pos) = self.node_pos.get(&start) else {
            return BTreeSet::new();
        };
        self.reachable_positions(pos, max_len, direction)
            .into_iter()
            .map(|p| self.nodes[p as usize].id)
            .collect()
    }

    // ---------------------------------------------------------------------
    // position-level accessors used by the matcher and miner

    pub(crate) fn position(&self, id: NodeId) -> Option<u32> {
        self.node_pos.get(&id).copied()
    }

    pub(crate) fn node_at(&self, pos: u32) -> &Node {
        &self.nodes[pos as usize]
    }

    pub(crate) fn label_id(&self, label: &str) -> Option<u32> {
        self.labels.get(label).copied()
    }

    pub(crate) fn type_id(&self, rel_type: &str) -> Option<u32> {
        self.types.get(rel_type).copied()
    }

    pub(crate) fn label_positions(&self, label: u32) -> &[u32] {
        &self.label_index[label as usize]
    }

    pub(crate) fn has_label(&self, pos: u32, label: u32) -> bool {
        self.node_labels[pos as usize].binary_search(&label).is_ok()
    }

    fn typed_slice(list: &[Adj], ty: Option<u32>) -> &[Adj] {
        match ty {
            None => list,
            Some(t) => {
                let lo = list.partition_point(|a| a.ty < t);
                let hi = list.partition_point(|a| a.ty <= t);
                &list[lo..hi]
            }
        }
    }

    /// Adjacency entries in the given direction, optionally restricted to a
    /// type. For `Both`, a self-loop appears once.
    pub(crate) fn adjacent(&self, pos: u32, ty: Option<u32>, direction: Direction) -> Vec<Adj> {
        let out = Self::typed_slice(&self.out_adj[pos as usize], ty);
        let inc = Self::typed_slice(&self.in_adj[pos as usize], ty);
        match direction {
            Direction::Outgoing => out.to_vec(),
            Direction::Incoming => inc.to_vec(),
            Direction::Both => {
                let mut all: Vec<Adj> = out.to_vec();
                all.extend(inc.iter().filter(|a| a.other != pos).copied());
                all
            }
        }
    }

    pub(crate) fn reachable_positions(
        &self,
        start: u32,
        max_len: usize,
        direction: Direction,
    ) -> Vec<u32> {
        let mut dist: HashMap<u32, usize> = HashMap::new();
        dist.insert(start, 0);
        let mut queue = VecDeque::from([start]);
        let mut found = Vec::new();
        while let Some(cur) = queue.pop_front() {
            let d = dist[&cur];
            if d == max_len {
                continue;
            }
            let lists: [&[Adj]; 2] = match direction {
                Direction::Outgoing => [&self.out_adj[cur as usize], &[]],
                Direction::Incoming => [&self.in_adj[cur as usize], &[]],
                Direction::Both => [&self.out_adj[cur as usize], &self.in_adj[cur as usize]],
            };
            for adj in lists.into_iter().flatten() {
                if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(adj.other) {
                    e.insert(d + 1);
                    found.push(adj.other);
                    queue.push_back(adj.other);
                }
            }
        }
        found.sort_unstable();
        found
    }
}
