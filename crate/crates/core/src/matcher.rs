//! Per-anchor evaluation of patterns and predicates.
//!
//! A pattern `(p)-[..]-(A:L1)-[..]-(B:L2)` is matched by walking its steps
//! from the anchor, one hop at a time. Each step yields a set of distinct
//! next nodes, so parallel relationships never produce duplicate bindings.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use indexmap::IndexMap;
use itertools::Itertools;
use thiserror::Error;

use crate::graph::{lookup_property, Direction, IncomparableValues, NodeId, PropertyGraph};
use crate::parser::{CompareOp, Operand, PatternSpec, Predicate, RelStep};

/// How pattern relationships relate to stored relationship direction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum MatchDirection {
    /// The left node of each step is the relationship's start node.
    #[default]
    Directed,
    /// Stored direction is ignored.
    Undirected,
}

impl MatchDirection {
    pub fn graph_direction(self) -> Direction {
        match self {
            MatchDirection::Directed => Direction::Outgoing,
            MatchDirection::Undirected => Direction::Both,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("variable `{0}` is not bound")]
    Unbound(String),
    #[error("`{left} {op} {right}`: {source}")]
    Incomparable {
        left: String,
        op: &'static str,
        right: String,
        source: IncomparableValues,
    },
    #[error("`{left} {op} {right}`: node identities only support = and <>")]
    NodeOrdering {
        left: String,
        op: &'static str,
        right: String,
    },
    #[error("`{left} {op} {right}`: cannot compare a node with a value")]
    NodeWithValue {
        left: String,
        op: &'static str,
        right: String,
    },
}

/// Variable name to node, covering the anchor and every pattern variable.
pub type Binding = IndexMap<String, NodeId>;

/// One item tuple: `(variable, display value)` for each visible variable.
pub type ItemTuple = Vec<(String, String)>;

/// `k` distinct item tuples in canonical order.
pub type ConjunctValue = Vec<ItemTuple>;

/// Display value of a node: the identifier property if present, else `#<id>`.
pub fn display_value(g: &PropertyGraph, node: NodeId, id_property: &str) -> String {
    match g.node(node) {
        Some(n) => match lookup_property(&n.properties, id_property) {
            Some(v) => v.to_string(),
            None => format!("#{}", n.id),
        },
        None => format!("#{node}"),
    }
}

pub(crate) enum StepKind {
    Single(u32),
    Count(u32, u32),
    Any(usize),
}

pub(crate) struct CompiledStep {
    kind: StepKind,
    label: u32,
}

/// A pattern with labels and types resolved against one graph. `None` when
/// some label or type does not occur in the graph, in which case the
/// pattern can never match.
pub(crate) struct CompiledPattern {
    steps: Option<Vec<CompiledStep>>,
    direction: Direction,
}

impl CompiledPattern {
    pub(crate) fn new(g: &PropertyGraph, p: &PatternSpec, direction: MatchDirection) -> Self {
        let steps = p
            .steps
            .iter()
            .map(|s| {
                let label = g.label_id(&s.node.label)?;
                let kind = match &s.rel {
                    RelStep::Single { rel_type } => StepKind::Single(g.type_id(rel_type)?),
                    RelStep::Count {
                        rel_type,
                        min_count,
                    } => StepKind::Count(g.type_id(rel_type)?, *min_count),
                    RelStep::Any { max_len } => StepKind::Any(max_len.saturating_sub(1) as usize),
                };
                Some(CompiledStep { kind, label })
            })
            .collect();
        CompiledPattern {
            steps,
            direction: direction.graph_direction(),
        }
    }

    /// Distinct nodes reachable from `from` through one step.
    fn next(&self, g: &PropertyGraph, from: u32, step: &CompiledStep) -> Vec<u32> {
        let mut out: Vec<u32> = match step.kind {
            StepKind::Single(ty) => {
                let mut v: Vec<u32> = g
                    .adjacent(from, Some(ty), self.direction)
                    .iter()
                    .map(|a| a.other)
                    .collect();
                v.sort_unstable();
                v.dedup();
                v
            }
            StepKind::Count(ty, min) => {
                let mut v: Vec<u32> = g
                    .adjacent(from, Some(ty), self.direction)
                    .iter()
                    .map(|a| a.other)
                    .collect();
                v.sort_unstable();
                v.chunk_by(|a, b| a == b)
                    .filter(|run| run.len() > min as usize)
                    .map(|run| run[0])
                    .collect()
            }
            StepKind::Any(len) => {
                if len == 0 {
                    Vec::new()
                } else {
                    g.reachable_positions(from, len, self.direction)
                }
            }
        };
        out.retain(|&n| g.has_label(n, step.label));
        out
    }

    /// Every binding of the step nodes (anchor excluded), as node positions
    /// in step order.
    pub(crate) fn bindings(&self, g: &PropertyGraph, anchor: u32) -> Vec<Vec<u32>> {
        let Some(steps) = &self.steps else {
            return Vec::new();
        };
        let mut out = Vec::new();
        let mut path = Vec::with_capacity(steps.len());
        self.extend(g, anchor, steps, &mut path, &mut out);
        out
    }

    fn extend(
        &self,
        g: &PropertyGraph,
        from: u32,
        steps: &[CompiledStep],
        path: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        let Some((step, rest)) = steps.split_first() else {
            out.push(path.clone());
            return;
        };
        for n in self.next(g, from, step) {
            path.push(n);
            self.extend(g, n, rest, path, out);
            path.pop();
        }
    }
}

/// All bindings of `p` rooted at `anchor` that satisfy `filter`.
pub fn match_pattern(
    g: &PropertyGraph,
    p: &PatternSpec,
    anchor: NodeId,
    filter: Option<&Predicate>,
    direction: MatchDirection,
) -> Result<Vec<Binding>, EvalError> {
    let Some(pos) = g.position(anchor) else {
        return Ok(Vec::new());
    };
    let compiled = CompiledPattern::new(g, p, direction);
    let mut out = Vec::new();
    for positions in compiled.bindings(g, pos) {
        let mut b = Binding::new();
        b.insert(p.anchor.clone(), anchor);
        for (step, &n) in p.steps.iter().zip(&positions) {
            b.insert(step.node.variable.clone(), g.node_at(n).id);
        }
        if let Some(f) = filter {
            if !eval_predicate(f, &b, g)? {
                continue;
            }
        }
        out.push(b);
    }
    Ok(out)
}

/// Evaluates `pred` with variables resolved through `env`. A comparison
/// that reads a missing property is false.
pub fn eval_predicate(
    pred: &Predicate,
    env: &Binding,
    g: &PropertyGraph,
) -> Result<bool, EvalError> {
    eval_with(pred, g, &|v| env.get(v).and_then(|&id| g.position(id)))
}

pub(crate) fn eval_with(
    pred: &Predicate,
    g: &PropertyGraph,
    env: &dyn Fn(&str) -> Option<u32>,
) -> Result<bool, EvalError> {
    match pred {
        Predicate::And(a, b) => Ok(eval_with(a, g, env)? && eval_with(b, g, env)?),
        Predicate::Or(a, b) => Ok(eval_with(a, g, env)? || eval_with(b, g, env)?),
        Predicate::Not(a) => Ok(!eval_with(a, g, env)?),
        Predicate::Compare { left, op, right } => compare(left, *op, right, g, env),
    }
}

enum Resolved<'a> {
    Node(u32),
    Value(&'a crate::graph::PropertyValue),
    Missing,
}

fn resolve<'a>(
    o: &'a Operand,
    g: &'a PropertyGraph,
    env: &dyn Fn(&str) -> Option<u32>,
) -> Result<Resolved<'a>, EvalError> {
    Ok(match o {
        Operand::Literal(v) => Resolved::Value(v),
        Operand::Variable(v) => {
            Resolved::Node(env(v).ok_or_else(|| EvalError::Unbound(v.clone()))?)
        }
        Operand::Property { var, prop } => {
            let pos = env(var).ok_or_else(|| EvalError::Unbound(var.clone()))?;
            match lookup_property(&g.node_at(pos).properties, prop) {
                Some(v) => Resolved::Value(v),
                None => Resolved::Missing,
            }
        }
    })
}

fn operand_text(o: &Operand) -> String {
    match o {
        Operand::Property { var, prop } => format!("{var}.{prop}"),
        Operand::Variable(v) => v.clone(),
        Operand::Literal(v) => v.to_string(),
    }
}

fn compare(
    left: &Operand,
    op: CompareOp,
    right: &Operand,
    g: &PropertyGraph,
    env: &dyn Fn(&str) -> Option<u32>,
) -> Result<bool, EvalError> {
    let l = resolve(left, g, env)?;
    let r = resolve(right, g, env)?;
    let ord = match (l, r) {
        (Resolved::Node(a), Resolved::Node(b)) => {
            return match op {
                CompareOp::Eq => Ok(a == b),
                CompareOp::Ne => Ok(a != b),
                _ => Err(EvalError::NodeOrdering {
                    left: operand_text(left),
                    op: op.symbol(),
                    right: operand_text(right),
                }),
            }
        }
        (Resolved::Node(_), _) | (_, Resolved::Node(_)) => {
            return Err(EvalError::NodeWithValue {
                left: operand_text(left),
                op: op.symbol(),
                right: operand_text(right),
            })
        }
        (Resolved::Missing, _) | (_, Resolved::Missing) => return Ok(false),
        (Resolved::Value(a), Resolved::Value(b)) => {
            a.compare(b).map_err(|source| EvalError::Incomparable {
                left: operand_text(left),
                op: op.symbol(),
                right: operand_text(right),
                source,
            })?
        }
    };
    Ok(match op {
        CompareOp::Eq => ord == Ordering::Equal,
        CompareOp::Ne => ord != Ordering::Equal,
        CompareOp::Lt => ord == Ordering::Less,
        CompareOp::Le => ord != Ordering::Greater,
        CompareOp::Gt => ord == Ordering::Greater,
        CompareOp::Ge => ord != Ordering::Less,
    })
}

/// All `k`-subsets of the distinct projections of `bindings` onto
/// `visible`, each in canonical order, listed in canonical order.
pub fn enumerate_conjunct_values(
    g: &PropertyGraph,
    bindings: &[Binding],
    k: usize,
    visible: &[&str],
    id_property: &str,
) -> Vec<ConjunctValue> {
    if k == 0 {
        return Vec::new();
    }
    let projections: BTreeSet<Vec<String>> = bindings
        .iter()
        .map(|b| {
            visible
                .iter()
                .map(|v| {
                    b.get(*v)
                        .map(|&n| display_value(g, n, id_property))
                        .unwrap_or_default()
                })
                .collect()
        })
        .collect();
    projections
        .iter()
        .combinations(k)
        .map(|combo| {
            combo
                .into_iter()
                .map(|vals| {
                    visible
                        .iter()
                        .map(|v| v.to_string())
                        .zip(vals.iter().cloned())
                        .collect()
                })
                .collect()
        })
        .collect()
}
