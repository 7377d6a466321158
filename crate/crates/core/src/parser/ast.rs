//! Syntax tree of a `MINE GRAPH RULE` statement.

use crate::graph::PropertyValue;

#[derive(Debug, Clone, PartialEq)]
pub struct MineRuleQuery {
    pub name: String,
    pub grouping: GroupingSpec,
    pub body: ItemSetSpec,
    pub head: ItemSetSpec,
    pub where_predicate: Option<Predicate>,
    pub ignore: Vec<String>,
    pub min_support: f64,
    pub min_confidence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupingSpec {
    pub anchor_var: String,
    pub anchor_label: String,
    pub anchor_predicate: Option<Predicate>,
}

/// Conjunction of patterns forming one side of a rule.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemSetSpec {
    pub conjuncts: Vec<PatternSpec>,
}

/// A linear chain rooted at the anchor variable. `min_card..max_card` is
/// the number of distinct item tuples the pattern contributes to a rule.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternSpec {
    pub min_card: u32,
    pub max_card: u32,
    pub anchor: String,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub rel: RelStep,
    pub node: NodeSpec,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelStep {
    /// `-[:T]-`
    Single { rel_type: String },
    /// `-[:T>n]-`: strictly more than `min_count` relationships of type T.
    Count { rel_type: String, min_count: u32 },
    /// `-[*<n]-`: any path of 1..n-1 relationships of any type.
    Any { max_len: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSpec {
    pub variable: String,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "=",
            CompareOp::Ne => "<>",
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Operand {
    /// `var.prop`
    Property {
        var: String,
        prop: String,
    },
    /// a bare variable; compares by node identity
    Variable(String),
    Literal(PropertyValue),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Predicate {
    Compare {
        left: Operand,
        op: CompareOp,
        right: Operand,
    },
    And(Box<Predicate>, Box<Predicate>),
    Or(Box<Predicate>, Box<Predicate>),
    Not(Box<Predicate>),
}

impl Operand {
    pub fn variable(&self) -> Option<&str> {
        match self {
            Operand::Property { var, .. } | Operand::Variable(var) => Some(var),
            Operand::Literal(_) => None,
        }
    }
}

impl Predicate {
    /// Variables referenced anywhere in the expression, in first-use order.
    pub fn variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Predicate::Compare { left, right, .. } => {
                for v in [left.variable(), right.variable()].into_iter().flatten() {
                    if !out.contains(&v) {
                        out.push(v);
                    }
                }
            }
            Predicate::And(a, b) | Predicate::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Predicate::Not(a) => a.collect_vars(out),
        }
    }

    /// Splits on top-level `AND`.
    pub fn conjuncts(&self) -> Vec<&Predicate> {
        match self {
            Predicate::And(a, b) => {
                let mut v = a.conjuncts();
                v.extend(b.conjuncts());
                v
            }
            other => vec![other],
        }
    }
}

impl PatternSpec {
    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.steps.iter().map(|s| s.node.variable.as_str())
    }
}

impl MineRuleQuery {
    /// Body conjuncts followed by head conjuncts.
    pub fn patterns(&self) -> impl Iterator<Item = &PatternSpec> {
        self.body.conjuncts.iter().chain(self.head.conjuncts.iter())
    }

    pub fn is_ignored(&self, var: &str) -> bool {
        self.ignore.iter().any(|v| v == var)
    }
}
