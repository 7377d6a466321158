//! Canonical text form of a query. `parse_query(&render_query(q))` gives
//! back `q` for every valid query.

use std::fmt::Write;

use super::ast::*;
use crate::graph::PropertyValue;

pub fn render_query(q: &MineRuleQuery) -> String {
    let mut s = String::new();
    writeln!(s, "MINE GRAPH RULE {}", q.name).unwrap();
    write!(
        s,
        "GROUPING ON ({}:{})",
        q.grouping.anchor_var, q.grouping.anchor_label
    )
    .unwrap();
    if let Some(p) = &q.grouping.anchor_predicate {
        write!(s, " WHERE {}", render_predicate(p)).unwrap();
    }
    s.push('\n');
    s.push_str("DEFINING BODY AS ");
    render_item_set(&mut s, &q.body, "                 ");
    s.push_str("         HEAD AS ");
    render_item_set(&mut s, &q.head, "                 ");
    if let Some(p) = &q.where_predicate {
        writeln!(s, "WHERE {}", render_predicate(p)).unwrap();
    }
    if !q.ignore.is_empty() {
        writeln!(s, "IGNORE {}", q.ignore.join(", ")).unwrap();
    }
    write!(
        s,
        "EXTRACTING RULES WITH SUPPORT > {:?} AND CONFIDENCE > {:?}",
        q.min_support, q.min_confidence
    )
    .unwrap();
    s
}

fn render_item_set(s: &mut String, set: &ItemSetSpec, indent: &str) {
    for (i, pat) in set.conjuncts.iter().enumerate() {
        if i > 0 {
            s.push_str(indent);
            s.push_str("AND ");
        }
        s.push_str(&render_pattern(pat));
        s.push('\n');
    }
}

pub fn render_pattern(p: &PatternSpec) -> String {
    let mut s = String::new();
    if (p.min_card, p.max_card) != (1, 1) {
        write!(s, "{}..{} ", p.min_card, p.max_card).unwrap();
    }
    write!(s, "({})", p.anchor).unwrap();
    for step in &p.steps {
        match &step.rel {
            RelStep::Single { rel_type } => write!(s, "-[:{rel_type}]-"),
            RelStep::Count {
                rel_type,
                min_count,
            } => write!(s, "-[:{rel_type}>{min_count}]-"),
            RelStep::Any { max_len } => write!(s, "-[*<{max_len}]-"),
        }
        .unwrap();
        write!(s, "({}:{})", step.node.variable, step.node.label).unwrap();
    }
    s
}

fn precedence(p: &Predicate) -> u8 {
    match p {
        Predicate::Or(..) => 1,
        Predicate::And(..) => 2,
        Predicate::Not(_) => 3,
        Predicate::Compare { .. } => 4,
    }
}

/// Prints `p`, adding parentheses only where the tree shape needs them.
/// `AND`/`OR` parse left-associatively, so a right child of equal
/// precedence is parenthesized.
pub fn render_predicate(p: &Predicate) -> String {
    fn wrap(p: &Predicate, min: u8) -> String {
        let text = render_predicate(p);
        if precedence(p) < min {
            format!("({text})")
        } else {
            text
        }
    }
    match p {
        Predicate::Or(a, b) => format!("{} OR {}", wrap(a, 1), wrap(b, 2)),
        Predicate::And(a, b) => format!("{} AND {}", wrap(a, 2), wrap(b, 3)),
        Predicate::Not(a) => format!("NOT {}", wrap(a, 3)),
        Predicate::Compare { left, op, right } => format!(
            "{} {} {}",
            render_operand(left),
            op.symbol(),
            render_operand(right)
        ),
    }
}

fn render_operand(o: &Operand) -> String {
    match o {
        Operand::Property { var, prop } => format!("{var}.{prop}"),
        Operand::Variable(v) => v.clone(),
        Operand::Literal(v) => render_literal(v),
    }
}

fn render_literal(v: &PropertyValue) -> String {
    match v {
        PropertyValue::Boolean(b) => b.to_string(),
        PropertyValue::Integer(i) => i.to_string(),
        PropertyValue::Decimal(d) => format!("{d:?}"),
        PropertyValue::Text(t) => {
            let mut s = String::with_capacity(t.len() + 2);
            s.push('"');
            for c in t.chars() {
                match c {
                    '"' => s.push_str("\\\""),
                    '\\' => s.push_str("\\\\"),
                    '\n' => s.push_str("\\n"),
                    '\t' => s.push_str("\\t"),
                    '\r' => s.push_str("\\r"),
                    c => s.push(c),
                }
            }
            s.push('"');
            s
        }
    }
}
