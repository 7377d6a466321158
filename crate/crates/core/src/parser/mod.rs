//! Front end for the `MINE GRAPH RULE` language: lexer, recursive-descent
//! parser, semantic validation and a canonical pretty-printer.
//!
//! ```text
//! MINE GRAPH RULE <name>
//! GROUPING ON (<var>:<Label>) [WHERE <predicate>]
//! DEFINING BODY AS <itemSet>
//!          HEAD AS <itemSet>
//! [WHERE <predicate>]
//! [IGNORE <var> {, <var>}]
//! EXTRACTING RULES WITH SUPPORT > <minsupp> AND CONFIDENCE > <minconf>
//!
//! itemSet := pattern {AND pattern}
//! pattern := [<m>..<n>] (<anchor>) {relPattern (<var>:<Label>)}+
//! relPattern := -[:T]- | -[:T > <mincount>]- | -[*< <length>]-
//! ```
//!
//! Keywords are case-insensitive; everything else is case-sensitive.

pub mod ast;
mod lexer;
mod render;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use ast::*;
pub use lexer::LexError;
use lexer::{tokenize, Token, TokenKind};
pub use render::render_query;

use crate::graph::PropertyValue;

const KEYWORDS: &[&str] = &[
    "MINE",
    "GRAPH",
    "RULE",
    "GROUPING",
    "ON",
    "WHERE",
    "DEFINING",
    "BODY",
    "AS",
    "HEAD",
    "AND",
    "OR",
    "NOT",
    "IGNORE",
    "EXTRACTING",
    "RULES",
    "WITH",
    "SUPPORT",
    "CONFIDENCE",
    "TRUE",
    "FALSE",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.iter().any(|k| k.eq_ignore_ascii_case(word))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}", self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QueryError {
    #[error("lexical error at {line}:{column}: {message}")]
    Lexical {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("syntax error at {line}:{column}: found {found}, expected {}", expected.join(" or "))]
    Syntax {
        line: usize,
        column: usize,
        found: String,
        expected: Vec<String>,
    },
    #[error("invalid query: {}", first_error(.0))]
    Semantic(Vec<Diagnostic>),
}

fn first_error(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .filter(|d| d.severity == Severity::Error)
        .map(|d| d.message.clone())
        .collect::<Vec<_>>()
        .join("; ")
}

impl From<LexError> for QueryError {
    fn from(e: LexError) -> Self {
        QueryError::Lexical {
            line: e.line,
            column: e.column,
            message: e.message,
        }
    }
}

/// Parses and validates one statement. Warnings are dropped; use
/// [`parse_unchecked`] plus [`validate`] to see them.
pub fn parse_query(text: &str) -> Result<MineRuleQuery, QueryError> {
    let q = parse_unchecked(text)?;
    let diags = validate(&q);
    if diags.iter().any(|d| d.severity == Severity::Error) {
        return Err(QueryError::Semantic(diags));
    }
    Ok(q)
}

/// Parses without semantic validation.
pub fn parse_unchecked(text: &str) -> Result<MineRuleQuery, QueryError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let q = p.query()?;
    p.eat(&TokenKind::Semicolon);
    p.expect_eof()?;
    Ok(q)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, QueryError>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, offset: usize) -> &TokenKind {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].kind
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        let t = self.peek();
        Err(QueryError::Syntax {
            line: t.line,
            column: t.column,
            found: t.kind.to_string(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Ident(s) if s.eq_ignore_ascii_case(kw))
    }

    fn keyword(&mut self, kw: &str) -> PResult<()> {
        if self.at_keyword(kw) {
            self.advance();
            Ok(())
        } else {
            self.error(&[kw])
        }
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if &self.peek().kind == kind {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<()> {
        if self.eat(&kind) {
            Ok(())
        } else {
            self.error(&[&kind.to_string()])
        }
    }

    fn expect_eof(&mut self) -> PResult<()> {
        if self.peek().kind == TokenKind::Eof {
            Ok(())
        } else {
            self.error(&["end of input"])
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match &self.peek().kind {
            TokenKind::Ident(s) => {
                let s = s.clone();
                self.advance();
                Ok(s)
            }
            _ => self.error(&[what]),
        }
    }

    fn unsigned(&mut self, what: &str) -> PResult<u32> {
        let t = self.peek().clone();
        match &t.kind {
            TokenKind::Int(s) => match s.parse::<u32>() {
                Ok(v) => {
                    self.advance();
                    Ok(v)
                }
                Err(_) => Err(QueryError::Syntax {
                    line: t.line,
                    column: t.column,
                    found: t.kind.to_string(),
                    expected: vec![format!("{what} fitting in 32 bits")],
                }),
            },
            _ => self.error(&[what]),
        }
    }

    fn threshold(&mut self) -> PResult<f64> {
        let t = self.peek().clone();
        match &t.kind {
            TokenKind::Int(s) | TokenKind::Decimal(s) => {
                self.advance();
                Ok(s.parse::<f64>().expect("lexer only emits valid numbers"))
            }
            _ => self.error(&["threshold number"]),
        }
    }

    fn query(&mut self) -> PResult<MineRuleQuery> {
        self.keyword("MINE")?;
        self.keyword("GRAPH")?;
        self.keyword("RULE")?;
        let name = self.ident("rule name")?;
        self.keyword("GROUPING")?;
        self.keyword("ON")?;
        self.expect(TokenKind::LParen)?;
        let anchor_var = self.ident("anchor variable")?;
        self.expect(TokenKind::Colon)?;
        let anchor_label = self.ident("anchor label")?;
        self.expect(TokenKind::RParen)?;
        let anchor_predicate = if self.at_keyword("WHERE") {
            self.advance();
            Some(self.predicate()?)
        } else {
            None
        };
        self.keyword("DEFINING")?;
        self.keyword("BODY")?;
        self.keyword("AS")?;
        let body = self.item_set()?;
        self.keyword("HEAD")?;
        self.keyword("AS")?;
        let head = self.item_set()?;
        let where_predicate = if self.at_keyword("WHERE") {
            self.advance();
            Some(self.predicate()?)
        } else {
            None
        };
        let mut ignore = Vec::new();
        if self.at_keyword("IGNORE") {
            self.advance();
            ignore.push(self.ident("variable")?);
            while self.eat(&TokenKind::Comma) {
                ignore.push(self.ident("variable")?);
            }
        }
        if !self.at_keyword("EXTRACTING") {
            let mut expected = vec!["EXTRACTING"];
            if ignore.is_empty() {
                expected.insert(0, "IGNORE");
                if where_predicate.is_none() {
                    expected.insert(0, "WHERE");
                }
            }
            return self.error(&expected);
        }
        self.advance();
        self.keyword("RULES")?;
        self.keyword("WITH")?;
        self.keyword("SUPPORT")?;
        self.expect(TokenKind::Gt)?;
        let min_support = self.threshold()?;
        self.keyword("AND")?;
        self.keyword("CONFIDENCE")?;
        self.expect(TokenKind::Gt)?;
        let min_confidence = self.threshold()?;
        Ok(MineRuleQuery {
            name,
            grouping: GroupingSpec {
                anchor_var,
                anchor_label,
                anchor_predicate,
            },
            body,
            head,
            where_predicate,
            ignore,
            min_support,
            min_confidence,
        })
    }

    fn item_set(&mut self) -> PResult<ItemSetSpec> {
        let mut conjuncts = vec![self.pattern()?];
        // `AND` continues the item set only when a pattern follows
        while self.at_keyword("AND")
            && matches!(self.peek_at(1), TokenKind::LParen | TokenKind::Int(_))
        {
            self.advance();
            conjuncts.push(self.pattern()?);
        }
        Ok(ItemSetSpec { conjuncts })
    }

    fn pattern(&mut self) -> PResult<PatternSpec> {
        let (min_card, max_card) = if matches!(self.peek().kind, TokenKind::Int(_)) {
            let lo = self.unsigned("cardinality")?;
            self.expect(TokenKind::DotDot)?;
            let hi = self.unsigned("cardinality")?;
            (lo, hi)
        } else {
            (1, 1)
        };
        if !matches!(self.peek().kind, TokenKind::LParen) {
            return self.error(&["`(`", "cardinality"]);
        }
        self.advance();
        let anchor = self.ident("anchor variable")?;
        self.expect(TokenKind::RParen)?;
        let mut steps = Vec::new();
        loop {
            if !matches!(self.peek().kind, TokenKind::Dash) {
                if steps.is_empty() {
                    return self.error(&["`-`"]);
                }
                break;
            }
            self.advance();
            self.expect(TokenKind::LBracket)?;
            let rel = if self.eat(&TokenKind::Star) {
                self.expect(TokenKind::Lt)?;
                RelStep::Any {
                    max_len: self.unsigned("path length")?,
                }
            } else if self.eat(&TokenKind::Colon) {
                let rel_type = self.ident("relationship type")?;
                if self.eat(&TokenKind::Gt) {
                    RelStep::Count {
                        rel_type,
                        min_count: self.unsigned("minimum count")?,
                    }
                } else {
                    RelStep::Single { rel_type }
                }
            } else {
                return self.error(&["`:`", "`*`"]);
            };
            self.expect(TokenKind::RBracket)?;
            self.expect(TokenKind::Dash)?;
            self.expect(TokenKind::LParen)?;
            let variable = self.ident("variable")?;
            self.expect(TokenKind::Colon)?;
            let label = self.ident("label")?;
            self.expect(TokenKind::RParen)?;
            steps.push(Step {
                rel,
                node: NodeSpec { variable, label },
            });
        }
        Ok(PatternSpec {
            min_card,
            max_card,
            anchor,
            steps,
        })
    }

    fn predicate(&mut self) -> PResult<Predicate> {
        let mut left = self.conjunction()?;
        while self.at_keyword("OR") {
            self.advance();
            let right = self.conjunction()?;
            left = Predicate::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> PResult<Predicate> {
        let mut left = self.negation()?;
        while self.at_keyword("AND") {
            self.advance();
            let right = self.negation()?;
            left = Predicate::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn negation(&mut self) -> PResult<Predicate> {
        if self.at_keyword("NOT") {
            self.advance();
            return Ok(Predicate::Not(Box::new(self.negation()?)));
        }
        if self.eat(&TokenKind::LParen) {
            let inner = self.predicate()?;
            self.expect(TokenKind::RParen)?;
            return Ok(inner);
        }
        let left = self.operand()?;
        let op = match self.peek().kind {
            TokenKind::Eq => CompareOp::Eq,
            TokenKind::Ne => CompareOp::Ne,
            TokenKind::Lt => CompareOp::Lt,
            TokenKind::Le => CompareOp::Le,
            TokenKind::Gt => CompareOp::Gt,
            TokenKind::Ge => CompareOp::Ge,
            _ => return self.error(&["comparison operator"]),
        };
        self.advance();
        let right = self.operand()?;
        Ok(Predicate::Compare { left, op, right })
    }

    fn operand(&mut self) -> PResult<Operand> {
        let t = self.peek().clone();
        let negative = matches!(t.kind, TokenKind::Dash);
        if negative {
            self.advance();
        }
        let t2 = self.peek().clone();
        let literal = match &t2.kind {
            TokenKind::Int(s) => {
                let text = if negative { format!("-{s}") } else { s.clone() };
                match text.parse::<i64>() {
                    Ok(v) => PropertyValue::Integer(v),
                    Err(_) => {
                        return Err(QueryError::Syntax {
                            line: t2.line,
                            column: t2.column,
                            found: t2.kind.to_string(),
                            expected: vec!["integer within 64-bit range".into()],
                        })
                    }
                }
            }
            TokenKind::Decimal(s) => {
                let v: f64 = s.parse().expect("lexer only emits valid numbers");
                PropertyValue::Decimal(if negative { -v } else { v })
            }
            _ if negative => return self.error(&["number"]),
            TokenKind::Str(s) => PropertyValue::Text(s.clone()),
            TokenKind::Ident(s) if s.eq_ignore_ascii_case("TRUE") => PropertyValue::Boolean(true),
            TokenKind::Ident(s) if s.eq_ignore_ascii_case("FALSE") => PropertyValue::Boolean(false),
            TokenKind::Ident(s) => {
                let var = s.clone();
                self.advance();
                if self.eat(&TokenKind::Dot) {
                    let prop = self.ident("property name")?;
                    return Ok(Operand::Property { var, prop });
                }
                return Ok(Operand::Variable(var));
            }
            _ => return self.error(&["variable", "property access", "literal"]),
        };
        self.advance();
        Ok(Operand::Literal(literal))
    }
}

// -------------------------------------------------------------------------
// semantic validation

fn err(message: String) -> Diagnostic {
    Diagnostic {
        severity: Severity::Error,
        message,
    }
}

fn warn(message: String) -> Diagnostic {
    Diagnostic {
        severity: Severity::Warning,
        message,
    }
}

/// All semantic diagnostics for a parsed query, in a fixed order: names,
/// patterns, predicates, IGNORE list, thresholds.
pub fn validate(q: &MineRuleQuery) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let anchor = q.grouping.anchor_var.as_str();

    // every declared variable, with duplicates reported
    let mut declared: Vec<&str> = vec![anchor];
    let mut pattern_vars = BTreeSet::new();
    for (side, set) in [("body", &q.body), ("head", &q.head)] {
        for (i, pat) in set.conjuncts.iter().enumerate() {
            if pat.anchor != anchor {
                out.push(err(format!(
                    "{side} pattern {} starts at `{}` instead of the anchor `{anchor}`",
                    i + 1,
                    pat.anchor
                )));
            }
            for v in pat.variables() {
                if declared.contains(&v) {
                    out.push(err(format!("variable `{v}` is declared more than once")));
                } else {
                    declared.push(v);
                }
                pattern_vars.insert(v);
            }
        }
    }
    for v in &declared {
        if is_keyword(v) {
            out.push(err(format!(
                "`{v}` is a reserved word and cannot name a variable"
            )));
        }
    }
    if q.grouping.anchor_label.is_empty() {
        out.push(err("anchor label is empty".into()));
    }

    for (side, set) in [("body", &q.body), ("head", &q.head)] {
        for (i, pat) in set.conjuncts.iter().enumerate() {
            let n = i + 1;
            if pat.min_card == 0 {
                out.push(err(format!(
                    "{side} pattern {n}: cardinality must be at least 1"
                )));
            }
            if pat.min_card > pat.max_card {
                out.push(err(format!(
                    "{side} pattern {n}: minimum cardinality {} exceeds maximum {}",
                    pat.min_card, pat.max_card
                )));
            }
            for step in &pat.steps {
                if let RelStep::Any { max_len } = step.rel {
                    if max_len < 2 {
                        out.push(err(format!(
                            "{side} pattern {n}: `*<{max_len}` admits no path length"
                        )));
                    }
                }
            }
            let visible = pat.variables().filter(|v| !q.is_ignored(v)).count();
            if visible == 0 {
                if pat.max_card > 1 {
                    out.push(err(format!(
                        "{side} pattern {n}: every variable is ignored, so it cannot contribute {} items",
                        pat.max_card
                    )));
                } else {
                    out.push(warn(format!(
                        "{side} pattern {n}: every variable is ignored; it only tests existence"
                    )));
                }
            }
        }
    }
    let body_visible = q
        .body
        .conjuncts
        .iter()
        .flat_map(|p| p.variables())
        .any(|v| !q.is_ignored(v));
    if !body_visible {
        out.push(err("body has no visible variable".into()));
    }

    if let Some(pred) = &q.grouping.anchor_predicate {
        for v in pred.variables() {
            if v != anchor {
                out.push(err(format!(
                    "grouping condition may only reference `{anchor}`, found `{v}`"
                )));
            }
        }
        check_predicate(pred, &mut out);
    }
    if let Some(pred) = &q.where_predicate {
        for v in pred.variables() {
            if !declared.contains(&v) {
                out.push(err(format!("WHERE references undeclared variable `{v}`")));
            }
        }
        check_predicate(pred, &mut out);
    }

    let mut seen = BTreeSet::new();
    for v in &q.ignore {
        if !pattern_vars.contains(v.as_str()) {
            out.push(err(format!(
                "IGNORE names `{v}`, which is not declared in the body or head"
            )));
        } else if !seen.insert(v.as_str()) {
            out.push(warn(format!("`{v}` is ignored more than once")));
        }
    }

    for (what, t) in [("support", q.min_support), ("confidence", q.min_confidence)] {
        if !(0.0..1.0).contains(&t) {
            out.push(err(format!("minimum {what} {t} is outside [0, 1)")));
        }
    }
    out
}

fn check_predicate(pred: &Predicate, out: &mut Vec<Diagnostic>) {
    match pred {
        Predicate::And(a, b) | Predicate::Or(a, b) => {
            check_predicate(a, out);
            check_predicate(b, out);
        }
        Predicate::Not(a) => check_predicate(a, out),
        Predicate::Compare { left, op, right } => match (left, right) {
            (Operand::Variable(a), Operand::Variable(b)) => {
                if !matches!(op, CompareOp::Eq | CompareOp::Ne) {
                    out.push(err(format!(
                        "`{a} {} {b}`: nodes only support = and <>",
                        op.symbol()
                    )));
                }
            }
            (Operand::Variable(v), _) | (_, Operand::Variable(v)) => {
                out.push(err(format!(
                    "node variable `{v}` can only be compared with another variable"
                )));
            }
            (Operand::Literal(a), Operand::Literal(b)) if a.compare(b).is_err() => {
                out.push(err(format!(
                    "cannot compare {} literal with {} literal",
                    a.kind(),
                    b.kind()
                )));
            }
            _ => {}
        },
    }
}
