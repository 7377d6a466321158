//! Rule tables as two-level markdown, flat CSV or JSON lines.

use std::io::Write;

use anyhow::Context;
use clap::ValueEnum;
use graphrule::parser::MineRuleQuery;
use graphrule::rules::{AssociationRule, ColumnGroup, ColumnLayout};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Markdown,
    Csv,
    Jsonl,
}

fn round4(v: f64) -> f64 {
    (v * 10_000.0).round() / 10_000.0
}

fn leaf_columns(layout: &ColumnLayout) -> Vec<String> {
    layout
        .body
        .iter()
        .chain(&layout.head)
        .flat_map(|g| g.columns.iter().cloned())
        .collect()
}

fn cells(layout: &ColumnLayout, rule: &AssociationRule) -> Vec<Option<String>> {
    ColumnLayout::cells(&layout.body, &rule.body)
        .into_iter()
        .chain(ColumnLayout::cells(&layout.head, &rule.head))
        .map(|c| c.map(str::to_string))
        .collect()
}

pub fn write_rules(
    out: &mut impl Write,
    q: &MineRuleQuery,
    rules: &[AssociationRule],
    format: Format,
) -> anyhow::Result<()> {
    let layout = ColumnLayout::new(q);
    match format {
        Format::Markdown => markdown(out, &layout, rules),
        Format::Csv => csv(out, &layout, rules),
        Format::Jsonl => {
            for r in rules {
                let mut rec = layout.record(r);
                rec.support = round4(rec.support);
                rec.confidence = round4(rec.confidence);
                serde_json::to_writer(&mut *out, &rec)?;
                writeln!(out)?;
            }
            Ok(())
        }
    }
    .context("cannot write rules")
}

fn csv(
    out: &mut impl Write,
    layout: &ColumnLayout,
    rules: &[AssociationRule],
) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = leaf_columns(layout);
    header.extend(["support".to_string(), "confidence".to_string()]);
    w.write_record(&header)?;
    for r in rules {
        let mut row: Vec<String> = cells(layout, r)
            .into_iter()
            .map(Option::unwrap_or_default)
            .collect();
        row.push(format!("{:.4}", r.support));
        row.push(format!("{:.4}", r.confidence));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Group row (`Body`/`Head`, then each `Itemset` name over its first
/// column) and a leaf row of column names, followed by one row per rule.
fn markdown(
    out: &mut impl Write,
    layout: &ColumnLayout,
    rules: &[AssociationRule],
) -> anyhow::Result<()> {
    fn group_row(side: &str, groups: &[ColumnGroup]) -> Vec<String> {
        let mut row = Vec::new();
        for g in groups {
            for i in 0..g.columns.len() {
                row.push(if i == 0 {
                    format!("{side} {}", g.name)
                } else {
                    String::new()
                });
            }
        }
        row
    }
    let mut groups = group_row("Body", &layout.body);
    groups.extend(group_row("Head", &layout.head));
    groups.extend(["Support".to_string(), "Confidence".to_string()]);

    let mut leaves = leaf_columns(layout);
    leaves.extend([String::new(), String::new()]);

    let mut rows = vec![groups, leaves];
    for r in rules {
        let mut row: Vec<String> = cells(layout, r)
            .into_iter()
            .map(|c| c.unwrap_or_else(|| "-".to_string()))
            .collect();
        row.push(format!("{:.2}", r.support));
        row.push(format!("{:.2}", r.confidence));
        rows.push(row);
    }

    let ncols = rows[0].len();
    let widths: Vec<usize> = (0..ncols)
        .map(|c| {
            rows.iter()
                .map(|r| r[c].chars().count())
                .max()
                .unwrap_or(0)
                .max(3)
        })
        .collect();
    let line = |row: &[String]| {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(v, &w)| format!("{v:<w$}"))
            .collect();
        format!("| {} |", cells.join(" | "))
    };
    writeln!(out, "{}", line(&rows[0]))?;
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    writeln!(out, "|-{}-|", rule.join("-|-"))?;
    for row in &rows[1..] {
        writeln!(out, "{}", line(row))?;
    }
    Ok(())
}
