//! Timing sweeps: every query over every graph, repeated, one CSV row per run.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use clap::Args;
use graphrule::graph::PropertyGraph;
use graphrule::miner::mine;
use graphrule::parser::MineRuleQuery;
use graphrule::synthgen::{generate, GenConfig, GenKind};
use serde::Serialize;

use crate::{read_graph, read_query, Failure, KindArg, MatchArgs, EXIT_INVALID};

#[derive(Args)]
pub struct BenchArgs {
    /// Query file, or directory whose `.mgr` files are all used. Repeatable.
    #[arg(long, short, required = true)]
    query: Vec<PathBuf>,
    /// Graph JSON file. Repeatable.
    #[arg(long, short)]
    graph: Vec<PathBuf>,
    /// Generator kinds of the synthetic matrix.
    #[arg(long, value_enum, value_delimiter = ',')]
    kind: Vec<KindArg>,
    /// Node counts of the synthetic matrix.
    #[arg(long, value_delimiter = ',')]
    nodes: Vec<usize>,
    /// Person ratios of the synthetic matrix.
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    ratio: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Runs per (query, graph) point.
    #[arg(long, default_value_t = 3)]
    reps: usize,
    /// CSV destination; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_prune: bool,
    #[command(flatten)]
    matching: MatchArgs,
}

#[derive(Serialize)]
struct Row {
    query: String,
    graph: String,
    nodes: usize,
    relationships: usize,
    rep: usize,
    wall_ms: Option<f64>,
    rules: Option<usize>,
    anchors: Option<u64>,
    pairs_generated: Option<usize>,
    pairs_mined: Option<usize>,
    pairs_pruned: Option<usize>,
    error: String,
}

enum Source {
    File(PathBuf),
    Generated(GenConfig),
}

impl Source {
    fn name(&self) -> String {
        match self {
            Source::File(p) => p.display().to_string(),
            Source::Generated(c) => {
                let kind = match c.kind {
                    GenKind::Uniform => "uniform",
                    GenKind::ScaleFree => "scale-free",
                    GenKind::LargeScaleFree => "large-scale-free",
                };
                format!("{kind}-{}-{}-s{}", c.total_nodes, c.anchor_ratio, c.seed)
            }
        }
    }

    fn load(&self) -> anyhow::Result<PropertyGraph> {
        match self {
            Source::File(p) => read_graph(p),
            Source::Generated(c) => Ok(generate(c)?),
        }
    }
}

fn query_files(paths: &[PathBuf]) -> anyhow::Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .with_context(|| format!("cannot list {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "mgr"))
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn query_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn median(mut xs: Vec<f64>) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    Some(if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    })
}

pub fn run(args: BenchArgs) -> Result<(), Failure> {
    let files = query_files(&args.query).map_err(|e| Failure::new(EXIT_INVALID, e))?;
    if files.is_empty() {
        return Err(Failure::new(
            EXIT_INVALID,
            anyhow::anyhow!("the query set is empty"),
        ));
    }
    let queries: Vec<(String, Result<MineRuleQuery, String>)> = files
        .iter()
        .map(|f| {
            (
                query_name(f),
                read_query(f).map_err(|e| format!("{:#}", e.error)),
            )
        })
        .collect();

    let mut sources: Vec<Source> = args.graph.iter().cloned().map(Source::File).collect();
    if !args.kind.is_empty() || !args.nodes.is_empty() {
        if args.kind.is_empty() || args.nodes.is_empty() {
            return Err(Failure::new(
                EXIT_INVALID,
                anyhow::anyhow!("a generator matrix needs both --kind and --nodes"),
            ));
        }
        for &kind in &args.kind {
            for &nodes in &args.nodes {
                for &ratio in &args.ratio {
                    sources.push(Source::Generated(GenConfig {
                        kind: kind.into(),
                        total_nodes: nodes,
                        anchor_ratio: ratio,
                        seed: args.seed,
                        ..GenConfig::default()
                    }));
                }
            }
        }
    }
    if sources.is_empty() {
        return Err(Failure::new(
            EXIT_INVALID,
            anyhow::anyhow!("no graphs: pass --graph or --kind with --nodes"),
        ));
    }

    let sink: Box<dyn Write> = match &args.out {
        Some(p) => {
            Box::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)
        }
        None => Box::new(io::stdout()),
    };
    let mut csv = csv::Writer::from_writer(sink);
    let opts = args.matching.options(!args.no_prune);
    let mut summary = Vec::new();

    for source in &sources {
        let graph_name = source.name();
        let graph = source.load().map_err(|e| format!("{e:#}"));
        let (nodes, relationships) = graph
            .as_ref()
            .map(|g| (g.node_count(), g.relationship_count()))
            .unwrap_or_default();
        for (qname, q) in &queries {
            let mut times = Vec::new();
            let mut last_rules = None;
            for rep in 1..=args.reps {
                let mut row = Row {
                    query: qname.clone(),
                    graph: graph_name.clone(),
                    nodes,
                    relationships,
                    rep,
                    wall_ms: None,
                    rules: None,
                    anchors: None,
                    pairs_generated: None,
                    pairs_mined: None,
                    pairs_pruned: None,
                    error: String::new(),
                };
                match (&graph, q) {
                    (Err(e), _) | (_, Err(e)) => row.error = e.clone(),
                    (Ok(g), Ok(q)) => {
                        let start = Instant::now();
                        let result = mine(g, q, &opts);
                        let ms = start.elapsed().as_secs_f64() * 1000.0;
                        match result {
                            Ok((rules, stats)) => {
                                times.push(ms);
                                last_rules = Some(rules.len());
                                row.wall_ms = Some((ms * 1000.0).round() / 1000.0);
                                row.rules = Some(rules.len());
                                row.anchors = Some(stats.anchor_count);
                                row.pairs_generated = Some(stats.pairs_generated);
                                row.pairs_mined = Some(stats.pairs_mined);
                                row.pairs_pruned = Some(stats.pairs_pruned);
                            }
                            Err(e) => row.error = e.to_string(),
                        }
                    }
                }
                csv.serialize(&row).context("cannot write CSV")?;
            }
            csv.flush().context("cannot write CSV")?;
            summary.push((qname.clone(), graph_name.clone(), median(times), last_rules));
        }
    }
    csv.flush().context("cannot write CSV")?;

    let report: Box<dyn Write> = if args.out.is_some() {
        Box::new(io::stdout())
    } else {
        Box::new(io::stderr())
    };
    write_summary(report, &summary).context("cannot write summary")?;
    Ok(())
}

type SummaryRow = (String, String, Option<f64>, Option<usize>);

fn write_summary(mut w: impl Write, summary: &[SummaryRow]) -> io::Result<()> {
    let wq = summary.iter().map(|s| s.0.len()).max().unwrap_or(5).max(5);
    let wg = summary.iter().map(|s| s.1.len()).max().unwrap_or(5).max(5);
    writeln!(
        w,
        "{:<wq$}  {:<wg$}  {:>12}  {:>8}",
        "query", "graph", "median ms", "rules"
    )?;
    for (q, g, m, r) in summary {
        let m = m.map_or("failed".to_string(), |m| format!("{m:.2}"));
        let r = r.map_or("-".to_string(), |r| r.to_string());
        writeln!(w, "{q:<wq$}  {g:<wg$}  {m:>12}  {r:>8}")?;
    }
    Ok(())
}
