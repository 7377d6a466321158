//! `graphrule`: mine association rules from graph files, generate synthetic
//! graphs and run timing sweeps.

mod bench;
mod output;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use graphrule::graph::{load_graph, PropertyGraph};
use graphrule::matcher::MatchDirection;
use graphrule::miner::{mine, MineError, MineOptions};
use graphrule::parser::{parse_query, parse_unchecked, validate, MineRuleQuery, Severity};
use graphrule::synthgen::{generate, top_item_share, GenConfig, GenKind};

use output::Format;

#[derive(Parser)]
#[command(
    name = "graphrule",
    version,
    about = "Association rule mining over property graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine the rules of one query against one graph file.
    Mine(MineArgs),
    /// Write a synthetic Person/Item/Category graph.
    Generate(GenerateArgs),
    /// Time queries over graph files or a generated matrix.
    Bench(bench::BenchArgs),
}

#[derive(Args, Clone)]
pub struct MatchArgs {
    /// Property shown for matched nodes; nodes without it show `#<id>`.
    #[arg(long, env = "GRAPHRULE_ID_PROPERTY", default_value = "name")]
    pub id_property: String,
    /// Match relationships in either direction.
    #[arg(long)]
    pub undirected: bool,
}

impl MatchArgs {
    pub fn options(&self, prune: bool) -> MineOptions {
        MineOptions {
            prune,
            id_property: self.id_property.clone(),
            direction: if self.undirected {
                MatchDirection::Undirected
            } else {
                MatchDirection::Directed
            },
        }
    }
}

#[derive(Args)]
struct MineArgs {
    /// Graph JSON file.
    #[arg(long, short)]
    graph: PathBuf,
    /// Query file (`.mgr`).
    #[arg(long, short)]
    query: PathBuf,
    #[arg(long, short, value_enum, default_value_t = Format::Markdown)]
    format: Format,
    /// Replaces the query's support threshold.
    #[arg(long)]
    min_support: Option<f64>,
    /// Replaces the query's confidence threshold.
    #[arg(long)]
    min_confidence: Option<f64>,
    /// Mine every lattice pair, even below unsupported ancestors.
    #[arg(long)]
    no_prune: bool,
    /// Print mining statistics as JSON on stderr.
    #[arg(long)]
    stats: bool,
    #[command(flatten)]
    matching: MatchArgs,
}

#[derive(Args)]
struct GenerateArgs {
    /// JSON configuration; flags given alongside it take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    /// Total node count.
    #[arg(long)]
    nodes: Option<usize>,
    /// Share of nodes that are persons.
    #[arg(long)]
    ratio: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    buy_per_person: Option<f64>,
    #[arg(long)]
    recommend_per_person: Option<f64>,
    #[arg(long)]
    follow_per_person: Option<f64>,
    #[arg(long)]
    categories: Option<usize>,
    /// Degree exponent of item popularity for scale-free kinds.
    #[arg(long)]
    exponent: Option<f64>,
    /// BUY multiplier of large-scale-free graphs.
    #[arg(long)]
    density_factor: Option<f64>,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long)]
    pretty: bool,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum KindArg {
    Uniform,
    ScaleFree,
    LargeScaleFree,
}

impl From<KindArg> for GenKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Uniform => GenKind::Uniform,
            KindArg::ScaleFree => GenKind::ScaleFree,
            KindArg::LargeScaleFree => GenKind::LargeScaleFree,
        }
    }
}

/// An error with the exit code it maps to.
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code,
            error: error.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure { code: 1, error }
    }
}

pub const EXIT_INVALID: u8 = 2;
pub const EXIT_NO_ANCHORS: u8 = 3;

pub fn read_graph(path: &Path) -> anyhow::Result<PropertyGraph> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    load_graph(BufReader::new(file)).with_context(|| format!("cannot load {}", path.display()))
}

/// Reads and parses a query; semantic warnings go to stderr.
pub fn read_query(path: &Path) -> Result<MineRuleQuery, Failure> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let q = parse_query(&text)
        .map_err(|e| Failure::new(EXIT_INVALID, anyhow::anyhow!("{}: {e}", path.display())))?;
    if let Ok(raw) = parse_unchecked(&text) {
        for d in validate(&raw)
            .iter()
            .filter(|d| d.severity == Severity::Warning)
        {
            eprintln!("{}: {d}", path.display());
        }
    }
    Ok(q)
}

pub fn mine_failure(e: MineError) -> Failure {
    let code = match e {
        MineError::EmptyAnchors { .. } => EXIT_NO_ANCHORS,
        MineError::Invalid(_) => EXIT_INVALID,
        MineError::Eval(_) => 1,
    };
    Failure::new(code, e)
}

fn threshold(name: &str, v: f64) -> Result<f64, Failure> {
    if (0.0..1.0).contains(&v) {
        Ok(v)
    } else {
        Err(Failure::new(
            EXIT_INVALID,
            anyhow::anyhow!("{name} must lie in [0, 1), got {v}"),
        ))
    }
}

fn cmd_mine(args: MineArgs) -> Result<(), Failure> {
    let mut q = read_query(&args.query)?;
    if let Some(s) = args.min_support {
        q.min_support = threshold("--min-support", s)?;
    }
    if let Some(c) = args.min_confidence {
        q.min_confidence = threshold("--min-confidence", c)?;
    }
    let g = read_graph(&args.graph)?;
    let (rules, stats) =
        mine(&g, &q, &args.matching.options(!args.no_prune)).map_err(mine_failure)?;
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    output::write_rules(&mut out, &q, &rules, args.format)?;
    out.flush().context("cannot write output")?;
    if args.stats {
        eprintln!(
            "{}",
            serde_json::to_string(&stats).context("cannot encode stats")?
        );
    }
    Ok(())
}

fn gen_config(args: &GenerateArgs) -> anyhow::Result<GenConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("bad config {}", path.display()))?
        }
        None => GenConfig::default(),
    };
    if let Some(k) = args.kind {
        cfg.kind = k.into();
    }
    macro_rules! apply {
        ($($flag:ident => $field:ident),*) => {
            $(if let Some(v) = args.$flag { cfg.$field = v; })*
        };
    }
    apply!(
        nodes => total_nodes,
        ratio => anchor_ratio,
        seed => seed,
        buy_per_person => buy_per_person,
        recommend_per_person => recommend_per_person,
        follow_per_person => follow_per_person,
        categories => categories,
        exponent => power_law_exponent,
        density_factor => density_factor
    );
    Ok(cfg)
}

fn cmd_generate(args: GenerateArgs) -> Result<(), Failure> {
    let cfg = gen_config(&args).map_err(|e| Failure::new(EXIT_INVALID, e))?;
    let g = generate(&cfg).map_err(|e| Failure::new(EXIT_INVALID, e))?;
    match &args.out {
        Some(path) => {
            let file =
                File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            let mut w = BufWriter::new(file);
            g.write_json(&mut w, args.pretty)
                .context("cannot write graph")?;
            w.flush().context("cannot write graph")?;
        }
        None => {
            let mut w = BufWriter::new(io::stdout().lock());
            g.write_json(&mut w, args.pretty)
                .context("cannot write graph")?;
            writeln!(w).context("cannot write graph")?;
        }
    }
    let summary = format!(
        "nodes {} (persons {}, items {}, categories {}), relationships {}: BUY {}, RECOMMEND {}, FOLLOW {}, OF {}; top 1% of items receive {:.1}% of BUY",
        g.node_count(),
        g.nodes_with_label("Person").len(),
        g.nodes_with_label("Item").len(),
        g.nodes_with_label("Category").len(),
        g.relationship_count(),
        g.type_count("BUY"),
        g.type_count("RECOMMEND"),
        g.type_count("FOLLOW"),
        g.type_count("OF"),
        100.0 * top_item_share(&g, 0.01),
    );
    if args.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Mine(a) => cmd_mine(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Bench(a) => bench::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("graphrule: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
