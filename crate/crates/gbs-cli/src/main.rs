//! `gbs`: command-line front end over the `gbs` library.
//!
//! Reports are line-oriented `key=value` text. Exit status is 0 on success,
//! 1 when a well-formed input fails an operation, 2 on unreadable or
//! malformed input. Errors go to stderr as `error: kind=<kind> msg=<text>`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use gbs::arith::{phenotype, phenotype_oracle, phenotype_set, phenotype_set_oracle, ExtNat};
use gbs::graph::{validate_graph, EdgeId, GbsGraph, VertexId};
use gbs::hgraph::{extract, gadget, realize_finite, HGraph};
use gbs::kernel::{kernel_description, piece_topology, schreier_ball, transitivity_witness, KernelError};
use gbs::merge::{check, merge, MergePair, MergeRequest};
use gbs::preaction::{Point, Preaction};
use gbs::text::{self, ParseError};
use thiserror::Error;

#[derive(Debug, Error)]
enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Violation(String),
    #[error(transparent)]
    Lib(#[from] gbs::error::Error),
}

impl CliError {
    fn kind(&self) -> &'static str {
        use gbs::error::Error as E;
        match self {
            CliError::Io { .. } => "io",
            CliError::Usage(_) => "usage",
            CliError::Violation(_) => "violation",
            CliError::Lib(e) => match e {
                E::Parse(_) => "parse",
                E::Graph(_) => "graph",
                E::Arith(_) => "arith",
                E::Word(_) => "word",
                E::Preaction(_) => "preaction",
                E::HGraph(_) => "hgraph",
                E::Merge(_) => "merge",
                E::Kernel(_) => "kernel",
            },
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Usage(_) => 2,
            CliError::Lib(e) if e.is_parse() => 2,
            _ => 1,
        }
    }
}

macro_rules! lib_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Lib(e.into())
            }
        }
    )*};
}

lib_from!(
    ParseError,
    gbs::graph::GraphError,
    gbs::arith::ArithError,
    gbs::preaction::PreactionError,
    gbs::hgraph::HGraphError,
    gbs::merge::MergeError,
    KernelError
);

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "gbs", version, about = "Computations with generalized Baumslag-Solitar groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Phenotype of a subgroup of size N at a vertex, with its prime set.
    Phenotype {
        graph: PathBuf,
        vertex: String,
        n: String,
        /// Recompute by enumerating simple edge paths.
        #[arg(long)]
        oracle: bool,
    },
    /// Amenability and unimodularity class.
    Classify { graph: PathBuf },
    ValidateGraph { graph: PathBuf },
    ValidatePreaction { graph: PathBuf, preaction: PathBuf },
    /// H-graph of a preaction.
    Extract {
        graph: PathBuf,
        preaction: PathBuf,
        #[arg(long)]
        dot: bool,
    },
    ValidateHgraph { graph: PathBuf, hgraph: PathBuf },
    /// Completes an H-graph to the given depth.
    Saturate {
        graph: PathBuf,
        hgraph: PathBuf,
        depth: usize,
        #[arg(long)]
        dot: bool,
    },
    /// Preaction with the given finite H-graph.
    Realize { graph: PathBuf, hgraph: PathBuf },
    /// Gadget H-graph for size N along an edge.
    Gadget {
        graph: PathBuf,
        edge: String,
        n: String,
        #[arg(long)]
        dot: bool,
    },
    /// Connects the base points of two preactions, keeping them apart.
    Merge {
        graph: PathBuf,
        alpha: PathBuf,
        beta: PathBuf,
        e0: String,
        m: String,
        m_prime: String,
        /// Print the case trace to stderr (also enabled by GBS_TRACE=1).
        #[arg(long)]
        trace: bool,
        /// Write the extended preaction here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Schreier ball around the base point.
    Ball {
        graph: PathBuf,
        preaction: PathBuf,
        radius: usize,
        #[arg(long)]
        dot: bool,
    },
    /// Word moving each ball onto its partner: `witness G B1..BS B'1..B'S R`.
    Witness {
        graph: PathBuf,
        #[arg(num_args = 3.., required = true, value_name = "BALLS... R")]
        rest: Vec<String>,
    },
    /// Topology of the phenotype piece of size N at a vertex.
    Piece { graph: PathBuf, vertex: String, n: String },
    /// Perfect kernel of the group.
    Kernel { graph: PathBuf },
    /// Image of a point under a word; defaults to the base point.
    Evaluate {
        graph: PathBuf,
        preaction: PathBuf,
        word: String,
        #[arg(long, value_name = "ORBIT:OFFSET")]
        point: Option<String>,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn load_graph(path: &Path) -> Result<Arc<GbsGraph>> {
    Ok(Arc::new(text::parse_graph(&read(path)?)?))
}

fn load_preaction(g: &Arc<GbsGraph>, path: &Path) -> Result<Preaction> {
    Ok(text::parse_preaction(g.clone(), &read(path)?)?)
}

fn load_hgraph(g: &Arc<GbsGraph>, path: &Path) -> Result<HGraph> {
    Ok(text::parse_hgraph(g.clone(), &read(path)?)?)
}

fn vertex(g: &GbsGraph, name: &str) -> Result<VertexId> {
    g.vertex_by_name(name).map_err(|_| ParseError::Invalid(format!("unknown vertex `{name}`")).into())
}

/// `e` or `~e` for the reverse orientation.
fn edge(g: &GbsGraph, name: &str) -> Result<EdgeId> {
    let (name, flip) = match name.strip_prefix('~') {
        Some(n) => (n, true),
        None => (name, false),
    };
    let e = g.edge_by_name(name).map_err(|_| ParseError::Invalid(format!("unknown edge `{name}`")))?;
    Ok(if flip { e.bar() } else { e })
}

fn size(s: &str) -> Result<ExtNat> {
    s.parse().map_err(|_| ParseError::Invalid(format!("bad size `{s}`")).into())
}

fn point(s: &str) -> Result<Point> {
    let bad = || CliError::from(ParseError::Invalid(format!("bad point `{s}`")));
    let (o, off) = s.split_once(':').ok_or_else(bad)?;
    Ok(Point::new(o.parse::<usize>().map_err(|_| bad())?, off.parse::<i64>().map_err(|_| bad())?))
}

fn base(p: &Preaction) -> Result<Point> {
    p.base.clone().ok_or_else(|| KernelError::MissingBase.into())
}

fn run(cmd: Command) -> Result<String> {
    let mut out = String::new();
    match cmd {
        Command::Phenotype { graph, vertex: v, n, oracle } => {
            let g = load_graph(&graph)?;
            let v = vertex(&g, &v)?;
            let n = size(&n)?;
            let (ph, set) = if oracle {
                (phenotype_oracle(&g, v, &n)?, phenotype_set_oracle(&g, v, &n)?)
            } else {
                (phenotype(&g, v, &n), phenotype_set(&g, v, &n)?)
            };
            let _ = writeln!(out, "Ph={ph}\nprimes={set}");
        }
        Command::Classify { graph } => {
            let g = load_graph(&graph)?;
            let _ = writeln!(out, "{}", g.classify()?);
        }
        Command::ValidateGraph { graph } => {
            let g = load_graph(&graph)?;
            validate_graph(&g.oriented()).map_err(|v| CliError::Violation(v.to_string()))?;
            let _ = writeln!(out, "ok\nvertices={}\nedges={}\nreduced={}", g.vertex_count(), g.edge_count(), g.is_reduced());
        }
        Command::ValidatePreaction { graph, preaction } => {
            let g = load_graph(&graph)?;
            let p = load_preaction(&g, &preaction)?;
            p.validate().map_err(|v| CliError::Violation(v.to_string()))?;
            let _ = writeln!(out, "ok\norbits={}\nsaturated={}\ntransitive={}", p.orbits().len(), p.is_saturated(), p.is_transitive());
        }
        Command::Extract { graph, preaction, dot } => {
            let g = load_graph(&graph)?;
            let h = extract(&load_preaction(&g, &preaction)?).hgraph;
            out = if dot { h.to_dot() } else { text::hgraph_to_text(&h) };
        }
        Command::ValidateHgraph { graph, hgraph } => {
            let g = load_graph(&graph)?;
            let h = load_hgraph(&g, &hgraph)?;
            h.validate().map_err(|v| CliError::Violation(v.to_string()))?;
            let sat = h.saturation();
            let _ = writeln!(
                out,
                "ok\nvertices={}\nsaturated={}\ndeficits={}\nconnected={}\nbetti={}",
                h.vertex_count(),
                sat.is_saturated(),
                sat.deficits.len(),
                h.is_connected(),
                h.betti()
            );
        }
        Command::Saturate { graph, hgraph, depth, dot } => {
            let g = load_graph(&graph)?;
            let h = load_hgraph(&g, &hgraph)?;
            h.validate().map_err(|v| CliError::Violation(v.to_string()))?;
            let c = h.complete_to_depth(depth);
            out = if dot { c.to_dot() } else { text::hgraph_to_text(&c) };
        }
        Command::Realize { graph, hgraph } => {
            let g = load_graph(&graph)?;
            let p = realize_finite(&load_hgraph(&g, &hgraph)?)?;
            out = text::preaction_to_text(&p);
        }
        Command::Gadget { graph, edge: e, n, dot } => {
            let g = load_graph(&graph)?;
            let e = edge(&g, &e)?;
            let gd = gadget(g.clone(), e, size(&n)?)?;
            if dot {
                out = gd.hgraph.to_dot();
            } else {
                let _ = writeln!(out, "# root {}", gd.root);
                out.push_str(&text::hgraph_to_text(&gd.hgraph));
            }
        }
        Command::Merge { graph, alpha, beta, e0, m, m_prime, trace, out: dest } => {
            let g = load_graph(&graph)?;
            let req = MergeRequest {
                pairs: vec![MergePair { alpha: load_preaction(&g, &alpha)?, beta: load_preaction(&g, &beta)? }],
                e0: edge(&g, &e0)?,
                m: text::parse_word(&g, &m)?,
                m_prime: text::parse_word(&g, &m_prime)?,
            };
            let res = merge(&req)?;
            if trace || std::env::var("GBS_TRACE").is_ok_and(|v| v == "1") {
                for line in &res.trace {
                    eprintln!("trace: {line}");
                }
            }
            check(&req, &res)?;
            let ext = &res.extensions[0];
            let _ = writeln!(out, "word={}", res.word.display(&g));
            let _ = writeln!(out, "bridge={}", res.bridge.display(&g));
            let _ = writeln!(out, "x0={}\ny0={}\nbeta_shift={}", ext.x0, ext.y0, ext.beta_shift);
            let gamma = text::preaction_to_text(&ext.gamma);
            match dest {
                Some(path) => std::fs::write(&path, gamma).map_err(|source| CliError::Io { path, source })?,
                None => {
                    out.push('\n');
                    out.push_str(&gamma);
                }
            }
        }
        Command::Ball { graph, preaction, radius, dot } => {
            let g = load_graph(&graph)?;
            let p = load_preaction(&g, &preaction)?;
            let b = schreier_ball(&p, &base(&p)?, radius);
            if dot {
                out = b.to_dot(&g);
            } else {
                let _ = writeln!(out, "radius={}\npoints={}\nedges={}", b.radius, b.points.len(), b.edges.len());
            }
        }
        Command::Witness { graph, mut rest } => {
            let g = load_graph(&graph)?;
            let r = rest.pop().expect("clap enforces at least three values");
            let radius: usize = r.parse().map_err(|_| CliError::Usage(format!("bad radius `{r}`")))?;
            if rest.len() % 2 != 0 {
                return Err(CliError::Usage(format!("expected an even number of ball files, got {}", rest.len())));
            }
            let balls = rest.iter().map(|f| load_preaction(&g, Path::new(f))).collect::<Result<Vec<_>>>()?;
            let w = transitivity_witness(&balls, radius)?;
            let _ = writeln!(out, "word={}\ne0={}", w.word.display(&g), g.edge_name(w.e0));
            for (i, t) in w.targets.iter().enumerate() {
                let _ = writeln!(out, "target{i}={t}");
            }
        }
        Command::Piece { graph, vertex: v, n } => {
            let g = load_graph(&graph)?;
            let v = vertex(&g, &v)?;
            let _ = writeln!(out, "piece={}", piece_topology(&g, v, &size(&n)?)?);
        }
        Command::Kernel { graph } => {
            let g = load_graph(&graph)?;
            let k = kernel_description(&g)?;
            let _ = writeln!(out, "class={}\nkernel={}", k.class, k.text);
        }
        Command::Evaluate { graph, preaction, word, point: at } => {
            let g = load_graph(&graph)?;
            let p = load_preaction(&g, &preaction)?;
            let x = match at {
                Some(s) => point(&s)?,
                None => base(&p)?,
            };
            let w = text::parse_word(&g, &word)?;
            match p.evaluate(&x, &w) {
                Some(y) => {
                    let _ = writeln!(out, "point={y}");
                }
                None => return Err(CliError::Violation(format!("{} is undefined at {x}", w.display(&g)))),
            }
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error: kind={} msg={msg}", e.kind());
            ExitCode::from(e.exit_code())
        }
    }
}
