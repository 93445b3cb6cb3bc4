use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use symanzik::conditions::{check_cond1, check_s, check_t, preprocess, verify_certificate, Status, Verdict};
use symanzik::graph::EdgeClass;
use symanzik::kirchhoff::{breaker, kirchhoff_polynomial};
use symanzik::random::DEFAULT_SEED;
use symanzik::spbuild::{cycle, path, realize, replace_edge, wheel};
use symanzik_cli::certjson::CertificateDocument;
use symanzik_cli::document::GraphDocument;
use symanzik_cli::dot::to_dot;
use symanzik_cli::sexpr::parse_sp;
use symanzik_cli::survey::{family_graphs, run_survey, write_csv, Family};

/// Kirchhoff polynomials and Jacobian-ideal conditions on multigraphs.
///
/// Exit codes for `check` and `verify`: 0 holds/valid, 1 fails/invalid,
/// 2 not applicable, 3 error. Other commands exit 0 or 3.
#[derive(Parser)]
#[command(name = "symanzik", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print Ψ, and Ψ̂ on a second line when the graph has a source and terminal.
    Kirkpoly { file: PathBuf },
    /// Decide condition 1, S or T.
    Check {
        file: PathBuf,
        #[arg(long)]
        edge: Option<String>,
        #[arg(long, value_enum, default_value_t = Which::Cond1)]
        which: Which,
        /// Print the certificate as JSON when the condition holds.
        #[arg(long)]
        certificate: bool,
        /// Shrink the graph first (condition 1 on regular edges only).
        #[arg(long)]
        preprocess: bool,
    },
    /// Check a certificate JSON file against a graph.
    Verify { file: PathBuf, certificate: PathBuf },
    /// Emit a graph document.
    Build {
        #[command(subcommand)]
        kind: BuildKind,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Evaluate every edge of a family of graphs and write CSV.
    Survey {
        #[command(subcommand)]
        family: FamilyArg,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
        /// Worker threads; 0 means one per core.
        #[arg(long, global = true, default_value_t = 0)]
        threads: usize,
    },
    /// Print the graph in DOT format.
    ExportDot { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Cond1,
    S,
    T,
}

#[derive(Subcommand)]
enum BuildKind {
    /// Wheel with hub h, rim edges r1..rn and spokes s1..sn.
    Wheel { n: usize },
    /// Path with edges p1..pn from s to t.
    Path { n: usize },
    /// Cycle made of paths a1..an and b1..bm between s and t.
    Cycle { n: usize, m: usize },
    /// Realize a decomposition expression such as "(P (S x y) z)".
    Sp { expr: String },
    /// Realize the dual of a decomposition expression.
    Dual { expr: String },
    /// Replace an edge of BASE by the marked graph PIECE.
    Replace { base: PathBuf, edge: String, piece: PathBuf },
}

#[derive(Subcommand)]
enum FamilyArg {
    Wheels { min: usize, max: usize },
    /// All series-parallel graphs with at most MAX_EDGES edges.
    Sp { max_edges: usize },
    Random {
        count: usize,
        max_edges: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Graph documents or directories of them.
    Files { paths: Vec<PathBuf> },
}

fn load(path: &Path) -> Result<GraphDocument> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    GraphDocument::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn exit_for(status: &Status) -> ExitCode {
    match status {
        Status::Holds => ExitCode::from(0),
        Status::Fails => ExitCode::from(1),
        Status::NotApplicable(_) => ExitCode::from(2),
    }
}

fn not_applicable(why: &str) -> Verdict {
    Verdict { status: Status::NotApplicable(why.into()), certificate: None, edge_class: None }
}

fn check(file: &Path, edge: Option<String>, which: Which, certificate: bool, pre: bool) -> Result<ExitCode> {
    let doc = load(file)?;
    let mut g = doc.graph()?;
    let marked = doc.marked()?;
    let need_edge = || edge.clone().context("--edge is required for this condition");
    let (label, verdict) = match which {
        Which::Cond1 => {
            let mut e = need_edge()?;
            if pre && g.classify_edge(&e)? == EdgeClass::Regular {
                let reduced = preprocess(&g, &e)?;
                for step in &reduced.steps {
                    println!("preprocess: {step}");
                }
                g = reduced.graph;
                e = reduced.edge;
            }
            (format!("cond1({e})"), check_cond1(&g, &e)?)
        }
        Which::S => {
            let e = need_edge()?;
            let v = match &marked {
                Some(h) => check_s(h, &e)?,
                None => not_applicable("graph has no source and terminal"),
            };
            (format!("s({e})"), v)
        }
        Which::T => {
            let v = match &marked {
                Some(h) => check_t(h)?,
                None => not_applicable("graph has no source and terminal"),
            };
            ("t".to_string(), v)
        }
    };
    match verdict.edge_class {
        Some(class) => println!("{label}: {} [{class}]", verdict.status),
        None => println!("{label}: {}", verdict.status),
    }
    if certificate {
        if let Some(c) = &verdict.certificate {
            println!("{}", CertificateDocument::from_certificate(c).to_json());
        }
    }
    Ok(exit_for(&verdict.status))
}

fn verify(file: &Path, cert: &Path) -> Result<ExitCode> {
    let doc = load(file)?;
    let text = fs::read_to_string(cert).with_context(|| format!("reading {}", cert.display()))?;
    let certificate = CertificateDocument::parse(&text)?.certificate()?;
    let terminals = doc.source.as_deref().zip(doc.terminal.as_deref());
    let ok = verify_certificate(&doc.graph()?, terminals, &certificate)?;
    println!("{}", if ok { "valid" } else { "invalid" });
    Ok(ExitCode::from(if ok { 0 } else { 1 }))
}

fn build(kind: BuildKind) -> Result<GraphDocument> {
    Ok(match kind {
        BuildKind::Wheel { n } => GraphDocument::from_graph(&wheel(n)?),
        BuildKind::Path { n } => GraphDocument::from_marked(&path(n)?),
        BuildKind::Cycle { n, m } => GraphDocument::from_marked(&cycle(n, m)?),
        BuildKind::Sp { expr } => GraphDocument::from_marked(&realize(&parse_sp(&expr)?)?),
        BuildKind::Dual { expr } => GraphDocument::from_marked(&realize(&parse_sp(&expr)?.dual())?),
        BuildKind::Replace { base, edge, piece } => {
            let base = load(&base)?;
            let Some(piece) = load(&piece)?.marked()? else { bail!("the piece needs a source and terminal") };
            let g = replace_edge(&base.graph()?, &edge, &piece)?;
            let mut doc = GraphDocument::from_graph(&g);
            if let (Some(s), Some(t)) = (&base.source, &base.terminal) {
                if g.has_vertex(s) && g.has_vertex(t) {
                    doc.source = Some(s.clone());
                    doc.terminal = Some(t.clone());
                }
            }
            doc
        }
    })
}

fn survey(family: FamilyArg, out: Option<&Path>, threads: usize) -> Result<()> {
    let family = match family {
        FamilyArg::Wheels { min, max } => Family::Wheels { min, max },
        FamilyArg::Sp { max_edges } => Family::SpEnumeration { max_edges },
        FamilyArg::Random { count, max_edges, seed } => {
            if max_edges == 0 {
                bail!("random graphs need at least one edge");
            }
            Family::Random { count, max_edges, seed }
        }
        FamilyArg::Files { paths } => Family::Files(paths),
    };
    let rows = run_survey(&family_graphs(&family)?, threads)?;
    let mut buf = Vec::new();
    write_csv(&mut buf, &rows)?;
    emit(std::str::from_utf8(&buf)?, out)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Kirkpoly { file } => {
            let doc = load(&file)?;
            println!("{}", kirchhoff_polynomial(&doc.graph()?));
            if let Some(h) = doc.marked()? {
                println!("{}", breaker(&h));
            }
        }
        Command::Check { file, edge, which, certificate, preprocess } => {
            return check(&file, edge, which, certificate, preprocess)
        }
        Command::Verify { file, certificate } => return verify(&file, &certificate),
        Command::Build { kind, out } => emit(&(build(kind)?.to_json() + "\n"), out.as_deref())?,
        Command::Survey { family, out, threads } => survey(family, out.as_deref(), threads)?,
        Command::ExportDot { file } => print!("{}", to_dot(&load(&file)?.graph()?)),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    // clap's own exit code for usage errors (2) would collide with "not applicable"
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
