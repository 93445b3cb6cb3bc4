//! Batch evaluation of condition 1, S and T over graph families, one CSV row
//! per (graph, edge).

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use symanzik::conditions::{check_cond1, check_s, check_t, enumerate_sp_trees, verify_certificate, ConditionError, Status, Verdict};
use symanzik::graph::{Multigraph, SourceTerminalGraph};
use symanzik::random::{random_multigraph, seeded, GraphShape};
use symanzik::spbuild::{realize, wheel, SpError};
use thiserror::Error;

use crate::document::{DocumentError, GraphDocument};

pub const CSV_HEADER: [&str; 7] = ["graph_id", "edge_id", "edge_class", "cond1", "s", "t_of_graph", "wall_millis"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// Wheels `W_min..=W_max`.
    Wheels { min: usize, max: usize },
    /// Every series-parallel tree with at most `max_edges` leaves.
    SpEnumeration { max_edges: usize },
    /// `count` random connected multigraphs with at most `max_edges` edges.
    Random { count: usize, max_edges: usize, seed: u64 },
    /// Graph documents; directories contribute their `*.json` files.
    Files(Vec<PathBuf>),
}

#[derive(Debug, Error)]
pub enum SurveyError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Document { path: PathBuf, source: DocumentError },
    #[error(transparent)]
    Sp(#[from] SpError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

pub struct SurveyGraph {
    pub id: String,
    pub graph: Multigraph,
    pub marked: Option<SourceTerminalGraph>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyRow {
    pub graph_id: String,
    pub edge_id: String,
    pub edge_class: String,
    pub cond1: String,
    pub s: String,
    pub t_of_graph: String,
    pub wall_millis: u64,
}

fn json_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>, SurveyError> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let entries = fs::read_dir(p).map_err(|source| SurveyError::Io { path: p.clone(), source })?;
            let mut found: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "json"))
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

pub fn family_graphs(family: &Family) -> Result<Vec<SurveyGraph>, SurveyError> {
    let plain = |id: String, graph: Multigraph| SurveyGraph { id, graph, marked: None };
    let marked = |id: String, h: SourceTerminalGraph| SurveyGraph { id, graph: h.graph().clone(), marked: Some(h) };
    match family {
        Family::Wheels { min, max } => (*min..=*max).map(|n| Ok(plain(format!("W{n}"), wheel(n)?))).collect(),
        Family::SpEnumeration { max_edges } => enumerate_sp_trees(*max_edges)
            .into_iter()
            .map(|t| Ok(marked(t.to_string(), realize(&t)?)))
            .collect(),
        Family::Random { count, max_edges, seed } => {
            let mut rng = seeded(*seed);
            Ok((0..*count)
                .map(|i| plain(format!("random-{seed}-{i}"), random_multigraph(&mut rng, GraphShape::up_to(*max_edges))))
                .collect())
        }
        Family::Files(paths) => json_files(paths)?
            .into_iter()
            .map(|path| {
                let text = fs::read_to_string(&path).map_err(|source| SurveyError::Io { path: path.clone(), source })?;
                let doc_err = |source| SurveyError::Document { path: path.clone(), source };
                let doc = GraphDocument::parse(&text).map_err(doc_err)?;
                let id = path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
                let graph = doc.graph().map_err(|e| doc_err(e.into()))?;
                Ok(SurveyGraph { id, graph, marked: doc.marked().map_err(doc_err)? })
            })
            .collect(),
    }
}

/// Cell text for a verdict; Holds is only reported once its certificate
/// has been re-verified.
fn cell(g: &Multigraph, terminals: Option<(&str, &str)>, verdict: Result<Verdict, ConditionError>) -> String {
    match verdict {
        Err(e) => format!("error: {e}"),
        Ok(v) => match v.status {
            Status::Holds => match v.certificate.as_ref().map(|c| verify_certificate(g, terminals, c)) {
                Some(Ok(true)) => "holds".into(),
                _ => "error: certificate rejected".into(),
            },
            Status::Fails => "fails".into(),
            Status::NotApplicable(_) => "n/a".into(),
        },
    }
}

/// Evaluates every (graph, edge) pair on a pool of `threads` workers
/// (0 = one per core). Rows come back in family order, then edge order.
pub fn run_survey(graphs: &[SurveyGraph], threads: usize) -> Result<Vec<SurveyRow>, SurveyError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    let terminals = |sg: &SurveyGraph| sg.marked.as_ref().map(|h| (h.source().to_string(), h.terminal().to_string()));
    let rows = pool.install(|| {
        let t_cells: Vec<String> = graphs
            .par_iter()
            .map(|sg| match &sg.marked {
                Some(h) => cell(&sg.graph, Some((h.source(), h.terminal())), check_t(h)),
                None => "n/a".into(),
            })
            .collect();
        let jobs: Vec<(usize, String)> =
            graphs.iter().enumerate().flat_map(|(i, sg)| sg.graph.edge_ids().into_iter().map(move |e| (i, e))).collect();
        jobs.par_iter()
            .map(|(i, e)| {
                let sg = &graphs[*i];
                let started = Instant::now();
                let edge_class = sg.graph.classify_edge(e).map_or_else(|err| format!("error: {err}"), |c| c.to_string());
                let cond1 = cell(&sg.graph, None, check_cond1(&sg.graph, e));
                let ts = terminals(sg);
                let s = match &sg.marked {
                    Some(h) => cell(&sg.graph, ts.as_ref().map(|(a, b)| (a.as_str(), b.as_str())), check_s(h, e)),
                    None => "n/a".into(),
                };
                SurveyRow {
                    graph_id: sg.id.clone(),
                    edge_id: e.clone(),
                    edge_class,
                    cond1,
                    s,
                    t_of_graph: t_cells[*i].clone(),
                    wall_millis: started.elapsed().as_millis() as u64,
                }
            })
            .collect()
    });
    Ok(rows)
}

/// Writes the header and rows; an empty survey yields the header alone.
pub fn write_csv<W: Write>(out: W, rows: &[SurveyRow]) -> Result<(), SurveyError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
