//! Kirchhoff polynomials: Ψ_G = Σ_T Π_{e∉T} t_e over spanning trees T.
//!
//! The recursion carries a pair of weights per edge, `p` for "edge outside
//! the tree" and `q` for "edge in the tree" (initially `t_e` and `1`), which
//! lets series and parallel classes collapse into a single edge before any
//! branching happens.

use std::collections::{BTreeSet, HashMap};

use crate::graph::{GraphError, Multigraph, SourceTerminalGraph};
use crate::poly::Polynomial;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KirchhoffResult {
    pub polynomial: Polynomial,
    pub graph_loop_number: usize,
}

/// Ψ_G together with the loop number of `g`.
pub fn kirchhoff(g: &Multigraph) -> KirchhoffResult {
    KirchhoffResult { polynomial: kirchhoff_polynomial(g), graph_loop_number: g.loop_number() }
}

/// Ψ_G; zero for a disconnected graph.
pub fn kirchhoff_polynomial(g: &Multigraph) -> Polynomial {
    if !g.is_connected() {
        return Polynomial::zero();
    }
    let idx: HashMap<&str, usize> = g.vertices().iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let edges = g
        .edges()
        .iter()
        .map(|e| WEdge {
            a: idx[e.ends.0.as_str()],
            b: idx[e.ends.1.as_str()],
            p: Polynomial::var(&e.id),
            q: Polynomial::one(),
        })
        .collect();
    reduce(Work { vertices: (0..g.num_vertices()).collect(), edges })
}

/// Ψ of the graph with source and terminal identified.
pub fn breaker(h: &SourceTerminalGraph) -> Polynomial {
    kirchhoff_polynomial(&h.identified())
}

/// Ψ of `g` with each part merged to a single vertex.
pub fn identified_kirchhoff<S: AsRef<str>>(g: &Multigraph, parts: &[Vec<S>]) -> Result<Polynomial, GraphError> {
    Ok(kirchhoff_polynomial(&g.identify_vertices(parts)?))
}

#[derive(Clone)]
struct WEdge {
    a: usize,
    b: usize,
    p: Polynomial,
    q: Polynomial,
}

#[derive(Clone)]
struct Work {
    vertices: BTreeSet<usize>,
    edges: Vec<WEdge>,
}

impl Work {
    fn contract(&mut self, k: usize) {
        let e = self.edges.swap_remove(k);
        let (keep, drop) = (e.a.min(e.b), e.a.max(e.b));
        self.vertices.remove(&drop);
        for f in &mut self.edges {
            if f.a == drop {
                f.a = keep;
            }
            if f.b == drop {
                f.b = keep;
            }
        }
    }

    fn is_bridge(&self, k: usize) -> bool {
        let (a, b) = (self.edges[k].a, self.edges[k].b);
        if a == b {
            return false;
        }
        // search for b from a without edge k
        let mut seen = BTreeSet::from([a]);
        let mut stack = vec![a];
        while let Some(v) = stack.pop() {
            for (j, f) in self.edges.iter().enumerate() {
                if j == k {
                    continue;
                }
                let w = if f.a == v {
                    f.b
                } else if f.b == v {
                    f.a
                } else {
                    continue;
                };
                if w == b {
                    return false;
                }
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        true
    }

    /// Applies one reduction, multiplying `factor` as needed.
    fn step(&mut self, factor: &mut Polynomial) -> bool {
        if let Some(k) = self.edges.iter().position(|e| e.a == e.b) {
            let e = self.edges.swap_remove(k);
            *factor = &*factor * &e.p;
            return true;
        }
        for i in 0..self.edges.len() {
            for j in i + 1..self.edges.len() {
                let (e, f) = (&self.edges[i], &self.edges[j]);
                if (e.a, e.b) == (f.a, f.b) || (e.a, e.b) == (f.b, f.a) {
                    let p = &e.p * &f.p;
                    let q = &(&e.p * &f.q) + &(&e.q * &f.p);
                    self.edges.swap_remove(j);
                    self.edges[i].p = p;
                    self.edges[i].q = q;
                    return true;
                }
            }
        }
        let series = self.vertices.iter().copied().find_map(|v| {
            let inc: Vec<usize> = (0..self.edges.len()).filter(|&k| self.edges[k].a == v || self.edges[k].b == v).collect();
            (inc.len() == 2).then(|| (v, inc[0], inc[1]))
        });
        if let Some((v, i, j)) = series {
            let (e, f) = (&self.edges[i], &self.edges[j]);
            let merged = WEdge {
                a: if e.a == v { e.b } else { e.a },
                b: if f.a == v { f.b } else { f.a },
                p: &(&e.p * &f.q) + &(&e.q * &f.p),
                q: &e.q * &f.q,
            };
            self.edges[i] = merged;
            self.edges.swap_remove(j);
            self.vertices.remove(&v);
            return true;
        }
        if let Some(k) = (0..self.edges.len()).find(|&k| self.is_bridge(k)) {
            *factor = &*factor * &self.edges[k].q;
            self.contract(k);
            return true;
        }
        false
    }
}

/// Ψ of a connected weighted graph.
fn reduce(mut w: Work) -> Polynomial {
    let mut factor = Polynomial::one();
    while w.step(&mut factor) {}
    if w.edges.is_empty() {
        return factor;
    }
    // no bridges remain, so deletion keeps the graph connected
    let mut deleted = w.clone();
    let e = deleted.edges.swap_remove(0);
    let mut contracted = w;
    contracted.contract(0);
    let sum = &(&e.p * &reduce(deleted)) + &(&e.q * &reduce(contracted));
    &factor * &sum
}

/// Block decomposition of Ψ_G.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockFactorization {
    /// One entry per biconnected component (sorted edge ids, its Ψ).
    pub blocks: Vec<(Vec<String>, Polynomial)>,
    pub self_loops: Vec<String>,
}

impl BlockFactorization {
    pub fn product(&self) -> Polynomial {
        let mut acc = Polynomial::one();
        for (_, p) in &self.blocks {
            acc = &acc * p;
        }
        for l in &self.self_loops {
            acc = &acc * &Polynomial::var(l);
        }
        acc
    }
}

pub fn factor_by_blocks(g: &Multigraph) -> Result<BlockFactorization, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let c = g.connectivity_suite();
    let blocks = c
        .biconnected_components
        .into_iter()
        .map(|edges| {
            let poly = kirchhoff_polynomial(&g.edge_subgraph(&edges).expect("block edges belong to g"));
            (edges, poly)
        })
        .collect();
    Ok(BlockFactorization { blocks, self_loops: c.self_loops })
}

/// Structural reason why Ψ and Ψ̂ of a source-terminal graph might share a
/// factor. When none exists the two polynomials are coprime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CommonFactorObstruction {
    SelfLoop(String),
    /// A cyclic block meeting the rest of the graph at `cut_vertex` only and
    /// containing neither terminal except possibly as that cut vertex.
    LeafBlock { edges: Vec<String>, cut_vertex: String },
}

pub fn common_factor_obstruction(h: &SourceTerminalGraph) -> Option<CommonFactorObstruction> {
    let g = h.graph();
    let c = g.connectivity_suite();
    if let Some(l) = c.self_loops.first() {
        return Some(CommonFactorObstruction::SelfLoop(l.clone()));
    }
    let cuts: BTreeSet<&str> = c.cut_vertices.iter().map(String::as_str).collect();
    for block in &c.biconnected_components {
        if block.len() < 2 {
            continue;
        }
        let verts: BTreeSet<&str> = block
            .iter()
            .flat_map(|id| {
                let e = g.edge(id).expect("block edge");
                [e.ends.0.as_str(), e.ends.1.as_str()]
            })
            .collect();
        let block_cuts: Vec<&str> = verts.iter().copied().filter(|v| cuts.contains(v)).collect();
        if block_cuts.len() != 1 {
            continue;
        }
        let cut = block_cuts[0];
        let clear = [h.source(), h.terminal()].iter().all(|t| !verts.contains(t) || *t == cut);
        if clear {
            return Some(CommonFactorObstruction::LeafBlock { edges: block.clone(), cut_vertex: cut.to_string() });
        }
    }
    None
}
