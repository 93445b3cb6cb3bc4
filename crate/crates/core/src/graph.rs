//! Multigraphs with labelled edges, and the deletion / contraction /
//! connectivity primitives everything else is built on.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num::{BigInt, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph has no vertices")]
    Empty,
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("cannot contract self-loop `{0}`")]
    SelfLoopContraction(String),
    #[error("vertex `{0}` appears in more than one part")]
    OverlappingParts(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("source and terminal must be distinct (both `{0}`)")]
    SourceEqualsTerminal(String),
}

/// A labelled edge; `ends` is an unordered pair, equal for a self-loop.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub id: String,
    pub ends: (String, String),
}

impl Edge {
    pub fn new(id: impl Into<String>, a: impl Into<String>, b: impl Into<String>) -> Edge {
        Edge { id: id.into(), ends: (a.into(), b.into()) }
    }

    pub fn is_self_loop(&self) -> bool {
        self.ends.0 == self.ends.1
    }

    pub fn touches(&self, v: &str) -> bool {
        self.ends.0 == v || self.ends.1 == v
    }

    /// The endpoint opposite `v` (or `v` itself for a self-loop).
    pub fn other(&self, v: &str) -> &str {
        if self.ends.0 == v {
            &self.ends.1
        } else {
            &self.ends.0
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeClass {
    SelfLoop,
    Bridge,
    TreeComplement,
    Regular,
}

impl fmt::Display for EdgeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EdgeClass::SelfLoop => "self-loop",
            EdgeClass::Bridge => "bridge",
            EdgeClass::TreeComplement => "tree-complement",
            EdgeClass::Regular => "regular",
        };
        f.write_str(s)
    }
}

/// Output of [`Multigraph::connectivity_suite`]. Vertex and edge lists are
/// sorted; `biconnected_components` together with `self_loops` partition the
/// edge set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connectivity {
    pub components: Vec<Vec<String>>,
    pub bridges: Vec<String>,
    pub self_loops: Vec<String>,
    pub cut_vertices: Vec<String>,
    pub biconnected_components: Vec<Vec<String>>,
    pub two_edge_cuts: Vec<(String, String)>,
}

/// Undirected multigraph; self-loops and parallel edges allowed, at least one vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multigraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
}

impl Multigraph {
    pub fn new<V, S>(vertices: V, edges: Vec<Edge>) -> Result<Multigraph, GraphError>
    where
        V: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        if vertices.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if !seen.insert(v.as_str()) {
                return Err(GraphError::DuplicateVertex(v.clone()));
            }
        }
        let mut ids = BTreeSet::new();
        for e in &edges {
            if !ids.insert(e.id.as_str()) {
                return Err(GraphError::DuplicateEdge(e.id.clone()));
            }
            for end in [&e.ends.0, &e.ends.1] {
                if !seen.contains(end.as_str()) {
                    return Err(GraphError::UnknownVertex(end.clone()));
                }
            }
        }
        Ok(Multigraph { vertices, edges })
    }

    /// Builds a graph whose vertex set is exactly the set of endpoints, in
    /// order of first appearance.
    pub fn from_edges<I, E, A, B>(edges: I) -> Result<Multigraph, GraphError>
    where
        I: IntoIterator<Item = (E, A, B)>,
        E: Into<String>,
        A: Into<String>,
        B: Into<String>,
    {
        let edges: Vec<Edge> = edges.into_iter().map(|(e, a, b)| Edge::new(e, a, b)).collect();
        let mut vertices: Vec<String> = Vec::new();
        let mut seen = BTreeSet::new();
        for e in &edges {
            for end in [&e.ends.0, &e.ends.1] {
                if seen.insert(end.clone()) {
                    vertices.push(end.clone());
                }
            }
        }
        Multigraph::new(vertices, edges)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_ids(&self) -> Vec<String> {
        self.edges.iter().map(|e| e.id.clone()).collect()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn has_edge(&self, id: &str) -> bool {
        self.edge(id).is_some()
    }

    pub fn has_vertex(&self, v: &str) -> bool {
        self.vertices.iter().any(|w| w == v)
    }

    fn require_edge(&self, id: &str) -> Result<&Edge, GraphError> {
        self.edge(id).ok_or_else(|| GraphError::UnknownEdge(id.to_string()))
    }

    /// Degree of `v`; a self-loop counts twice.
    pub fn degree(&self, v: &str) -> usize {
        self.edges
            .iter()
            .map(|e| usize::from(e.ends.0 == v) + usize::from(e.ends.1 == v))
            .sum()
    }

    pub fn incident_edges<'a>(&'a self, v: &'a str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| e.touches(v))
    }

    pub fn delete_edge(&self, id: &str) -> Result<Multigraph, GraphError> {
        self.require_edge(id)?;
        Ok(Multigraph {
            vertices: self.vertices.clone(),
            edges: self.edges.iter().filter(|e| e.id != id).cloned().collect(),
        })
    }

    pub fn delete_edges<S: AsRef<str>>(&self, ids: &[S]) -> Result<Multigraph, GraphError> {
        let mut g = self.clone();
        for id in ids {
            g = g.delete_edge(id.as_ref())?;
        }
        Ok(g)
    }

    /// Contracts a non-loop edge. The merged vertex keeps the
    /// lexicographically smaller endpoint name.
    pub fn contract_edge(&self, id: &str) -> Result<Multigraph, GraphError> {
        let e = self.require_edge(id)?;
        if e.is_self_loop() {
            return Err(GraphError::SelfLoopContraction(id.to_string()));
        }
        let (a, b) = (&e.ends.0, &e.ends.1);
        let (keep, drop) = if a < b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
        let rename = |v: &String| if *v == drop { keep.clone() } else { v.clone() };
        Ok(Multigraph {
            vertices: self.vertices.iter().filter(|v| **v != drop).cloned().collect(),
            edges: self
                .edges
                .iter()
                .filter(|f| f.id != id)
                .map(|f| Edge { id: f.id.clone(), ends: (rename(&f.ends.0), rename(&f.ends.1)) })
                .collect(),
        })
    }

    /// Merges every part to a single vertex named by its smallest member.
    pub fn identify_vertices<S: AsRef<str>>(&self, parts: &[Vec<S>]) -> Result<Multigraph, GraphError> {
        let mut target: HashMap<String, String> = HashMap::new();
        let mut owner: HashMap<&str, usize> = HashMap::new();
        for (k, part) in parts.iter().enumerate() {
            let Some(rep) = part.iter().map(|v| v.as_ref()).min() else { continue };
            for v in part {
                let v = v.as_ref();
                if !self.has_vertex(v) {
                    return Err(GraphError::UnknownVertex(v.to_string()));
                }
                if *owner.entry(v).or_insert(k) != k {
                    return Err(GraphError::OverlappingParts(v.to_string()));
                }
                target.insert(v.to_string(), rep.to_string());
            }
        }
        Ok(self.map_vertices(|v| target.get(v).cloned().unwrap_or_else(|| v.to_string())))
    }

    /// Renames vertices by `f`; vertices mapped to the same name are merged.
    pub fn map_vertices<F: Fn(&str) -> String>(&self, f: F) -> Multigraph {
        let mut vertices = Vec::new();
        let mut seen = BTreeSet::new();
        for v in &self.vertices {
            let w = f(v);
            if seen.insert(w.clone()) {
                vertices.push(w);
            }
        }
        let edges = self
            .edges
            .iter()
            .map(|e| Edge { id: e.id.clone(), ends: (f(&e.ends.0), f(&e.ends.1)) })
            .collect();
        Multigraph { vertices, edges }
    }

    /// Renames edges by `f`. The caller must keep names distinct.
    pub fn map_edges<F: Fn(&str) -> String>(&self, f: F) -> Result<Multigraph, GraphError> {
        let edges = self.edges.iter().map(|e| Edge { id: f(&e.id), ends: e.ends.clone() }).collect();
        Multigraph::new(self.vertices.clone(), edges)
    }

    /// Adds an edge; its endpoints are created when missing.
    pub fn add_edge(&self, edge: Edge) -> Result<Multigraph, GraphError> {
        if self.has_edge(&edge.id) {
            return Err(GraphError::DuplicateEdge(edge.id));
        }
        let mut g = self.clone();
        for end in [&edge.ends.0, &edge.ends.1] {
            if !g.has_vertex(end) {
                g.vertices.push(end.clone());
            }
        }
        g.edges.push(edge);
        Ok(g)
    }

    /// Subgraph spanned by the given edges (vertex set = their endpoints).
    pub fn edge_subgraph<S: AsRef<str>>(&self, ids: &[S]) -> Result<Multigraph, GraphError> {
        let mut edges = Vec::new();
        for id in ids {
            edges.push(self.require_edge(id.as_ref())?.clone());
        }
        let keep: BTreeSet<&str> = edges.iter().flat_map(|e| [e.ends.0.as_str(), e.ends.1.as_str()]).collect();
        let vertices: Vec<String> = self.vertices.iter().filter(|v| keep.contains(v.as_str())).cloned().collect();
        Multigraph::new(vertices, edges)
    }

    fn index(&self) -> HashMap<&str, usize> {
        self.vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect()
    }

    /// Endpoint indices of every edge.
    fn edge_indices(&self) -> Vec<(usize, usize)> {
        let idx = self.index();
        self.edges.iter().map(|e| (idx[e.ends.0.as_str()], idx[e.ends.1.as_str()])).collect()
    }

    fn component_labels(&self, skip: &[usize]) -> (usize, Vec<usize>) {
        let n = self.vertices.len();
        let mut uf = UnionFind::new(n);
        for (k, &(a, b)) in self.edge_indices().iter().enumerate() {
            if !skip.contains(&k) {
                uf.union(a, b);
            }
        }
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        for v in 0..n {
            let r = uf.find(v);
            if label[r] == usize::MAX {
                label[r] = count;
                count += 1;
            }
            label[v] = label[r];
        }
        (count, label)
    }

    pub fn num_components(&self) -> usize {
        self.component_labels(&[]).0
    }

    pub fn is_connected(&self) -> bool {
        self.num_components() == 1
    }

    pub fn components(&self) -> Vec<Vec<String>> {
        let (count, label) = self.component_labels(&[]);
        let mut out = vec![Vec::new(); count];
        for (v, &l) in label.iter().enumerate() {
            out[l].push(self.vertices[v].clone());
        }
        for c in &mut out {
            c.sort();
        }
        out.sort();
        out
    }

    /// Dimension of the cycle space: |E| - |V| + #components.
    pub fn loop_number(&self) -> usize {
        self.edges.len() + self.num_components() - self.vertices.len()
    }

    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.edges.len() + 1 == self.vertices.len()
    }

    pub fn is_bridge(&self, id: &str) -> Result<bool, GraphError> {
        let k = self.edges.iter().position(|e| e.id == id).ok_or_else(|| GraphError::UnknownEdge(id.to_string()))?;
        if self.edges[k].is_self_loop() {
            return Ok(false);
        }
        Ok(self.component_labels(&[k]).0 > self.num_components())
    }

    pub fn classify_edge(&self, id: &str) -> Result<EdgeClass, GraphError> {
        let e = self.require_edge(id)?;
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        if e.is_self_loop() {
            return Ok(EdgeClass::SelfLoop);
        }
        if self.is_bridge(id)? {
            return Ok(EdgeClass::Bridge);
        }
        if self.delete_edge(id)?.is_tree() {
            return Ok(EdgeClass::TreeComplement);
        }
        Ok(EdgeClass::Regular)
    }

    pub fn connectivity_suite(&self) -> Connectivity {
        let ends = self.edge_indices();
        let n = self.vertices.len();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (k, &(a, b)) in ends.iter().enumerate() {
            if a != b {
                adj[a].push((b, k));
                adj[b].push((a, k));
            }
        }
        let mut tarjan = Tarjan {
            adj: &adj,
            disc: vec![usize::MAX; n],
            low: vec![0; n],
            time: 0,
            stack: Vec::new(),
            blocks: Vec::new(),
            cut: vec![false; n],
            bridges: Vec::new(),
        };
        for root in 0..n {
            if tarjan.disc[root] == usize::MAX {
                tarjan.visit(root, usize::MAX);
            }
        }
        let mut blocks: Vec<Vec<String>> = tarjan
            .blocks
            .iter()
            .map(|b| {
                let mut v: Vec<String> = b.iter().map(|&k| self.edges[k].id.clone()).collect();
                v.sort();
                v
            })
            .collect();
        blocks.sort();
        let mut bridges: Vec<String> = tarjan.bridges.iter().map(|&k| self.edges[k].id.clone()).collect();
        bridges.sort();
        let mut self_loops: Vec<String> = self.edges.iter().filter(|e| e.is_self_loop()).map(|e| e.id.clone()).collect();
        self_loops.sort();
        let mut cut_vertices: Vec<String> =
            (0..n).filter(|&v| tarjan.cut[v]).map(|v| self.vertices[v].clone()).collect();
        cut_vertices.sort();

        let base = self.num_components();
        let candidates: Vec<usize> = (0..ends.len())
            .filter(|&k| ends[k].0 != ends[k].1 && !tarjan.bridges.contains(&k))
            .collect();
        let mut two_edge_cuts = Vec::new();
        for (i, &a) in candidates.iter().enumerate() {
            for &b in &candidates[i + 1..] {
                if self.component_labels(&[a, b]).0 > base {
                    let (x, y) = (self.edges[a].id.clone(), self.edges[b].id.clone());
                    two_edge_cuts.push(if x <= y { (x, y) } else { (y, x) });
                }
            }
        }
        two_edge_cuts.sort();

        Connectivity {
            components: self.components(),
            bridges,
            self_loops,
            cut_vertices,
            biconnected_components: blocks,
            two_edge_cuts,
        }
    }

    /// Number of spanning trees (of a connected graph; 0 otherwise), via a
    /// fraction-free determinant of a reduced Laplacian.
    pub fn spanning_tree_count(&self) -> BigInt {
        if !self.is_connected() {
            return BigInt::zero();
        }
        let n = self.vertices.len();
        if n == 1 {
            return BigInt::from(1);
        }
        let mut lap = vec![vec![BigInt::zero(); n]; n];
        for &(a, b) in &self.edge_indices() {
            if a != b {
                lap[a][a] += 1;
                lap[b][b] += 1;
                lap[a][b] -= 1;
                lap[b][a] -= 1;
            }
        }
        let minor: Vec<Vec<BigInt>> = lap[1..].iter().map(|row| row[1..].to_vec()).collect();
        bareiss_determinant(minor).abs()
    }
}

struct Tarjan<'a> {
    adj: &'a [Vec<(usize, usize)>],
    disc: Vec<usize>,
    low: Vec<usize>,
    time: usize,
    stack: Vec<usize>,
    blocks: Vec<Vec<usize>>,
    cut: Vec<bool>,
    bridges: Vec<usize>,
}

impl Tarjan<'_> {
    fn visit(&mut self, v: usize, parent_edge: usize) {
        self.disc[v] = self.time;
        self.low[v] = self.time;
        self.time += 1;
        let mut children = 0;
        for &(w, k) in &self.adj[v] {
            if k == parent_edge {
                continue;
            }
            if self.disc[w] == usize::MAX {
                children += 1;
                self.stack.push(k);
                self.visit(w, k);
                self.low[v] = self.low[v].min(self.low[w]);
                if self.low[w] >= self.disc[v] {
                    if parent_edge != usize::MAX {
                        self.cut[v] = true;
                    }
                    let mut block = Vec::new();
                    while let Some(f) = self.stack.pop() {
                        block.push(f);
                        if f == k {
                            break;
                        }
                    }
                    self.blocks.push(block);
                }
                if self.low[w] > self.disc[v] {
                    self.bridges.push(k);
                }
            } else if self.disc[w] < self.disc[v] {
                self.stack.push(k);
                self.low[v] = self.low[v].min(self.disc[w]);
            }
        }
        if parent_edge == usize::MAX && children > 1 {
            self.cut[v] = true;
        }
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Exact determinant by Bareiss fraction-free elimination.
pub fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    &m[n - 1][n - 1] * sign
}

/// A multigraph with two distinct marked vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceTerminalGraph {
    graph: Multigraph,
    source: String,
    terminal: String,
}

impl SourceTerminalGraph {
    pub fn new(graph: Multigraph, source: impl Into<String>, terminal: impl Into<String>) -> Result<Self, GraphError> {
        let (source, terminal) = (source.into(), terminal.into());
        for v in [&source, &terminal] {
            if !graph.has_vertex(v) {
                return Err(GraphError::UnknownVertex(v.clone()));
            }
        }
        if source == terminal {
            return Err(GraphError::SourceEqualsTerminal(source));
        }
        Ok(SourceTerminalGraph { graph, source, terminal })
    }

    pub fn graph(&self) -> &Multigraph {
        &self.graph
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn terminal(&self) -> &str {
        &self.terminal
    }

    /// The graph with source and terminal identified.
    pub fn identified(&self) -> Multigraph {
        self.graph
            .identify_vertices(&[vec![self.source.clone(), self.terminal.clone()]])
            .expect("source and terminal are distinct vertices")
    }

    pub fn into_parts(self) -> (Multigraph, String, String) {
        (self.graph, self.source, self.terminal)
    }
}
