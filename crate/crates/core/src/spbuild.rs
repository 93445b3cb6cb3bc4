//! Series-parallel construction: decomposition trees, joins, named families,
//! arc diagrams and edge replacement.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::graph::{Edge, GraphError, Multigraph, SourceTerminalGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpError {
    #[error("series and parallel nodes need at least two children")]
    Arity,
    #[error("edge id `{0}` occurs twice")]
    EdgeCollision(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("arcs `{0}` and `{1}` cross")]
    CrossingArcs(String, String),
    #[error("arc `{0}` does not span two spine positions")]
    InvalidArc(String),
    #[error("cannot replace self-loop `{0}`")]
    SelfLoop(String),
    #[error("tree is not built from restricted parallel joins and series joins")]
    NoArcDiagram,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Rooted decomposition tree; leaves are edge ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SPTree {
    Leaf(String),
    Series(Vec<SPTree>),
    Parallel(Vec<SPTree>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum JoinKind {
    Series,
    Parallel,
}

impl SPTree {
    pub fn leaf(id: impl Into<String>) -> SPTree {
        SPTree::Leaf(id.into())
    }

    pub fn series(children: Vec<SPTree>) -> Result<SPTree, SpError> {
        SPTree::Series(children).validated()
    }

    pub fn parallel(children: Vec<SPTree>) -> Result<SPTree, SpError> {
        SPTree::Parallel(children).validated()
    }

    /// Series chain of leaves.
    pub fn path<S: AsRef<str>>(ids: &[S]) -> SPTree {
        match ids {
            [one] => SPTree::leaf(one.as_ref()),
            _ => SPTree::Series(ids.iter().map(|i| SPTree::leaf(i.as_ref())).collect()),
        }
    }

    pub fn join(kind: JoinKind, children: Vec<SPTree>) -> Result<SPTree, SpError> {
        match kind {
            JoinKind::Series => SPTree::series(children),
            JoinKind::Parallel => SPTree::parallel(children),
        }
    }

    pub fn validated(self) -> Result<SPTree, SpError> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), SpError> {
        fn arity(t: &SPTree) -> Result<(), SpError> {
            match t {
                SPTree::Leaf(_) => Ok(()),
                SPTree::Series(c) | SPTree::Parallel(c) => {
                    if c.len() < 2 {
                        return Err(SpError::Arity);
                    }
                    c.iter().try_for_each(arity)
                }
            }
        }
        arity(self)?;
        let mut seen = BTreeSet::new();
        for l in self.leaves() {
            if !seen.insert(l.clone()) {
                return Err(SpError::EdgeCollision(l));
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> Option<JoinKind> {
        match self {
            SPTree::Leaf(_) => None,
            SPTree::Series(_) => Some(JoinKind::Series),
            SPTree::Parallel(_) => Some(JoinKind::Parallel),
        }
    }

    pub fn children(&self) -> &[SPTree] {
        match self {
            SPTree::Leaf(_) => &[],
            SPTree::Series(c) | SPTree::Parallel(c) => c,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, SPTree::Leaf(_))
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<String>) {
        match self {
            SPTree::Leaf(id) => out.push(id.clone()),
            SPTree::Series(c) | SPTree::Parallel(c) => c.iter().for_each(|t| t.collect_leaves(out)),
        }
    }

    pub fn num_edges(&self) -> usize {
        match self {
            SPTree::Leaf(_) => 1,
            SPTree::Series(c) | SPTree::Parallel(c) => c.iter().map(SPTree::num_edges).sum(),
        }
    }

    pub fn contains_leaf(&self, id: &str) -> bool {
        match self {
            SPTree::Leaf(l) => l == id,
            SPTree::Series(c) | SPTree::Parallel(c) => c.iter().any(|t| t.contains_leaf(id)),
        }
    }

    /// Swaps every series node with a parallel node.
    pub fn dual(&self) -> SPTree {
        match self {
            SPTree::Leaf(id) => SPTree::Leaf(id.clone()),
            SPTree::Series(c) => SPTree::Parallel(c.iter().map(SPTree::dual).collect()),
            SPTree::Parallel(c) => SPTree::Series(c.iter().map(SPTree::dual).collect()),
        }
    }

    /// Merges children of the same kind into their parent.
    pub fn flattened(&self) -> SPTree {
        match self {
            SPTree::Leaf(id) => SPTree::Leaf(id.clone()),
            SPTree::Series(c) | SPTree::Parallel(c) => {
                let kind = self.kind();
                let mut out = Vec::new();
                for child in c.iter().map(SPTree::flattened) {
                    if child.kind() == kind {
                        out.extend(child.children().iter().cloned());
                    } else {
                        out.push(child);
                    }
                }
                match kind {
                    Some(JoinKind::Series) => SPTree::Series(out),
                    _ => SPTree::Parallel(out),
                }
            }
        }
    }

    /// Renames every leaf through `f`.
    pub fn map_leaves<F: Fn(&str) -> String>(&self, f: F) -> SPTree {
        self.map_leaves_ref(&f)
    }

    fn map_leaves_ref(&self, f: &dyn Fn(&str) -> String) -> SPTree {
        match self {
            SPTree::Leaf(id) => SPTree::Leaf(f(id)),
            SPTree::Series(c) => SPTree::Series(c.iter().map(|t| t.map_leaves_ref(f)).collect()),
            SPTree::Parallel(c) => SPTree::Parallel(c.iter().map(|t| t.map_leaves_ref(f)).collect()),
        }
    }
}

impl fmt::Display for SPTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SPTree::Leaf(id) => write!(f, "{id}"),
            SPTree::Series(c) | SPTree::Parallel(c) => {
                write!(f, "({}", if matches!(self, SPTree::Series(_)) { "S" } else { "P" })?;
                for child in c {
                    write!(f, " {child}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Builds the source-terminal graph of a tree. Source and terminal are named
/// `s` and `t`; inner vertices `v1, v2, ...` in creation order.
pub fn realize(tree: &SPTree) -> Result<SourceTerminalGraph, SpError> {
    tree.validate()?;
    let mut edges = Vec::new();
    let mut counter = 0usize;
    fn go(t: &SPTree, s: &str, u: &str, counter: &mut usize, edges: &mut Vec<Edge>) {
        match t {
            SPTree::Leaf(id) => edges.push(Edge::new(id.clone(), s, u)),
            SPTree::Parallel(c) => c.iter().for_each(|child| go(child, s, u, counter, edges)),
            SPTree::Series(c) => {
                let mut prev = s.to_string();
                for (i, child) in c.iter().enumerate() {
                    let next = if i + 1 == c.len() {
                        u.to_string()
                    } else {
                        *counter += 1;
                        format!("v{counter}")
                    };
                    go(child, &prev, &next, counter, edges);
                    prev = next;
                }
            }
        }
    }
    go(tree, "s", "t", &mut counter, &mut edges);
    let mut vertices = vec!["s".to_string(), "t".to_string()];
    vertices.extend((1..=counter).map(|k| format!("v{k}")));
    Ok(SourceTerminalGraph::new(Multigraph::new(vertices, edges)?, "s", "t")?)
}

/// A name not in `taken`, formed by appending primes to `base`.
fn fresh_name(base: &str, taken: &BTreeSet<String>) -> String {
    let mut name = format!("{base}'");
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

fn check_disjoint_edges(a: &Multigraph, b: &Multigraph) -> Result<(), SpError> {
    let ids: BTreeSet<&str> = a.edges().iter().map(|e| e.id.as_str()).collect();
    match b.edges().iter().find(|e| ids.contains(e.id.as_str())) {
        Some(e) => Err(SpError::EdgeCollision(e.id.clone())),
        None => Ok(()),
    }
}

/// Disjoint union of `a` and `b` where the vertices of `b` listed in `glue`
/// are mapped onto vertices of `a`; the remaining vertices of `b` get fresh
/// names. Returns the union and the renaming applied to `b`.
fn glue(a: &Multigraph, b: &Multigraph, glue: &[(&str, &str)]) -> Result<(Multigraph, HashMap<String, String>), SpError> {
    check_disjoint_edges(a, b)?;
    let mut taken: BTreeSet<String> = a.vertices().iter().cloned().collect();
    taken.extend(b.vertices().iter().cloned());
    let mut map: HashMap<String, String> = glue.iter().map(|&(from, to)| (from.to_string(), to.to_string())).collect();
    for v in b.vertices() {
        if map.contains_key(v) {
            continue;
        }
        let name = if a.has_vertex(v) { fresh_name(v, &taken) } else { v.clone() };
        taken.insert(name.clone());
        map.insert(v.clone(), name);
    }
    let mut vertices: Vec<String> = a.vertices().to_vec();
    for v in b.vertices() {
        let w = &map[v];
        if !vertices.contains(w) {
            vertices.push(w.clone());
        }
    }
    let mut edges = a.edges().to_vec();
    edges.extend(
        b.edges()
            .iter()
            .map(|e| Edge { id: e.id.clone(), ends: (map[&e.ends.0].clone(), map[&e.ends.1].clone()) }),
    );
    Ok((Multigraph::new(vertices, edges)?, map))
}

/// Parallel join (sources and terminals identified) or series join
/// (terminal of `h` glued to source of `k`).
pub fn join(h: &SourceTerminalGraph, k: &SourceTerminalGraph, kind: JoinKind) -> Result<SourceTerminalGraph, SpError> {
    match kind {
        JoinKind::Parallel => {
            let (g, _) = glue(h.graph(), k.graph(), &[(k.source(), h.source()), (k.terminal(), h.terminal())])?;
            Ok(SourceTerminalGraph::new(g, h.source(), h.terminal())?)
        }
        JoinKind::Series => {
            let (g, map) = glue(h.graph(), k.graph(), &[(k.source(), h.terminal())])?;
            let terminal = map[k.terminal()].clone();
            Ok(SourceTerminalGraph::new(g, h.source(), terminal)?)
        }
    }
}

/// Single edge from `s` to `t`.
pub fn k2(id: &str) -> SourceTerminalGraph {
    let g = Multigraph::from_edges([(id, "s", "t")]).expect("single edge");
    SourceTerminalGraph::new(g, "s", "t").expect("distinct ends")
}

/// Path through the named edges in order.
pub fn path_named<S: AsRef<str>>(ids: &[S]) -> Result<SourceTerminalGraph, SpError> {
    if ids.is_empty() {
        return Err(SpError::OutOfRange("a path needs at least one edge".into()));
    }
    realize(&SPTree::path(ids))
}

/// Path with edges `p1..pn`.
pub fn path(n: usize) -> Result<SourceTerminalGraph, SpError> {
    let ids: Vec<String> = (1..=n).map(|i| format!("p{i}")).collect();
    path_named(&ids)
}

/// Tree of the cycle made of a path `a1..an` parallel to a path `b1..bm`.
pub fn cycle_tree(n: usize, m: usize) -> Result<SPTree, SpError> {
    if n == 0 || m == 0 {
        return Err(SpError::OutOfRange("cycle sides need at least one edge".into()));
    }
    let a: Vec<String> = (1..=n).map(|i| format!("a{i}")).collect();
    let b: Vec<String> = (1..=m).map(|i| format!("b{i}")).collect();
    SPTree::parallel(vec![SPTree::path(&a), SPTree::path(&b)])
}

pub fn cycle(n: usize, m: usize) -> Result<SourceTerminalGraph, SpError> {
    realize(&cycle_tree(n, m)?)
}

/// Wheel with hub `h`, rim vertices `v1..vn`, rim edges `ri = vi v(i+1)` and
/// spokes `si = h vi`.
pub fn wheel(n: usize) -> Result<Multigraph, SpError> {
    if n < 3 {
        return Err(SpError::OutOfRange(format!("wheel needs n >= 3, got {n}")));
    }
    let mut edges = Vec::new();
    for i in 1..=n {
        edges.push(Edge::new(format!("r{i}"), format!("v{i}"), format!("v{}", i % n + 1)));
    }
    for i in 1..=n {
        edges.push(Edge::new(format!("s{i}"), "h", format!("v{i}")));
    }
    let mut vertices = vec!["h".to_string()];
    vertices.extend((1..=n).map(|i| format!("v{i}")));
    Ok(Multigraph::new(vertices, edges)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RestrictedJoin {
    /// `G ⋆ e`
    ParallelEdge,
    /// `e ∫ G`
    SeriesBefore,
    /// `G ∫ e`
    SeriesAfter,
}

pub fn restricted_join(g: &SourceTerminalGraph, e: &str, kind: RestrictedJoin) -> Result<SourceTerminalGraph, SpError> {
    let mut taken: BTreeSet<String> = g.graph().vertices().iter().cloned().collect();
    let s = fresh_name("s", &taken);
    taken.insert(s.clone());
    let t = fresh_name("t", &taken);
    let edge = SourceTerminalGraph::new(Multigraph::from_edges([(e, s.as_str(), t.as_str())])?, s, t)?;
    match kind {
        RestrictedJoin::ParallelEdge => join(g, &edge, JoinKind::Parallel),
        RestrictedJoin::SeriesBefore => join(&edge, g, JoinKind::Series),
        RestrictedJoin::SeriesAfter => join(g, &edge, JoinKind::Series),
    }
}

/// Arc diagram: a spine path plus non-crossing arcs over spine positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArcDiagram {
    spine: Vec<String>,
    spine_edges: Vec<String>,
    arcs: Vec<(usize, usize, String)>,
}

impl ArcDiagram {
    pub fn new(spine: Vec<String>, spine_edges: Vec<String>, arcs: Vec<(usize, usize, String)>) -> Result<ArcDiagram, SpError> {
        if spine.len() < 2 || spine_edges.len() + 1 != spine.len() {
            return Err(SpError::OutOfRange("spine needs k >= 2 vertices and k - 1 edges".into()));
        }
        let mut seen = BTreeSet::new();
        for v in &spine {
            if !seen.insert(v) {
                return Err(GraphError::DuplicateVertex(v.clone()).into());
            }
        }
        let mut ids = BTreeSet::new();
        for id in spine_edges.iter().chain(arcs.iter().map(|a| &a.2)) {
            if !ids.insert(id) {
                return Err(SpError::EdgeCollision(id.clone()));
            }
        }
        for (i, j, id) in &arcs {
            if i >= j || *j >= spine.len() {
                return Err(SpError::InvalidArc(id.clone()));
            }
        }
        for (x, (i, j, a)) in arcs.iter().enumerate() {
            for (k, l, b) in &arcs[x + 1..] {
                if (i < k && k < j && j < l) || (k < i && i < l && l < j) {
                    return Err(SpError::CrossingArcs(a.clone(), b.clone()));
                }
            }
        }
        Ok(ArcDiagram { spine, spine_edges, arcs })
    }

    /// Diagram on spine `u0..uk` with spine edges named by `spine_edges`.
    pub fn with_default_spine<S: AsRef<str>>(spine_edges: &[S], arcs: Vec<(usize, usize, String)>) -> Result<ArcDiagram, SpError> {
        let spine = (0..=spine_edges.len()).map(|i| format!("u{i}")).collect();
        ArcDiagram::new(spine, spine_edges.iter().map(|s| s.as_ref().to_string()).collect(), arcs)
    }

    pub fn spine(&self) -> &[String] {
        &self.spine
    }

    pub fn spine_edges(&self) -> &[String] {
        &self.spine_edges
    }

    pub fn arcs(&self) -> &[(usize, usize, String)] {
        &self.arcs
    }

    /// An arc spanning the entire spine closes a Hamiltonian facial cycle.
    pub fn has_outer_arc(&self) -> bool {
        let last = self.spine.len() - 1;
        self.arcs.iter().any(|&(i, j, _)| i == 0 && j == last)
    }

    pub fn to_graph(&self) -> Result<SourceTerminalGraph, SpError> {
        arc_diagram_to_graph(self)
    }

    /// Decomposition tree with the leftmost spine vertex as source.
    pub fn to_tree(&self) -> SPTree {
        self.interval_tree(0, self.spine.len() - 1)
    }

    /// Tree of the part of the diagram between spine positions `i` and `j`.
    fn interval_tree(&self, i: usize, j: usize) -> SPTree {
        let spanning: Vec<&String> = self.arcs.iter().filter(|a| a.0 == i && a.1 == j).map(|a| &a.2).collect();
        let mut segments = Vec::new();
        let mut p = i;
        while p < j {
            // the widest arc starting at p that stays strictly inside [i, j]
            let reach = self
                .arcs
                .iter()
                .filter(|a| a.0 == p && a.1 <= j && !(a.0 == i && a.1 == j))
                .map(|a| a.1)
                .max();
            match reach {
                Some(q) => {
                    segments.push(self.interval_tree(p, q));
                    p = q;
                }
                None => {
                    segments.push(SPTree::Leaf(self.spine_edges[p].clone()));
                    p += 1;
                }
            }
        }
        let body = if segments.len() == 1 { segments.pop().unwrap() } else { SPTree::Series(segments) };
        if spanning.is_empty() {
            return body;
        }
        let mut children = vec![body];
        children.extend(spanning.into_iter().map(|id| SPTree::Leaf(id.clone())));
        SPTree::Parallel(children)
    }
}

pub fn arc_diagram_to_graph(d: &ArcDiagram) -> Result<SourceTerminalGraph, SpError> {
    let mut edges: Vec<Edge> = d
        .spine_edges
        .iter()
        .enumerate()
        .map(|(i, id)| Edge::new(id.clone(), d.spine[i].clone(), d.spine[i + 1].clone()))
        .collect();
    edges.extend(d.arcs.iter().map(|(i, j, id)| Edge::new(id.clone(), d.spine[*i].clone(), d.spine[*j].clone())));
    let g = Multigraph::new(d.spine.clone(), edges)?;
    Ok(SourceTerminalGraph::new(g, d.spine[0].clone(), d.spine[d.spine.len() - 1].clone())?)
}

/// Arc diagram of a tree in which every parallel node has at most one
/// non-leaf child, i.e. a graph built from `⋆^e` and series joins. The spine
/// is labelled `u0..uk`.
pub fn tree_to_arc_diagram(tree: &SPTree) -> Result<ArcDiagram, SpError> {
    fn go(t: &SPTree, spine: &mut Vec<String>, arcs: &mut Vec<(usize, usize, String)>) -> Result<(), SpError> {
        match t {
            SPTree::Leaf(id) => spine.push(id.clone()),
            SPTree::Series(c) => {
                for child in c {
                    go(child, spine, arcs)?;
                }
            }
            SPTree::Parallel(c) => {
                let inner: Vec<&SPTree> = c.iter().filter(|x| !x.is_leaf()).collect();
                let leaves: Vec<&String> = c
                    .iter()
                    .filter_map(|x| match x {
                        SPTree::Leaf(id) => Some(id),
                        _ => None,
                    })
                    .collect();
                let start = spine.len();
                let rest: Vec<&String> = match inner.as_slice() {
                    [] => {
                        spine.push(leaves[0].clone());
                        leaves[1..].to_vec()
                    }
                    [one] => {
                        go(one, spine, arcs)?;
                        leaves
                    }
                    _ => return Err(SpError::NoArcDiagram),
                };
                let end = spine.len();
                for id in rest {
                    arcs.push((start, end, id.clone()));
                }
            }
        }
        Ok(())
    }
    tree.validate()?;
    let mut spine = Vec::new();
    let mut arcs = Vec::new();
    go(tree, &mut spine, &mut arcs)?;
    ArcDiagram::with_default_spine(&spine, arcs)
}

/// Replaces edge `e` by `h`: the source of `h` is glued to the
/// lexicographically smaller endpoint of `e` (the larger one when
/// `swap_orientation` is set), the terminal to the other.
pub fn replace_edge_oriented(
    g: &Multigraph,
    e: &str,
    h: &SourceTerminalGraph,
    swap_orientation: bool,
) -> Result<Multigraph, SpError> {
    let edge = g.edge(e).ok_or_else(|| GraphError::UnknownEdge(e.to_string()))?;
    if edge.is_self_loop() {
        return Err(SpError::SelfLoop(e.to_string()));
    }
    let (mut u, mut v) = (edge.ends.0.clone(), edge.ends.1.clone());
    if u > v {
        std::mem::swap(&mut u, &mut v);
    }
    if swap_orientation {
        std::mem::swap(&mut u, &mut v);
    }
    let base = g.delete_edge(e)?;
    let (out, _) = glue(&base, h.graph(), &[(h.source(), u.as_str()), (h.terminal(), v.as_str())])?;
    Ok(out)
}

pub fn replace_edge(g: &Multigraph, e: &str, h: &SourceTerminalGraph) -> Result<Multigraph, SpError> {
    replace_edge_oriented(g, e, h, false)
}

/// Copy of `h` with every edge id passed through `f`.
pub fn rename_edges<F: Fn(&str) -> String>(h: &SourceTerminalGraph, f: F) -> Result<SourceTerminalGraph, SpError> {
    let g = h.graph().map_edges(f)?;
    Ok(SourceTerminalGraph::new(g, h.source(), h.terminal())?)
}
