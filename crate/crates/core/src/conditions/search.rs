//! Exhaustive search for edges where condition 1 holds but S fails, the
//! parallel-join witness that makes condition 1 fail, and the Δ–Y report.

use std::collections::{BTreeSet, HashMap};

use super::{check_cond1, check_s, ConditionError, Status, Verdict};
use crate::graph::{Edge, GraphError, Multigraph};
use crate::spbuild::{realize, JoinKind, SPTree};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Shape {
    Leaf,
    Node(Vec<Shape>),
}

impl Shape {
    fn size(&self) -> usize {
        match self {
            Shape::Leaf => 1,
            Shape::Node(c) => c.iter().map(Shape::size).sum(),
        }
    }
}

/// Canonical shapes of flattened trees with `n` edges whose root has the
/// given kind (children of a node never share its kind).
fn shapes(n: usize, memo: &mut HashMap<usize, Vec<Shape>>) -> Vec<Shape> {
    // shapes are kind-agnostic: the kind alternates with depth
    if let Some(v) = memo.get(&n) {
        return v.clone();
    }
    let mut items: Vec<Shape> = Vec::new();
    for size in (1..n).rev() {
        if size == 1 {
            items.push(Shape::Leaf);
        } else {
            let mut v = shapes(size, memo);
            v.sort();
            v.reverse();
            items.extend(v);
        }
    }
    // items are listed by non-increasing size; choose multisets of >= 2 items
    let mut out = Vec::new();
    fn pick(items: &[Shape], start: usize, remaining: usize, acc: &mut Vec<Shape>, out: &mut Vec<Shape>) {
        if remaining == 0 {
            if acc.len() >= 2 {
                out.push(Shape::Node(acc.clone()));
            }
            return;
        }
        for i in start..items.len() {
            let s = items[i].size();
            if s > remaining {
                continue;
            }
            acc.push(items[i].clone());
            pick(items, i, remaining - s, acc, out);
            acc.pop();
        }
    }
    pick(&items, 0, n, &mut Vec::new(), &mut out);
    memo.insert(n, out.clone());
    out
}

fn shape_to_tree(shape: &Shape, kind: JoinKind, counter: &mut usize) -> SPTree {
    match shape {
        Shape::Leaf => {
            *counter += 1;
            SPTree::Leaf(format!("e{counter}"))
        }
        Shape::Node(children) => {
            let other = match kind {
                JoinKind::Series => JoinKind::Parallel,
                JoinKind::Parallel => JoinKind::Series,
            };
            let c = children.iter().map(|s| shape_to_tree(s, other, counter)).collect();
            match kind {
                JoinKind::Series => SPTree::Series(c),
                JoinKind::Parallel => SPTree::Parallel(c),
            }
        }
    }
}

/// Every flattened series-parallel tree with `2..=max_edges` leaves, up to
/// reordering children. Leaves are named `e1, e2, ...` left to right.
pub fn enumerate_sp_trees(max_edges: usize) -> Vec<SPTree> {
    let mut memo = HashMap::new();
    let mut out = Vec::new();
    for n in 2..=max_edges {
        for shape in shapes(n, &mut memo) {
            for kind in [JoinKind::Series, JoinKind::Parallel] {
                out.push(shape_to_tree(&shape, kind, &mut 0));
            }
        }
    }
    out
}

/// Canonical text of a tree with one leaf marked; invariant under
/// reordering of children.
fn marked_form(t: &SPTree, e: &str) -> String {
    match t {
        SPTree::Leaf(id) => (if id == e { "*" } else { "o" }).to_string(),
        SPTree::Series(c) | SPTree::Parallel(c) => {
            let mut parts: Vec<String> = c.iter().map(|x| marked_form(x, e)).collect();
            parts.sort();
            let tag = if matches!(t, SPTree::Series(_)) { "S" } else { "P" };
            format!("({tag} {})", parts.join(" "))
        }
    }
}

/// A series-parallel graph and an edge where condition 1 holds and S fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterexampleCandidate {
    pub tree: SPTree,
    pub edge: String,
    pub cond1: Verdict,
}

/// Exhaustive search over series-parallel graphs with at most `max_edges`
/// edges; symmetric copies of the same marked tree are checked once.
pub fn counterexample_search(max_edges: usize) -> Result<Vec<CounterexampleCandidate>, ConditionError> {
    if max_edges > 10 {
        return Err(ConditionError::Precondition(format!("max_edges {max_edges} exceeds 10")));
    }
    let mut seen = BTreeSet::new();
    let mut found = Vec::new();
    for tree in enumerate_sp_trees(max_edges) {
        let h = realize(&tree)?;
        for e in tree.leaves() {
            if !seen.insert(marked_form(&tree, &e)) {
                continue;
            }
            let cond1 = check_cond1(h.graph(), &e)?;
            if !cond1.holds() {
                continue;
            }
            if check_s(&h, &e)?.status == Status::Fails {
                found.push(CounterexampleCandidate { tree: tree.clone(), edge: e, cond1 });
            }
        }
    }
    Ok(found)
}

/// Output of [`stability_witness`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityWitness {
    /// The input tree, with `e` subdivided when it had no series partner.
    pub base: SPTree,
    /// Name of the subdividing edge, if one was added.
    pub subdivided_with: Option<String>,
    /// Fresh copy of the parallel complement of the branch containing `e`.
    pub witness: SPTree,
    /// The graph on which condition 1 was shown to fail.
    pub joined: SPTree,
    /// Whether `joined` is the top-level join `base ⋆ witness` (otherwise the
    /// witness is attached next to the complement it copies).
    pub top_level: bool,
    pub verdict: Verdict,
}

fn fresh_suffix(tree: &SPTree) -> impl Fn(&str) -> String {
    let taken: BTreeSet<String> = tree.leaves().into_iter().collect();
    let mut suffix = String::from("'");
    while taken.iter().any(|l| taken.contains(&format!("{l}{suffix}"))) {
        suffix.push('\'');
    }
    move |id: &str| format!("{id}{suffix}")
}

/// Path of child indices from the root to the leaf `e`.
fn path_to(t: &SPTree, e: &str) -> Option<Vec<usize>> {
    match t {
        SPTree::Leaf(id) => (id == e).then(Vec::new),
        SPTree::Series(c) | SPTree::Parallel(c) => c.iter().enumerate().find_map(|(i, x)| {
            path_to(x, e).map(|mut p| {
                p.insert(0, i);
                p
            })
        }),
    }
}

fn node_at<'a>(t: &'a SPTree, path: &[usize]) -> &'a SPTree {
    path.iter().fold(t, |n, &i| &n.children()[i])
}

fn replace_at(t: &SPTree, path: &[usize], new: SPTree) -> SPTree {
    match path.split_first() {
        None => new,
        Some((&i, rest)) => {
            let mut children = t.children().to_vec();
            children[i] = replace_at(&children[i], rest, new);
            match t {
                SPTree::Series(_) => SPTree::Series(children),
                _ => SPTree::Parallel(children),
            }
        }
    }
}

/// For a series-parallel `tree` where condition 1 holds for `e` but S does
/// not, builds a series-parallel `H` whose parallel join makes condition 1
/// fail. `H` is a fresh copy of the siblings of the branch containing `e`
/// at its lowest parallel ancestor.
pub fn stability_witness(tree: &SPTree, e: &str) -> Result<StabilityWitness, ConditionError> {
    tree.validate()?;
    let path = path_to(tree, e).ok_or_else(|| GraphError::UnknownEdge(e.to_string()))?;
    let h = realize(tree)?;
    if !check_cond1(h.graph(), e)?.holds() {
        return Err(ConditionError::Precondition(format!("condition 1 does not hold for {e}")));
    }
    if check_s(&h, e)?.holds() {
        return Err(ConditionError::Precondition(format!("S holds for {e}")));
    }
    let depth = (0..path.len())
        .rev()
        .find(|&d| matches!(node_at(tree, &path[..d]), SPTree::Parallel(_)))
        .ok_or_else(|| ConditionError::Precondition(format!("{e} has no parallel ancestor")))?;
    let parallel_path = &path[..depth];
    let branch_index = path[depth];

    // make sure e has a series partner inside its branch
    let mut base = tree.clone();
    let mut subdivided_with = None;
    let branch_path = &path[..=depth];
    if node_at(&base, branch_path).is_leaf() {
        let rename = fresh_suffix(&base);
        let sub = rename(&format!("{e}_sub"));
        base = replace_at(&base, branch_path, SPTree::Series(vec![SPTree::leaf(e), SPTree::leaf(sub.clone())]));
        subdivided_with = Some(sub);
    }

    let parallel = node_at(&base, parallel_path);
    let siblings: Vec<SPTree> = parallel
        .children()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != branch_index)
        .map(|(_, c)| c.clone())
        .collect();
    let complement = if siblings.len() == 1 { siblings[0].clone() } else { SPTree::Parallel(siblings) };
    let witness = complement.map_leaves(fresh_suffix(&base));

    let mut candidates = vec![(SPTree::Parallel(vec![base.clone(), witness.clone()]), true)];
    if !parallel_path.is_empty() {
        let mut children = parallel.children().to_vec();
        children.push(witness.clone());
        candidates.push((replace_at(&base, parallel_path, SPTree::Parallel(children)), false));
    }
    for (joined, top_level) in candidates {
        let joined = joined.flattened();
        let g = realize(&joined)?;
        let verdict = check_cond1(g.graph(), e)?;
        if verdict.status == Status::Fails {
            return Ok(StabilityWitness { base, subdivided_with, witness, joined, top_level, verdict });
        }
    }
    Err(ConditionError::Precondition(format!(
        "no parallel join with a copy of the complement of {e} made condition 1 fail"
    )))
}

/// Condition-1 verdicts before and after replacing a triangle by a star.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaYReport {
    pub delta_graph: Multigraph,
    pub y_graph: Multigraph,
    pub edge: String,
    pub delta_verdict: Status,
    pub y_verdict: Status,
    pub agree: bool,
}

/// Replaces the triangle `tri` (three edge ids) by a star on a new vertex
/// and reports the condition-1 verdict for `e` on both graphs. Star edges
/// are named after the triangle edge opposite their endpoint, with a `'`.
pub fn delta_y_experiment(g: &Multigraph, tri: [&str; 3], e: &str) -> Result<DeltaYReport, ConditionError> {
    if tri.contains(&e) {
        return Err(ConditionError::Precondition("the marked triangle must not contain e".into()));
    }
    let mut verts = BTreeSet::new();
    for id in tri {
        let ed = g.edge(id).ok_or_else(|| GraphError::UnknownEdge(id.to_string()))?;
        if ed.is_self_loop() {
            return Err(ConditionError::Precondition(format!("{id} is a self-loop")));
        }
        verts.insert(ed.ends.0.clone());
        verts.insert(ed.ends.1.clone());
    }
    let distinct_pairs: BTreeSet<(String, String)> = tri
        .iter()
        .map(|id| {
            let ed = g.edge(id).expect("checked");
            let (a, b) = ed.ends.clone();
            if a < b { (a, b) } else { (b, a) }
        })
        .collect();
    if verts.len() != 3 || distinct_pairs.len() != 3 {
        return Err(ConditionError::Precondition("marked edges do not form a triangle".into()));
    }
    let mut center = "y".to_string();
    while g.has_vertex(&center) {
        center.push('\'');
    }
    let mut y = g.delete_edges(&tri)?;
    for id in tri {
        let ed = g.edge(id).expect("checked");
        let opposite = verts.iter().find(|v| !ed.touches(v)).expect("three vertices").clone();
        let mut name = format!("{id}'");
        while g.has_edge(&name) {
            name.push('\'');
        }
        y = y.add_edge(Edge::new(name, center.clone(), opposite))?;
    }
    let delta_verdict = check_cond1(g, e)?.status;
    let y_verdict = check_cond1(&y, e)?.status;
    Ok(DeltaYReport {
        delta_graph: g.clone(),
        y_graph: y,
        edge: e.to_string(),
        agree: delta_verdict == y_verdict,
        delta_verdict,
        y_verdict,
    })
}
