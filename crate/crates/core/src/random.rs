//! Seeded generators for random connected multigraphs and series-parallel
//! trees, used by property tests and the survey command.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Edge, Multigraph};
use crate::spbuild::SPTree;

/// Seed used when none is supplied.
pub const DEFAULT_SEED: u64 = 0x5eed_2024;

/// `SYMANZIK_SEED` from the environment when set and numeric, else
/// [`DEFAULT_SEED`].
pub fn seed_from_env() -> u64 {
    std::env::var("SYMANZIK_SEED").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_SEED)
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Size limits for [`random_multigraph`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraphShape {
    pub min_edges: usize,
    pub max_edges: usize,
    pub max_vertices: usize,
    /// Probability that an edge beyond the spanning tree is a self-loop.
    pub self_loop_prob: f64,
}

impl GraphShape {
    pub fn up_to(max_edges: usize) -> GraphShape {
        GraphShape { min_edges: 1, max_edges, max_vertices: max_edges.min(7), self_loop_prob: 0.1 }
    }
}

/// Connected multigraph with vertices `v0..` and edges `e1..`: a random
/// spanning tree plus random extra edges (parallel edges and self-loops allowed).
pub fn random_multigraph<R: Rng + ?Sized>(rng: &mut R, shape: GraphShape) -> Multigraph {
    assert!(shape.min_edges <= shape.max_edges && shape.max_edges >= 1, "empty edge range");
    let m = rng.gen_range(shape.min_edges.max(1)..=shape.max_edges);
    let n = rng.gen_range(1..=(m + 1).min(shape.max_vertices.max(1)));
    let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut ends: Vec<(usize, usize)> = (1..n).map(|i| (order[rng.gen_range(0..i)], order[i])).collect();
    while ends.len() < m {
        let a = rng.gen_range(0..n);
        if n == 1 || rng.gen_bool(shape.self_loop_prob) {
            ends.push((a, a));
        } else {
            let b = (a + rng.gen_range(1..n)) % n;
            ends.push((a, b));
        }
    }
    ends.shuffle(rng);
    let edges = ends
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| Edge::new(format!("e{}", i + 1), vertices[a].clone(), vertices[b].clone()))
        .collect();
    Multigraph::new(vertices, edges).expect("generated graph is well formed")
}

/// Random decomposition tree with `n` leaves named `{prefix}1..{prefix}n`.
pub fn random_sp_tree<R: Rng + ?Sized>(rng: &mut R, n: usize, prefix: &str) -> SPTree {
    assert!(n >= 1, "a tree needs a leaf");
    let mut next = 0usize;
    let series = rng.gen_bool(0.5);
    build(rng, n, series, prefix, &mut next).flattened()
}

fn build<R: Rng + ?Sized>(rng: &mut R, n: usize, series: bool, prefix: &str, next: &mut usize) -> SPTree {
    if n == 1 {
        *next += 1;
        return SPTree::leaf(format!("{prefix}{next}"));
    }
    let k = rng.gen_range(1..n);
    let left = build(rng, k, !series, prefix, next);
    let right = build(rng, n - k, !series, prefix, next);
    let children = vec![left, right];
    if series {
        SPTree::series(children)
    } else {
        SPTree::parallel(children)
    }
    .expect("two children")
}

/// `g` and the graph obtained by gluing a random graph (vertices `w0..`,
/// edges `f1..`) onto a random vertex of `g`.
pub fn one_vertex_join<R: Rng + ?Sized>(rng: &mut R, g_shape: GraphShape, h_shape: GraphShape) -> (Multigraph, Multigraph) {
    let g = random_multigraph(rng, g_shape);
    let h = random_multigraph(rng, h_shape);
    let at = g.vertices()[rng.gen_range(0..g.num_vertices())].clone();
    let rename = |v: &str| if v == "v0" { at.clone() } else { format!("w{}", &v[1..]) };
    let mut vertices = g.vertices().to_vec();
    vertices.extend(h.vertices().iter().filter(|v| *v != "v0").map(|v| rename(v)));
    let mut edges = g.edges().to_vec();
    edges.extend(h.edges().iter().map(|e| Edge::new(format!("f{}", &e.id[1..]), rename(&e.ends.0), rename(&e.ends.1))));
    let joined = Multigraph::new(vertices, edges).expect("disjoint names");
    (g, joined)
}

/// Random graph with one extra edge parallel to a random non-loop edge.
/// Returns the graph and the ids of the parallel pair, or `None` when the
/// base graph has no non-loop edge.
pub fn with_parallel_pair<R: Rng + ?Sized>(rng: &mut R, shape: GraphShape) -> Option<(Multigraph, String, String)> {
    assert!(shape.max_edges >= 2, "room for the extra edge");
    let max_edges = shape.max_edges - 1;
    let base = random_multigraph(rng, GraphShape { max_edges, min_edges: shape.min_edges.min(max_edges), ..shape });
    let candidates: Vec<&Edge> = base.edges().iter().filter(|e| !e.is_self_loop()).collect();
    let x = candidates.get(rng.gen_range(0..candidates.len().max(1)))?;
    let y = format!("e{}", base.num_edges() + 1);
    let g = base.add_edge(Edge::new(y.clone(), x.ends.0.clone(), x.ends.1.clone())).expect("fresh id");
    Some((g, x.id.clone(), y))
}
