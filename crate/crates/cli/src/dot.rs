//! Undirected DOT export; every edge (parallel edges and self-loops
//! included) becomes its own DOT edge labelled with its id.

use std::fmt::Write;

use symanzik::graph::Multigraph;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn to_dot(g: &Multigraph) -> String {
    let mut out = String::from("graph G {\n");
    for v in g.vertices() {
        writeln!(out, "  {};", quote(v)).unwrap();
    }
    for e in g.edges() {
        writeln!(out, "  {} -- {} [label={}];", quote(&e.ends.0), quote(&e.ends.1), quote(&e.id)).unwrap();
    }
    out.push_str("}\n");
    out
}
