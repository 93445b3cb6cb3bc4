//! Closed-form certificate builders for wheels, parallel edges and
//! series-parallel joins. Every builder re-checks its output with the
//! verifiers in [`crate::conditions`] before returning it.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::conditions::{
    normalize_b_zero, normalize_c_zero, s_to_cond1, verify_cond1, verify_s, verify_t, Certificate, Cond1Certificate,
    ConditionError, PsiPair, SCertificate, Status, TCertificate, Verdict,
};
use crate::graph::{Edge, GraphError, Multigraph, SourceTerminalGraph};
use crate::kirchhoff::{breaker, kirchhoff_polynomial};
use crate::poly::{rat, Monomial, Polynomial, Rational, Var};
use crate::spbuild::{self, k2, join, path_named, realize, ArcDiagram, JoinKind, RestrictedJoin, SPTree, SpError};

#[derive(Debug, Error)]
pub enum CertError {
    #[error(transparent)]
    Condition(#[from] ConditionError),
    #[error(transparent)]
    Sp(#[from] SpError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("zero denominator: {0}")]
    ZeroDenominator(String),
    #[error("hypothesis not met: {0}")]
    Hypothesis(String),
    #[error("input certificate does not verify: {0}")]
    BadInput(String),
    #[error("built certificate failed verification: {0}")]
    Unverified(String),
    #[error("no construction certifies edge `{0}`")]
    NoConstruction(String),
}

pub type Coeffs = BTreeMap<String, Polynomial>;

/// A source-terminal graph together with a certificate about it.
#[derive(Clone, Debug)]
pub struct Certified<C> {
    pub graph: SourceTerminalGraph,
    pub cert: C,
}

fn frac(num: i64, den: i64, what: &str) -> Result<Rational, CertError> {
    if den == 0 {
        return Err(CertError::ZeroDenominator(what.to_string()));
    }
    Ok(rat(num, den))
}

fn deg(p: &Polynomial) -> i64 {
    p.degree().map_or(0, i64::from)
}

fn var(id: &str) -> Polynomial {
    Polynomial::var(id)
}

fn add_to(a: &mut Coeffs, id: &str, p: Polynomial) {
    let slot = a.entry(id.to_string()).or_default();
    *slot = &*slot + &p;
}

/// Adds `factor * x_j` to the coefficient of every listed edge.
fn add_euler(a: &mut Coeffs, ids: &[String], factor: &Polynomial) {
    for j in ids {
        add_to(a, j, factor * &var(j));
    }
}

/// Fills in explicit zeros so every edge except `skip` has a coefficient.
fn complete(mut a: Coeffs, g: &Multigraph, skip: Option<&str>) -> Coeffs {
    for id in g.edge_ids() {
        if Some(id.as_str()) != skip {
            a.entry(id).or_default();
        }
    }
    a
}

fn edge_ids_except(g: &Multigraph, skip: &[&str]) -> Vec<String> {
    g.edge_ids().into_iter().filter(|id| !skip.contains(&id.as_str())).collect()
}

fn require_t(h: &SourceTerminalGraph, cert: &TCertificate, what: &str) -> Result<(), CertError> {
    if verify_t(h, cert)? {
        Ok(())
    } else {
        Err(CertError::BadInput(format!("T certificate for {what}")))
    }
}

fn checked_s(graph: SourceTerminalGraph, cert: SCertificate, what: &str) -> Result<Certified<SCertificate>, CertError> {
    let cert = SCertificate { a: complete(cert.a, graph.graph(), Some(&cert.edge)), ..cert };
    if verify_s(&graph, &cert)? {
        Ok(Certified { graph, cert })
    } else {
        Err(CertError::Unverified(what.to_string()))
    }
}

fn checked_t(graph: SourceTerminalGraph, cert: TCertificate, what: &str) -> Result<Certified<TCertificate>, CertError> {
    let cert = TCertificate { a: complete(cert.a, graph.graph(), None), ..cert };
    if verify_t(&graph, &cert)? {
        Ok(Certified { graph, cert })
    } else {
        Err(CertError::Unverified(what.to_string()))
    }
}

fn checked_cond1(g: &Multigraph, cert: Cond1Certificate, what: &str) -> Result<Cond1Certificate, CertError> {
    let cert = Cond1Certificate { coeffs: complete(cert.coeffs, g, Some(&cert.edge)), ..cert };
    if verify_cond1(g, &cert)? {
        Ok(cert)
    } else {
        Err(CertError::Unverified(what.to_string()))
    }
}

/// Edge ids of `h` in order from source to terminal when `h` is a simple
/// path between them.
pub fn path_edges(h: &SourceTerminalGraph) -> Option<Vec<String>> {
    let g = h.graph();
    if g.num_edges() + 1 != g.num_vertices() || !g.is_connected() {
        return None;
    }
    let mut out = Vec::new();
    let mut at = h.source().to_string();
    let mut prev: Option<String> = None;
    while at != h.terminal() {
        let next: Vec<&Edge> = g.incident_edges(&at).filter(|e| Some(&e.id) != prev.as_ref()).collect();
        if next.len() != 1 || next[0].is_self_loop() {
            return None;
        }
        out.push(next[0].id.clone());
        prev = Some(next[0].id.clone());
        at = next[0].other(&at).to_string();
    }
    (out.len() == g.num_edges()).then_some(out)
}

/// Splits a cycle through source and terminal into its two source-to-
/// terminal paths; the side containing `e` comes first.
pub fn cycle_sides(h: &SourceTerminalGraph, e: &str) -> Result<(Vec<String>, Vec<String>), CertError> {
    let g = h.graph();
    let not_cycle = || CertError::Hypothesis("graph is not a cycle".into());
    if !g.has_edge(e) {
        return Err(GraphError::UnknownEdge(e.to_string()).into());
    }
    if g.num_edges() != g.num_vertices() || !g.is_connected() || g.vertices().iter().any(|v| g.degree(v) != 2) {
        return Err(not_cycle());
    }
    let mut sides = Vec::new();
    for first in g.incident_edges(h.source()) {
        let mut side = vec![first.id.clone()];
        let mut at = first.other(h.source()).to_string();
        let mut prev = first.id.clone();
        while at != h.terminal() {
            let next = g.incident_edges(&at).find(|x| x.id != prev).ok_or_else(not_cycle)?;
            side.push(next.id.clone());
            prev = next.id.clone();
            at = next.other(&at).to_string();
        }
        sides.push(side);
    }
    let [a, b]: [Vec<String>; 2] = sides.try_into().map_err(|_| not_cycle())?;
    if a.contains(&e.to_string()) {
        Ok((a, b))
    } else {
        Ok((b, a))
    }
}

// ---------------------------------------------------------------------------
// Wheels

/// A vertex `center` of degree three meeting `x`, `y` and `z`, where the far
/// ends of `y` and `z` are the two ends of `edge` and the far end of `x` is
/// neither of them.
#[derive(Clone, Debug)]
pub struct SpokeConfiguration {
    pub graph: Multigraph,
    pub edge: String,
    pub center: String,
    pub x: String,
    pub y: String,
    pub z: String,
}

impl SpokeConfiguration {
    pub fn new(
        graph: Multigraph,
        edge: &str,
        center: &str,
        [x, y, z]: [&str; 3],
    ) -> Result<SpokeConfiguration, CertError> {
        let bad = |msg: &str| CertError::Hypothesis(format!("spoke configuration: {msg}"));
        let e = graph.edge(edge).ok_or_else(|| GraphError::UnknownEdge(edge.to_string()))?;
        if e.is_self_loop() || e.touches(center) {
            return Err(bad("edge must join two vertices other than the center"));
        }
        if graph.degree(center) != 3 {
            return Err(bad("center must have degree three"));
        }
        let far = |id: &str| -> Result<String, CertError> {
            let f = graph.edge(id).ok_or_else(|| GraphError::UnknownEdge(id.to_string()))?;
            if f.is_self_loop() || !f.touches(center) {
                return Err(bad("x, y, z must be non-loop edges at the center"));
            }
            Ok(f.other(center).to_string())
        };
        let (fx, fy, fz) = (far(x)?, far(y)?, far(z)?);
        let ends = [e.ends.0.clone(), e.ends.1.clone()];
        let yz_ok = (fy == ends[0] && fz == ends[1]) || (fy == ends[1] && fz == ends[0]);
        if !yz_ok || ends.contains(&fx) {
            return Err(bad("y and z must end at the ends of the edge, x elsewhere"));
        }
        Ok(SpokeConfiguration {
            edge: edge.to_string(),
            center: center.to_string(),
            x: x.to_string(),
            y: y.to_string(),
            z: z.to_string(),
            graph,
        })
    }

    /// Searches `graph` for a configuration around `edge`.
    pub fn find(graph: &Multigraph, edge: &str) -> Result<SpokeConfiguration, CertError> {
        for c in graph.vertices() {
            if graph.degree(c) != 3 {
                continue;
            }
            let ids: Vec<String> = graph.incident_edges(c).map(|e| e.id.clone()).collect();
            for i in 0..3 {
                let (x, y, z) = (&ids[i], &ids[(i + 1) % 3], &ids[(i + 2) % 3]);
                if let Ok(cfg) = SpokeConfiguration::new(graph.clone(), edge, c, [x, y, z]) {
                    return Ok(cfg);
                }
            }
        }
        Err(CertError::Hypothesis(format!("no spoke configuration around `{edge}`")))
    }

    /// Spoke `s{i}` of the wheel `W_n`, centred at the next rim vertex.
    pub fn wheel_spoke(n: usize, i: usize) -> Result<SpokeConfiguration, CertError> {
        if i == 0 || i > n {
            return Err(SpError::OutOfRange(format!("spoke index {i} for W{n}")).into());
        }
        let next = i % n + 1;
        let g = spbuild::wheel(n)?;
        let (x, y, z) = (format!("r{next}"), format!("s{next}"), format!("r{i}"));
        SpokeConfiguration::new(g, &format!("s{i}"), &format!("v{next}"), [&x, &y, &z])
    }

    pub fn loop_number(&self) -> usize {
        self.graph.loop_number()
    }
}

/// Condition 1 certificate for a spoke configuration:
/// P_i = (y+z)a_i/(ℓ-1), Q = yz + x(y+z)/(ℓ-1), R = -y(y+z)(ℓ-2)/(ℓ-1),
/// S = -z(y+z)(ℓ-2)/(ℓ-1), each plus e·x_j/(ℓ-1).
pub fn lemma_s_certificate(cfg: &SpokeConfiguration) -> Result<Cond1Certificate, CertError> {
    let l = cfg.loop_number() as i64;
    let inv = frac(1, l - 1, "loop number minus one")?;
    let shrink = frac(l - 2, l - 1, "loop number minus one")?;
    let (x, y, z, e) = (var(&cfg.x), var(&cfg.y), var(&cfg.z), var(&cfg.edge));
    let yz = &y + &z;
    let mut coeffs = Coeffs::new();
    for a in edge_ids_except(&cfg.graph, &[&cfg.edge, &cfg.x, &cfg.y, &cfg.z]) {
        coeffs.insert(a.clone(), (&yz * &var(&a)).scale(&inv));
    }
    coeffs.insert(cfg.x.clone(), &y * &z + (&x * &yz).scale(&inv));
    coeffs.insert(cfg.y.clone(), -(&y * &yz).scale(&shrink));
    coeffs.insert(cfg.z.clone(), -(&z * &yz).scale(&shrink));
    let ids = edge_ids_except(&cfg.graph, &[&cfg.edge]);
    add_euler(&mut coeffs, &ids, &e.scale(&inv));
    checked_cond1(&cfg.graph, Cond1Certificate { edge: cfg.edge.clone(), coeffs }, "spoke configuration")
}

// ---------------------------------------------------------------------------
// Parallel edges

/// Components of a τ_xy-symmetric degree-two solution, split by their x, y
/// dependence: P̃_i = p0 + (x+y)p1 + (x²+y²)p2 + xy·p11 and
/// Q̃ = q0 + x·q10 + y·q01 + x²q20 + y²q02 + xy·q11.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParallelComponents {
    pub p0: Coeffs,
    pub p1: Coeffs,
    pub p2: Coeffs,
    pub p11: Coeffs,
    pub q0: Polynomial,
    pub q10: Polynomial,
    pub q01: Polynomial,
    pub q20: Polynomial,
    pub q02: Polynomial,
    pub q11: Polynomial,
}

#[derive(Clone, Debug)]
pub struct Transported {
    /// The input made τ_xy-symmetric, still a certificate for `(G, e)`.
    pub symmetrized: Cond1Certificate,
    pub components: ParallelComponents,
    /// `G` with `y` deleted and `x` contracted.
    pub both_graph: Multigraph,
    pub cert_both: Cond1Certificate,
    /// `G` with `y` deleted.
    pub del_graph: Multigraph,
    pub cert_del: Cond1Certificate,
    /// `G` with a third edge parallel to `x` and `y`.
    pub add_graph: Multigraph,
    pub cert_add: Cond1Certificate,
}

fn split_xy(p: &Polynomial, x: Var, y: Var) -> BTreeMap<(u32, u32), Polynomial> {
    let mut out: BTreeMap<(u32, u32), Polynomial> = BTreeMap::new();
    for (m, c) in p.terms() {
        let rest = Monomial::from_pairs(m.iter().filter(|(v, _)| *v != x && *v != y));
        out.entry((m.exponent(x), m.exponent(y))).or_default().add_term(rest, c.clone());
    }
    out
}

fn part(parts: &BTreeMap<(u32, u32), Polynomial>, i: u32, j: u32) -> Polynomial {
    parts.get(&(i, j)).cloned().unwrap_or_default()
}

fn check_parallel_pair(g: &Multigraph, e: &str, x: &str, y: &str) -> Result<(), CertError> {
    let get = |id: &str| g.edge(id).ok_or_else(|| CertError::Graph(GraphError::UnknownEdge(id.to_string())));
    let (ee, ex, ey) = (get(e)?, get(x)?, get(y)?);
    let key = |ed: &Edge| {
        let (a, b) = (ed.ends.0.clone(), ed.ends.1.clone());
        if a <= b { (a, b) } else { (b, a) }
    };
    if e == x || e == y || x == y || ex.is_self_loop() || ee.is_self_loop() || key(ex) != key(ey) {
        return Err(CertError::Hypothesis(format!("`{x}` and `{y}` are not distinct parallel edges besides `{e}`")));
    }
    Ok(())
}

/// Transports a condition 1 certificate for `(G, e)` across the parallel pair
/// `x, y`: to `G∖y` contracted along `x`, to `G∖y`, and to `G` with an extra
/// edge `z` parallel to the pair.
pub fn parallel_transport(
    g: &Multigraph,
    e: &str,
    x: &str,
    y: &str,
    z: &str,
    cert: &Cond1Certificate,
) -> Result<Transported, CertError> {
    check_parallel_pair(g, e, x, y)?;
    if g.has_edge(z) {
        return Err(GraphError::DuplicateEdge(z.to_string()).into());
    }
    if cert.edge != e || !verify_cond1(g, cert)? {
        return Err(CertError::BadInput(format!("condition 1 certificate for `{e}`")));
    }
    let (vx, vy, ve) = (Var::new(x), Var::new(y), Var::new(e));
    let d = deg(&kirchhoff_polynomial(&g.delete_edge(e)?));
    let inv_d = frac(1, d, "degree of the deleted polynomial")?;

    // Contracted form: Ψ_{G/e} = Σ c_j ∂_jΨ_{G∖e} with c_j homogeneous of degree 2 and free of e.
    let reduced: Coeffs = edge_ids_except(g, &[e])
        .into_iter()
        .map(|j| {
            let c = cert.coeffs.get(&j).cloned().unwrap_or_default().substitute_zero(ve);
            let c2 = c.homogeneous_components().remove(&2).unwrap_or_default();
            (j, c2)
        })
        .collect();
    let half = rat(1, 2);
    let mut sym = Coeffs::new();
    for (j, c) in &reduced {
        let v = if j == x {
            &reduced[x] + &reduced[y].swap_vars(vx, vy)
        } else if j == y {
            &reduced[y] + &reduced[x].swap_vars(vx, vy)
        } else {
            c + &c.swap_vars(vx, vy)
        };
        sym.insert(j.clone(), v.scale(&half));
    }
    let mut sym_full = sym.clone();
    add_euler(&mut sym_full, &edge_ids_except(g, &[e]), &var(e).scale(&inv_d));
    let symmetrized = checked_cond1(g, Cond1Certificate { edge: e.to_string(), coeffs: sym_full }, "symmetrized")?;

    let mut comps = ParallelComponents::default();
    for (j, c) in &sym {
        let parts = split_xy(c, vx, vy);
        if j == x {
            comps.q0 = part(&parts, 0, 0);
            comps.q10 = part(&parts, 1, 0);
            comps.q01 = part(&parts, 0, 1);
            comps.q20 = part(&parts, 2, 0);
            comps.q02 = part(&parts, 0, 2);
            comps.q11 = part(&parts, 1, 1);
        } else if j != y {
            comps.p0.insert(j.clone(), part(&parts, 0, 0));
            comps.p1.insert(j.clone(), part(&parts, 1, 0));
            comps.p2.insert(j.clone(), part(&parts, 2, 0));
            comps.p11.insert(j.clone(), part(&parts, 1, 1));
        }
    }
    let c = &comps;
    let (px, py, pe) = (var(x), var(y), var(e));
    let w_sum = &c.q10 + &c.q01;
    let u = (&c.q10 - &c.q01).scale(&rat(2, 1));
    let v = (&(&c.q11 - &c.q20) - &c.q02).scale(&rat(2, 1));

    // [x¹y⁰]*: A^{12,34} = Σ p0_i ∂A^{34} + (q10+q01)A^{34}.
    let both_graph = g.delete_edge(y)?.contract_edge(x)?;
    let d_both = deg(&kirchhoff_polynomial(&both_graph.delete_edge(e)?));
    let mut a = c.p0.clone();
    let others = edge_ids_except(&both_graph, &[e]);
    add_euler(&mut a, &others, &(&w_sum + &pe).scale(&frac(1, d_both, "degree after contracting")?));
    let cert_both = checked_cond1(&both_graph, Cond1Certificate { edge: e.to_string(), coeffs: a }, "contracted pair")?;

    // x·[x¹y¹]* + [x¹y⁰]*, with A = ∂_xF and A^{34} = F - x∂_xF for F = xA + A^{34}.
    let del_graph = g.delete_edge(y)?;
    let d_del = deg(&kirchhoff_polynomial(&del_graph.delete_edge(e)?));
    let w = &(&px * &v) + &w_sum;
    let mut a = c.p0.clone();
    add_to(&mut a, x, &px * &u - &px * &w);
    let others = edge_ids_except(&del_graph, &[e]);
    add_euler(&mut a, &others, &(&w + &pe).scale(&frac(1, d_del, "degree after deletion")?));
    let cert_del = checked_cond1(&del_graph, Cond1Certificate { edge: e.to_string(), coeffs: a }, "deleted pair")?;

    // xyz·[x¹y¹]* + (yz+xz+xy)·[x¹y⁰]*, expanding xyzA, xyzA^{34} and
    // (yz+xz+xy)A^{34} through F and x∂_x, y∂_y, z∂_z.
    let ex = g.edge(x).expect("checked above");
    let add_graph = g.add_edge(Edge::new(z, ex.ends.0.clone(), ex.ends.1.clone()))?;
    let d_add = deg(&kirchhoff_polynomial(&add_graph.delete_edge(e)?));
    let pz = var(z);
    let alpha = &(&u.scale(&rat(-2, 1)) + &(&px * &v)) + &w_sum.scale(&rat(3, 1));
    let mut a = c.p0.clone();
    add_to(&mut a, x, &(&px * &u - &(&(&px * &px) * &v)) - &(&px * &w_sum));
    add_to(&mut a, y, &py * &u - &py * &w_sum);
    add_to(&mut a, z, &pz * &u - &pz * &w_sum);
    let others = edge_ids_except(&add_graph, &[e]);
    add_euler(&mut a, &others, &(&alpha + &pe).scale(&frac(1, d_add, "degree after adding")?));
    let cert_add = checked_cond1(&add_graph, Cond1Certificate { edge: e.to_string(), coeffs: a }, "added parallel")?;

    Ok(Transported { symmetrized, components: comps, both_graph, cert_both, del_graph, cert_del, add_graph, cert_add })
}

/// Evaluates the eight coefficient equations `[x^i y^j]` of the parallel-pair
/// identity on extracted components. Each entry is `(label, holds)`.
pub fn bracket_equations(
    g: &Multigraph,
    e: &str,
    x: &str,
    y: &str,
    c: &ParallelComponents,
) -> Result<Vec<(&'static str, bool)>, CertError> {
    check_parallel_pair(g, e, x, y)?;
    let a = kirchhoff_polynomial(&g.delete_edges(&[e, x, y])?);
    let a34 = kirchhoff_polynomial(&g.delete_edges(&[e, y])?.contract_edge(x)?);
    let a12 = kirchhoff_polynomial(&g.delete_edges(&[x, y])?.contract_edge(e)?);
    let a1234 = kirchhoff_polynomial(&g.delete_edge(y)?.contract_edge(x)?.contract_edge(e)?);
    let sum = |p: &Coeffs, base: &Polynomial| -> Polynomial { p.iter().map(|(j, k)| k * &base.partial_by(j)).sum() };
    let two = rat(2, 1);
    let zero = Polynomial::zero();
    let eqs = [
        ("[x0y0]", zero.clone(), (&c.q0 * &a34).scale(&two)),
        ("[x1y0]", a1234, &(&sum(&c.p0, &a34) + &(&c.q0 * &a)) + &(&(&c.q10 + &c.q01) * &a34)),
        (
            "[x1y1]",
            a12,
            &(&(&sum(&c.p0, &a) + &sum(&c.p1, &a34).scale(&two)) + &(&c.q10 * &a).scale(&two)) + &(&c.q11 * &a34).scale(&two),
        ),
        ("[x2y0]", zero.clone(), &(&sum(&c.p1, &a34) + &(&c.q01 * &a)) + &(&(&c.q20 + &c.q02) * &a34)),
        ("[x3y0]", zero.clone(), &sum(&c.p2, &a34) + &(&c.q02 * &a)),
        (
            "[x2y1]",
            zero.clone(),
            &(&(&sum(&c.p1, &a) + &sum(&c.p2, &a34)) + &sum(&c.p11, &a34)) + &(&(&c.q20 + &c.q11) * &a),
        ),
        ("[x3y1]", zero.clone(), sum(&c.p2, &a)),
        ("[x2y2]", zero, sum(&c.p11, &a)),
    ];
    Ok(eqs.into_iter().map(|(label, lhs, rhs)| (label, lhs == rhs)).collect())
}

// ---------------------------------------------------------------------------
// S lifts

/// Parallel lift formula on a certificate with B = 0:
/// B_j = A_j + mC·x_j/(n+m-2) on `h_edges`, -(n-2)C·x_j/(n+m-2) on
/// `other_edges`, and C' = (1 - m/(n+m-2))C.
pub fn s_lift_parallel_closed_form(
    a: &Coeffs,
    c: &Polynomial,
    h_edges: &[String],
    other_edges: &[String],
    n: i64,
    m: i64,
) -> Result<(Coeffs, Polynomial), CertError> {
    let den = n + m - 2;
    let mut out = a.clone();
    add_euler(&mut out, h_edges, &c.scale(&frac(m, den, "n + m - 2")?));
    add_euler(&mut out, other_edges, &c.scale(&frac(-(n - 2), den, "n + m - 2")?));
    Ok((out, c.scale(&frac(den - m, den, "n + m - 2")?)))
}

/// Series lift formula on a certificate with C = 0:
/// A'_j = A_j - (m-1)B·x_j/(n+m-2) on `h_edges`, (n-1)B·x_j/(n+m-2) on
/// `other_edges`, and B' = (1 - (m-1)/(n+m-2))B.
pub fn s_lift_series_closed_form(
    a: &Coeffs,
    b: &Polynomial,
    h_edges: &[String],
    other_edges: &[String],
    n: i64,
    m: i64,
) -> Result<(Coeffs, Polynomial), CertError> {
    let den = n + m - 2;
    let mut out = a.clone();
    add_euler(&mut out, h_edges, &b.scale(&frac(-(m - 1), den, "n + m - 2")?));
    add_euler(&mut out, other_edges, &b.scale(&frac(n - 1, den, "n + m - 2")?));
    Ok((out, b.scale(&frac(den - (m - 1), den, "n + m - 2")?)))
}

/// Lifts S(H, e) to S(H ⋆ H', e) or S(H ∫ H', e).
pub fn s_lift(
    h: &SourceTerminalGraph,
    other: &SourceTerminalGraph,
    cert: &SCertificate,
    kind: JoinKind,
) -> Result<Certified<SCertificate>, CertError> {
    if !verify_s(h, cert)? {
        return Err(CertError::BadInput(format!("S certificate for `{}`", cert.edge)));
    }
    let pair = PsiPair::of(h);
    let n = deg(&pair.hat);
    let m = deg(&breaker(other));
    let h_edges = edge_ids_except(h.graph(), &[]);
    let o_edges = other.graph().edge_ids();
    let lifted = match kind {
        JoinKind::Parallel => {
            let base = normalize_b_zero(&pair, cert)?;
            let (a, c) = s_lift_parallel_closed_form(&base.a, &base.c, &h_edges, &o_edges, n, m)?;
            SCertificate { edge: cert.edge.clone(), a, b: Polynomial::zero(), c }
        }
        JoinKind::Series => {
            let base = normalize_c_zero(&pair, cert)?;
            let (a, b) = s_lift_series_closed_form(&base.a, &base.b, &h_edges, &o_edges, n, m)?;
            SCertificate { edge: cert.edge.clone(), a, b, c: Polynomial::zero() }
        }
    };
    let mut a = lifted.a;
    a.remove(&cert.edge);
    checked_s(join(h, other, kind)?, SCertificate { a, ..lifted }, "S lift")
}

// ---------------------------------------------------------------------------
// T lifts

/// T(H) ⟹ T(H ⋆ H') with B'_j = B_j - mC·x_j/(n+m-1) on H,
/// (n-1)C·x_j/(n+m-1) on H', and C' = (n-1)C/(n+m-1).
pub fn t_lift_parallel(
    h: &SourceTerminalGraph,
    cert: &TCertificate,
    other: &SourceTerminalGraph,
) -> Result<Certified<TCertificate>, CertError> {
    require_t(h, cert, "H")?;
    let n = deg(&breaker(h));
    let m = deg(&breaker(other));
    let den = n + m - 1;
    let mut a = cert.a.clone();
    add_euler(&mut a, &h.graph().edge_ids(), &cert.c.scale(&frac(-m, den, "n + m - 1")?));
    add_euler(&mut a, &other.graph().edge_ids(), &cert.c.scale(&frac(n - 1, den, "n + m - 1")?));
    let c = cert.c.scale(&frac(n - 1, den, "n + m - 1")?);
    checked_t(join(h, other, JoinKind::Parallel)?, TCertificate { a, c }, "T parallel lift")
}

/// T(H) ⟹ T(H ∫ K2) (or K2 ∫ H) with A_j + x_e·x_j/n on H,
/// A_e = x_e(C' - x_e) and C' = C + x_e + (n+1)x_e/n, n = deg Ψ_H.
pub fn t_lift_path(
    h: &SourceTerminalGraph,
    cert: &TCertificate,
    e: &str,
    side: RestrictedJoin,
) -> Result<Certified<TCertificate>, CertError> {
    require_t(h, cert, "H")?;
    if side == RestrictedJoin::ParallelEdge {
        return Err(CertError::Hypothesis("path lift needs a series side".into()));
    }
    let n = deg(&kirchhoff_polynomial(h.graph()));
    let xe = var(e);
    let mut a = cert.a.clone();
    add_euler(&mut a, &h.graph().edge_ids(), &xe.scale(&frac(1, n, "deg Ψ_H")?));
    let c = &(&cert.c + &xe) + &xe.scale(&frac(n + 1, n, "deg Ψ_H")?);
    a.insert(e.to_string(), &xe * &(&c - &xe));
    checked_t(spbuild::restricted_join(h, e, side)?, TCertificate { a, c }, "T path lift")
}

/// T(H ⋆ Γ) for a path Γ with edges z: A_j = Z·x_j/n on H,
/// Z(z_j/n - z_j) on Γ, C = Z/n where Z = Σz and n = deg Ψ_G.
pub fn t_path_star(h: &SourceTerminalGraph, gamma: &SourceTerminalGraph) -> Result<Certified<TCertificate>, CertError> {
    let zs = path_edges(gamma).ok_or_else(|| CertError::Hypothesis("Γ is not a path".into()))?;
    let g = join(h, gamma, JoinKind::Parallel)?;
    let n = deg(&kirchhoff_polynomial(g.graph()));
    let inv = frac(1, n, "deg Ψ_G")?;
    let zsum = Polynomial::sum_of_vars(&zs);
    let mut a = Coeffs::new();
    add_euler(&mut a, &h.graph().edge_ids(), &zsum.scale(&inv));
    add_euler(&mut a, &zs, &zsum.scale(&(inv.clone() - rat(1, 1))));
    let c = zsum.scale(&inv);
    checked_t(g, TCertificate { a, c }, "T for parallel join with a path")
}

/// Coefficients with Σ B_j ∂_jΨ_G = Ψ̂_G for a series join of T-graphs.
#[derive(Clone, Debug)]
pub struct SeriesCombination {
    pub graph: SourceTerminalGraph,
    pub coeffs: Coeffs,
}

pub fn t_series_combo(parts: &[Certified<TCertificate>]) -> Result<SeriesCombination, CertError> {
    let (first, rest) = parts.split_first().ok_or_else(|| CertError::Hypothesis("empty series".into()))?;
    let mut graph = first.graph.clone();
    let mut coeffs = Coeffs::new();
    for (i, p) in parts.iter().enumerate() {
        require_t(&p.graph, &p.cert, &format!("series part {i}"))?;
        coeffs.extend(p.cert.a.iter().map(|(k, v)| (k.clone(), v.clone())));
    }
    for p in rest {
        graph = join(&graph, &p.graph, JoinKind::Series)?;
    }
    let pair = PsiPair::of(&graph);
    let lhs: Polynomial = coeffs.iter().map(|(j, c)| c * &pair.psi.partial_by(j)).sum();
    if lhs != pair.hat {
        return Err(CertError::Unverified("series combination".into()));
    }
    Ok(SeriesCombination { graph, coeffs })
}

// ---------------------------------------------------------------------------
// Bridges, cycles and cycle-paths

/// One factor of a series chain: a single edge, or a graph with a T
/// certificate.
#[derive(Clone, Debug)]
pub enum ChainPiece {
    Edge(String),
    Block(Certified<TCertificate>),
}

#[derive(Clone, Debug)]
pub enum BridgeCase {
    /// The chain is a path and T(Γ) holds.
    PathWithT(TCertificate),
    /// Every block has T and T(Γ) holds.
    BlocksWithT(TCertificate),
    /// Every block has T and Γ is a path.
    BlocksWithPath,
}

#[derive(Clone, Debug)]
pub struct SAndT {
    pub graph: SourceTerminalGraph,
    pub s: SCertificate,
    pub t: TCertificate,
}

fn chain_graph(chain: &[ChainPiece]) -> Result<SourceTerminalGraph, CertError> {
    let graphs: Vec<SourceTerminalGraph> = chain
        .iter()
        .map(|p| match p {
            ChainPiece::Edge(id) => k2(id),
            ChainPiece::Block(b) => b.graph.clone(),
        })
        .collect();
    let (first, rest) = graphs.split_first().ok_or_else(|| CertError::Hypothesis("empty chain".into()))?;
    let mut g = first.clone();
    for h in rest {
        g = join(&g, h, JoinKind::Series)?;
    }
    Ok(g)
}

/// Series chain without the bridge, as T-certified blocks; loose edges are
/// absorbed into the first block by path lifts.
fn chain_blocks(chain: &[ChainPiece], e1: &str) -> Result<Vec<Certified<TCertificate>>, CertError> {
    let mut blocks: Vec<Certified<TCertificate>> = Vec::new();
    let mut loose = Vec::new();
    for p in chain {
        match p {
            ChainPiece::Edge(id) if id == e1 => {}
            ChainPiece::Edge(id) => loose.push(id.clone()),
            ChainPiece::Block(b) => {
                require_t(&b.graph, &b.cert, "chain block")?;
                blocks.push(b.clone());
            }
        }
    }
    if blocks.is_empty() {
        return if loose.is_empty() {
            Ok(blocks)
        } else {
            Err(CertError::Hypothesis("chain has loose edges but no T block".into()))
        };
    }
    for id in loose {
        let b = &blocks[0];
        blocks[0] = t_lift_path(&b.graph, &b.cert, &id, RestrictedJoin::SeriesAfter)?;
    }
    Ok(blocks)
}

/// S(H ⋆ Γ, e1) and T(H ⋆ Γ) where `chain` is the series chain H and `e1`
/// one of its edges.
pub fn bridge_lemma(chain: &[ChainPiece], e1: &str, gamma: &SourceTerminalGraph, case: BridgeCase) -> Result<SAndT, CertError> {
    let hits = chain.iter().filter(|p| matches!(p, ChainPiece::Edge(id) if id == e1)).count();
    if hits != 1 {
        return Err(CertError::Hypothesis(format!("`{e1}` must be exactly one edge piece of the chain")));
    }
    let h = chain_graph(chain)?;
    let g = join(&h, gamma, JoinKind::Parallel)?;
    let x = var(e1);
    let (s, t) = match case {
        BridgeCase::PathWithT(tg) => {
            if chain.iter().any(|p| matches!(p, ChainPiece::Block(_))) {
                return Err(CertError::Hypothesis("case (i) needs the chain to be a path".into()));
            }
            require_t(gamma, &tg, "Γ")?;
            let xs = Polynomial::sum_of_vars(&h.graph().edge_ids());
            let s = SCertificate { edge: e1.to_string(), a: tg.a.clone(), b: xs.clone(), c: &xs - &tg.c };
            let t = t_lift_parallel(gamma, &tg, &h)?.cert;
            (s, t)
        }
        BridgeCase::BlocksWithT(tg) => {
            require_t(gamma, &tg, "Γ")?;
            let blocks = chain_blocks(chain, e1)?;
            let mut a = if blocks.is_empty() { Coeffs::new() } else { t_series_combo(&blocks)?.coeffs };
            let m = deg(&kirchhoff_polynomial(gamma.graph()));
            let inv = frac(1, m, "deg Ψ_Γ")?;
            for (j, b) in &tg.a {
                add_to(&mut a, j, b + &(&x * &var(j)).scale(&inv));
            }
            let c = -(&tg.c + &x.scale(&inv));
            let s = SCertificate { edge: e1.to_string(), a, b: Polynomial::zero(), c };
            let t = t_lift_parallel(gamma, &tg, &h)?.cert;
            (s, t)
        }
        BridgeCase::BlocksWithPath => {
            let zs = path_edges(gamma).ok_or_else(|| CertError::Hypothesis("case (iii) needs Γ to be a path".into()))?;
            let blocks = chain_blocks(chain, e1)?;
            let a = if blocks.is_empty() { Coeffs::new() } else { t_series_combo(&blocks)?.coeffs };
            let zsum = Polynomial::sum_of_vars(&zs);
            let s = SCertificate { edge: e1.to_string(), a, b: &zsum + &x, c: x.clone() };
            let t = t_path_star(&h, gamma)?.cert;
            (s, t)
        }
    };
    let sc = checked_s(g.clone(), s, "bridge lemma S")?.cert;
    let tc = checked_t(g.clone(), t, "bridge lemma T")?.cert;
    Ok(SAndT { graph: g, s: sc, t: tc })
}

/// T certificate for a cycle through source and terminal.
pub fn cycle_t(h: &SourceTerminalGraph) -> Result<Certified<TCertificate>, CertError> {
    let any = h.graph().edge_ids().into_iter().next().ok_or(GraphError::Empty)?;
    let (p, q) = cycle_sides(h, &any)?;
    let built = t_path_star(&path_named(&p)?, &path_named(&q)?)?;
    checked_t(h.clone(), built.cert, "T of a cycle")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CycleMode {
    Parallel,
    Series,
}

#[derive(Clone, Debug)]
pub struct CycleOutput {
    pub graph: SourceTerminalGraph,
    pub s: SCertificate,
    /// T of the parallel join; absent in series mode.
    pub t: Option<TCertificate>,
}

/// S(H ⋆ Γ, e) and T(H ⋆ Γ), or S(H ∫ Γ, e) when Γ is not a path, for a
/// cycle H containing e.
pub fn cycle_lemma(h: &SourceTerminalGraph, gamma: &SourceTerminalGraph, e: &str, mode: CycleMode) -> Result<CycleOutput, CertError> {
    let (p, q) = cycle_sides(h, e)?;
    match mode {
        CycleMode::Parallel => {
            let g = join(h, gamma, JoinKind::Parallel)?;
            let rest = t_path_star(gamma, &path_named(&q)?)?;
            let chain: Vec<ChainPiece> = p.iter().map(|id| ChainPiece::Edge(id.clone())).collect();
            let out = bridge_lemma(&chain, e, &rest.graph, BridgeCase::PathWithT(rest.cert))?;
            let s = checked_s(g.clone(), out.s, "cycle lemma S")?.cert;
            let t = checked_t(g.clone(), out.t, "cycle lemma T")?.cert;
            Ok(CycleOutput { graph: g, s, t: Some(t) })
        }
        CycleMode::Series => {
            if path_edges(gamma).is_some() {
                return Err(CertError::Hypothesis("series mode needs Γ not a path".into()));
            }
            let k = deg(&kirchhoff_polynomial(gamma.graph()));
            let inv = frac(1, k, "deg Ψ_Γ")?;
            let pair = PsiPair::of(h);
            let ysum = Polynomial::sum_of_vars(&q);
            let mut a = Coeffs::new();
            add_euler(&mut a, &gamma.graph().edge_ids(), &pair.psi.scale(&inv));
            let y1 = &pair.hat - &(&ysum * &pair.psi).scale(&(rat(1, 1) - inv.clone()));
            a.insert(q[0].clone(), y1);
            let s = SCertificate { edge: e.to_string(), a, b: Polynomial::zero(), c: -pair.psi.scale(&inv) };
            let g = join(h, gamma, JoinKind::Series)?;
            let s = checked_s(g.clone(), s, "cycle lemma series S")?.cert;
            Ok(CycleOutput { graph: g, s, t: None })
        }
    }
}

/// S(M ⋆ Γ, e) for M = H ∫ P with H a cycle and P a path (possibly empty).
/// Edges of P need either a T certificate for Γ or Γ a path.
pub fn cyclepaths_certificate(
    h: &SourceTerminalGraph,
    path: &[String],
    gamma: &SourceTerminalGraph,
    gamma_t: Option<&TCertificate>,
    e: &str,
) -> Result<Certified<SCertificate>, CertError> {
    let m = if path.is_empty() { h.clone() } else { join(h, &path_named(path)?, JoinKind::Series)? };
    let g = join(&m, gamma, JoinKind::Parallel)?;
    if h.graph().has_edge(e) {
        let (_, q) = cycle_sides(h, e)?;
        let n = deg(&breaker(gamma));
        let psi_h = kirchhoff_polynomial(h.graph());
        let mut a = Coeffs::new();
        add_euler(&mut a, &gamma.graph().edge_ids(), &psi_h);
        a.insert(q[0].clone(), breaker(&m));
        let s = SCertificate {
            edge: e.to_string(),
            a,
            b: psi_h.scale(&rat(-(n - 1), 1)),
            c: psi_h.scale(&rat(-n, 1)),
        };
        return checked_s(g, s, "cyclepaths");
    }
    if !path.iter().any(|p| p == e) {
        return Err(GraphError::UnknownEdge(e.to_string()).into());
    }
    let mut chain = vec![ChainPiece::Block(cycle_t(h)?)];
    chain.extend(path.iter().map(|id| ChainPiece::Edge(id.clone())));
    let case = match gamma_t {
        Some(t) => BridgeCase::BlocksWithT(t.clone()),
        None if path_edges(gamma).is_some() => BridgeCase::BlocksWithPath,
        None => return Err(CertError::Hypothesis("path edge needs T(Γ) or Γ a path".into())),
    };
    let out = bridge_lemma(&chain, e, gamma, case)?;
    checked_s(g, out.s, "cyclepaths via bridge lemma")
}

// ---------------------------------------------------------------------------
// Recursive assembly over decomposition trees

fn is_path_tree(t: &SPTree) -> bool {
    match t {
        SPTree::Leaf(_) => true,
        SPTree::Series(c) => c.iter().all(SPTree::is_leaf),
        SPTree::Parallel(_) => false,
    }
}

fn is_cycle_tree(t: &SPTree) -> bool {
    matches!(t, SPTree::Parallel(c) if c.len() == 2 && c.iter().all(is_path_tree))
}

fn node(kind: JoinKind, mut children: Vec<SPTree>) -> SPTree {
    if children.len() == 1 {
        return children.pop().expect("one child");
    }
    match kind {
        JoinKind::Series => SPTree::Series(children),
        JoinKind::Parallel => SPTree::Parallel(children),
    }
}

fn split_child(children: &[SPTree], e: &str) -> Option<(SPTree, Vec<SPTree>)> {
    let i = children.iter().position(|c| c.contains_leaf(e))?;
    let mut rest = children.to_vec();
    let c = rest.remove(i);
    Some((c, rest))
}

/// Errors that only mean "this construction does not apply here".
fn inapplicable(err: &CertError) -> bool {
    matches!(
        err,
        CertError::ZeroDenominator(_) | CertError::Hypothesis(_) | CertError::Condition(ConditionError::Precondition(_))
    )
}

macro_rules! attempt {
    ($e:expr) => {
        match $e {
            Ok(v) => return Ok(Some(v)),
            Err(err) if inapplicable(&err) => {}
            Err(err) => return Err(err),
        }
    };
}

/// Applies the lifting lemmas bottom-up along a flattened tree.
#[derive(Default)]
struct Assembler {
    t_memo: HashMap<String, Option<Certified<TCertificate>>>,
}

impl Assembler {
    fn t_of(&mut self, t: &SPTree) -> Result<Option<Certified<TCertificate>>, CertError> {
        let key = t.to_string();
        if let Some(hit) = self.t_memo.get(&key) {
            return Ok(hit.clone());
        }
        let out = self.t_uncached(t)?;
        self.t_memo.insert(key, out.clone());
        Ok(out)
    }

    fn t_uncached(&mut self, t: &SPTree) -> Result<Option<Certified<TCertificate>>, CertError> {
        match t {
            SPTree::Leaf(_) => Ok(None),
            SPTree::Parallel(cs) => {
                if let Some(i) = cs.iter().position(is_path_tree) {
                    let mut rest = cs.clone();
                    let p = rest.remove(i);
                    attempt!(t_path_star(&realize(&node(JoinKind::Parallel, rest))?, &realize(&p)?));
                }
                for i in 0..cs.len() {
                    if let Some(ct) = self.t_of(&cs[i])? {
                        let mut rest = cs.clone();
                        rest.remove(i);
                        attempt!(t_lift_parallel(&ct.graph, &ct.cert, &realize(&node(JoinKind::Parallel, rest))?));
                    }
                }
                Ok(None)
            }
            SPTree::Series(cs) => {
                let blocks: Vec<usize> = (0..cs.len()).filter(|&i| !cs[i].is_leaf()).collect();
                let &[bi] = blocks.as_slice() else { return Ok(None) };
                let Some(mut cur) = self.t_of(&cs[bi])? else { return Ok(None) };
                for leaf in cs[..bi].iter().rev() {
                    cur = t_lift_path(&cur.graph, &cur.cert, &leaf.to_string(), RestrictedJoin::SeriesBefore)?;
                }
                for leaf in &cs[bi + 1..] {
                    cur = t_lift_path(&cur.graph, &cur.cert, &leaf.to_string(), RestrictedJoin::SeriesAfter)?;
                }
                Ok(Some(cur))
            }
        }
    }

    fn s_of(&mut self, t: &SPTree, e: &str) -> Result<Option<SCertificate>, CertError> {
        match t {
            SPTree::Leaf(_) => Ok(None),
            SPTree::Parallel(cs) => {
                let Some((c, rest)) = split_child(cs, e) else { return Ok(None) };
                let rest = node(JoinKind::Parallel, rest);
                if let Some(sc) = self.s_of(&c, e)? {
                    attempt!(s_lift(&realize(&c)?, &realize(&rest)?, &sc, JoinKind::Parallel).map(|x| x.cert));
                }
                if let Some(s) = self.bridge(&c, &rest, e)? {
                    return Ok(Some(s));
                }
                if let SPTree::Series(parts) = &c {
                    let (cyc, others) = split_child(parts, e).expect("child contains e");
                    if is_cycle_tree(&cyc) && others.iter().all(SPTree::is_leaf) {
                        let path: Vec<String> = others.iter().map(SPTree::to_string).collect();
                        attempt!(cyclepaths_certificate(&realize(&cyc)?, &path, &realize(&rest)?, None, e).map(|x| x.cert));
                    }
                }
                Ok(None)
            }
            SPTree::Series(cs) => {
                let Some((c, rest)) = split_child(cs, e) else { return Ok(None) };
                let rest = node(JoinKind::Series, rest);
                if let Some(sc) = self.s_of(&c, e)? {
                    attempt!(s_lift(&realize(&c)?, &realize(&rest)?, &sc, JoinKind::Series).map(|x| x.cert));
                }
                if is_cycle_tree(&c) && !is_path_tree(&rest) {
                    attempt!(cycle_lemma(&realize(&c)?, &realize(&rest)?, e, CycleMode::Series).map(|x| x.s));
                }
                Ok(None)
            }
        }
    }

    /// Bridge lemma for `e` sitting directly in the series chain `c`.
    fn bridge(&mut self, c: &SPTree, rest: &SPTree, e: &str) -> Result<Option<SCertificate>, CertError> {
        let parts: Vec<SPTree> = match c {
            SPTree::Leaf(_) => vec![c.clone()],
            SPTree::Series(p) if p.iter().any(|x| matches!(x, SPTree::Leaf(id) if id == e)) => p.clone(),
            _ => return Ok(None),
        };
        let mut chain = Vec::new();
        for p in &parts {
            match p {
                SPTree::Leaf(id) => chain.push(ChainPiece::Edge(id.clone())),
                _ => match self.t_of(p)? {
                    Some(b) => chain.push(ChainPiece::Block(b)),
                    None => return Ok(None),
                },
            }
        }
        let all_edges = chain.iter().all(|p| matches!(p, ChainPiece::Edge(_)));
        let gamma = realize(rest)?;
        if let Some(tg) = self.t_of(rest)? {
            let case = if all_edges { BridgeCase::PathWithT(tg.cert) } else { BridgeCase::BlocksWithT(tg.cert) };
            attempt!(bridge_lemma(&chain, e, &gamma, case).map(|x| x.s));
        }
        if !all_edges && is_path_tree(rest) {
            attempt!(bridge_lemma(&chain, e, &gamma, BridgeCase::BlocksWithPath).map(|x| x.s));
        }
        Ok(None)
    }
}

/// S and T certificates for every edge of a tree-described graph.
#[derive(Clone, Debug)]
pub struct TreeCertificates {
    pub tree: SPTree,
    pub graph: SourceTerminalGraph,
    pub s: BTreeMap<String, SCertificate>,
    pub t: Option<TCertificate>,
}

/// Certifies S(G, e) for every edge of G = realize(tree) by composing the
/// lifting lemmas. Fails with [`CertError::NoConstruction`] at the first
/// edge no composition reaches.
pub fn assemble_s(tree: &SPTree) -> Result<TreeCertificates, CertError> {
    let tree = tree.flattened();
    let graph = realize(&tree)?;
    let mut asm = Assembler::default();
    let pair = PsiPair::of(&graph);
    let mut s = BTreeMap::new();
    for e in tree.leaves() {
        let cert = asm.s_of(&tree, &e)?.ok_or_else(|| CertError::NoConstruction(e.clone()))?;
        let cert = SCertificate { a: complete(cert.a, graph.graph(), Some(&e)), ..cert };
        if !crate::conditions::verify_s_with(&pair, &cert) {
            return Err(CertError::Unverified(format!("assembled S for `{e}`")));
        }
        s.insert(e, cert);
    }
    let t = asm.t_of(&tree)?.map(|c| TCertificate { a: complete(c.cert.a, graph.graph(), None), ..c.cert });
    if let Some(tc) = &t {
        if !crate::conditions::verify_t_with(&pair, tc) {
            return Err(CertError::Unverified("assembled T".into()));
        }
    }
    Ok(TreeCertificates { tree, graph, s, t })
}

/// Decomposition tree of G^∨ = H_1^∨ ∫ … ∫ H_n^∨ for arc-diagram pieces
/// (a piece without arcs is a path).
pub fn co_hamiltonian_dual_tree(pieces: &[ArcDiagram]) -> Result<SPTree, CertError> {
    let trees: Vec<SPTree> = pieces.iter().map(ArcDiagram::to_tree).collect();
    if trees.is_empty() {
        return Err(CertError::Hypothesis("no pieces".into()));
    }
    let tree = node(JoinKind::Series, trees).flattened();
    tree.validate()?;
    Ok(tree)
}

/// S(G, e) for every edge of the dual G of G^∨ = H_1^∨ ∫ … ∫ H_n^∨.
/// G^∨ must have at least four vertices.
pub fn co_hamiltonian_s(pieces: &[ArcDiagram]) -> Result<TreeCertificates, CertError> {
    co_hamiltonian_s_for_tree(&co_hamiltonian_dual_tree(pieces)?)
}

/// Same as [`co_hamiltonian_s`] for a fixed decomposition tree of G^∨.
pub fn co_hamiltonian_s_for_tree(dual_tree: &SPTree) -> Result<TreeCertificates, CertError> {
    let vertices = realize(dual_tree)?.graph().num_vertices();
    if vertices < 4 {
        return Err(CertError::Hypothesis(format!("G^∨ has {vertices} vertices, needs at least 4")));
    }
    assemble_s(&dual_tree.dual())
}

// ---------------------------------------------------------------------------
// Replacement

#[derive(Clone, Debug)]
pub enum Piece {
    Cycle(SourceTerminalGraph),
    CoHamiltonian(Vec<ArcDiagram>),
}

#[derive(Clone, Debug)]
pub struct Replacement {
    pub graph: Multigraph,
    /// Condition 1 verdicts for the edges of the inserted piece.
    pub verdicts: BTreeMap<String, Verdict>,
}

/// Replaces edge `uv` of `g` by the piece and certifies condition 1 for
/// every edge of the piece inside the new graph.
pub fn replacement_cond1(g: &Multigraph, uv: &str, piece: &Piece) -> Result<Replacement, CertError> {
    let edge = g.edge(uv).ok_or_else(|| GraphError::UnknownEdge(uv.to_string()))?;
    if edge.is_self_loop() {
        return Err(CertError::Hypothesis(format!("`{uv}` is a self-loop")));
    }
    let h = match piece {
        Piece::Cycle(h) => h.clone(),
        Piece::CoHamiltonian(pieces) => realize(&co_hamiltonian_dual_tree(pieces)?.dual())?,
    };
    let out = spbuild::replace_edge(g, uv, &h)?;
    if out.loop_number() < 2 {
        return Err(CertError::Hypothesis("replaced graph has loop number below 2".into()));
    }
    let (mut u, mut v) = (edge.ends.0.clone(), edge.ends.1.clone());
    if u > v {
        std::mem::swap(&mut u, &mut v);
    }
    let gamma = SourceTerminalGraph::new(g.delete_edge(uv)?, u, v)?;
    let s_certs: BTreeMap<String, SCertificate> = match piece {
        Piece::Cycle(h) => {
            if g.is_bridge(uv)? || g.loop_number() == 0 {
                return Err(CertError::Hypothesis("cycle replacement needs a non-bridge edge in a graph with a cycle".into()));
            }
            let mut m = BTreeMap::new();
            for e in h.graph().edge_ids() {
                m.insert(e.clone(), cycle_lemma(h, &gamma, &e, CycleMode::Parallel)?.s);
            }
            m
        }
        Piece::CoHamiltonian(pieces) => {
            let inner = co_hamiltonian_s(pieces)?;
            let mut m = BTreeMap::new();
            for (e, sc) in &inner.s {
                m.insert(e.clone(), s_lift(&inner.graph, &gamma, sc, JoinKind::Parallel)?.cert);
            }
            m
        }
    };
    let pair = PsiPair { psi: kirchhoff_polynomial(&out), hat: Polynomial::zero() };
    let mut verdicts = BTreeMap::new();
    for (e, sc) in s_certs {
        let c1 = checked_cond1(&out, s_to_cond1(&pair, &sc)?, "replacement")?;
        let class = out.classify_edge(&e)?;
        verdicts.insert(
            e,
            Verdict { status: Status::Holds, certificate: Some(Certificate::Cond1(c1)), edge_class: Some(class) },
        );
    }
    Ok(Replacement { graph: out, verdicts })
}
