//! End-to-end acceptance checks. Prints one `criterion N: PASS|FAIL: ...`
//! line per criterion. Exits nonzero on any FAIL except a known
//! divergence (a documented case where the stated contract is false).

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, ensure, Context, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use symanzik::certbuild::*;
use symanzik::conditions::{
    check_cond1, check_s, check_t, counterexample_search, stability_witness, verify_certificate, verify_cond1,
    verify_s, verify_t, Certificate, SCertificate, Status, TCertificate, Verdict,
};
use symanzik::graph::{Edge, EdgeClass, Multigraph, SourceTerminalGraph};
use symanzik::kirchhoff::{breaker, kirchhoff_polynomial};
use symanzik::linsolve::{GradedMembershipProblem, Identity, Summand};
use symanzik::poly::{rat, Polynomial, Rational, Var};
use symanzik::random::{one_vertex_join, random_multigraph, random_sp_tree, seed_from_env, seeded, with_parallel_pair, GraphShape};
use symanzik::spbuild::{
    cycle, join, path, path_named, realize, wheel, ArcDiagram, JoinKind, RestrictedJoin,
};
use symanzik_cli::document::GraphDocument;
use symanzik_cli::sexpr::parse_sp;

const WORKED_H: &str = "(P (S (P x y) z w) eta)";

// ---------------------------------------------------------------------------
// helpers

fn poly(text: &str) -> Polynomial {
    text.parse().expect("literal polynomial")
}

fn v(name: &str) -> Polynomial {
    Polynomial::var(name)
}

fn terminals(h: &SourceTerminalGraph) -> Option<(&str, &str)> {
    Some((h.source(), h.terminal()))
}

/// A verdict that claims Holds must carry a certificate that verifies.
fn sound(g: &Multigraph, terms: Option<(&str, &str)>, verdict: &Verdict) -> Result<()> {
    if verdict.holds() {
        let cert = verdict.certificate.as_ref().context("Holds without a certificate")?;
        ensure!(verify_certificate(g, terms, cert)?, "decider certificate does not verify");
    }
    Ok(())
}

fn cond1(g: &Multigraph, e: &str) -> Result<Status> {
    let verdict = check_cond1(g, e)?;
    sound(g, None, &verdict)?;
    Ok(verdict.status)
}

fn regular_edges(g: &Multigraph) -> Vec<String> {
    g.edges().iter().filter(|e| g.classify_edge(&e.id) == Ok(EdgeClass::Regular)).map(|e| e.id.clone()).collect()
}

fn sp_graph(rng: &mut ChaCha8Rng, lo: usize, hi: usize, prefix: &str) -> SourceTerminalGraph {
    let n = rng.gen_range(lo..=hi);
    realize(&random_sp_tree(rng, n, prefix)).expect("random trees realize")
}

/// Random small series-parallel graph on which T holds, with the decider's
/// certificate.
fn t_graph(rng: &mut ChaCha8Rng, prefix: &str) -> Result<Certified<TCertificate>> {
    loop {
        let h = sp_graph(rng, 2, 4, prefix);
        let verdict = check_t(&h)?;
        if let Some(Certificate::T(cert)) = verdict.certificate {
            ensure!(verify_t(&h, &cert)?, "decider T certificate does not verify");
            return Ok(Certified { graph: h, cert });
        }
    }
}

fn s_holds(h: &SourceTerminalGraph, e: &str) -> Result<bool> {
    let verdict = check_s(h, e)?;
    sound(h.graph(), terminals(h), &verdict)?;
    Ok(verdict.holds())
}

fn t_holds(h: &SourceTerminalGraph) -> Result<bool> {
    let verdict = check_t(h)?;
    sound(h.graph(), terminals(h), &verdict)?;
    Ok(verdict.holds())
}

/// A builder's S output must verify and agree with the decider.
fn accept_s(h: &SourceTerminalGraph, cert: &SCertificate, what: &str) -> Result<()> {
    ensure!(verify_s(h, cert)?, "{what}: S certificate for {} does not verify", cert.edge);
    ensure!(s_holds(h, &cert.edge)?, "{what}: decider disagrees on S({})", cert.edge);
    Ok(())
}

fn accept_t(h: &SourceTerminalGraph, cert: &TCertificate, what: &str) -> Result<()> {
    ensure!(verify_t(h, cert)?, "{what}: T certificate does not verify");
    ensure!(t_holds(h)?, "{what}: decider disagrees on T");
    Ok(())
}

fn ids(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn pick<'a, T>(rng: &mut ChaCha8Rng, items: &'a [T]) -> &'a T {
    &items[rng.gen_range(0..items.len())]
}

// ---------------------------------------------------------------------------
// criteria

fn wheel_expectation(n: usize, edge: &str) -> Status {
    if n == 3 || edge.starts_with('s') {
        Status::Holds
    } else {
        Status::Fails
    }
}

fn criterion_1() -> Result<String> {
    let start = Instant::now();
    let mut edges = 0;
    for n in 3..=6 {
        let w = wheel(n)?;
        for e in w.edge_ids() {
            let got = cond1(&w, &e)?;
            ensure!(got == wheel_expectation(n, &e), "W{n} edge {e}: {got}");
            edges += 1;
        }
    }
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(120), "took {took:.1?}");
    Ok(format!("{edges} wheel edges of W3..W6 as expected in {took:.1?}"))
}

fn criterion_2() -> Result<String> {
    let start = Instant::now();
    let h = realize(&parse_sp(WORKED_H)?)?;
    let (x, y, z, w, eta) = (v("x"), v("y"), v("z"), v("w"), v("eta"));
    let xy_sum = &x + &y;
    let zw_sum = &z + &w;
    let inner = &(&x * &y) + &(&xy_sum * &zw_sum);
    let psi = &(&xy_sum * &eta) + &inner;
    let hat = &eta * &inner;
    ensure!(kirchhoff_polynomial(h.graph()) == psi, "Ψ = {}", kirchhoff_polynomial(h.graph()));
    ensure!(breaker(&h) == hat, "Ψ̂ = {}", breaker(&h));

    let a: BTreeMap<String, Polynomial> = [
        ("x", "1/2*y*z + 1/2*y*w - 1/2*y*eta"),
        ("y", "x*y + x*z + x*w + x*eta + 1/2*y*z + 1/2*y*w + 3/2*y*eta"),
        ("z", "0"),
        ("w", "-x*y - x*z - x*w - x*eta - 3/2*y*z - 3/2*y*w + 1/2*y*eta - z^2 - 2*z*w - w^2"),
    ]
    .iter()
    .map(|(k, t)| (k.to_string(), poly(t)))
    .collect();
    let cert = SCertificate { edge: "eta".into(), a, b: Polynomial::zero(), c: poly("y") };
    ensure!(verify_certificate(h.graph(), terminals(&h), &Certificate::S(cert))?, "worked certificate rejected");
    ensure!(s_holds(&h, "eta")?, "check_s does not report Holds");
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(1), "took {took:.1?}");
    Ok(format!("Ψ, Ψ̂ exact, worked certificate verifies, decider agrees, {took:.1?}"))
}

const TREE_LOOP: &str = ", G∖e is a tree";

/// A FAIL whose cause is a documented mathematical exception to the stated
/// contract; reported but not counted against the exit status.
#[derive(Debug)]
struct KnownDivergence(String);

impl std::fmt::Display for KnownDivergence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for KnownDivergence {}

/// Decides Ψ_G ∈ ⟨∂_j Ψ_{G∖e}⟩ by a membership system assembled here.
fn literal_cond1(g: &Multigraph, e: &str) -> Result<bool> {
    let target = kirchhoff_polynomial(g);
    let rest = kirchhoff_polynomial(&g.delete_edge(e)?);
    let target_degree = target.degree().context("connected graph has nonzero Ψ")? as i64;
    let summands: Vec<Summand> = g
        .edge_ids()
        .into_iter()
        .filter(|j| j != e)
        .filter_map(|j| {
            let gen = rest.partial_by(&j);
            let d = gen.degree()? as i64;
            Some(Summand::new(gen, j, target_degree - d))
        })
        .collect();
    if summands.is_empty() {
        return Ok(target.is_zero());
    }
    Ok(GradedMembershipProblem::new(vec![Identity { target, summands }]).solve()?.is_feasible())
}

fn criterion_3() -> Result<String> {
    let mut rng = seeded(seed_from_env().wrapping_add(300));
    let mut counts: HashMap<EdgeClass, usize> = HashMap::new();
    let mut violations = Vec::new();
    let mut literal_checked = 0;
    for _ in 0..50 {
        let g = random_multigraph(&mut rng, GraphShape::up_to(8));
        for e in g.edge_ids() {
            let class = g.classify_edge(&e)?;
            let got = cond1(&g, &e)?;
            let literal = literal_cond1(&g, &e)?;
            literal_checked += 1;
            ensure!(literal == (got == Status::Holds), "decider {got} vs literal system {literal} for {e} in {g:?}");
            *counts.entry(class).or_default() += 1;
            let expected = match class {
                EdgeClass::SelfLoop => Status::Holds,
                EdgeClass::Bridge | EdgeClass::TreeComplement => Status::Fails,
                EdgeClass::Regular => continue,
            };
            if got != expected {
                let rest = g.delete_edge(&e)?;
                let note = if rest.is_tree() { TREE_LOOP } else { "" };
                violations.push(format!("{class} {e} reported {got}{note}"));
            }
        }
    }
    let summary = format!(
        "self-loops {}, bridges {}, tree-complements {}, {literal_checked} edges match the literal system",
        counts.get(&EdgeClass::SelfLoop).unwrap_or(&0),
        counts.get(&EdgeClass::Bridge).unwrap_or(&0),
        counts.get(&EdgeClass::TreeComplement).unwrap_or(&0),
    );
    let tree_loops = violations.iter().filter(|v| v.ends_with(TREE_LOOP)).count();
    match (violations.len(), tree_loops) {
        (0, _) => Ok(summary),
        (n, k) if n == k => Err(KnownDivergence(format!(
            "{summary}; {n} self-loops with G∖e a tree report fails (Ψ_G = x_e is not in the zero ideal), e.g. {}",
            violations[0]
        ))
        .into()),
        (n, _) => bail!("{summary}; {n} contract violations, e.g. {}", violations[0]),
    }
}

fn criterion_4() -> Result<String> {
    let seed = seed_from_env().wrapping_add(400);

    let mut rng = seeded(seed);
    let mut one_vertex = 0;
    while one_vertex < 100 {
        let (g, joined) = one_vertex_join(&mut rng, GraphShape::up_to(5), GraphShape::up_to(3));
        let regular = regular_edges(&g);
        if regular.is_empty() {
            continue;
        }
        let e = pick(&mut rng, &regular).clone();
        ensure!(cond1(&joined, &e)? == cond1(&g, &e)?, "1-vertex join changes {e} in {joined:?}");
        one_vertex += 1;
    }

    let mut rng = seeded(seed.wrapping_add(1));
    let mut cut = 0;
    while cut < 100 {
        let g = random_multigraph(&mut rng, GraphShape::up_to(8));
        let cuts = g.connectivity_suite().two_edge_cuts;
        let Some((x, _)) = cuts.first() else { continue };
        let contracted = g.contract_edge(x)?;
        for e in regular_edges(&g).iter().filter(|e| *e != x) {
            ensure!(cond1(&g, e)? == cond1(&contracted, e)?, "contracting {x} changes {e} in {g:?}");
            cut += 1;
        }
    }

    let mut rng = seeded(seed.wrapping_add(2));
    let mut multiplicity = 0;
    while multiplicity < 100 {
        let Some((g, x, y)) = with_parallel_pair(&mut rng, GraphShape::up_to(7)) else { continue };
        let ends = g.edge(&x).context("parallel edge")?.ends.clone();
        let tripled = g.add_edge(Edge::new("z", ends.0, ends.1))?;
        let single = g.delete_edge(&y)?;
        for e in regular_edges(&single).iter().filter(|e| **e != x) {
            let base = cond1(&g, e)?;
            ensure!(cond1(&tripled, e)? == base, "tripling changes {e} in {g:?}");
            ensure!(cond1(&single, e)? == base, "single copy changes {e} in {g:?}");
            multiplicity += 1;
        }
    }

    let mut rng = seeded(seed.wrapping_add(3));
    let mut parallel = 0;
    while parallel < 100 {
        let Some((g, x, y)) = with_parallel_pair(&mut rng, GraphShape::up_to(8)) else { continue };
        for e in [&x, &y] {
            if g.classify_edge(e)? == EdgeClass::Regular {
                ensure!(cond1(&g, e)? == Status::Holds, "parallel edge {e} fails in {g:?}");
                parallel += 1;
            }
        }
    }
    Ok(format!(
        "1-vertex join {one_vertex}, 2-edge cut {cut}, multiplicity {multiplicity}, parallel e {parallel} instances, no discrepancies"
    ))
}

/// Determinant of the Laplacian with the first row and column removed.
fn laplacian_cofactor(g: &Multigraph) -> Rational {
    let n = g.num_vertices();
    let index: HashMap<&str, usize> = g.vertices().iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let mut lap = vec![vec![rat(0, 1); n]; n];
    for e in g.edges().iter().filter(|e| !e.is_self_loop()) {
        let (a, b) = (index[e.ends.0.as_str()], index[e.ends.1.as_str()]);
        lap[a][a] += rat(1, 1);
        lap[b][b] += rat(1, 1);
        lap[a][b] -= rat(1, 1);
        lap[b][a] -= rat(1, 1);
    }
    let mut m: Vec<Vec<Rational>> = lap.into_iter().skip(1).map(|row| row.into_iter().skip(1).collect()).collect();
    let zero = rat(0, 1);
    let mut det = rat(1, 1);
    for col in 0..m.len() {
        let Some(p) = (col..m.len()).find(|&r| m[r][col] != zero) else { return zero };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let pivot = m[col][col].clone();
        det *= pivot.clone();
        for r in col + 1..m.len() {
            let f = m[r][col].clone() / pivot.clone();
            for c in col..m.len() {
                let sub = f.clone() * m[col][c].clone();
                m[r][c] -= sub;
            }
        }
    }
    det
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    parent[x] = r;
    r
}

/// Σ over spanning trees of the product of the variables of the edges not
/// in the tree.
fn brute_psi(g: &Multigraph) -> Polynomial {
    let index = |v: &str| g.vertices().iter().position(|w| w == v).expect("known vertex");
    let ends: Vec<(usize, usize)> = g.edges().iter().map(|e| (index(&e.ends.0), index(&e.ends.1))).collect();
    let need = g.num_vertices() - 1;
    let mut total = Polynomial::zero();
    for mask in 0u32..(1 << ends.len()) {
        if mask.count_ones() as usize != need {
            continue;
        }
        let mut parent: Vec<usize> = (0..g.num_vertices()).collect();
        let acyclic = ends.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).all(|(_, &(a, b))| {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
            ra != rb
        });
        if acyclic {
            let term = g.edges().iter().enumerate().filter(|(i, _)| mask & (1 << i) == 0).fold(Polynomial::one(), |t, (_, e)| {
                &t * &v(&e.id)
            });
            total = &total + &term;
        }
    }
    total
}

fn criterion_5() -> Result<String> {
    let mut rng = seeded(seed_from_env().wrapping_add(500));
    for _ in 0..200 {
        let g = random_multigraph(&mut rng, GraphShape::up_to(12));
        let psi = kirchhoff_polynomial(&g);
        let ones: HashMap<Var, Rational> = g.edge_ids().iter().map(|e| (Var::new(e), rat(1, 1))).collect();
        ensure!(psi.evaluate(&ones) == laplacian_cofactor(&g), "Ψ(1) ≠ cofactor for {g:?}");

        let degree = psi.degree().context("connected graph has nonzero Ψ")? as i64;
        let euler: Polynomial = g.edge_ids().iter().map(|e| &v(e) * &psi.partial_by(e)).sum();
        ensure!(euler == psi.scale(&rat(degree, 1)), "Euler identity fails for {g:?}");

        for e in g.edges() {
            let deleted = kirchhoff_polynomial(&g.delete_edge(&e.id)?);
            let expected = if e.is_self_loop() {
                &v(&e.id) * &deleted
            } else {
                &(&v(&e.id) * &deleted) + &kirchhoff_polynomial(&g.contract_edge(&e.id)?)
            };
            ensure!(psi == expected, "contraction-deletion fails at {} in {g:?}", e.id);
        }
    }
    let mut brute = 0;
    while brute < 150 {
        let g = random_multigraph(&mut rng, GraphShape::up_to(10));
        ensure!(kirchhoff_polynomial(&g) == brute_psi(&g), "spanning tree enumeration disagrees for {g:?}");
        brute += 1;
    }
    Ok(format!("200 graphs ≤ 12 edges: cofactor, Euler, contraction-deletion; {brute} graphs ≤ 10 edges match enumeration"))
}

/// Runs `body` until it has succeeded `want` times; `Ok(false)` means the
/// random input missed the builder's hypothesis and is redrawn.
fn repeat(want: usize, mut body: impl FnMut() -> Result<bool>) -> Result<usize> {
    let mut done = 0;
    let mut tries = 0;
    while done < want {
        tries += 1;
        ensure!(tries <= 50 * want, "only {done} of {want} instances met the hypotheses");
        if body()? {
            done += 1;
        }
    }
    Ok(done)
}

fn criterion_6() -> Result<String> {
    let mut spokes = 0;
    for n in 3..=6 {
        for i in 1..=n {
            let cfg = SpokeConfiguration::wheel_spoke(n, i)?;
            let cert = lemma_s_certificate(&cfg)?;
            ensure!(verify_cond1(&cfg.graph, &cert)?, "W{n} spoke s{i}: certificate rejected");
            ensure!(cond1(&cfg.graph, &format!("s{i}"))? == Status::Holds, "W{n} spoke s{i}: decider disagrees");
            spokes += 1;
        }
    }

    let mut rng = seeded(seed_from_env().wrapping_add(600));
    let rng = &mut rng;
    let mut counts: Vec<(&str, usize)> = Vec::new();

    counts.push((
        "cycle_lemma ⋆",
        repeat(20, || {
            let h = cycle(rng.gen_range(1..=3), rng.gen_range(1..=3))?;
            let e = pick(rng, &h.graph().edge_ids()).clone();
            let gamma = sp_graph(rng, 1, 4, "g");
            let out = cycle_lemma(&h, &gamma, &e, CycleMode::Parallel)?;
            accept_s(&out.graph, &out.s, "cycle lemma")?;
            accept_t(&out.graph, out.t.as_ref().context("parallel mode gives T")?, "cycle lemma")?;
            Ok(true)
        })?,
    ));

    counts.push((
        "cycle_lemma ∫",
        repeat(20, || {
            let h = cycle(rng.gen_range(1..=3), rng.gen_range(1..=3))?;
            let e = pick(rng, &h.graph().edge_ids()).clone();
            let gamma = sp_graph(rng, 2, 4, "g");
            if path_edges(&gamma).is_some() {
                return Ok(false);
            }
            let out = cycle_lemma(&h, &gamma, &e, CycleMode::Series)?;
            accept_s(&out.graph, &out.s, "series cycle lemma")?;
            Ok(true)
        })?,
    ));

    counts.push((
        "cyclepaths",
        repeat(20, || {
            let h = cycle(rng.gen_range(1..=3), rng.gen_range(1..=3))?;
            let tail = ids("z", rng.gen_range(0..=2));
            let gamma = sp_graph(rng, 1, 4, "g");
            let gamma_t = match check_t(&gamma)?.certificate {
                Some(Certificate::T(c)) => Some(c),
                _ => None,
            };
            let mut edges = h.graph().edge_ids();
            edges.extend(tail.iter().cloned());
            let e = pick(rng, &edges).clone();
            let on_tail = tail.contains(&e);
            if on_tail && gamma_t.is_none() && path_edges(&gamma).is_none() {
                return Ok(false);
            }
            let out = cyclepaths_certificate(&h, &tail, &gamma, gamma_t.as_ref(), &e)?;
            accept_s(&out.graph, &out.cert, "cyclepaths")?;
            Ok(true)
        })?,
    ));

    let blocks = |rng: &mut ChaCha8Rng| -> Result<Vec<ChainPiece>> {
        let mut chain = Vec::new();
        for prefix in ["c", "d"].iter().take(rng.gen_range(1..=2)) {
            chain.push(ChainPiece::Block(t_graph(rng, prefix)?));
        }
        if rng.gen_bool(0.3) {
            chain.push(ChainPiece::Edge("e2".into()));
        }
        let at = rng.gen_range(0..=chain.len());
        chain.insert(at, ChainPiece::Edge("e1".into()));
        Ok(chain)
    };
    let accept_bridge = |out: &SAndT| -> Result<bool> {
        accept_s(&out.graph, &out.s, "bridge lemma")?;
        accept_t(&out.graph, &out.t, "bridge lemma")?;
        Ok(true)
    };

    counts.push((
        "bridge (i)",
        repeat(20, || {
            let k = rng.gen_range(1..=3);
            let chain: Vec<ChainPiece> = ids("e", k).into_iter().map(ChainPiece::Edge).collect();
            let gamma = t_graph(rng, "g")?;
            let e1 = format!("e{}", rng.gen_range(1..=k));
            accept_bridge(&bridge_lemma(&chain, &e1, &gamma.graph, BridgeCase::PathWithT(gamma.cert))?)
        })?,
    ));
    counts.push((
        "bridge (ii)",
        repeat(20, || {
            let chain = blocks(rng)?;
            let gamma = t_graph(rng, "g")?;
            accept_bridge(&bridge_lemma(&chain, "e1", &gamma.graph, BridgeCase::BlocksWithT(gamma.cert))?)
        })?,
    ));
    counts.push((
        "bridge (iii)",
        repeat(20, || {
            let chain = blocks(rng)?;
            let gamma = path_named(&ids("g", rng.gen_range(1..=3)))?;
            accept_bridge(&bridge_lemma(&chain, "e1", &gamma, BridgeCase::BlocksWithPath)?)
        })?,
    ));

    for (label, kind, min_hat_degree) in [("s_lift ⋆", JoinKind::Parallel, 3), ("s_lift ∫", JoinKind::Series, 2)] {
        counts.push((
            label,
            repeat(20, || {
                let h = sp_graph(rng, 2, 5, "h");
                // the lift first rewrites the certificate with B = 0 or C = 0
                if breaker(&h).degree().unwrap_or(0) < min_hat_degree {
                    return Ok(false);
                }
                let e = pick(rng, &h.graph().edge_ids()).clone();
                let Some(Certificate::S(cert)) = check_s(&h, &e)?.certificate else { return Ok(false) };
                let other = sp_graph(rng, 1, 3, "o");
                let lifted = s_lift(&h, &other, &cert, kind)?;
                accept_s(&lifted.graph, &lifted.cert, label)?;
                Ok(true)
            })?,
        ));
    }

    counts.push((
        "t_path_star",
        repeat(20, || {
            let h = sp_graph(rng, 1, 4, "h");
            let gamma = path_named(&ids("z", rng.gen_range(1..=3)))?;
            let out = t_path_star(&h, &gamma)?;
            accept_t(&out.graph, &out.cert, "path-to-T")?;
            Ok(true)
        })?,
    ));
    counts.push((
        "t_lift_parallel",
        repeat(20, || {
            let h = t_graph(rng, "h")?;
            let other = sp_graph(rng, 1, 3, "o");
            let out = t_lift_parallel(&h.graph, &h.cert, &other)?;
            accept_t(&out.graph, &out.cert, "T parallel lift")?;
            Ok(true)
        })?,
    ));
    counts.push((
        "t_lift_path",
        repeat(20, || {
            let h = t_graph(rng, "h")?;
            let side = if rng.gen_bool(0.5) { RestrictedJoin::SeriesBefore } else { RestrictedJoin::SeriesAfter };
            let out = t_lift_path(&h.graph, &h.cert, "k", side)?;
            accept_t(&out.graph, &out.cert, "T path lift")?;
            Ok(true)
        })?,
    ));
    counts.push((
        "t_series_combo",
        repeat(20, || {
            let parts: Vec<Certified<TCertificate>> =
                ["c", "d", "f"].iter().take(rng.gen_range(2..=3)).map(|p| t_graph(rng, p)).collect::<Result<_>>()?;
            let combo = t_series_combo(&parts)?;
            let psi = kirchhoff_polynomial(combo.graph.graph());
            let lhs: Polynomial = combo.coeffs.iter().map(|(j, c)| c * &psi.partial_by(j)).sum();
            ensure!(lhs == breaker(&combo.graph), "series combination identity fails");
            Ok(true)
        })?,
    ));

    let listed: Vec<String> = counts.iter().map(|(k, n)| format!("{k} {n}")).collect();
    Ok(format!("{spokes} spokes; {}", listed.join(", ")))
}

fn criterion_7() -> Result<String> {
    for n in 1..=4 {
        ensure!(check_t(&path(n)?)?.status == Status::Fails, "T(path {n}) does not fail");
    }
    let mut cycles = 0;
    for n in 1..=5 {
        for m in 1..=6 - n {
            ensure!(t_holds(&cycle(n, m)?)?, "T(cycle({n},{m})) does not hold");
            cycles += 1;
        }
    }
    let mut rng = seeded(seed_from_env().wrapping_add(700));
    let mut stars = 0;
    while stars < 30 {
        let g = random_multigraph(&mut rng, GraphShape::up_to(6));
        if g.num_vertices() < 2 {
            continue;
        }
        let t = pick(&mut rng, &g.vertices()[1..]).clone();
        let h = SourceTerminalGraph::new(g, "v0", t)?;
        let p = path_named(&ids("p", rng.gen_range(1..=3)))?;
        let joined = join(&h, &p, JoinKind::Parallel)?;
        ensure!(t_holds(&joined)?, "T(H ⋆ path) fails for {h:?}");
        stars += 1;
    }
    Ok(format!("paths 1..4 fail, {cycles} cycles hold, {stars} random H ⋆ path hold"))
}

fn random_piece(rng: &mut ChaCha8Rng, spine_len: usize, next_id: &mut usize) -> Result<ArcDiagram> {
    let mut fresh = || {
        *next_id += 1;
        format!("q{next_id}")
    };
    let spine: Vec<String> = (0..spine_len).map(|_| fresh()).collect();
    if spine_len == 1 && rng.gen_bool(0.5) {
        return Ok(ArcDiagram::with_default_spine(&spine, vec![])?);
    }
    let mut arcs = vec![(0, spine_len, fresh())];
    for _ in 0..rng.gen_range(0..=2) {
        let i = rng.gen_range(0..spine_len);
        let j = rng.gen_range(i + 1..=spine_len);
        let mut trial = arcs.clone();
        trial.push((i, j, fresh()));
        if ArcDiagram::with_default_spine(&spine, trial.clone()).is_ok() {
            arcs = trial;
        }
    }
    Ok(ArcDiagram::with_default_spine(&spine, arcs)?)
}

fn criterion_8() -> Result<String> {
    let mut rng = seeded(seed_from_env().wrapping_add(800));
    let mut edges = 0;
    let mut sizes = Vec::new();
    for _ in 0..10 {
        // G^∨ has one vertex more than its spine edges; at least two pieces,
        // since a lone piece with an outer arc dualizes to Γ ∫ e
        let total = rng.gen_range(3..=5);
        sizes.push(total + 1);
        let mut next_id = 0;
        let mut pieces = Vec::new();
        let mut remaining = total;
        while remaining > 0 {
            let len = rng.gen_range(1..=remaining.min(total - 1));
            pieces.push(random_piece(&mut rng, len, &mut next_id)?);
            remaining -= len;
        }
        let out = co_hamiltonian_s(&pieces).map_err(|e| anyhow!("{e} for pieces {pieces:?}"))?;
        let dual_vertices = realize(&co_hamiltonian_dual_tree(&pieces)?)?.graph().num_vertices();
        ensure!((4..=6).contains(&dual_vertices), "G^∨ has {dual_vertices} vertices");
        ensure!(out.s.len() == out.graph.graph().num_edges(), "not every edge certified");
        for cert in out.s.values() {
            accept_s(&out.graph, cert, "co-Hamiltonian")?;
            edges += 1;
        }
    }
    Ok(format!("10 graphs with G^∨ sizes {sizes:?}, {edges} edges certified and confirmed"))
}

fn criterion_9() -> Result<String> {
    let start = Instant::now();
    let found = counterexample_search(8)?;
    let searched = start.elapsed();
    for c in &found {
        let witness = stability_witness(&c.tree, &c.edge)?;
        let joined = realize(&witness.joined)?;
        ensure!(
            check_cond1(joined.graph(), &c.edge)?.status == Status::Fails,
            "condition 1 still holds for {} after joining the witness",
            c.edge
        );
    }
    Ok(format!("{} candidates (search {searched:.1?}), each destabilized by its witness", found.len()))
}

fn run_cli(args: &[&str]) -> Result<String> {
    let out = Command::new(env!("CARGO_BIN_EXE_symanzik")).args(args).output()?;
    ensure!(out.status.success(), "symanzik {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    Ok(String::from_utf8(out.stdout)?)
}

fn criterion_10() -> Result<String> {
    let csv_text = run_cli(&["survey", "wheels", "3", "5"])?;
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let mut expected = Vec::new();
    for n in 3..=5 {
        for e in wheel(n)?.edge_ids() {
            expected.push((format!("W{n}"), e.clone(), wheel_expectation(n, &e).to_string()));
        }
    }
    let rows: Vec<(String, String, String)> = reader
        .records()
        .map(|r| {
            let r = r?;
            Ok((r[0].to_string(), r[1].to_string(), r[3].to_string()))
        })
        .collect::<Result<_>>()?;
    ensure!(rows == expected, "survey rows differ: {rows:?}");

    let dir = tempfile::tempdir()?;
    let families: [&[&str]; 9] = [
        &["wheel", "3"],
        &["wheel", "6"],
        &["path", "1"],
        &["path", "4"],
        &["cycle", "2", "3"],
        &["sp", WORKED_H],
        &["sp", "(S a (P b c) d)"],
        &["dual", WORKED_H],
        &["dual", "(S a b)"],
    ];
    for (i, args) in families.iter().enumerate() {
        let file = dir.path().join(format!("g{i}.json"));
        let mut full = vec!["build"];
        full.extend_from_slice(args);
        full.extend_from_slice(&["--out", file.to_str().context("utf-8 path")?]);
        run_cli(&full)?;
        let doc = GraphDocument::parse(&fs::read_to_string(&file)?)?;
        ensure!(GraphDocument::parse(&doc.to_json())? == doc, "round trip changes {args:?}");
        let direct = match args[0] {
            "wheel" => GraphDocument::from_graph(&wheel(args[1].parse()?)?),
            "path" => GraphDocument::from_marked(&path(args[1].parse()?)?),
            "cycle" => GraphDocument::from_marked(&cycle(args[1].parse()?, args[2].parse()?)?),
            "sp" => GraphDocument::from_marked(&realize(&parse_sp(args[1])?)?),
            _ => GraphDocument::from_marked(&realize(&parse_sp(args[1])?.dual())?),
        };
        ensure!(doc == direct, "built document differs from the library graph for {args:?}");
    }
    let base = dir.path().join("g1.json");
    let piece = dir.path().join("g4.json");
    let replaced = run_cli(&["build", "replace", base.to_str().unwrap_or_default(), "r1", piece.to_str().unwrap_or_default()])?;
    let doc = GraphDocument::parse(&replaced)?;
    ensure!(GraphDocument::parse(&doc.to_json())? == doc, "round trip changes the replaced graph");
    Ok(format!("{} survey rows match, {} built families round-trip", rows.len(), families.len() + 1))
}

fn main() -> ExitCode {
    let criteria: [fn() -> Result<String>; 10] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
    ];
    println!("seed {}", seed_from_env());
    let (mut failed, mut known) = (0, 0);
    for (i, criterion) in criteria.iter().enumerate() {
        match criterion() {
            Ok(detail) => println!("criterion {}: PASS: {detail}", i + 1),
            Err(e) if e.is::<KnownDivergence>() => {
                known += 1;
                println!("criterion {}: FAIL (known divergence): {e:#}", i + 1);
            }
            Err(e) => {
                failed += 1;
                println!("criterion {}: FAIL: {e:#}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed, {known} known divergence(s), {failed} unexpected failure(s)",
        criteria.len() - failed - known,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
