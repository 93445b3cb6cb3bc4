//! Deciders and verifiers for condition 1, the simultaneous combination S(G,e)
//! and condition T(G), plus verdict-preserving edge preprocessing.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::graph::{EdgeClass, GraphError, Multigraph, SourceTerminalGraph};
use crate::kirchhoff::{breaker, kirchhoff_polynomial};
use crate::linsolve::{Assignment, GradedMembershipProblem, Identity, LinsolveError, Solution, Summand};
use crate::poly::{Polynomial, Rational};

mod search;

pub use search::{
    counterexample_search, delta_y_experiment, enumerate_sp_trees, stability_witness, CounterexampleCandidate, DeltaYReport,
    StabilityWitness,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConditionError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Linsolve(#[from] LinsolveError),
    #[error(transparent)]
    Sp(#[from] crate::spbuild::SpError),
    #[error("edge `{edge}` is {class}, expected a regular edge")]
    NotRegular { edge: String, class: EdgeClass },
    #[error("certificate shape mismatch: {0}")]
    Shape(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

/// Ψ_G = Σ coeffs[a] ∂_a Ψ_{G∖e}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cond1Certificate {
    pub edge: String,
    pub coeffs: BTreeMap<String, Polynomial>,
}

/// Ψ = Σ A_j ∂_{ej}Ψ + B ∂_eΨ and Ψ̂ = Σ A_j ∂_{ej}Ψ̂ + C ∂_eΨ̂.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SCertificate {
    pub edge: String,
    pub a: BTreeMap<String, Polynomial>,
    pub b: Polynomial,
    pub c: Polynomial,
}

/// Ψ̂ = Σ A_j ∂_jΨ and Σ A_j ∂_jΨ̂ = C Ψ̂.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TCertificate {
    pub a: BTreeMap<String, Polynomial>,
    pub c: Polynomial,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Cond1(Cond1Certificate),
    S(SCertificate),
    T(TCertificate),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Holds,
    Fails,
    NotApplicable(String),
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Holds => f.write_str("holds"),
            Status::Fails => f.write_str("fails"),
            Status::NotApplicable(why) => write!(f, "not-applicable ({why})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    pub certificate: Option<Certificate>,
    /// Class of the distinguished edge; `None` for condition T.
    pub edge_class: Option<EdgeClass>,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        self.status == Status::Holds
    }

    fn fails(edge_class: Option<EdgeClass>) -> Verdict {
        Verdict { status: Status::Fails, certificate: None, edge_class }
    }
}

fn slot_a(id: &str) -> String {
    format!("A:{id}")
}

fn take_a(assign: &mut Assignment, ids: &[String]) -> BTreeMap<String, Polynomial> {
    ids.iter().map(|id| (id.clone(), assign.remove(&slot_a(id)).unwrap_or_default())).collect()
}

fn rat_u(k: usize) -> Rational {
    Rational::from_integer(k.into())
}

/// Euler certificate expressing `p` (homogeneous of degree `d > 0`) through
/// its own partials: coefficient of ∂_a p is `factor * a / d`.
fn euler_coefficients(p: &Polynomial, ids: &[String], factor: &Polynomial) -> Option<BTreeMap<String, Polynomial>> {
    let d = p.degree()?;
    if d == 0 {
        return None;
    }
    let inv = Rational::new(1.into(), (d as i64).into());
    Some(
        ids.iter()
            .map(|a| (a.clone(), (factor * &Polynomial::var(a)).scale(&inv)))
            .collect(),
    )
}

fn other_edges(g: &Multigraph, e: &str) -> Vec<String> {
    g.edges().iter().filter(|x| x.id != e).map(|x| x.id.clone()).collect()
}

/// Condition 1: Ψ_G ∈ ⟨∂Ψ_{G∖e}⟩. Self-loops, bridges and tree complements
/// are settled without solving.
pub fn check_cond1(g: &Multigraph, e: &str) -> Result<Verdict, ConditionError> {
    let class = g.classify_edge(e)?;
    let rest = other_edges(g, e);
    match class {
        EdgeClass::SelfLoop => {
            // Ψ_G = t_e Ψ_{G∖e}, and Ψ_{G∖e} lies in its own Jacobian ideal
            // by Euler's identity as long as it is not constant
            let deleted = kirchhoff_polynomial(&g.delete_edge(e)?);
            match euler_coefficients(&deleted, &rest, &Polynomial::var(e)) {
                Some(coeffs) => Ok(Verdict {
                    status: Status::Holds,
                    certificate: Some(Certificate::Cond1(Cond1Certificate { edge: e.to_string(), coeffs })),
                    edge_class: Some(class),
                }),
                None => Ok(Verdict::fails(Some(class))),
            }
        }
        EdgeClass::Bridge | EdgeClass::TreeComplement => Ok(Verdict::fails(Some(class))),
        EdgeClass::Regular => {
            let psi = kirchhoff_polynomial(g);
            let deleted = kirchhoff_polynomial(&g.delete_edge(e)?);
            match solve_cond1_system(&psi, &deleted, &rest)? {
                Some(coeffs) => Ok(Verdict {
                    status: Status::Holds,
                    certificate: Some(Certificate::Cond1(Cond1Certificate { edge: e.to_string(), coeffs })),
                    edge_class: Some(class),
                }),
                None => Ok(Verdict::fails(Some(class))),
            }
        }
    }
}

/// Solves `target = Σ coeffs[a] ∂_a gen` with homogeneous cofactors.
fn solve_cond1_system(
    target: &Polynomial,
    gen: &Polynomial,
    ids: &[String],
) -> Result<Option<BTreeMap<String, Polynomial>>, ConditionError> {
    let partials: Vec<(String, Polynomial)> = ids.iter().map(|a| (a.clone(), gen.partial_by(a))).collect();
    let gd = partials.iter().filter_map(|(_, p)| p.degree()).max();
    let td = target.degree();
    let (Some(gd), Some(td)) = (gd, td) else {
        return Ok(if target.is_zero() { Some(ids.iter().map(|a| (a.clone(), Polynomial::zero())).collect()) } else { None });
    };
    let degree = td as i64 - gd as i64;
    let problem = GradedMembershipProblem::new(vec![Identity {
        target: target.clone(),
        summands: partials.into_iter().map(|(a, p)| Summand::new(p, a, degree)).collect(),
    }]);
    match problem.solve()? {
        Solution::Feasible(mut assign) => {
            Ok(Some(ids.iter().map(|a| (a.clone(), assign.remove(a).unwrap_or_default())).collect()))
        }
        Solution::Infeasible(_) => Ok(None),
    }
}

/// Condition 1 through the equivalent statement Ψ_{G/e} ∈ ⟨∂Ψ_{G∖e}⟩. The
/// returned certificate is converted back to the Ψ_G form.
pub fn check_cond1_via_contraction(g: &Multigraph, e: &str) -> Result<Verdict, ConditionError> {
    let class = g.classify_edge(e)?;
    if class != EdgeClass::Regular {
        return Err(ConditionError::NotRegular { edge: e.to_string(), class });
    }
    let rest = other_edges(g, e);
    let contracted = kirchhoff_polynomial(&g.contract_edge(e)?);
    let deleted = kirchhoff_polynomial(&g.delete_edge(e)?);
    let Some(mut coeffs) = solve_cond1_system(&contracted, &deleted, &rest)? else {
        return Ok(Verdict::fails(Some(class)));
    };
    // t_e Ψ_{G∖e} = Σ (t_e a / deg) ∂_a Ψ_{G∖e}
    let euler = euler_coefficients(&deleted, &rest, &Polynomial::var(e)).expect("regular edge leaves a cycle");
    for (a, p) in euler {
        let entry = coeffs.entry(a).or_default();
        *entry = &*entry + &p;
    }
    Ok(Verdict {
        status: Status::Holds,
        certificate: Some(Certificate::Cond1(Cond1Certificate { edge: e.to_string(), coeffs })),
        edge_class: Some(class),
    })
}

/// Which of B, C to force to zero when solving for S.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    None,
    BZero,
    CZero,
}

/// The polynomials the S and T identities are built from.
#[derive(Clone, Debug)]
pub struct PsiPair {
    pub psi: Polynomial,
    pub hat: Polynomial,
}

impl PsiPair {
    pub fn of(h: &SourceTerminalGraph) -> PsiPair {
        PsiPair { psi: kirchhoff_polynomial(h.graph()), hat: breaker(h) }
    }
}

pub fn check_s(h: &SourceTerminalGraph, e: &str) -> Result<Verdict, ConditionError> {
    check_s_normalized(h, e, Normalization::None)
}

/// Solves S(G,e) as one system with the A_j shared between both identities.
pub fn check_s_normalized(h: &SourceTerminalGraph, e: &str, norm: Normalization) -> Result<Verdict, ConditionError> {
    let g = h.graph();
    let class = g.classify_edge(e)?;
    let pair = PsiPair::of(h);
    let rest = other_edges(g, e);
    let (pe, he) = (pair.psi.partial_by(e), pair.hat.partial_by(e));
    let mut first: Vec<Summand> = rest.iter().map(|j| Summand::new(pe.partial_by(j), slot_a(j), 2)).collect();
    let mut second: Vec<Summand> = rest.iter().map(|j| Summand::new(he.partial_by(j), slot_a(j), 2)).collect();
    if norm != Normalization::BZero {
        first.push(Summand::new(pe.clone(), "B", 1));
    }
    if norm != Normalization::CZero {
        second.push(Summand::new(he.clone(), "C", 1));
    }
    let problem = GradedMembershipProblem::new(vec![
        Identity { target: pair.psi.clone(), summands: first },
        Identity { target: pair.hat.clone(), summands: second },
    ]);
    match problem.solve()? {
        Solution::Feasible(mut assign) => {
            let a = take_a(&mut assign, &rest);
            let cert = SCertificate {
                edge: e.to_string(),
                a,
                b: assign.remove("B").unwrap_or_default(),
                c: assign.remove("C").unwrap_or_default(),
            };
            Ok(Verdict { status: Status::Holds, certificate: Some(Certificate::S(cert)), edge_class: Some(class) })
        }
        Solution::Infeasible(_) => Ok(Verdict::fails(Some(class))),
    }
}

/// Solves T(G) as one system: target Ψ̂ for the first identity, target 0
/// with summand -Ψ̂·C for the second.
pub fn check_t(h: &SourceTerminalGraph) -> Result<Verdict, ConditionError> {
    let g = h.graph();
    if !g.is_connected() {
        return Err(GraphError::Disconnected.into());
    }
    let pair = PsiPair::of(h);
    let ids = g.edge_ids();
    let first = ids.iter().map(|j| Summand::new(pair.psi.partial_by(j), slot_a(j), 2)).collect();
    let mut second: Vec<Summand> = ids.iter().map(|j| Summand::new(pair.hat.partial_by(j), slot_a(j), 2)).collect();
    second.push(Summand::new(-&pair.hat, "C", 1));
    let problem = GradedMembershipProblem::new(vec![
        Identity { target: pair.hat.clone(), summands: first },
        Identity { target: Polynomial::zero(), summands: second },
    ]);
    match problem.solve()? {
        Solution::Feasible(mut assign) => {
            let a = take_a(&mut assign, &ids);
            let cert = TCertificate { a, c: assign.remove("C").unwrap_or_default() };
            Ok(Verdict { status: Status::Holds, certificate: Some(Certificate::T(cert)), edge_class: None })
        }
        Solution::Infeasible(_) => Ok(Verdict::fails(None)),
    }
}

fn check_keys<'a, I: IntoIterator<Item = &'a String>>(g: &Multigraph, keys: I, exclude: Option<&str>) -> Result<(), ConditionError> {
    for k in keys {
        if !g.has_edge(k) || Some(k.as_str()) == exclude {
            return Err(ConditionError::Shape(format!("coefficient for `{k}` is not an admissible edge")));
        }
    }
    Ok(())
}

fn require_edge(g: &Multigraph, e: &str) -> Result<(), ConditionError> {
    if g.has_edge(e) {
        Ok(())
    } else {
        Err(ConditionError::Shape(format!("certificate edge `{e}` is not in the graph")))
    }
}

pub fn verify_cond1(g: &Multigraph, cert: &Cond1Certificate) -> Result<bool, ConditionError> {
    require_edge(g, &cert.edge)?;
    check_keys(g, cert.coeffs.keys(), Some(&cert.edge))?;
    let deleted = kirchhoff_polynomial(&g.delete_edge(&cert.edge)?);
    let lhs: Polynomial = cert.coeffs.iter().map(|(a, c)| c * &deleted.partial_by(a)).sum();
    Ok(lhs == kirchhoff_polynomial(g))
}

/// Checks both S identities against precomputed Ψ and Ψ̂.
pub fn verify_s_with(pair: &PsiPair, cert: &SCertificate) -> bool {
    let (pe, he) = (pair.psi.partial_by(&cert.edge), pair.hat.partial_by(&cert.edge));
    let first: Polynomial = cert.a.iter().map(|(j, c)| c * &pe.partial_by(j)).sum::<Polynomial>() + &cert.b * &pe;
    if first != pair.psi {
        return false;
    }
    let second: Polynomial = cert.a.iter().map(|(j, c)| c * &he.partial_by(j)).sum::<Polynomial>() + &cert.c * &he;
    second == pair.hat
}

pub fn verify_s(h: &SourceTerminalGraph, cert: &SCertificate) -> Result<bool, ConditionError> {
    require_edge(h.graph(), &cert.edge)?;
    check_keys(h.graph(), cert.a.keys(), Some(&cert.edge))?;
    Ok(verify_s_with(&PsiPair::of(h), cert))
}

pub fn verify_t_with(pair: &PsiPair, cert: &TCertificate) -> bool {
    let first: Polynomial = cert.a.iter().map(|(j, c)| c * &pair.psi.partial_by(j)).sum();
    if first != pair.hat {
        return false;
    }
    let second: Polynomial = cert.a.iter().map(|(j, c)| c * &pair.hat.partial_by(j)).sum();
    second == &cert.c * &pair.hat
}

pub fn verify_t(h: &SourceTerminalGraph, cert: &TCertificate) -> Result<bool, ConditionError> {
    check_keys(h.graph(), cert.a.keys(), None)?;
    Ok(verify_t_with(&PsiPair::of(h), cert))
}

/// Verifies any certificate. S and T certificates need source and terminal.
pub fn verify_certificate(
    g: &Multigraph,
    terminals: Option<(&str, &str)>,
    cert: &Certificate,
) -> Result<bool, ConditionError> {
    let marked = || -> Result<SourceTerminalGraph, ConditionError> {
        let (s, t) = terminals.ok_or_else(|| ConditionError::Shape("source and terminal required".into()))?;
        Ok(SourceTerminalGraph::new(g.clone(), s, t)?)
    };
    match cert {
        Certificate::Cond1(c) => verify_cond1(g, c),
        Certificate::S(c) => verify_s(&marked()?, c),
        Certificate::T(c) => verify_t(&marked()?, c),
    }
}

/// Rewrites an S certificate so that B = 0, using Euler's identity for
/// ∂_eΨ (degree n - 2 where n = deg Ψ̂). Needs n > 2 when B != 0.
pub fn normalize_b_zero(pair: &PsiPair, cert: &SCertificate) -> Result<SCertificate, ConditionError> {
    if cert.b.is_zero() {
        return Ok(cert.clone());
    }
    let n = pair.hat.degree().unwrap_or(0) as usize;
    if n <= 2 {
        return Err(ConditionError::Precondition("B = 0 normalisation needs deg Ψ̂ > 2".into()));
    }
    let d = rat_u(n - 2);
    let mut out = cert.clone();
    for (j, a) in out.a.iter_mut() {
        *a = &*a + &(&cert.b * &Polynomial::var(j)).scale(&(Rational::from_integer(1.into()) / &d));
    }
    out.c = &cert.c - &cert.b.scale(&(rat_u(n - 1) / &d));
    out.b = Polynomial::zero();
    Ok(out)
}

/// Rewrites an S certificate so that C = 0, using Euler's identity for
/// ∂_eΨ̂ (degree n - 1).
pub fn normalize_c_zero(pair: &PsiPair, cert: &SCertificate) -> Result<SCertificate, ConditionError> {
    if cert.c.is_zero() {
        return Ok(cert.clone());
    }
    let n = pair.hat.degree().unwrap_or(0) as usize;
    if n <= 1 {
        return Err(ConditionError::Precondition("C = 0 normalisation needs deg Ψ̂ > 1".into()));
    }
    let d = rat_u(n - 1);
    let mut out = cert.clone();
    for (j, a) in out.a.iter_mut() {
        *a = &*a + &(&cert.c * &Polynomial::var(j)).scale(&(Rational::from_integer(1.into()) / &d));
    }
    out.b = &cert.b - &cert.c.scale(&(rat_u(n - 2) / &d));
    out.c = Polynomial::zero();
    Ok(out)
}

/// Certificate for condition 1 obtained from an S certificate: the first S
/// identity with B∂_eΨ rewritten through Euler's identity.
pub fn s_to_cond1(pair: &PsiPair, cert: &SCertificate) -> Result<Cond1Certificate, ConditionError> {
    let pe = pair.psi.partial_by(&cert.edge);
    let mut coeffs = cert.a.clone();
    if !cert.b.is_zero() {
        let d = pe.degree().unwrap_or(0);
        if d == 0 {
            return Err(ConditionError::Precondition("∂_eΨ is constant, B cannot be absorbed".into()));
        }
        let inv = Rational::new(1.into(), (d as i64).into());
        for (j, a) in coeffs.iter_mut() {
            *a = &*a + &(&cert.b * &Polynomial::var(j)).scale(&inv);
        }
    }
    Ok(Cond1Certificate { edge: cert.edge.clone(), coeffs })
}

/// Result of [`preprocess`]: the reduced graph and the applied steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Preprocessed {
    pub graph: Multigraph,
    pub edge: String,
    pub steps: Vec<String>,
}

/// Shrinks `g` without changing the condition-1 verdict of `e`: strips
/// leaf blocks and self-loops away from `e`, contracts an edge of each
/// 2-edge cut, and thins parallel classes to two edges. A step is applied
/// only when `e` stays regular.
pub fn preprocess(g: &Multigraph, e: &str) -> Result<Preprocessed, ConditionError> {
    let class = g.classify_edge(e)?;
    if class != EdgeClass::Regular {
        return Err(ConditionError::NotRegular { edge: e.to_string(), class });
    }
    let regular = |h: &Multigraph| h.classify_edge(e).map(|c| c == EdgeClass::Regular).unwrap_or(false);
    let mut cur = g.clone();
    let mut steps = Vec::new();
    'outer: loop {
        let conn = cur.connectivity_suite();
        for l in conn.self_loops.iter().filter(|l| *l != e) {
            let next = cur.delete_edge(l)?;
            if regular(&next) {
                steps.push(format!("removed self-loop {l}"));
                cur = next;
                continue 'outer;
            }
        }
        let cuts: std::collections::BTreeSet<&str> = conn.cut_vertices.iter().map(String::as_str).collect();
        for block in &conn.biconnected_components {
            if block.iter().any(|x| x == e) {
                continue;
            }
            let verts: std::collections::BTreeSet<&str> = block
                .iter()
                .flat_map(|id| {
                    let ed = cur.edge(id).expect("block edge");
                    [ed.ends.0.as_str(), ed.ends.1.as_str()]
                })
                .collect();
            if verts.iter().filter(|v| cuts.contains(*v)).count() != 1 {
                continue;
            }
            let stripped = strip_block(&cur, block, &verts, &cuts)?;
            if regular(&stripped) {
                steps.push(format!("removed block {{{}}}", block.join(",")));
                cur = stripped;
                continue 'outer;
            }
        }
        for (x, y) in &conn.two_edge_cuts {
            for (a, b) in [(x, y), (y, x)] {
                if a == e {
                    continue;
                }
                let next = cur.contract_edge(a)?;
                if regular(&next) {
                    steps.push(format!("contracted {a} from 2-edge cut {{{a},{b}}}"));
                    cur = next;
                    continue 'outer;
                }
            }
        }
        let mut classes: BTreeMap<(String, String), Vec<String>> = BTreeMap::new();
        for ed in cur.edges().iter().filter(|x| !x.is_self_loop()) {
            let key = if ed.ends.0 <= ed.ends.1 { ed.ends.clone() } else { (ed.ends.1.clone(), ed.ends.0.clone()) };
            classes.entry(key).or_default().push(ed.id.clone());
        }
        for members in classes.values().filter(|m| m.len() >= 3) {
            if let Some(victim) = members.iter().rev().find(|m| *m != e) {
                let next = cur.delete_edge(victim)?;
                if regular(&next) {
                    steps.push(format!("removed parallel edge {victim}"));
                    cur = next;
                    continue 'outer;
                }
            }
        }
        break;
    }
    Ok(Preprocessed { graph: cur, edge: e.to_string(), steps })
}

/// Removes a leaf block and the vertices it alone covers.
fn strip_block(
    g: &Multigraph,
    block: &[String],
    verts: &std::collections::BTreeSet<&str>,
    cuts: &std::collections::BTreeSet<&str>,
) -> Result<Multigraph, ConditionError> {
    let edges: Vec<_> = g.edges().iter().filter(|x| !block.contains(&x.id)).cloned().collect();
    let keep_vertices: Vec<String> = g
        .vertices()
        .iter()
        .filter(|v| !verts.contains(v.as_str()) || cuts.contains(v.as_str()) || edges.iter().any(|x| x.touches(v)))
        .cloned()
        .collect();
    Ok(Multigraph::new(keep_vertices, edges)?)
}
