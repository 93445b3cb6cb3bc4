use symanzik::certbuild::*;
use symanzik::conditions::{check_cond1, check_s, check_t, verify_cond1, verify_s, verify_t, SCertificate, Status};
use symanzik::graph::{Multigraph, SourceTerminalGraph};
use symanzik::poly::Polynomial;
use symanzik::spbuild::{self, cycle, path, realize, rename_edges, ArcDiagram, JoinKind, RestrictedJoin, SPTree};

fn leaf(id: &str) -> SPTree {
    SPTree::leaf(id)
}

fn s(children: Vec<SPTree>) -> SPTree {
    SPTree::series(children).unwrap()
}

fn p(children: Vec<SPTree>) -> SPTree {
    SPTree::parallel(children).unwrap()
}

fn worked_h() -> SourceTerminalGraph {
    realize(&p(vec![s(vec![p(vec![leaf("x"), leaf("y")]), leaf("z"), leaf("w")]), leaf("eta")])).unwrap()
}

fn worked_cert() -> SCertificate {
    let poly = |t: &str| t.parse::<Polynomial>().unwrap();
    let a = [
        ("x", "1/2*y*z + 1/2*y*w - 1/2*y*eta"),
        ("y", "x*y + x*z + x*w + x*eta + 1/2*y*z + 1/2*y*w + 3/2*y*eta"),
        ("z", "0"),
        ("w", "-x*y - x*z - x*w - x*eta - 3/2*y*z - 3/2*y*w + 1/2*y*eta - z^2 - 2*z*w - w^2"),
    ];
    SCertificate {
        edge: "eta".into(),
        a: a.iter().map(|(k, v)| (k.to_string(), poly(v))).collect(),
        b: Polynomial::zero(),
        c: poly("y"),
    }
}

fn renamed(h: &SourceTerminalGraph, prefix: &str) -> SourceTerminalGraph {
    rename_edges(h, |id| format!("{prefix}{id}")).unwrap()
}

fn t_of(h: &SourceTerminalGraph) -> Certified<symanzik::conditions::TCertificate> {
    cycle_t(h).unwrap()
}

#[test]
fn spoke_certificates_on_small_wheels() {
    for n in 3..=6 {
        for i in 1..=n {
            let cfg = SpokeConfiguration::wheel_spoke(n, i).unwrap();
            let cert = lemma_s_certificate(&cfg).unwrap();
            assert!(verify_cond1(&cfg.graph, &cert).unwrap(), "W{n} s{i}");
        }
    }
}

#[test]
fn spoke_configuration_found_by_search() {
    let g = spbuild::wheel(5).unwrap();
    let cfg = SpokeConfiguration::find(&g, "s3").unwrap();
    assert!(verify_cond1(&g, &lemma_s_certificate(&cfg).unwrap()).unwrap());
}

#[test]
fn spoke_configuration_with_loop_number_one_is_rejected() {
    let g = Multigraph::from_edges([("x", "c", "d"), ("y", "c", "a"), ("z", "c", "b"), ("e", "a", "b")]).unwrap();
    let cfg = SpokeConfiguration::new(g, "e", "c", ["x", "y", "z"]).unwrap();
    assert!(matches!(lemma_s_certificate(&cfg), Err(CertError::ZeroDenominator(_))));
}

fn handle_graph() -> Multigraph {
    Multigraph::from_edges([
        ("x", "a", "b"),
        ("y", "a", "b"),
        ("e", "c", "d"),
        ("f", "c", "d"),
        ("a1", "a", "c"),
        ("a2", "b", "d"),
    ])
    .unwrap()
}

#[test]
fn parallel_transport_of_decider_certificate() {
    let g = handle_graph();
    let v = check_cond1(&g, "e").unwrap();
    let Some(symanzik::conditions::Certificate::Cond1(cert)) = v.certificate else { panic!("expected a certificate") };
    let out = parallel_transport(&g, "e", "x", "y", "z", &cert).unwrap();
    assert!(verify_cond1(&out.both_graph, &out.cert_both).unwrap());
    assert!(verify_cond1(&out.del_graph, &out.cert_del).unwrap());
    assert!(verify_cond1(&out.add_graph, &out.cert_add).unwrap());
    assert!(out.components.q0.is_zero());
    for (label, ok) in bracket_equations(&g, "e", "x", "y", &out.components).unwrap() {
        assert!(ok, "{label}");
    }
}

#[test]
fn symmetrization_is_idempotent() {
    let g = handle_graph();
    let v = check_cond1(&g, "e").unwrap();
    let Some(symanzik::conditions::Certificate::Cond1(cert)) = v.certificate else { panic!("expected a certificate") };
    let once = parallel_transport(&g, "e", "x", "y", "z", &cert).unwrap();
    let twice = parallel_transport(&g, "e", "x", "y", "z", &once.symmetrized).unwrap();
    assert_eq!(once.symmetrized, twice.symmetrized);
    assert_eq!(once.components, twice.components);
}

#[test]
fn parallel_transport_rejects_non_parallel_pair() {
    let g = handle_graph();
    let v = check_cond1(&g, "e").unwrap();
    let Some(symanzik::conditions::Certificate::Cond1(cert)) = v.certificate else { panic!("expected a certificate") };
    assert!(matches!(parallel_transport(&g, "e", "x", "a1", "z", &cert), Err(CertError::Hypothesis(_))));
}

#[test]
fn worked_certificate_lifts_across_paths() {
    let h = worked_h();
    let cert = worked_cert();
    assert!(verify_s(&h, &cert).unwrap());
    for other in [path(2).unwrap(), spbuild::k2("k")] {
        let lifted = s_lift(&h, &other, &cert, JoinKind::Parallel).unwrap();
        assert!(verify_s(&lifted.graph, &lifted.cert).unwrap());
        let lifted = s_lift(&h, &other, &cert, JoinKind::Series).unwrap();
        assert!(verify_s(&lifted.graph, &lifted.cert).unwrap());
    }
}

#[test]
fn lift_formula_with_large_partner() {
    let cert = worked_cert();
    let h_edges: Vec<String> = ["x", "y", "z", "w", "eta"].iter().map(|s| s.to_string()).collect();
    let stand_in: Vec<String> = ["g1", "g2", "g3"].iter().map(|s| s.to_string()).collect();
    let (b, c) = s_lift_parallel_closed_form(&cert.a, &cert.c, &h_edges, &stand_in, 3, 14).unwrap();
    let poly = |t: &str| t.parse::<Polynomial>().unwrap();
    assert_eq!(c, poly("1/15*y"));
    assert_eq!(b["g1"], poly("-1/15*y*g1"));
    assert_eq!(b["z"], poly("14/15*y*z"));
    assert_eq!(&b["x"] - &cert.a["x"], poly("14/15*x*y"));
}

#[test]
fn t_lifts() {
    let double = cycle(1, 1).unwrap();
    let t = t_of(&double);
    let up = t_lift_path(&t.graph, &t.cert, "k", RestrictedJoin::SeriesAfter).unwrap();
    assert!(verify_t(&up.graph, &up.cert).unwrap());
    let before = t_lift_path(&t.graph, &t.cert, "k", RestrictedJoin::SeriesBefore).unwrap();
    assert!(verify_t(&before.graph, &before.cert).unwrap());

    let star = t_path_star(&cycle(2, 1).unwrap(), &path(2).unwrap()).unwrap();
    assert!(verify_t(&star.graph, &star.cert).unwrap());

    let par = t_lift_parallel(&t.graph, &t.cert, &renamed(&cycle(2, 1).unwrap(), "h")).unwrap();
    assert!(verify_t(&par.graph, &par.cert).unwrap());

    let second = t_of(&renamed(&cycle(2, 1).unwrap(), "q"));
    let combo = t_series_combo(&[t, second]).unwrap();
    let pair = symanzik::conditions::PsiPair::of(&combo.graph);
    let lhs: Polynomial = combo.coeffs.iter().map(|(j, c)| c * &pair.psi.partial_by(j)).sum();
    assert_eq!(lhs, pair.hat);
}

#[test]
fn t_lift_rejects_bad_input() {
    let t = t_of(&cycle(1, 1).unwrap());
    let wrong = cycle(2, 1).unwrap();
    assert!(matches!(
        t_lift_parallel(&wrong, &t.cert, &path(1).unwrap()),
        Err(CertError::BadInput(_))
    ));
}

#[test]
fn bridge_lemma_cases() {
    let gamma = renamed(&cycle(2, 1).unwrap(), "g");
    let tg = t_of(&gamma).cert;
    let chain = vec![ChainPiece::Edge("e1".into()), ChainPiece::Edge("e2".into())];
    let out = bridge_lemma(&chain, "e1", &gamma, BridgeCase::PathWithT(tg.clone())).unwrap();
    assert!(verify_s(&out.graph, &out.s).unwrap());
    assert!(verify_t(&out.graph, &out.t).unwrap());

    let c1 = t_of(&renamed(&cycle(1, 1).unwrap(), "c"));
    let c2 = t_of(&renamed(&cycle(2, 1).unwrap(), "d"));
    let chain = vec![ChainPiece::Block(c1.clone()), ChainPiece::Edge("e1".into()), ChainPiece::Block(c2.clone())];
    let out = bridge_lemma(&chain, "e1", &gamma, BridgeCase::BlocksWithT(tg)).unwrap();
    assert!(verify_s(&out.graph, &out.s).unwrap());
    assert!(check_s(&out.graph, "e1").unwrap().holds());

    let two = renamed(&path(2).unwrap(), "z");
    let out = bridge_lemma(&chain, "e1", &two, BridgeCase::BlocksWithPath).unwrap();
    assert!(verify_s(&out.graph, &out.s).unwrap());
    assert!(verify_t(&out.graph, &out.t).unwrap());
}

#[test]
fn bridge_lemma_rejects_gamma_without_t() {
    let bogus = t_of(&cycle(1, 1).unwrap()).cert;
    let two = renamed(&path(2).unwrap(), "z");
    let c1 = t_of(&renamed(&cycle(1, 1).unwrap(), "c"));
    let chain = vec![ChainPiece::Block(c1), ChainPiece::Edge("e1".into())];
    assert!(matches!(
        bridge_lemma(&chain, "e1", &two, BridgeCase::BlocksWithT(bogus)),
        Err(CertError::BadInput(_) | CertError::Condition(_))
    ));
}

#[test]
fn cycle_lemma_modes() {
    let h = cycle(2, 1).unwrap();
    let gamma = renamed(&cycle(1, 1).unwrap(), "g");
    let out = cycle_lemma(&h, &gamma, "a1", CycleMode::Parallel).unwrap();
    assert!(verify_s(&out.graph, &out.s).unwrap());
    assert!(verify_t(&out.graph, out.t.as_ref().unwrap()).unwrap());
    assert!(check_s(&out.graph, "a1").unwrap().holds());
    assert!(check_t(&out.graph).unwrap().holds());

    let h = cycle(1, 1).unwrap();
    let tri = renamed(&cycle(2, 1).unwrap(), "g");
    let out = cycle_lemma(&h, &tri, "b1", CycleMode::Series).unwrap();
    assert!(verify_s(&out.graph, &out.s).unwrap());

    let line = renamed(&path(2).unwrap(), "g");
    assert!(matches!(cycle_lemma(&h, &line, "a1", CycleMode::Series), Err(CertError::Hypothesis(_))));
}

#[test]
fn cyclepaths_cases() {
    let h = cycle(2, 1).unwrap();
    let gamma = renamed(&cycle(1, 1).unwrap(), "g");
    let tail = vec!["z1".to_string()];
    let out = cyclepaths_certificate(&h, &tail, &gamma, None, "a2").unwrap();
    assert!(verify_s(&out.graph, &out.cert).unwrap());

    let tg = t_of(&gamma).cert;
    let out = cyclepaths_certificate(&h, &tail, &gamma, Some(&tg), "z1").unwrap();
    assert!(verify_s(&out.graph, &out.cert).unwrap());

    let line = renamed(&path(2).unwrap(), "g");
    let out = cyclepaths_certificate(&h, &tail, &line, None, "z1").unwrap();
    assert!(verify_s(&out.graph, &out.cert).unwrap());

    assert!(matches!(cyclepaths_certificate(&h, &tail, &gamma, None, "z1"), Err(CertError::Hypothesis(_))));
}

fn single(id: &str) -> ArcDiagram {
    ArcDiagram::with_default_spine(&[id], vec![]).unwrap()
}

#[test]
fn co_hamiltonian_path_of_single_edges() {
    let out = co_hamiltonian_s(&[single("a"), single("b"), single("c")]).unwrap();
    assert_eq!(out.s.len(), 3);
    for (e, cert) in &out.s {
        assert!(verify_s(&out.graph, cert).unwrap());
        assert!(check_s(&out.graph, e).unwrap().holds());
    }
}

#[test]
fn co_hamiltonian_worked_example() {
    let piece = ArcDiagram::with_default_spine(&["x", "y"], vec![(0, 2, "z".into()), (0, 2, "w".into())]).unwrap();
    let out = co_hamiltonian_s(&[piece, single("eta")]).unwrap();
    assert_eq!(symanzik::kirchhoff::kirchhoff_polynomial(out.graph.graph()), symanzik::kirchhoff::kirchhoff_polynomial(worked_h().graph()));
    assert_eq!(out.s.len(), 5);
    for (e, cert) in &out.s {
        assert!(verify_s(&out.graph, cert).unwrap(), "{e}");
        assert!(check_s(&out.graph, e).unwrap().holds(), "{e}");
    }
}

#[test]
fn co_hamiltonian_needs_four_vertices() {
    assert!(matches!(co_hamiltonian_s(&[single("a"), single("b")]), Err(CertError::Hypothesis(_))));
}

#[test]
fn replacement_by_double_edge_in_wheel() {
    let g = spbuild::wheel(4).unwrap();
    let double = renamed(&cycle(1, 1).unwrap(), "d");
    let out = replacement_cond1(&g, "r1", &Piece::Cycle(double)).unwrap();
    assert_eq!(out.verdicts.len(), 2);
    for v in out.verdicts.values() {
        assert_eq!(v.status, Status::Holds);
    }
}

#[test]
fn replacement_by_worked_example() {
    let g = spbuild::wheel(4).unwrap();
    let mut doubled = g.clone();
    for i in 1..=4 {
        let e = g.edge(&format!("s{i}")).unwrap();
        doubled = doubled
            .add_edge(symanzik::graph::Edge::new(format!("s{i}'"), e.ends.0.clone(), e.ends.1.clone()))
            .unwrap();
    }
    let piece = ArcDiagram::with_default_spine(&["x", "y"], vec![(0, 2, "z".into()), (0, 2, "w".into())]).unwrap();
    let out = replacement_cond1(&doubled, "r1", &Piece::CoHamiltonian(vec![piece, single("eta")])).unwrap();
    assert_eq!(out.verdicts.len(), 5);
    for (e, v) in &out.verdicts {
        assert_eq!(v.status, Status::Holds, "{e}");
    }
}

#[test]
fn replacement_with_small_loop_number_is_rejected() {
    let g = Multigraph::from_edges([("u", "a", "b")]).unwrap();
    let double = renamed(&cycle(1, 1).unwrap(), "d");
    assert!(matches!(replacement_cond1(&g, "u", &Piece::Cycle(double)), Err(CertError::Hypothesis(_))));
}
