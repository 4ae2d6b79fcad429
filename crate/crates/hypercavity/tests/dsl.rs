use std::path::PathBuf;

use hypercavity::{parse, print, Code, Diagnostic};
use hypercavity_core::interactions::PhaseConvention;
use hypercavity_core::params::PhysicalParams;
use hypercavity_core::protocol::*;
use proptest::prelude::*;

fn corpus(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "corpus", name].iter().collect();
    std::fs::read_to_string(p).unwrap()
}

fn diags(src: &str) -> Vec<Diagnostic> {
    parse(src).expect_err("expected diagnostics")
}

#[test]
fn corpus_matches_builders() {
    let cases = [
        ("tag_chain.qproto", tag_chain_script(3).unwrap()),
        ("linear_cluster.qproto", linear_cluster_script(TimeExpr::PiOverLambda)),
        ("cluster_2d.qproto", cluster_2d_script(TimeExpr::PiOver2Lambda)),
        ("ring_graph.qproto", ring_graph_script(3).unwrap()),
    ];
    let p = PhysicalParams::default();
    for (file, built) in cases {
        let parsed = parse(&corpus(file)).unwrap_or_else(|d| panic!("{file}: {d:?}"));
        assert_eq!(parsed, built, "{file}");
        assert_eq!(parse(&print(&parsed)).unwrap(), parsed, "{file}");
        for conv in [PhaseConvention::Paper, PhaseConvention::Hamiltonian] {
            let a = execute(&parsed, conv, &p).unwrap();
            let b = execute(&built, conv, &p).unwrap();
            assert_eq!(a.outcomes, b.outcomes, "{file} {conv:?}");
            assert_eq!(a.pre_detection, b.pre_detection, "{file} {conv:?}");
        }
    }
}

#[test]
fn corpus_lines_point_into_the_file() {
    let src = corpus("linear_cluster.qproto");
    let s = parse(&src).unwrap();
    let lines: Vec<&str> = src.lines().collect();
    for st in &s.steps {
        let text = lines[st.line - 1];
        assert!(text.starts_with(st.item.kind().keyword()), "{text}");
    }
}

#[test]
fn minimal_script() {
    let s = parse("cavity c fock=2 init=plus\natom a\nbragg a c t=endpoint\n").unwrap();
    assert_eq!(s.declarations.len(), 2);
    assert_eq!(
        s.declarations[1].item,
        Declaration::Atom { label: "a".into(), internal: 0, momentum: 0 }
    );
    assert_eq!(s.steps[0].line, 3);
}

#[test]
fn empty_and_comment_only_sources_are_empty_scripts() {
    assert_eq!(parse("").unwrap(), Script::default());
    assert_eq!(parse("# nothing\n\n   # here\n").unwrap(), Script::default());
}

#[test]
fn undeclared_label() {
    let d = diags("bragg a1 c9 t=endpoint\n");
    assert!(d.iter().all(|d| d.line == 1));
    assert!(d.iter().any(|d| d.code == Code::Undeclared && d.message.contains("c9")), "{d:?}");
}

#[test]
fn detect_needs_an_auxiliary_atom() {
    let d = diags("atom a\ndetect a\n");
    assert_eq!(d.len(), 1);
    assert_eq!((d[0].line, d[0].code), (2, Code::Type));
}

#[test]
fn wrong_kinds_in_interactions() {
    let d = diags("cavity c\naux x\nbragg x c t=endpoint\n");
    assert_eq!(d[0].code, Code::Type);
    let d = diags("cavity c\naux x\njc c x t=endpoint\n");
    assert!(d.iter().all(|d| d.code == Code::Type && d.line == 3));
}

#[test]
fn every_problem_is_reported() {
    let src = "cavity c fock=1\nfrobnicate x\natom a\natom a\nbragg a c t=-1\naux x\ndetect x\nramsey x\n";
    let d = diags(src);
    let got: Vec<(usize, Code)> = d.iter().map(|d| (d.line, d.code)).collect();
    assert_eq!(
        got,
        vec![
            (1, Code::Value),
            (2, Code::Keyword),
            (4, Code::Duplicate),
            (5, Code::Undeclared),
            (5, Code::Value),
            (8, Code::Order)
        ]
    );
}

#[test]
fn removed_labels_cannot_be_used() {
    let d = diags("cavity c\naux x\nremove c\njc x c t=endpoint\n");
    assert_eq!((d[0].line, d[0].code), (4, Code::Order));
}

#[test]
fn arity_and_lexing() {
    assert_eq!(diags("cavity c\natom a\nbragg a\n")[0].code, Code::Arity);
    let d = diags("cavity c!\n");
    assert_eq!((d[0].line, d[0].col, d[0].code), (1, 9, Code::Lex));
    assert_eq!(diags("cavity c colour=red\n")[0].code, Code::Keyword);
}

#[test]
fn diagnostic_display() {
    let d = &diags("\n  ramsey x\n")[0];
    assert_eq!(d.to_string(), format!("2:10: E_UNDECLARED: {}", d.message));
}

#[test]
fn unicode_momentum_labels() {
    let a = parse("atom a init=b,P₋₂\npulse a sel=P₋₂ t=1.5 phi=-pi/2\n").unwrap();
    let b = parse("atom a init=b,P-2\npulse a sel=P-2 t=1.5 phi=-pi/2\n").unwrap();
    assert_eq!(a, b);
}

fn time() -> impl Strategy<Value = TimeExpr> {
    prop_oneof![
        Just(TimeExpr::Endpoint),
        Just(TimeExpr::PiOverLambda),
        Just(TimeExpr::PiOver2Lambda),
        Just(TimeExpr::PiOverOmega),
        (0.0..1e3f64).prop_map(TimeExpr::Value),
    ]
}

fn phase() -> impl Strategy<Value = PhaseExpr> {
    prop_oneof![
        (-8i64..8, 1u64..9).prop_map(|(num, den)| PhaseExpr::PiFraction { num, den }),
        (-10.0..10.0f64).prop_map(PhaseExpr::Value),
    ]
}

#[derive(Debug, Clone)]
enum Op {
    Bragg(usize, usize, TimeExpr),
    Pulse(usize, usize, TimeExpr, Option<PhaseExpr>, Option<PhaseExpr>),
    Jc(usize, usize, TimeExpr),
    Dispersive(usize, usize, TimeExpr, Option<PaperTable>),
    Ramsey(usize),
}

fn op() -> impl Strategy<Value = Op> {
    let i = 0usize..8;
    prop_oneof![
        (i.clone(), i.clone(), time()).prop_map(|(a, c, t)| Op::Bragg(a, c, t)),
        (i.clone(), 0usize..2, time(), proptest::option::of(phase()), proptest::option::of(phase()))
            .prop_map(|(a, s, t, p, q)| Op::Pulse(a, s, t, p, q)),
        (i.clone(), i.clone(), time()).prop_map(|(x, c, t)| Op::Jc(x, c, t)),
        (
            i.clone(),
            i.clone(),
            time(),
            proptest::option::of(prop_oneof![Just(PaperTable::Standard), Just(PaperTable::Cluster)])
        )
            .prop_map(|(x, c, t, tb)| Op::Dispersive(x, c, t, tb)),
        i.prop_map(Op::Ramsey),
    ]
}

prop_compose! {
    fn script()(
        lambda in proptest::option::of(1e-3..10.0f64),
        mu in proptest::option::of(1e-3..10.0f64),
        cavities in proptest::collection::vec((2usize..5, proptest::option::of(0usize..2)), 1..3),
        atoms in proptest::collection::vec((0usize..2, 0usize..2), 1..3),
        auxes in proptest::collection::vec(0usize..2, 1..3),
        ops in proptest::collection::vec(op(), 0..10),
        detect in any::<bool>(),
    ) -> Script {
        let mut s = Script::default();
        if let Some(v) = lambda { s.set(Setting::Lambda(v)); }
        if let Some(v) = mu { s.set(Setting::Mu(v)); }
        let c = |k: usize| format!("c{}", k % cavities.len());
        let a = |k: usize| format!("a{}", k % atoms.len());
        let x = |k: usize| format!("x{}", k % auxes.len());
        for (k, (fock, init)) in cavities.iter().enumerate() {
            let init = init.map_or(CavityInit::Plus, CavityInit::Fock);
            s.declare(Declaration::Cavity { label: c(k), fock: *fock, init });
        }
        for (k, (internal, momentum)) in atoms.iter().enumerate() {
            s.declare(Declaration::Atom { label: a(k), internal: *internal, momentum: *momentum });
        }
        for (k, init) in auxes.iter().enumerate() {
            s.declare(Declaration::Aux { label: x(k), init: *init });
        }
        for o in ops {
            s.step(match o {
                Op::Bragg(i, j, t) => Step::Bragg { atom: a(i), cavity: c(j), t },
                Op::Pulse(i, sel, t, phi, paper_phi) => Step::Pulse { atom: a(i), sel, t, phi, paper_phi },
                Op::Jc(i, j, t) => Step::Jc { aux: x(i), cavity: c(j), t },
                Op::Dispersive(i, j, t, table) => Step::Dispersive { aux: x(i), cavity: c(j), t, table },
                Op::Ramsey(i) => Step::Ramsey { aux: x(i) },
            });
        }
        if detect {
            s.step(Step::Detect { targets: (0..auxes.len()).map(x).collect() });
        }
        s
    }
}

proptest! {
    #[test]
    fn print_then_parse_is_identity(s in script()) {
        let text = print(&s);
        let back = parse(&text).map_err(|d| TestCaseError::fail(format!("{d:?}\n{text}")))?;
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(print(&back), text);
    }

    #[test]
    fn arbitrary_text_never_panics(src in "[a-z0-9_=,./+ #\n-]{0,200}") {
        let n = src.lines().count().max(1);
        if let Err(d) = parse(&src) {
            prop_assert!(!d.is_empty());
            prop_assert!(d.iter().all(|d| d.line >= 1 && d.line <= n && d.col >= 1));
        }
    }

    #[test]
    fn arbitrary_unicode_never_panics(src in "\\PC{0,120}") {
        if let Err(d) = parse(&src) {
            prop_assert!(d.iter().all(|d| d.line >= 1));
        }
    }

    #[test]
    fn mutated_corpus_lines_never_panic(line in 0usize..40, junk in "[a-z0-9=/ -]{0,12}") {
        let src = corpus("linear_cluster.qproto");
        let mut lines: Vec<String> = src.lines().map(String::from).collect();
        let k = line % lines.len();
        lines[k].push_str(&junk);
        let _ = parse(&lines.join("\n"));
    }
}
