use std::collections::BTreeSet;

use spi_core::analysis::*;
use spi_core::corpus;
use spi_core::syntax::*;

fn load(name: &str) -> (EquationSystem, Analysis) {
    let sys = parse_program(corpus::by_name(name).unwrap().source).unwrap();
    let a = analyze(&sys).unwrap();
    (sys, a)
}

fn edges(g: &CallGraph) -> BTreeSet<String> {
    g.edges().map(|e| e.to_string()).collect()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn id(s: &str) -> ThreadId {
    ThreadId::new(s)
}

#[test]
fn cell_cycle_graph() {
    let (_, a) = load("cell");
    assert_eq!(edges(&a.cycle_graph), set(&["(Cell, {}, Send)", "(Send, {}, Send)", "(Send, {y1}, O)"]));
    assert!(a.read_once.is_ok());
    assert_eq!(a.aux[&id("Cell")], vec![Label(1)]);
    assert_eq!(a.aux[&id("Send")], vec![Label(1)]);
    assert!(a.accepted(), "{:?}", a.problems());
}

#[test]
fn server_cycle_graph() {
    let (_, a) = load("server");
    assert_eq!(edges(&a.cycle_graph), set(&["(Server, {y1}, Handle)", "(Handle, {}, Handle)", "(Handle, {}, O)"]));
    assert_eq!(a.aux[&id("Server")], vec![Label(1)]);
    assert!(a.aux[&id("Handle")].is_empty());
    assert!(a.accepted(), "{:?}", a.problems());
}

#[test]
fn abc_cycle_graph() {
    let (_, a) = load("abc");
    assert_eq!(edges(&a.cycle_graph), set(&["(A, {y1}, B)", "(B, {}, B)", "(B, {}, O)", "(C, {}, C)"]));
    assert!(a.read_once.is_ok());
    assert_eq!(a.aux[&id("A")], vec![Label(1)]);
    assert!(a.aux[&id("B")].is_empty());
    assert!(a.aux[&id("C")].is_empty());
}

#[test]
fn f_order_on_corpus() {
    let (_, a) = load("cell");
    assert!(a.f_order.greater(&id("Cell"), &id("Send")));
    assert_eq!(a.f_order.rank[&id("Cell")], 1);
    assert_eq!(a.f_order.rank[&id("Send")], 0);

    let (_, a) = load("server");
    assert!(a.f_order.greater(&id("Handle"), &id("Server")));
    assert!(a.f_order.equiv(&id("Handle"), &id("Handle")));

    // B calls A within the instant, so B is the greater one.
    let (_, a) = load("abc");
    assert!(a.f_order.greater(&id("B"), &id("A")));
    assert!(!a.f_order.geq(&id("A"), &id("B")));
    assert_eq!(a.f_order.rank[&id("B")], 1);
}

#[test]
fn rank_is_monotone_in_the_strict_order() {
    for p in corpus::ALL {
        let (sys, a) = load(p.name);
        for x in &sys.equations {
            for y in &sys.equations {
                if a.f_order.greater(&x.name, &y.name) {
                    assert!(a.f_order.rank[&x.name] > a.f_order.rank[&y.name]);
                }
            }
        }
    }
}

#[test]
fn written_regions() {
    let rho = RegionId::new("rho");
    let (_, a) = load("cell");
    assert_eq!(a.w[&id("Cell")], BTreeSet::from([rho.clone()]));
    assert_eq!(a.w[&id("Send")], BTreeSet::from([rho.clone()]));

    let (_, a) = load("server");
    let rho2 = RegionId::new("rho2");
    assert_eq!(a.w[&id("Server")], BTreeSet::from([rho2.clone()]));
    assert_eq!(a.w[&id("Handle")], BTreeSet::from([rho2.clone()]));
    assert_eq!(a.regions.below(&rho2), BTreeSet::from([rho.clone()]));
    assert!(a.regions.below(&rho).is_empty());
    assert_eq!(a.gamma(Label(1)), Some(&rho));

    let (_, a) = load("abc");
    for t in ["A", "B", "C"] {
        assert_eq!(a.w[&id(t)], BTreeSet::from([rho.clone()]));
    }
}

#[test]
fn top_region_when_nothing_is_written() {
    let sys = parse_program("region r; def A(s: sig[r](unit)) [reset] = pause.A(s); init A(s);").unwrap();
    let a = analyze(&sys).unwrap();
    assert_eq!(a.w[&id("A")], BTreeSet::from([a.regions.top.clone()]));
    assert!(a.regions.rank_of(&a.regions.top) > a.regions.rank_of(&RegionId::new("r")));
    assert_eq!(a.regions.below(&a.regions.top), BTreeSet::from([RegionId::new("r")]));
}

#[test]
fn reset_validation() {
    for p in corpus::ALL {
        let (_, a) = load(p.name);
        assert!(a.reset.is_ok(), "{}", p.name);
    }
    // Handle is called in tail position, inside the instant.
    let src = corpus::SERVER.source.replace("[mask={1}]", "[reset]");
    let sys = parse_program(&src).unwrap();
    let a = analyze(&sys).unwrap();
    assert_eq!(a.reset.violations.len(), 1);
    assert_eq!(a.reset.violations[0].thread, id("Handle"));
    assert!(!a.accepted());
}

#[test]
fn non_reset_initial_threads_warn() {
    let (_, a) = load("abc");
    assert_eq!(a.reset.warnings.len(), 1);
    assert!(a.reset.warnings[0].contains("`C`"));
}

#[test]
fn read_once_violation_is_reported() {
    // A reads s, then calls B which comes back to A within the same cycle.
    let src = "region r;
        def A(s: sig[r](unit)) = present s(x). B(s) else A(s);
        def B(s: sig[r](unit)) = A(s);";
    let sys = parse_program(src).unwrap();
    let a = analyze(&sys).unwrap();
    let cycle = a.read_once.unwrap_err();
    assert!(cycle.iter().any(|e| !e.labels.is_empty()));
    assert_eq!(cycle.first().unwrap().from, cycle.last().unwrap().to);
}

#[test]
fn mixed_statuses_in_a_class_are_rejected() {
    let src = "region r;
        def A(s: sig[r](unit)) [status=mset] = B(s);
        def B(s: sig[r](unit)) = A(s);";
    let sys = parse_program(src).unwrap();
    let a = analyze(&sys).unwrap();
    assert_eq!(a.f_order.errors.len(), 1);
}

#[test]
fn cyclic_regions_are_an_error() {
    let mut sys = parse_program("region a; region b > a; def A(s: sig[a](unit)) = 0;").unwrap();
    sys.region_order.push((RegionId::new("a"), RegionId::new("b")));
    assert!(matches!(analyze(&sys), Err(AnalysisError::Regions(_)) | Err(AnalysisError::Type(_))));
    assert!(region_ranks(&sys).is_err());
}

#[test]
fn dot_output_lists_every_edge() {
    let (_, a) = load("server");
    let dot = a.cycle_graph.to_dot("cycle");
    assert!(dot.starts_with("digraph cycle {"));
    assert!(dot.contains("\"Server\" -> \"Handle\" [label=\"{y1}\"]"));
    assert_eq!(dot.matches("->").count(), 3);
}
