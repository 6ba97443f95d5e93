use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spi_core::corpus;
use spi_core::generate::{random_source, GenConfig};
use spi_core::runtime::{run_computation, EnvSchedule, SchedulerPolicy};
use spi_core::syntax::*;

fn load(name: &str) -> EquationSystem {
    parse_program(corpus::by_name(name).unwrap().source).unwrap()
}

fn sig(n: &str) -> Value {
    Value::Sig(Name::new(n))
}

/// Size computed straight from the definition, as an oracle.
fn oracle_size(v: &Value) -> u64 {
    match v {
        Value::Sig(_) => 0,
        Value::Con(_, args) if args.is_empty() => 0,
        Value::Con(_, args) => 1 + args.iter().map(oracle_size).sum::<u64>(),
    }
}

fn nodes(v: &Value) -> u64 {
    match v {
        Value::Sig(_) => 1,
        Value::Con(_, args) => 1 + args.iter().map(nodes).sum::<u64>(),
    }
}

#[test]
fn cell_has_two_equations_and_send_is_quaternary() {
    let sys = load("cell");
    assert_eq!(sys.equations.len(), 2);
    assert_eq!(sys.equation(&ThreadId::new("Send")).unwrap().arity(), 4);
    assert_eq!(sys.equation(&ThreadId::new("Cell")).unwrap().arity(), 3);
}

#[test]
fn minimal_program() {
    let sys = parse_program("def A() = 0").unwrap();
    assert_eq!(sys.equations.len(), 1);
    assert_eq!(sys.equations[0].body, Process::Nil);
}

#[test]
fn pause_becomes_restriction_and_present() {
    let sys = load("cell");
    let send = sys.equation(&ThreadId::new("Send")).unwrap();
    let Process::Match { otherwise, .. } = &send.body else { panic!("{}", send.body) };
    let Process::New { name, body, .. } = otherwise.as_ref() else { panic!("{otherwise}") };
    let Process::Present(pr) = body.as_ref() else { panic!("{body}") };
    assert_eq!(&pr.signal, name);
    assert_eq!(pr.body, Process::Nil);
    assert_eq!(pr.cont.target, ThreadId::new("Cell"));
    let params: Vec<&Name> = send.params.iter().map(|p| &p.name).collect();
    assert!(!params.contains(&name));
    assert!(!params.contains(&&pr.bound));
    assert_ne!(name, &pr.bound);
}

#[test]
fn syntax_errors_are_reported() {
    assert!(parse_program("def A() = 0; def A() = 0;").is_err());
    assert!(parse_program("def A(s: sig[nowhere](unit)) = 0").is_err());
    assert!(parse_program("def A() = B(); def B(x: unit) = 0;").is_err());
    assert!(parse_program("def A( = 0").is_err());
}

#[test]
fn value_sizes() {
    assert_eq!(size_of_value(&sig("s")), 0);
    let two = Value::list([sig("s1"), sig("s2")]);
    assert_eq!(size_of_value(&two), 2);
    let nested = Value::list([Value::list([sig("s")])]);
    assert_eq!(size_of_value(&nested), 2);
    for v in [two, nested] {
        assert_eq!(size_of_value(&v), oracle_size(&v));
    }
}

#[test]
fn config_and_input_sizes() {
    assert_eq!(size_of_config(&load("abc")).unwrap(), 2);
    let sys = parse_program(
        "region r;
         def B(s: sig[r](sig[r](unit)), l: list(sig[r](unit))) [reset] = 0;
         init nu s. B(s, [n]);",
    )
    .unwrap();
    let expected = 1 + oracle_size(&sig("s")) + oracle_size(&Value::list([sig("n")]));
    assert_eq!(size_of_config(&sys).unwrap(), expected);
    assert_eq!(size_of_input(&[sig("v1"), sig("v2")]), 2);
    assert_eq!(size_of_config(&parse_program("def A() = 0").unwrap()), Err(SizeError::NoInit));
}

#[test]
fn server_is_well_typed() {
    let sys = load("server");
    let report = typecheck(&sys).unwrap();
    let rho = RegionId::new("rho");
    let treq = TypeExpr::Named("treq".into());
    let handle = sys.equation(&ThreadId::new("Handle")).unwrap();
    assert_eq!(handle.params[0].ty, TypeExpr::sig(rho.clone(), treq.clone()));
    assert_eq!(handle.params[1].ty, TypeExpr::list(treq.clone()));
    let l = report.label_types.values().next().unwrap();
    assert_eq!(l.ty, TypeExpr::list(treq));
    assert_eq!(report.label_region(Label(1)), Some(&rho));
}

#[test]
fn abc_is_well_typed() {
    let sys = load("abc");
    let report = typecheck(&sys).unwrap();
    let rho = RegionId::new("rho");
    let unit_sig = TypeExpr::sig(rho.clone(), TypeExpr::Unit);
    let s = report.init_types.iter().find(|(n, _)| n.text == "s").unwrap().1;
    assert_eq!(s, &TypeExpr::sig(rho, unit_sig.clone()));
    let c = sys.equation(&ThreadId::new("C")).unwrap();
    let Process::New { ty, .. } = &c.body else { panic!() };
    assert_eq!(ty, &unit_sig);
}

#[test]
fn emitting_a_signal_on_itself_is_rejected() {
    let sys = parse_program("region r; def A(s: sig[r](unit)) = emit s s;").unwrap();
    let errs = typecheck(&sys).unwrap_err();
    assert!(!errs.is_empty());
}

#[test]
fn regions_are_part_of_type_equality() {
    let ok = "region r; region r2 > r;
              def A(s: sig[r](unit), t: sig[r](sig[r](unit))) = emit t s;";
    assert!(typecheck(&parse_program(ok).unwrap()).is_ok());
    let bad = ok.replace("t: sig[r](sig[r](unit))", "t: sig[r](sig[r2](unit))");
    assert!(typecheck(&parse_program(&bad).unwrap()).is_err());
}

/// Visits every signal type in parameter lists and restrictions.
fn for_each_sig(sys: &mut EquationSystem, f: &mut dyn FnMut(&mut TypeExpr)) {
    fn ty(t: &mut TypeExpr, f: &mut dyn FnMut(&mut TypeExpr)) {
        match t {
            TypeExpr::Sig(..) => {
                f(t);
                if let TypeExpr::Sig(_, payload) = t {
                    ty(payload, f);
                }
            }
            TypeExpr::List(e) => ty(e, f),
            TypeExpr::Unit | TypeExpr::Named(_) => {}
        }
    }
    fn process(p: &mut Process, f: &mut dyn FnMut(&mut TypeExpr)) {
        match p {
            Process::New { ty: t, body, .. } => {
                if !matches!(t, TypeExpr::Sig(r, _) if r.is_local()) {
                    ty(t, f);
                }
                process(body, f);
            }
            Process::Present(pr) => process(&mut pr.body, f),
            Process::NameMatch { then, otherwise, .. } | Process::Match { then, otherwise, .. } => {
                process(then, f);
                process(otherwise, f);
            }
            Process::Par(l, r) => {
                process(l, f);
                process(r, f);
            }
            Process::Nil | Process::Call(..) | Process::Emit(..) => {}
        }
    }
    for eq in &mut sys.equations {
        for p in &mut eq.params {
            ty(&mut p.ty, f);
        }
        process(&mut eq.body, f);
    }
}

fn count_sigs(sys: &EquationSystem) -> usize {
    let mut n = 0;
    for_each_sig(&mut sys.clone(), &mut |_| n += 1);
    n
}

fn mutate_at(sys: &EquationSystem, site: usize, change: &dyn Fn(&mut TypeExpr)) -> EquationSystem {
    let mut out = sys.clone();
    let mut k = 0;
    for_each_sig(&mut out, &mut |t| {
        if k == site {
            change(t);
        }
        k += 1;
    });
    out
}

#[test]
fn single_type_mutations_are_rejected() {
    let spare = RegionId::new("spare");
    for p in corpus::ALL {
        let mut sys = parse_program(p.source).unwrap();
        assert!(typecheck(&sys).is_ok(), "{}", p.name);
        sys.regions.push(spare.clone());
        assert!(typecheck(&sys).is_ok());
        let sites = count_sigs(&sys);
        assert!(sites > 0);
        for site in 0..sites {
            let region_swap = mutate_at(&sys, site, &|t| {
                if let TypeExpr::Sig(r, _) = t {
                    *r = spare.clone();
                }
            });
            assert!(typecheck(&region_swap).is_err(), "{}: region swap at {site} accepted", p.name);
            let payload_swap = mutate_at(&sys, site, &|t| {
                if let TypeExpr::Sig(_, payload) = t {
                    **payload = match **payload {
                        TypeExpr::Unit => TypeExpr::list(TypeExpr::Unit),
                        _ => TypeExpr::Unit,
                    };
                }
            });
            assert!(typecheck(&payload_swap).is_err(), "{}: payload swap at {site} accepted", p.name);
        }
    }
}

fn no_trivial_matches(p: &Process) -> bool {
    match p {
        Process::Nil | Process::Call(..) | Process::Emit(..) => true,
        Process::Present(pr) => no_trivial_matches(&pr.body),
        Process::NameMatch { left, right, then, otherwise } => {
            left != right && no_trivial_matches(then) && no_trivial_matches(otherwise)
        }
        Process::Match { scrutinee, then, otherwise, .. } => {
            matches!(scrutinee, Expr::Var(_))
                && no_trivial_matches(then)
                && no_trivial_matches(otherwise)
        }
        Process::New { body, .. } => no_trivial_matches(body),
        Process::Par(l, r) => no_trivial_matches(l) && no_trivial_matches(r),
    }
}

const TRIVIAL: &str = "
region r;
def A(s: sig[r](sig[r](unit))) [reset] =
    nu a: sig[r](unit).
    (if s = s then match [a; a] with cons(x, l) then (emit s x | B(s, l)) else 0 else emit s a);
def B(s: sig[r](sig[r](unit)), l: list(sig[r](unit))) [mask={1}] =
    match l with cons(y, l2) then (emit s y | pause.A(s)) else pause.A(s);
init nu s. A(s);
";

#[test]
fn trivial_matches_are_resolved() {
    let sys = parse_program(TRIVIAL).unwrap();
    assert!(!no_trivial_matches(&sys.equations[0].body));
    let out = remove_trivial_matches(&sys);
    for eq in &out.equations {
        assert!(no_trivial_matches(&eq.body), "{}", eq.body);
    }
    assert_eq!(out.equations[1].body, sys.equations[1].body);
    assert!(typecheck(&out).is_ok());
}

#[test]
fn programs_without_trivial_matches_are_unchanged() {
    for p in corpus::ALL {
        let sys = parse_program(p.source).unwrap();
        let out = remove_trivial_matches(&sys);
        for (a, b) in sys.equations.iter().zip(&out.equations) {
            assert_eq!(a.body, b.body);
        }
    }
}

#[test]
fn resolving_trivial_matches_preserves_runs() {
    let sys = parse_program(TRIVIAL).unwrap();
    let out = remove_trivial_matches(&sys);
    for seed in 0..8 {
        let run = |s: &EquationSystem| {
            run_computation(s, 6, &EnvSchedule::empty(), SchedulerPolicy::seeded(seed), 1000).unwrap()
        };
        let (a, b) = (run(&sys), run(&out));
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!(x.suspended && y.suspended);
            let calls = |t: &spi_core::runtime::InstantTrace| {
                let mut c: Vec<String> = t.suspended_soup.threads.iter().map(|t| t.process.to_string()).collect();
                c.sort();
                c
            };
            assert_eq!(calls(x).len(), calls(y).len());
            let lens = |t: &spi_core::runtime::InstantTrace| t.signals.values().map(Vec::len).collect::<Vec<_>>();
            assert_eq!(lens(x), lens(y));
            assert_eq!(x.config_size, y.config_size);
        }
    }
}

fn value_strategy() -> impl Strategy<Value = Value> {
    let leaf = prop_oneof![
        "[a-z]{1,3}".prop_map(|s| Value::Sig(Name::new(s))),
        Just(Value::constant("z")),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop::collection::vec(inner, 1..4).prop_map(|args| Value::Con("c".into(), args))
    })
}

proptest! {
    #[test]
    fn size_is_bounded_by_nodes_and_grows_under_nesting(v in value_strategy(), w in value_strategy()) {
        prop_assert_eq!(size_of_value(&v), oracle_size(&v));
        prop_assert!(size_of_value(&v) <= nodes(&v));
        let wrapped = Value::Con("c".into(), vec![v.clone(), w]);
        prop_assert!(size_of_value(&wrapped) > size_of_value(&v));
    }

    #[test]
    fn printing_then_parsing_is_the_identity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let src = random_source(&mut rng, &GenConfig::default());
        let sys = parse_program(&src).unwrap();
        let printed = pretty_program(&sys);
        let again = parse_program(&printed).unwrap();
        prop_assert_eq!(sys.equations.len(), again.equations.len());
        for (a, b) in sys.equations.iter().zip(&again.equations) {
            prop_assert_eq!(&a.name, &b.name);
            prop_assert_eq!(&a.params, &b.params);
            prop_assert_eq!(&a.annotation, &b.annotation);
            prop_assert_eq!(&a.body, &b.body);
        }
        prop_assert_eq!(&sys.init, &again.init);
        prop_assert_eq!(&sys.regions, &again.regions);
        prop_assert_eq!(pretty_program(&again), printed);
    }
}

#[test]
fn corpus_round_trips() {
    for p in corpus::ALL {
        let sys = parse_program(p.source).unwrap();
        let again = parse_program(&pretty_program(&sys)).unwrap();
        for (a, b) in sys.equations.iter().zip(&again.equations) {
            assert_eq!(a.body, b.body);
            assert_eq!(a.params, b.params);
        }
    }
}
