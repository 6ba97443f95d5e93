use std::collections::BTreeMap;

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spi_core::analysis::{analyze, Analysis};
use spi_core::assignments::*;
use spi_core::constraints::*;
use spi_core::corpus;
use spi_core::runtime::eval::{apply, Fuel};
use spi_core::syntax::*;

struct Loaded {
    sys: EquationSystem,
    an: Analysis,
    cs: Vec<Constraint>,
    q: Assignment<u64>,
}

fn load(name: &str) -> Loaded {
    let p = corpus::by_name(name).unwrap();
    let sys = parse_program(p.source).unwrap();
    let an = analyze(&sys).unwrap();
    let cs = gen_constraints(&sys, &an);
    let q = Assignment::from_json(p.assignment).unwrap();
    Loaded { sys, an, cs, q }
}

fn validate(l: &Loaded) -> Vec<Violation> {
    validate_assignment(&l.q, &l.sys, |id| l.an.hatted_arity(&l.sys, id), ValidateOptions::default())
}

/// The multiset order read off its definition: the two differ and every
/// element in excess on the right is beaten by one in excess on the left.
fn mset_oracle(a: &[u64], b: &[u64]) -> bool {
    let count = |v: &[u64]| {
        let mut m: BTreeMap<u64, i64> = BTreeMap::new();
        for x in v {
            *m.entry(*x).or_default() += 1;
        }
        m
    };
    let (ca, cb) = (count(a), count(b));
    let keys: Vec<u64> = ca.keys().chain(cb.keys()).copied().collect();
    let diff = |x: u64| ca.get(&x).copied().unwrap_or(0) - cb.get(&x).copied().unwrap_or(0);
    let left: Vec<u64> = keys.iter().copied().filter(|&x| diff(x) > 0).collect();
    let right: Vec<u64> = keys.iter().copied().filter(|&x| diff(x) < 0).collect();
    (!left.is_empty() || !right.is_empty()) && right.iter().all(|y| left.iter().any(|x| x > y))
}

#[test]
fn shipped_assignments_are_valid() {
    for p in corpus::ALL {
        let l = load(p.name);
        assert_eq!(validate(&l), vec![], "{}", p.name);
    }
}

#[test]
fn cell_and_server_are_satisfied() {
    for name in ["cell", "server"] {
        let l = load(name);
        let report = check_quasi_interpretation(&l.q, &l.sys, &l.cs, CheckOptions::default());
        for r in &report.results {
            assert!(r.verdict.holds(), "{name}: {} is {:?}", r.constraint, r.verdict);
            if r.constraint.index < 2 {
                assert_eq!(r.verdict, CheckVerdict::SymbolicallyProven, "{}", r.constraint);
            }
        }
        assert!(matches!(report.overall(), Overall::Satisfied | Overall::Proven));
    }
}

#[test]
fn abc_is_refuted_on_the_call_to_b() {
    let l = load("abc");
    let report = check_quasi_interpretation(&l.q, &l.sys, &l.cs, CheckOptions::default());
    assert_eq!(report.overall(), Overall::Refuted);
    let refuted: Vec<_> = report.refuted().collect();
    assert_eq!(refuted.len(), 1);
    let (c, f) = refuted[0];
    assert_eq!(c.to_string(), "A^(s, 0) >=2 B^(s, y1)");
    let y = &f.witness[&VarId::Label(Label(1))];
    assert!(y.as_list().unwrap().len() >= 2, "{y}");
    assert!(replay(&l.q, &l.sys, c, f));
    // q_A(0, 0) = 1 under the shipped assignment.
    assert_eq!(f.lhs, vec![1]);
}

#[test]
fn abc_is_refuted_under_any_assignment_of_the_family() {
    let l = load("abc");
    let c = l.cs.iter().find(|c| c.to_string() == "A^(s, 0) >=2 B^(s, y1)").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let mut q = l.q.clone();
        q.entries.insert("A^".into(), random_affine(&mut rng, 2));
        q.entries.insert("B^".into(), random_subterm_affine(&mut rng, 2));
        let opts = CheckOptions { bound: 12, ..Default::default() };
        match check_constraint(&q, &l.sys, c, opts) {
            CheckVerdict::Refuted(f) => assert!(replay(&q, &l.sys, c, &f)),
            v => panic!("{v:?} under {:?}", q.entries),
        }
    }
}

fn random_affine(rng: &mut impl rand::Rng, arity: usize) -> MaxAffine<u64> {
    let arms = rng.gen_range(1..=3);
    MaxAffine { arms: (0..arms).map(|_| (0..=arity).map(|_| rng.gen_range(0..3)).collect()).collect() }
}

/// Random, but with every variable counted somewhere so that the subterm
/// property holds.
fn random_subterm_affine(rng: &mut impl rand::Rng, arity: usize) -> MaxAffine<u64> {
    let mut f = random_affine(rng, arity);
    for i in 1..=arity {
        if f.arms.iter().all(|a| a[i] == 0) {
            let k = rng.gen_range(0..f.arms.len());
            f.arms[k][i] = 1;
        }
    }
    f
}

#[test]
fn send_index_zero_is_satisfied_by_the_cons_step() {
    let l = load("cell");
    let c = l.cs.iter().find(|c| c.index == 0).unwrap();
    assert!(matches!(
        enumerate_constraint(&l.q, &l.sys, c, CheckOptions::default()),
        CheckVerdict::Satisfied { .. }
    ));
}

#[test]
fn zero_interpretation_of_a_growing_function_breaks_condition_three() {
    let src = "type nat = z | succ(nat);
        fun double(nat) -> nat { (z) => z; (succ(n)) => succ(succ(double(n))); }";
    let sys = parse_program(src).unwrap();
    let q: Assignment<u64> = Assignment::from_json(r#"{"double": {"arms": [[0, 0]]}}"#).unwrap();
    let vs = validate_assignment(&q, &sys, |_| 0, ValidateOptions::default());
    let v = vs.iter().find(|v| v.condition == Condition::Function).expect("condition (3)");
    assert_eq!(v.symbol, "double");
    // The witness is an input on which the function produces a value of
    // positive size.
    let w = v.witness.as_ref().unwrap();
    let arg = parse_value(&sys, w.strip_prefix("double(").unwrap().strip_suffix(')').unwrap()).unwrap();
    let out = apply(&sys, "double", &[arg], &mut Fuel::unlimited()).unwrap();
    assert!(out.size() > 0);
    assert!(vs.iter().any(|v| v.condition == Condition::Subterm));

    let good: Assignment<u64> = Assignment::from_json(r#"{"double": {"arms": [[0, 2]]}}"#).unwrap();
    assert_eq!(validate_assignment(&good, &sys, |_| 0, ValidateOptions::default()), vec![]);
}

#[test]
fn constructor_shape_and_coverage_are_enforced() {
    let l = load("server");
    let mut q = l.q.clone();
    q.entries.insert("cons".into(), MaxAffine { arms: vec![vec![0, 1, 1]] });
    q.entries.remove("Handle^");
    q.entries.insert("bogus".into(), MaxAffine::constant(0));
    let vs = validate_assignment(&q, &l.sys, |id| l.an.hatted_arity(&l.sys, id), ValidateOptions::default());
    let kinds: Vec<(Condition, &str)> = vs.iter().map(|v| (v.condition, v.symbol.as_str())).collect();
    assert!(kinds.contains(&(Condition::Constructor, "cons")));
    assert!(kinds.contains(&(Condition::Coverage, "Handle^")));
    assert!(kinds.contains(&(Condition::Coverage, "bogus")));
}

#[test]
fn next_as_maximum_passes_condition_three() {
    let l = load("cell");
    let vs = validate_assignment(&l.q, &l.sys, |id| l.an.hatted_arity(&l.sys, id), ValidateOptions {
        bound: 6,
        ..Default::default()
    });
    assert!(vs.is_empty(), "{vs:?}");
}

#[test]
fn formal_evaluation_examples() {
    let l = load("cell");
    let v = Value::list([Value::Sig(Name::new("v1")), Value::Sig(Name::new("v2"))]);
    assert_eq!(l.q.value(&l.sys, &v).unwrap(), 2);

    let send = Term::Hat(
        ThreadId::new("Send"),
        ["s", "q", "l", "l2"].iter().map(|n| Term::named(Name::new(*n))).chain([Term::label(Label(1))]).collect(),
    );
    let mut sigma = GroundSubstitution::new();
    sigma.insert(VarId::Named(Name::new("s")), Value::Sig(Name::new("a")));
    sigma.insert(VarId::Named(Name::new("q")), Value::constant("q0"));
    sigma.insert(VarId::Named(Name::new("l")), Value::list([Value::Sig(Name::new("s'"))]));
    sigma.insert(VarId::Named(Name::new("l2")), Value::nil());
    sigma.insert(VarId::Label(Label(1)), Value::nil());
    // max(0, 0, 1, 0, 0)
    assert_eq!(l.q.eval_formal(&l.sys, &send, &sigma).unwrap(), 1);
    sigma.remove(&VarId::Label(Label(1)));
    assert_eq!(
        l.q.eval_formal(&l.sys, &send, &sigma),
        Err(EvalFormalError::Unbound(VarId::Label(Label(1))))
    );
}

#[test]
fn comparison_examples() {
    assert!(mset_gt(&[1u64, 2, 5, 5, 5, 7], &[4, 4, 4, 4, 5, 7]));
    assert!(!lex_gt(&[1u64, 2], &[1, 2]));
    assert!(!mset_gt(&[1u64, 2], &[2, 1]));
    assert!(lex_gt(&[3u64, 0], &[2, 9]));
}

#[test]
fn compare_evaluates_under_a_substitution() {
    let l = load("cell");
    let x = Term::named(Name::new("l"));
    let cons = Term::Con("cons".into(), vec![Term::named(Name::new("s")), x.clone()]);
    let mut sigma = GroundSubstitution::new();
    sigma.insert(VarId::Named(Name::new("l")), Value::nil());
    sigma.insert(VarId::Named(Name::new("s")), Value::Sig(Name::new("a")));
    assert!(compare(&l.q, &l.sys, Comparison::Gt, &[cons.clone()], &[x.clone()], &sigma).unwrap());
    assert!(compare(&l.q, &l.sys, Comparison::Lex, &[x.clone(), cons.clone()], &[x.clone(), x.clone()], &sigma).unwrap());
    assert!(compare(&l.q, &l.sys, Comparison::Mset, &[x.clone(), x.clone()], &[x], &sigma).unwrap());
}

#[test]
fn overflow_is_reported_for_narrow_types() {
    let q: Assignment<u8> = Assignment::from_json(r#"{"cons": {"arms": [[200, 1, 1]]}}"#).unwrap();
    let sys = EquationSystem::default();
    let v = Value::list([Value::nil(), Value::nil()]);
    assert_eq!(q.value(&sys, &v), Err(Overflow));
    let big: Assignment<BigUint> = Assignment::from_json(r#"{"cons": {"arms": [[200, 1, 1]]}}"#).unwrap();
    assert_eq!(big.value(&sys, &v).unwrap(), BigUint::from(400u32));
}

#[test]
fn malformed_files_are_rejected() {
    for bad in ["[]", r#"{"f": {}}"#, r#"{"f": {"arms": []}}"#, r#"{"f": {"arms": [[1], [1, 2]]}}"#, r#"{"f": {"arms": [[-1]]}}"#] {
        assert!(Assignment::<u64>::from_json(bad).is_err(), "{bad}");
    }
    let l = load("abc");
    let back = Assignment::<u64>::from_json(&l.q.to_json().to_string()).unwrap();
    assert_eq!(back, l.q);
}

#[test]
fn symbolic_proofs_are_never_refuted_and_refutations_replay() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in corpus::ALL {
        let l = load(p.name);
        for _ in 0..40 {
            let mut q = l.q.clone();
            for eq in &l.sys.equations {
                let n = l.an.hatted_arity(&l.sys, &eq.name);
                q.entries.insert(format!("{}^", eq.name), random_subterm_affine(&mut rng, n));
            }
            for c in &l.cs {
                let proven = symbolic_proof(&q, &l.sys, c);
                let mut refuted_at = None;
                for k in 0..=4 {
                    let opts = CheckOptions { bound: k, symbolic: false, ..Default::default() };
                    match enumerate_constraint(&q, &l.sys, c, opts) {
                        CheckVerdict::Refuted(f) => {
                            assert!(!proven, "{c} proven but refuted at {k}");
                            assert!(replay(&q, &l.sys, c, &f), "{c}");
                            refuted_at.get_or_insert(k);
                        }
                        _ => assert!(refuted_at.is_none(), "{c}: refuted at {refuted_at:?} but not at {k}"),
                    }
                }
            }
        }
    }
}

#[test]
fn enumeration_cap_gives_inconclusive() {
    let l = load("cell");
    let c = l.cs.iter().find(|c| c.index == 1).unwrap();
    let opts = CheckOptions { bound: 6, cap: 1, symbolic: false };
    assert!(matches!(enumerate_constraint(&l.q, &l.sys, c, opts), CheckVerdict::Inconclusive { .. }));
}

#[test]
fn evaluation_dominates_results_of_functions() {
    // q_{f(v)} >= q_w whenever f(v) evaluates to w, for every shipped
    // function and small input.
    for p in corpus::ALL {
        let l = load(p.name);
        for f in &l.sys.functions {
            let mut en = ValueEnumerator::new(&l.sys, 10_000);
            let doms: Vec<Vec<Value>> = f.params.iter().map(|t| en.up_to(t, 4)).collect();
            for args in product(&doms, 10_000) {
                let Ok(w) = apply(&l.sys, &f.name, &args, &mut Fuel::new(10_000)) else { continue };
                let e = Term::Fun(f.name.clone(), (0..args.len()).map(|i| Term::named(Name::stamped("x", i as u32))).collect());
                let sigma: GroundSubstitution =
                    args.iter().enumerate().map(|(i, v)| (VarId::Named(Name::stamped("x", i as u32)), v.clone())).collect();
                assert!(l.q.eval_formal(&l.sys, &e, &sigma).unwrap() >= l.q.value(&l.sys, &w).unwrap());
            }
        }
    }
}

#[test]
fn value_enumeration_counts_lists_by_size() {
    let sys = parse_program("type b = t | f;").unwrap();
    let mut en = ValueEnumerator::new(&sys, 1000);
    // Lists of booleans of length n have size n: 2^n of them.
    for n in 0..5u64 {
        assert_eq!(en.exact(&TypeExpr::list(TypeExpr::Named("b".into())), n).len(), 1 << n);
    }
    let sig = TypeExpr::sig(RegionId::new("r"), TypeExpr::Unit);
    assert_eq!(en.up_to(&sig, 3), vec![Value::Sig(canonical_signal(&sig))]);
}

#[test]
fn length_bound_on_random_sequences() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for status in [Status::Lex, Status::Mset] {
        for n in 1..=4 {
            for c in 2..=6u64 {
                for _ in 0..25 {
                    let seq = random_decreasing_sequence(&mut rng, status, n, c);
                    let r = lex_mset_bound_check::<u64>(n, c, status, &seq).unwrap();
                    assert!(r.holds(), "{status} n={n} c={c}: {r:?}");
                }
            }
        }
    }
    let one = lex_mset_bound_check::<u64>(3, 2, Status::Lex, &[vec![1, 0, 1]]).unwrap();
    assert!(one.holds() && one.length == 1);
    let bad = lex_mset_bound_check::<u64>(2, 3, Status::Lex, &[vec![0, 1], vec![1, 0]]).unwrap();
    assert!(!bad.holds());
}

#[test]
fn b_lex_reads_digits_in_base_c() {
    assert_eq!(b_lex::<u64>(&[1, 0, 2], 3).unwrap(), 9 + 2);
    assert_eq!(b_mset::<u64>(&[0, 2, 1], 3).unwrap(), 2 * 9 + 3);
}

proptest! {
    #[test]
    fn mset_order_matches_its_definition(a in prop::collection::vec(0u64..5, 0..6), b in prop::collection::vec(0u64..5, 0..6)) {
        prop_assert_eq!(mset_gt(&a, &b), mset_oracle(&a, &b));
    }

    #[test]
    fn lex_order_matches_integer_comparison(a in prop::collection::vec(0u64..10, 3), b in prop::collection::vec(0u64..10, 3)) {
        let num = |v: &[u64]| v.iter().fold(0u64, |acc, x| acc * 10 + x);
        prop_assert_eq!(lex_gt(&a, &b), num(&a) > num(&b));
    }

    #[test]
    fn b_mset_ignores_order(mut a in prop::collection::vec(0u64..6, 1..5), seed in any::<u64>()) {
        let before = b_mset::<u64>(&a, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        use rand::seq::SliceRandom;
        a.shuffle(&mut rng);
        prop_assert_eq!(b_mset::<u64>(&a, 6).unwrap(), before);
    }

    #[test]
    fn q_value_bounds_size(seed in any::<u64>(), d in 1u64..4) {
        // |v| <= q_v <= d * |v| for constructors of additive constant d.
        let l = load("server");
        let mut q = l.q.clone();
        for c in ["cons", "req", "succ"] {
            let n = l.sys.constructor_arity(c).unwrap();
            q.entries.insert(c.into(), MaxAffine::constructor(d, n));
        }
        let mut en = ValueEnumerator::new(&l.sys, 5000);
        let vals = en.up_to(&TypeExpr::list(TypeExpr::Named("treq".into())), 4);
        let v = &vals[(seed % vals.len() as u64) as usize];
        let qv = q.value(&l.sys, v).unwrap();
        prop_assert!(v.size() <= qv && qv <= d * v.size());
    }
}
