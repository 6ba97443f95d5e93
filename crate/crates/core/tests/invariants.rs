use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spi_core::analysis::analyze;
use spi_core::corpus;
use spi_core::generate::{random_system, GenConfig};
use spi_core::invariants::*;
use spi_core::monitor::{generate_inputs, InputSpec};
use spi_core::runtime::SchedulerPolicy;
use spi_core::syntax::parse_program;

/// Non-reactive random programs can build deep values before the step cap
/// stops them.
fn with_big_stack(f: impl FnOnce() + Send + 'static) {
    std::thread::Builder::new().stack_size(256 << 20).spawn(f).unwrap().join().unwrap();
}

#[test]
fn corpus_runs_satisfy_every_invariant() {
    for p in corpus::ALL {
        let sys = parse_program(p.source).unwrap();
        let an = analyze(&sys).unwrap();
        for seed in 0..4 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let schedule = generate_inputs(&sys, 15, InputSpec::default(), &mut rng);
            let r = check_run(&sys, Some(&an), 15, &schedule, SchedulerPolicy::seeded(seed), 100_000).unwrap();
            assert_eq!(r.instants, 15);
            assert!(r.checks > 15);
            assert!(r.holds(), "{}: {}", p.name, r.violations[0]);
        }
    }
}

#[test]
fn a_foreign_call_graph_is_caught() {
    let cell = parse_program(corpus::CELL.source).unwrap();
    let server = parse_program(corpus::SERVER.source).unwrap();
    let wrong = analyze(&cell).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let schedule = generate_inputs(&server, 5, InputSpec::default(), &mut rng);
    let r = check_run(&server, Some(&wrong), 5, &schedule, SchedulerPolicy::seeded(0), 10_000).unwrap();
    assert!(!r.holds());
    assert!(r.violations.iter().all(|v| v.invariant == Invariant::CallGraph));
}

#[test]
fn random_programs_satisfy_every_invariant() {
    with_big_stack(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut instants = 0;
        for i in 0..500u64 {
            let g = random_system(&mut rng, &GenConfig::default()).unwrap();
            let schedule = generate_inputs(&g.sys, 10, InputSpec::default(), &mut rng);
            let r = check_run(&g.sys, Some(&g.analysis), 10, &schedule, SchedulerPolicy::seeded(i), 300).unwrap();
            assert!(r.holds(), "run {i}: {}\n{}", r.violations[0], g.source);
            instants += r.instants;
        }
        assert!(instants > 2500, "most runs reach several instants");
    });
}
