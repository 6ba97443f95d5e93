use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spi_core::corpus;
use spi_core::monitor::*;
use spi_core::runtime::{run_computation, EnvSchedule, SchedulerPolicy};
use spi_core::syntax::*;

fn report(name: &str, instants: usize, seed: u64) -> FeasibilityReport {
    let sys = parse_program(corpus::by_name(name).unwrap().source).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let schedule = generate_inputs(&sys, instants, InputSpec::default(), &mut rng);
    monitor(&sys, instants, &schedule, SchedulerPolicy::seeded(seed), 100_000).unwrap()
}

fn metric(instant: u64, config_size: u64, suspended: bool) -> InstantMetrics {
    InstantMetrics { instant, config_size, input_size: 0, steps: 1, max_value_size: 0, suspended }
}

#[test]
fn reactive_corpus_programs_stay_bounded() {
    for name in ["cell", "server"] {
        for seed in 0..3 {
            let r = report(name, 50, seed);
            assert_eq!(r.metrics.len(), 50);
            assert!(r.all_suspended(), "{name}");
            assert_eq!(r.verdict, Trend::BoundedTrend, "{name} seed {seed}\n{r}");
        }
    }
}

#[test]
fn abc_grows() {
    let r = report("abc", 50, 0);
    assert!(r.all_suspended());
    let Trend::GrowingTrend { from, length } = r.verdict else { panic!("{r}") };
    assert!(length >= GROWTH_RUN);
    assert!(from > 25);
    let sizes: Vec<u64> = r.metrics.iter().map(|m| m.config_size).collect();
    let start = from as usize - 1;
    assert!(sizes[start..start + length].windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn server_inputs_have_the_requested_shape() {
    let sys = parse_program(corpus::SERVER.source).unwrap();
    let signals = input_signals(&sys);
    assert_eq!(signals.len(), 1);
    assert_eq!(signals[0].0, Name::stamped("s", 0));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let schedule = generate_inputs(&sys, 10, InputSpec::default(), &mut rng);
    for env in &schedule.instants {
        let values: Vec<&Value> = env.emissions().iter().map(|(_, v)| v).collect();
        assert_eq!(values.len(), 2);
        assert!(values.iter().all(|v| size_of_value(v) <= 3));
        let distinct: BTreeSet<&Value> = values.iter().copied().collect();
        assert_eq!(distinct.len(), values.len());
        assert_eq!(env.size(), size_of_input(values));
    }
}

#[test]
fn metrics_agree_with_the_runtime() {
    for p in corpus::ALL {
        let sys = parse_program(p.source).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let schedule = generate_inputs(&sys, 12, InputSpec::default(), &mut rng);
        let r = monitor(&sys, 12, &schedule, SchedulerPolicy::seeded(4), 100_000).unwrap();
        let traces = run_computation(&sys, 12, &schedule, SchedulerPolicy::seeded(4), 100_000).unwrap();
        assert_eq!(r.metrics.len(), traces.len());
        for (m, t) in r.metrics.iter().zip(&traces) {
            assert_eq!((m.instant, m.config_size, m.input_size, m.steps), (t.instant, t.config_size, t.input_size, t.steps));
        }
        let expected = traces.iter().map(|t| t.input_size).chain([traces[0].config_size]).max().unwrap();
        assert_eq!(r.input_bound, expected);
        assert_eq!(traces[0].config_size, size_of_config(&sys).unwrap());
    }
}

#[test]
fn empty_program_is_bounded() {
    let sys = parse_program("init 0;").unwrap();
    let r = monitor(&sys, 10, &EnvSchedule::empty(), SchedulerPolicy::seeded(0), 10).unwrap();
    assert_eq!(r.verdict, Trend::BoundedTrend);
    assert!(r.metrics.iter().all(|m| m.config_size == 0 && m.steps == 0 && m.suspended));
    assert_eq!(r.input_bound, 0);
}

#[test]
fn non_reactive_program_is_flagged() {
    let sys = parse_program("def A() [reset] = pause.B(); def B() = B(); init A();").unwrap();
    let r = monitor(&sys, 10, &EnvSchedule::empty(), SchedulerPolicy::seeded(0), 500).unwrap();
    assert_eq!(r.verdict, Trend::NonSuspending { instant: 2 });
    assert_eq!(r.metrics.len(), 2);
}

#[test]
fn classification() {
    let flat: Vec<InstantMetrics> = (1..=20).map(|i| metric(i, 3, true)).collect();
    assert_eq!(classify(&flat), Trend::BoundedTrend);
    let growing: Vec<InstantMetrics> = (1..=20).map(|i| metric(i, i, true)).collect();
    assert_eq!(classify(&growing), Trend::GrowingTrend { from: 11, length: 10 });
    // Four increasing instants in the tail are not enough.
    let short: Vec<InstantMetrics> = (1..=20).map(|i| metric(i, if i >= 18 { i } else { 0 }, true)).collect();
    assert_eq!(classify(&short), Trend::BoundedTrend);
    // Growth in the first half only is not counted.
    let early: Vec<InstantMetrics> = (1..=20).map(|i| metric(i, i.min(8), true)).collect();
    assert_eq!(classify(&early), Trend::BoundedTrend);
    let mut stuck = flat.clone();
    stuck[6].suspended = false;
    assert_eq!(classify(&stuck), Trend::NonSuspending { instant: 7 });
}

#[test]
fn json_report() {
    let r = report("cell", 5, 0);
    let j = r.to_json();
    assert_eq!(j["schema_version"], REPORT_SCHEMA_VERSION);
    assert_eq!(j["instants"].as_array().unwrap().len(), 5);
    assert_eq!(j["verdictHint"]["verdict"], "bounded-trend");
    assert!(j["instants"][0]["configSize"].is_u64());
    assert!(r.to_string().contains("bounded-trend"));
}
