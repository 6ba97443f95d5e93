//! Empirical feasibility: per-instant sizes and step counts over a run,
//! and a heuristic classification of their trend.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use crate::assignments::ValueEnumerator;
use crate::runtime::{run_observed, Env, EnvSchedule, NoObserver, RuntimeError, SchedulerPolicy};
use crate::syntax::{typecheck, EquationSystem, Name, TypeExpr, Value};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Length of a run of strictly increasing start-of-instant sizes, within
/// the second half of the horizon, that counts as growth.
pub const GROWTH_RUN: usize = 5;

/// Shape of the generated inputs: on every free input signal, up to
/// `count` distinct values of size `value_size` per instant (or of the
/// largest smaller size that has values). Values are drawn with
/// replacement when fewer than `count` exist; fresh signal names inside
/// them may still make the draws distinct.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InputSpec {
    pub value_size: u64,
    pub count: usize,
}

impl Default for InputSpec {
    fn default() -> Self {
        InputSpec { value_size: 3, count: 2 }
    }
}

/// Free signals of the initial configuration with their payload types,
/// under the names the runtime gives them.
pub fn input_signals(sys: &EquationSystem) -> Vec<(Name, TypeExpr)> {
    let Some(init) = &sys.init else { return vec![] };
    let Ok(report) = typecheck(sys) else { return vec![] };
    report
        .init_types
        .iter()
        .filter(|(n, _)| !init.restricted.iter().any(|(r, _)| r == *n))
        .filter_map(|(n, ty)| match ty {
            TypeExpr::Sig(_, payload) => {
                Some((Name::stamped(n.text.clone(), n.stamp.unwrap_or(0)), (**payload).clone()))
            }
            _ => None,
        })
        .collect()
}

fn freshen(v: &Value, next: &mut u32) -> Value {
    match v {
        Value::Sig(_) => {
            *next += 1;
            Value::Sig(Name::stamped("input", *next))
        }
        Value::Con(c, args) => Value::Con(c.clone(), args.iter().map(|a| freshen(a, next)).collect()),
    }
}

/// Inputs for `instants` instants. Signal names inside values are fresh,
/// so values are distinct within each instant.
pub fn generate_inputs<R: Rng>(sys: &EquationSystem, instants: usize, spec: InputSpec, rng: &mut R) -> EnvSchedule {
    let mut en = ValueEnumerator::new(sys, 10_000);
    let pools: Vec<(Name, Vec<Value>)> = input_signals(sys)
        .into_iter()
        .map(|(s, ty)| {
            let pool = (0..=spec.value_size).rev().map(|k| en.exact(&ty, k)).find(|vs| !vs.is_empty());
            (s, pool.unwrap_or_default())
        })
        .collect();
    let mut next = 0;
    let mut out = Vec::with_capacity(instants);
    for _ in 0..instants {
        let mut emissions = Vec::new();
        for (s, pool) in &pools {
            let picks: Vec<&Value> = if pool.len() >= spec.count {
                pool.choose_multiple(rng, spec.count).collect()
            } else {
                (0..spec.count).filter_map(|_| pool.choose(rng)).collect()
            };
            for v in picks {
                let v = freshen(v, &mut next);
                if !emissions.contains(&(s.clone(), v.clone())) {
                    emissions.push((s.clone(), v));
                }
            }
        }
        out.push(Env::new(emissions).expect("generated inputs are distinct"));
    }
    EnvSchedule { instants: out }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InstantMetrics {
    pub instant: u64,
    #[serde(rename = "configSize")]
    pub config_size: u64,
    #[serde(rename = "inputSize")]
    pub input_size: u64,
    pub steps: u64,
    #[serde(rename = "maxValueSize")]
    pub max_value_size: u64,
    pub suspended: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Trend {
    BoundedTrend,
    /// Start-of-instant sizes increase strictly from `from` for `length`
    /// consecutive instants.
    GrowingTrend { from: u64, length: usize },
    NonSuspending { instant: u64 },
}

impl fmt::Display for Trend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Trend::BoundedTrend => f.write_str("bounded-trend"),
            Trend::GrowingTrend { from, length } => {
                write!(f, "growing-trend (size increases over {length} instants from instant {from})")
            }
            Trend::NonSuspending { instant } => write!(f, "non-suspending (step cap reached in instant {instant})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub metrics: Vec<InstantMetrics>,
    /// The largest of the initial size and the input sizes.
    pub input_bound: u64,
    pub verdict: Trend,
}

impl FeasibilityReport {
    pub fn all_suspended(&self) -> bool {
        self.metrics.iter().all(|m| m.suspended)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "schema_version": REPORT_SCHEMA_VERSION,
            "instants": self.metrics,
            "inputBound": self.input_bound,
            "verdictHint": self.verdict,
        })
    }
}

impl fmt::Display for FeasibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "instant  configSize  inputSize  steps  maxValueSize")?;
        for m in &self.metrics {
            writeln!(
                f,
                "{:>7}  {:>10}  {:>9}  {:>5}  {:>12}{}",
                m.instant,
                m.config_size,
                m.input_size,
                m.steps,
                m.max_value_size,
                if m.suspended { "" } else { "  (step cap)" }
            )?;
        }
        writeln!(f, "input bound d = {}", self.input_bound)?;
        write!(f, "verdict (heuristic): {}", self.verdict)
    }
}

/// Growth is a run of `GROWTH_RUN` consecutive strictly increasing sizes
/// starting in the second half of the horizon.
pub fn classify(metrics: &[InstantMetrics]) -> Trend {
    if let Some(m) = metrics.iter().find(|m| !m.suspended) {
        return Trend::NonSuspending { instant: m.instant };
    }
    let tail = &metrics[metrics.len() / 2..];
    let mut start = 0;
    let mut best: Option<(usize, usize)> = None;
    for i in 1..=tail.len() {
        if i == tail.len() || tail[i].config_size <= tail[i - 1].config_size {
            let len = i - start;
            if len >= GROWTH_RUN && best.is_none_or(|(_, l)| len > l) {
                best = Some((start, len));
            }
            start = i;
        }
    }
    match best {
        Some((s, length)) => Trend::GrowingTrend { from: tail[s].instant, length },
        None => Trend::BoundedTrend,
    }
}

pub fn monitor(
    sys: &EquationSystem,
    instants: usize,
    schedule: &EnvSchedule,
    policy: SchedulerPolicy,
    step_cap: u64,
) -> Result<FeasibilityReport, RuntimeError> {
    let traces = run_observed(sys, instants, schedule, policy, step_cap, &mut NoObserver)?;
    let metrics: Vec<InstantMetrics> = traces
        .iter()
        .map(|t| InstantMetrics {
            instant: t.instant,
            config_size: t.config_size,
            input_size: t.input_size,
            steps: t.steps,
            max_value_size: t.max_value_size,
            suspended: t.suspended,
        })
        .collect();
    let initial = metrics.first().map_or(0, |m| m.config_size);
    let input_bound = metrics.iter().map(|m| m.input_size).fold(initial, u64::max);
    let verdict = classify(&metrics);
    Ok(FeasibilityReport { metrics, input_bound, verdict })
}
