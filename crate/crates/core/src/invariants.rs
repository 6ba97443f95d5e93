//! Run-time checks of the properties the semantics guarantees, as an
//! observer over a run.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::analysis::{Analysis, Node};
use crate::runtime::{
    run_observed, EmissionStore, EnvSchedule, InstantTrace, Lineage, Observer, Runtime, RuntimeError,
    SchedulerPolicy, Soup,
};
use crate::syntax::{check_process, EquationSystem, Label, Name, ThreadId, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Invariant {
    /// Within an instant, no emitted value disappears.
    StoreMonotone,
    /// `V(s)` has no duplicates and, as a set, is what was emitted on `s`.
    ListsDistinct,
    /// `V(s)` is nil exactly when nothing was emitted on `s`.
    NilIffAbsent,
    /// Names dropped from the restriction do not occur free afterwards.
    Extrusion,
    /// Every intermediate program is well typed.
    SubjectReduction,
    /// No label is read twice within one cycle.
    ReadOnce,
    /// Every unfolded call follows an edge of the call graphs, and the
    /// labels read on the way are among the edge's labels.
    CallGraph,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantViolation {
    pub invariant: Invariant,
    pub instant: u64,
    pub detail: String,
}

impl fmt::Display for InvariantViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "instant {}: {:?}: {}", self.instant, self.invariant, self.detail)
    }
}

pub struct InvariantObserver<'a> {
    sys: &'a EquationSystem,
    analysis: Option<&'a Analysis>,
    /// Subject reduction is the expensive check; it can be switched off.
    pub subject_reduction: bool,
    instant: u64,
    store: BTreeMap<Name, BTreeSet<Value>>,
    emitted: BTreeMap<Name, BTreeSet<Value>>,
    reads: BTreeSet<(u64, Label)>,
    pub checks: u64,
    pub violations: Vec<InvariantViolation>,
}

impl<'a> InvariantObserver<'a> {
    pub fn new(sys: &'a EquationSystem, analysis: Option<&'a Analysis>) -> Self {
        InvariantObserver {
            sys,
            analysis,
            subject_reduction: true,
            instant: 1,
            store: BTreeMap::new(),
            emitted: BTreeMap::new(),
            reads: BTreeSet::new(),
            checks: 0,
            violations: Vec::new(),
        }
    }

    fn fail(&mut self, invariant: Invariant, detail: String) {
        self.violations.push(InvariantViolation { invariant, instant: self.instant, detail });
    }

    fn check_edge(&mut self, before: &Lineage, target: &ThreadId) {
        let (Some(an), Some(from)) = (self.analysis, before.last.as_ref()) else { return };
        self.checks += 1;
        let a = Node::Thread(from.clone());
        let reset = self.sys.is_reset(target);
        let to = if reset { Node::Sink } else { Node::Thread(target.clone()) };
        if before.unfolded_at == self.instant
            && an.instant_graph.edge(&a, &Node::Thread(target.clone())).is_none()
        {
            self.fail(Invariant::CallGraph, format!("{from} -> {target} within an instant has no edge"));
        }
        if reset {
            return;
        }
        match an.cycle_graph.edge(&a, &to) {
            None => self.fail(Invariant::CallGraph, format!("{from} -> {target} has no edge in the cycle graph")),
            Some(labels) => {
                if !before.labels.is_subset(labels) {
                    self.fail(
                        Invariant::CallGraph,
                        format!("{from} -> {target} read labels {:?} outside the edge's {:?}", before.labels, labels),
                    );
                }
            }
        }
    }
}

impl Observer for InvariantObserver<'_> {
    fn unfolded(&mut self, before: &Lineage, target: &ThreadId, _args: &[Value], _new_cycle: bool) {
        self.check_edge(before, target);
    }

    fn read(&mut self, lineage: &Lineage, label: Label, _: &Value) {
        self.checks += 1;
        if !self.reads.insert((lineage.cycle, label)) {
            self.fail(Invariant::ReadOnce, format!("label {label} read twice in cycle {}", lineage.cycle));
        }
    }

    fn emitted(&mut self, _: &Lineage, signal: &Name, value: &Value, _: &EmissionStore) {
        self.emitted.entry(signal.clone()).or_default().insert(value.clone());
    }

    fn stepped(&mut self, rt: &Runtime) {
        self.checks += 1;
        let now: BTreeMap<Name, BTreeSet<Value>> =
            rt.store().iter().map(|(s, vs)| (s.clone(), vs.iter().cloned().collect())).collect();
        let lost: Vec<Name> = self
            .store
            .iter()
            .filter(|(s, before)| !now.get(*s).is_some_and(|vs| before.is_subset(vs)))
            .map(|(s, _)| s.clone())
            .collect();
        for s in lost {
            self.fail(Invariant::StoreMonotone, format!("values on {s} were lost"));
        }
        self.store = now;
        if self.subject_reduction {
            for t in rt.soup().threads {
                if let Err(errs) = check_process(self.sys, rt.signal_types(), &t.process) {
                    let detail = format!("{}: {}", t.process, errs[0]);
                    self.fail(Invariant::SubjectReduction, detail);
                }
            }
        }
    }

    fn instant_ended(&mut self, trace: &InstantTrace, next: &Soup) {
        self.checks += 1;
        for (s, list) in &trace.signals {
            let set: BTreeSet<Value> = list.iter().cloned().collect();
            if set.len() != list.len() {
                self.fail(Invariant::ListsDistinct, format!("V({s}) has duplicates"));
            }
            let emitted = self.emitted.get(s).cloned().unwrap_or_default();
            if set != emitted {
                self.fail(Invariant::ListsDistinct, format!("V({s}) differs from the values emitted on it"));
            }
            if list.is_empty() != emitted.is_empty() {
                self.fail(Invariant::NilIffAbsent, format!("V({s}) is nil iff nothing was emitted fails"));
            }
        }
        let missing: Vec<Name> = self
            .emitted
            .iter()
            .filter(|(s, vs)| !vs.is_empty() && !trace.signals.contains_key(*s))
            .map(|(s, _)| s.clone())
            .collect();
        for s in missing {
            self.fail(Invariant::NilIffAbsent, format!("{s} was emitted on but V({s}) is nil"));
        }
        let before = &trace.suspended_soup.restricted;
        let dropped: BTreeSet<&Name> =
            before.iter().filter(|n| !next.restricted.contains(*n) && !trace.extruded.contains(*n)).collect();
        for n in next.free_names() {
            if dropped.contains(&n) {
                self.fail(Invariant::Extrusion, format!("{n} occurs free after being dropped"));
            }
        }
        for n in &trace.extruded {
            if next.restricted.contains(n) || !trace.free.contains(n) {
                self.fail(Invariant::Extrusion, format!("{n} was extruded but is not free"));
            }
        }
        self.instant += 1;
        self.store.clear();
        self.emitted.clear();
    }
}

#[derive(Clone, Debug)]
pub struct InvariantReport {
    pub instants: usize,
    pub checks: u64,
    pub violations: Vec<InvariantViolation>,
}

impl InvariantReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Runs a program under every check. Stops early if an instant does not
/// suspend within the step cap.
pub fn check_run(
    sys: &EquationSystem,
    analysis: Option<&Analysis>,
    instants: usize,
    schedule: &EnvSchedule,
    policy: SchedulerPolicy,
    step_cap: u64,
) -> Result<InvariantReport, RuntimeError> {
    let mut obs = InvariantObserver::new(sys, analysis);
    let traces = run_observed(sys, instants, schedule, policy, step_cap, &mut obs)?;
    Ok(InvariantReport { instants: traces.len(), checks: obs.checks, violations: obs.violations })
}
