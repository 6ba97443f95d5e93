//! The interpreter: reduction within an instant, suspension, and the
//! evaluation at the end of the instant.

use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::syntax::{
    typecheck, EquationSystem, Expr, Label, Name, Process, ThreadId, TypeError, TypeExpr, Value,
};

use super::env::{Env, EnvSchedule};
use super::eval::{eval_closed, pattern_match, EvalError, Fuel};
use super::observer::{NoObserver, Observer};
use super::soup::{EmissionStore, Lineage, Soup, Thread};
use super::trace::InstantTrace;

pub const DEFAULT_STEP_CAP: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchedulerMode {
    SeededRandom,
    /// Always the first candidate; lists `V(s)` keep emission order.
    FirstMatch,
}

/// Resolves every non-deterministic choice: which redex, which value a
/// present statement reads, and the order of the lists `V(s)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchedulerPolicy {
    pub seed: u64,
    pub mode: SchedulerMode,
}

impl SchedulerPolicy {
    pub fn seeded(seed: u64) -> Self {
        SchedulerPolicy { seed, mode: SchedulerMode::SeededRandom }
    }

    pub fn first_match() -> Self {
        SchedulerPolicy { seed: 0, mode: SchedulerMode::FirstMatch }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum RuntimeError {
    #[error("the program has no initial configuration")]
    NoInit,
    #[error("the program is ill-typed: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    IllTyped(Vec<TypeError>),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("call to undefined thread identifier `{0}`")]
    UnknownThread(ThreadId),
    #[error("input on `{0}`, which is not a known signal")]
    UnknownSignal(Name),
    #[error("input value {value} does not have the payload type {ty} of `{signal}`")]
    InputType { signal: Name, value: Value, ty: TypeExpr },
    #[error("end of instant requested while reductions remain")]
    NotSuspended,
}

pub struct Runtime<'a> {
    sys: &'a EquationSystem,
    policy: SchedulerPolicy,
    rng: ChaCha8Rng,
    pub step_cap: u64,
    restricted: BTreeSet<Name>,
    /// Threads with a redex.
    active: Vec<Thread>,
    /// Present statements on signals with no value yet, by signal.
    waiting: BTreeMap<Name, Vec<Thread>>,
    store: EmissionStore,
    signal_types: BTreeMap<Name, TypeExpr>,
    next_stamp: u32,
    next_cycle: u64,
    instant: u64,
    steps: u64,
    function_steps: u64,
    max_value_size: u64,
}

impl<'a> Runtime<'a> {
    /// Loads the initial configuration: restricted names receive fresh
    /// stamps, free names stamp 0.
    pub fn new(sys: &'a EquationSystem, policy: SchedulerPolicy) -> Result<Self, RuntimeError> {
        let report = typecheck(sys).map_err(RuntimeError::IllTyped)?;
        let init = sys.init.as_ref().ok_or(RuntimeError::NoInit)?;
        let mut rt = Runtime {
            sys,
            policy,
            rng: ChaCha8Rng::seed_from_u64(policy.seed),
            step_cap: DEFAULT_STEP_CAP,
            restricted: BTreeSet::new(),
            active: Vec::new(),
            waiting: BTreeMap::new(),
            store: EmissionStore::new(),
            signal_types: BTreeMap::new(),
            next_stamp: 1,
            next_cycle: 0,
            instant: 0,
            steps: 0,
            function_steps: 0,
            max_value_size: 0,
        };
        let mut renaming = BTreeMap::new();
        for (n, _) in &init.restricted {
            let fresh = rt.fresh_name(n);
            rt.restricted.insert(fresh.clone());
            renaming.insert(n.clone(), Expr::Var(fresh));
        }
        for (n, ty) in &report.init_types {
            let runtime_name = match renaming.get(n) {
                Some(Expr::Var(m)) => m.clone(),
                _ => {
                    let m = Name::stamped(n.text.clone(), n.stamp.unwrap_or(0));
                    renaming.insert(n.clone(), Expr::Var(m.clone()));
                    m
                }
            };
            rt.signal_types.insert(runtime_name, ty.clone());
        }
        for (id, args) in &init.threads {
            let args = args.iter().map(|a| a.subst(&renaming)).collect();
            let lineage = rt.fresh_lineage();
            rt.add(Process::Call(id.clone(), args), lineage);
        }
        Ok(rt)
    }

    pub fn with_step_cap(mut self, cap: u64) -> Self {
        self.step_cap = cap.max(1);
        self
    }

    pub fn system(&self) -> &EquationSystem {
        self.sys
    }

    pub fn instant(&self) -> u64 {
        self.instant
    }

    pub fn store(&self) -> &EmissionStore {
        &self.store
    }

    pub fn signal_types(&self) -> &BTreeMap<Name, TypeExpr> {
        &self.signal_types
    }

    pub fn restricted(&self) -> &BTreeSet<Name> {
        &self.restricted
    }

    /// The current program, threads in a deterministic order.
    pub fn soup(&self) -> Soup {
        let mut threads = self.active.clone();
        for ts in self.waiting.values() {
            threads.extend(ts.iter().cloned());
        }
        Soup { restricted: self.restricted.clone(), threads }
    }

    pub fn is_suspended(&self) -> bool {
        self.active.is_empty()
    }

    fn fresh_name(&mut self, base: &Name) -> Name {
        let n = Name::stamped(base.text.clone(), self.next_stamp);
        self.next_stamp += 1;
        n
    }

    fn fresh_lineage(&mut self) -> Lineage {
        self.next_cycle += 1;
        Lineage { cycle: self.next_cycle, ..Lineage::default() }
    }

    fn pick(&mut self, n: usize) -> usize {
        match self.policy.mode {
            SchedulerMode::SeededRandom => self.rng.gen_range(0..n),
            SchedulerMode::FirstMatch => 0,
        }
    }

    /// Adds a process in parallel, keeping the normal form.
    fn add(&mut self, p: Process, lineage: Lineage) {
        match p {
            Process::Nil => {}
            Process::Par(l, r) => {
                self.add(*l, lineage.clone());
                self.add(*r, lineage);
            }
            Process::New { name, ty, body } => {
                let fresh = self.fresh_name(&name);
                self.restricted.insert(fresh.clone());
                self.signal_types.insert(fresh.clone(), ty);
                let s = [(name, Expr::Var(fresh))].into_iter().collect();
                self.add(body.subst(&s), lineage);
            }
            Process::Present(ref pr) if !self.store.get(&pr.signal).is_some_and(|vs| !vs.is_empty()) => {
                let signal = pr.signal.clone();
                self.waiting.entry(signal).or_default().push(Thread { process: p, lineage });
            }
            other => self.active.push(Thread { process: other, lineage }),
        }
    }

    fn eval(&mut self, e: &Expr) -> Result<Value, RuntimeError> {
        let mut fuel = Fuel::new(self.step_cap);
        let v = eval_closed(self.sys, e, &mut fuel);
        self.function_steps += fuel.used;
        Ok(v?)
    }

    /// Performs one reduction. Returns false when the program is suspended.
    pub fn step(&mut self, obs: &mut dyn Observer) -> Result<bool, RuntimeError> {
        if self.active.is_empty() {
            return Ok(false);
        }
        let idx = self.pick(self.active.len());
        let Thread { process, mut lineage } = self.active.swap_remove(idx);
        match process {
            Process::Call(id, args) => {
                let eq = self.sys.equation(&id).ok_or_else(|| RuntimeError::UnknownThread(id.clone()))?;
                let mut values = Vec::with_capacity(args.len());
                for a in &args {
                    values.push(self.eval(a)?);
                }
                let new_cycle = eq.annotation.reset;
                obs.unfolded(&lineage, &id, &values, new_cycle);
                if new_cycle {
                    lineage = self.fresh_lineage();
                    lineage.root = Some(id.clone());
                } else if lineage.root.is_none() {
                    lineage.root = Some(id.clone());
                }
                lineage.last = Some(id.clone());
                lineage.labels.clear();
                lineage.last_args = values.clone();
                lineage.unfolded_at = self.instant;
                let s = eq.params.iter().map(|p| p.name.clone()).zip(values).collect();
                let body = eq.body.subst_values(&s);
                self.add(body, lineage);
            }
            Process::Emit(s, e) => {
                let v = self.eval(&e)?;
                self.max_value_size = self.max_value_size.max(v.size());
                let entry = self.store.entry(s.clone()).or_insert_with(IndexSet::new);
                let first = entry.is_empty();
                entry.insert(v.clone());
                obs.emitted(&lineage, &s, &v, &self.store);
                if first {
                    if let Some(woken) = self.waiting.remove(&s) {
                        self.active.extend(woken);
                    }
                }
            }
            Process::Present(pr) => {
                let n = self.store.get(&pr.signal).map_or(0, |vs| vs.len());
                let k = self.pick(n);
                let v = self.store[&pr.signal][k].clone();
                if let Some(l) = pr.label {
                    obs.read(&lineage, l, &v);
                    lineage.labels.insert(l);
                }
                let s = [(pr.bound.clone(), v)].into_iter().collect();
                self.add(pr.body.subst_values(&s), lineage);
            }
            Process::NameMatch { left, right, then, otherwise } => {
                self.add(if left == right { *then } else { *otherwise }, lineage);
            }
            Process::Match { scrutinee, pattern, then, otherwise } => {
                let v = self.eval(&scrutinee)?;
                match pattern_match(&v, &pattern) {
                    Some(s) => self.add(then.subst_values(&s), lineage),
                    None => self.add(*otherwise, lineage),
                }
            }
            Process::Nil | Process::Par(..) | Process::New { .. } => {
                unreachable!("threads are kept in normal form")
            }
        }
        self.steps += 1;
        obs.stepped(self);
        Ok(true)
    }

    /// Names reachable from the free names of the emissions, following the
    /// values emitted on each reachable signal.
    pub fn free_closure(restricted: &BTreeSet<Name>, store: &EmissionStore) -> BTreeSet<Name> {
        let mut free = BTreeSet::new();
        let mut todo = Vec::new();
        for (s, vs) in store {
            if vs.is_empty() {
                continue;
            }
            let mut names = BTreeSet::from([s.clone()]);
            for v in vs {
                v.names(&mut names);
            }
            todo.extend(names.into_iter().filter(|n| !restricted.contains(n)));
        }
        while let Some(n) = todo.pop() {
            if !free.insert(n.clone()) {
                continue;
            }
            if let Some(vs) = store.get(&n) {
                let mut names = BTreeSet::new();
                for v in vs {
                    v.names(&mut names);
                }
                todo.extend(names.into_iter().filter(|m| !free.contains(m)));
            }
        }
        free
    }

    /// The evaluation at the end of the instant. Builds the lists `V(s)`,
    /// extrudes names, and turns suspended present statements into calls of
    /// their continuations.
    pub fn end_of_instant(
        &mut self,
        obs: &mut dyn Observer,
    ) -> Result<(BTreeMap<Name, Vec<Value>>, BTreeSet<Name>, BTreeSet<Name>), RuntimeError> {
        if !self.active.is_empty() {
            return Err(RuntimeError::NotSuspended);
        }
        let store = std::mem::take(&mut self.store);
        let mut lists = BTreeMap::new();
        for (s, vs) in &store {
            let mut list: Vec<Value> = vs.iter().cloned().collect();
            if self.policy.mode == SchedulerMode::SeededRandom {
                list.shuffle(&mut self.rng);
            }
            lists.insert(s.clone(), list);
        }
        let free = Self::free_closure(&self.restricted, &store);
        let extruded: BTreeSet<Name> = self.restricted.intersection(&free).cloned().collect();
        self.restricted.retain(|n| !free.contains(n));

        let waiting = std::mem::take(&mut self.waiting);
        for (_, threads) in waiting {
            for Thread { process, mut lineage } in threads {
                let Process::Present(pr) = process else { unreachable!() };
                let mut args = Vec::with_capacity(pr.cont.args.len());
                for a in &pr.cont.args {
                    let mut reads = Vec::new();
                    derefs(a, &mut reads);
                    for (l, s) in reads {
                        obs.read(&lineage, l, &Value::list(lists.get(&s).cloned().unwrap_or_default()));
                        lineage.labels.insert(l);
                    }
                    let v = self.eval(&deref(a, &lists))?;
                    args.push(v.to_expr());
                }
                self.add(Process::Call(pr.cont.target.clone(), args), lineage);
            }
        }
        let mut used = BTreeSet::new();
        for t in &self.active {
            used.extend(t.process.free_vars());
        }
        self.restricted.retain(|n| used.contains(n));
        Ok((lists, free, extruded))
    }

    fn inject(&mut self, env: &Env) -> Result<(), RuntimeError> {
        for (s, v) in env.emissions() {
            let ty = match self.signal_types.get(s) {
                Some(TypeExpr::Sig(_, t)) => (**t).clone(),
                _ => return Err(RuntimeError::UnknownSignal(s.clone())),
            };
            if !self.register(v, &ty) {
                return Err(RuntimeError::InputType { signal: s.clone(), value: v.clone(), ty });
            }
            self.add(Process::Emit(s.clone(), v.to_expr()), Lineage::default());
        }
        Ok(())
    }

    /// Checks a value against a type, recording the types of new names.
    fn register(&mut self, v: &Value, ty: &TypeExpr) -> bool {
        match (v, ty) {
            (Value::Sig(n), TypeExpr::Sig(..)) => match self.signal_types.get(n) {
                Some(t) => t == ty,
                None => {
                    self.signal_types.insert(n.clone(), ty.clone());
                    true
                }
            },
            (Value::Con(c, args), _) => {
                let Some(ctors) = self.sys.constructors_of(ty) else { return false };
                let Some((_, arg_tys)) = ctors.iter().find(|(d, _)| d == c) else { return false };
                arg_tys.len() == args.len() && args.iter().zip(arg_tys).all(|(a, t)| self.register(a, t))
            }
            _ => false,
        }
    }

    /// Runs one instant: inject the input, reduce to suspension (or to the
    /// step cap), then evaluate the end of the instant.
    pub fn run_instant(&mut self, env: &Env, obs: &mut dyn Observer) -> Result<InstantTrace, RuntimeError> {
        self.instant += 1;
        self.steps = 0;
        self.function_steps = 0;
        self.max_value_size = 0;
        let config_size = self.soup().config_size();
        self.inject(env)?;
        while self.steps < self.step_cap {
            if !self.step(obs)? {
                break;
            }
        }
        let suspended = self.is_suspended();
        let suspended_soup = self.soup();
        let mut trace = InstantTrace {
            instant: self.instant,
            steps: self.steps,
            suspended,
            signals: BTreeMap::new(),
            free: BTreeSet::new(),
            extruded: BTreeSet::new(),
            config_size,
            input_size: env.size(),
            max_value_size: self.max_value_size,
            function_steps: self.function_steps,
            suspended_soup,
        };
        if suspended {
            let (lists, free, extruded) = self.end_of_instant(obs)?;
            trace.signals = lists;
            trace.free = free;
            trace.extruded = extruded;
            trace.function_steps = self.function_steps;
            let next = self.soup();
            obs.instant_ended(&trace, &next);
        }
        Ok(trace)
    }
}

fn derefs(e: &Expr, out: &mut Vec<(Label, Name)>) {
    match e {
        Expr::Deref(s, l) => out.push((*l, s.clone())),
        Expr::Var(_) => {}
        Expr::Con(_, args) | Expr::App(_, args) => args.iter().for_each(|a| derefs(a, out)),
    }
}

fn deref(e: &Expr, lists: &BTreeMap<Name, Vec<Value>>) -> Expr {
    match e {
        Expr::Deref(s, _) => {
            Value::list(lists.get(s).cloned().unwrap_or_default()).to_expr()
        }
        Expr::Var(_) => e.clone(),
        Expr::Con(c, args) => Expr::Con(c.clone(), args.iter().map(|a| deref(a, lists)).collect()),
        Expr::App(f, args) => Expr::App(f.clone(), args.iter().map(|a| deref(a, lists)).collect()),
    }
}

/// Runs `instants` instants, stopping early at the first instant that
/// does not suspend within the step cap.
pub fn run_computation(
    sys: &EquationSystem,
    instants: usize,
    schedule: &EnvSchedule,
    policy: SchedulerPolicy,
    step_cap: u64,
) -> Result<Vec<InstantTrace>, RuntimeError> {
    run_observed(sys, instants, schedule, policy, step_cap, &mut NoObserver)
}

pub fn run_observed(
    sys: &EquationSystem,
    instants: usize,
    schedule: &EnvSchedule,
    policy: SchedulerPolicy,
    step_cap: u64,
    obs: &mut dyn Observer,
) -> Result<Vec<InstantTrace>, RuntimeError> {
    let mut rt = Runtime::new(sys, policy)?.with_step_cap(step_cap);
    let mut out = Vec::with_capacity(instants);
    for k in 0..instants {
        let trace = rt.run_instant(&schedule.get(k), obs)?;
        let stop = !trace.suspended;
        out.push(trace);
        if stop {
            break;
        }
    }
    Ok(out)
}
