//! Ground instances of the rewriting rules: rewriting closed hatted calls
//! with values for their arguments.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use rand::Rng;
use thiserror::Error;

use super::rules::{Rhs, RewriteRule};
use crate::assignments::{canonical_signal, ValueEnumerator};
use crate::constraints::{Term, VarId};
use crate::runtime::eval::{apply, EvalError, Fuel};
use crate::syntax::*;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AbstractState {
    Call(ThreadId, Vec<Value>),
    Emit(Value, Value),
    /// A call whose auxiliary arguments (the `None` slots) are supplied
    /// at the start of the next instant.
    Lambda(ThreadId, Vec<Option<Value>>),
}

impl fmt::Display for AbstractState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbstractState::Call(id, vs) => {
                let vs: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
                write!(f, "{id}^({})", vs.join(", "))
            }
            AbstractState::Emit(s, v) => write!(f, "emit({s}, {v})"),
            AbstractState::Lambda(id, vs) => {
                let holes = vs.iter().filter(|v| v.is_none()).count();
                let vs: Vec<String> =
                    vs.iter().map(|v| v.as_ref().map_or_else(|| "_".to_string(), |v| v.to_string())).collect();
                write!(f, "\\{holes}. {id}^({})", vs.join(", "))
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RewriteError {
    #[error("no rule matches {0}")]
    Stuck(AbstractState),
    #[error("{0} cannot be rewritten")]
    Terminal(AbstractState),
    #[error("while evaluating: {0}")]
    Eval(#[from] EvalError),
    #[error("unbound variable `{0}` in a right-hand side")]
    Unbound(VarId),
    #[error("no value available for an auxiliary argument of type {0}")]
    NoInput(TypeExpr),
}

/// Supplies the values read at the start of an instant.
pub trait ValueSource {
    fn next(&mut self, ty: &TypeExpr) -> Option<Value>;
}

/// Values of size at most `bound`, chosen at random.
pub struct EnumeratedSource<'a, R> {
    sys: &'a EquationSystem,
    bound: u64,
    rng: R,
    cache: BTreeMap<TypeExpr, Vec<Value>>,
}

impl<'a, R: Rng> EnumeratedSource<'a, R> {
    pub fn new(sys: &'a EquationSystem, bound: u64, rng: R) -> Self {
        EnumeratedSource { sys, bound, rng, cache: BTreeMap::new() }
    }
}

impl<R: Rng> ValueSource for EnumeratedSource<'_, R> {
    fn next(&mut self, ty: &TypeExpr) -> Option<Value> {
        let (sys, bound) = (self.sys, self.bound);
        let vals = self
            .cache
            .entry(ty.clone())
            .or_insert_with(|| ValueEnumerator::new(sys, 10_000).up_to(ty, bound));
        if vals.is_empty() {
            return None;
        }
        Some(vals[self.rng.gen_range(0..vals.len())].clone())
    }
}

/// Replays values recorded elsewhere, in order.
#[derive(Clone, Debug, Default)]
pub struct ReplaySource {
    pub queue: VecDeque<Value>,
}

impl ValueSource for ReplaySource {
    fn next(&mut self, _: &TypeExpr) -> Option<Value> {
        self.queue.pop_front()
    }
}

/// Replaces every signal name inside a value by the constant of its type.
pub fn canonicalize(sys: &EquationSystem, v: &Value, ty: &TypeExpr) -> Value {
    match (v, ty) {
        (Value::Sig(_), _) => Value::Sig(canonical_signal(ty)),
        (Value::Con(c, args), _) if !args.is_empty() => {
            let tys: Vec<TypeExpr> = match sys.constructors_of(ty) {
                Some(cs) => cs.into_iter().find(|(n, _)| n == c).map(|(_, ts)| ts).unwrap_or_default(),
                None => vec![],
            };
            if tys.len() != args.len() {
                return v.clone();
            }
            Value::Con(c.clone(), args.iter().zip(&tys).map(|(a, t)| canonicalize(sys, a, t)).collect())
        }
        _ => v.clone(),
    }
}

fn match_term(p: &Term, v: &Value, out: &mut BTreeMap<VarId, Value>) -> bool {
    match (p, v) {
        (Term::Var(x), _) => match out.get(x) {
            Some(w) => w == v,
            None => {
                out.insert(x.clone(), v.clone());
                true
            }
        },
        (Term::Signal(c), Value::Sig(d)) => c == d,
        (Term::Con(c, ps), Value::Con(d, vs)) => {
            c == d && ps.len() == vs.len() && ps.iter().zip(vs).all(|(p, v)| match_term(p, v, out))
        }
        // A masked position matches anything.
        (Term::Zero, _) => true,
        _ => false,
    }
}

/// `σp = v̄`, if some σ exists.
pub fn match_args(ps: &[Term], vs: &[Value]) -> Option<BTreeMap<VarId, Value>> {
    if ps.len() != vs.len() {
        return None;
    }
    let mut out = BTreeMap::new();
    ps.iter().zip(vs).all(|(p, v)| match_term(p, v, &mut out)).then_some(out)
}

pub fn eval_term(
    sys: &EquationSystem,
    t: &Term,
    sigma: &BTreeMap<VarId, Value>,
    fuel: &mut Fuel,
) -> Result<Value, RewriteError> {
    Ok(match t {
        Term::Var(x) => sigma.get(x).cloned().ok_or_else(|| RewriteError::Unbound(x.clone()))?,
        Term::Signal(c) => Value::Sig(c.clone()),
        Term::Zero => Value::unit(),
        Term::Con(c, ts) => {
            Value::Con(c.clone(), ts.iter().map(|t| eval_term(sys, t, sigma, fuel)).collect::<Result<_, _>>()?)
        }
        Term::Fun(f, ts) => {
            let args = ts.iter().map(|t| eval_term(sys, t, sigma, fuel)).collect::<Result<Vec<_>, _>>()?;
            apply(sys, f, &args, fuel)?
        }
        Term::Hat(..) => unreachable!("hatted terms only occur at the root"),
    })
}

/// Every state reachable in one step, with the index of the rule used.
pub fn successors(
    sys: &EquationSystem,
    rules: &[RewriteRule],
    state: &AbstractState,
    fuel: &mut Fuel,
) -> Result<Vec<(usize, AbstractState)>, RewriteError> {
    let AbstractState::Call(id, vs) = state else {
        return Err(RewriteError::Terminal(state.clone()));
    };
    let mut out = Vec::new();
    for (i, r) in rules.iter().enumerate() {
        let (a, ps) = r.lhs.hat_args().expect("rule lhs is hatted");
        if a != id {
            continue;
        }
        let Some(sigma) = match_args(ps, vs) else { continue };
        let next = match &r.rhs {
            Rhs::Emit { signal, value } => {
                AbstractState::Emit(eval_term(sys, signal, &sigma, fuel)?, eval_term(sys, value, &sigma, fuel)?)
            }
            Rhs::Call(t) => {
                let (b, es) = t.hat_args().expect("call rhs is hatted");
                let vals = es.iter().map(|e| eval_term(sys, e, &sigma, fuel)).collect::<Result<_, _>>()?;
                AbstractState::Call(b.clone(), vals)
            }
            Rhs::Lambda(ys, t) => {
                let (b, es) = t.hat_args().expect("lambda body is hatted");
                let mut slots = Vec::new();
                for e in es {
                    match e {
                        Term::Var(y) if ys.contains(y) => slots.push(None),
                        _ => slots.push(Some(eval_term(sys, e, &sigma, fuel)?)),
                    }
                }
                AbstractState::Lambda(b.clone(), slots)
            }
        };
        out.push((i, next));
    }
    if out.is_empty() {
        return Err(RewriteError::Stuck(state.clone()));
    }
    Ok(out)
}

/// Fills the holes of an abstraction with values of the auxiliary types.
pub fn feed(
    sys: &EquationSystem,
    aux_types: &[TypeExpr],
    state: &AbstractState,
    source: &mut dyn ValueSource,
) -> Result<AbstractState, RewriteError> {
    let AbstractState::Lambda(id, slots) = state else {
        return Err(RewriteError::Terminal(state.clone()));
    };
    let mut holes = aux_types.iter();
    let mut vals = Vec::new();
    for s in slots {
        match s {
            Some(v) => vals.push(v.clone()),
            None => {
                let ty = holes.next().cloned().unwrap_or(TypeExpr::Unit);
                let v = source.next(&ty).ok_or_else(|| RewriteError::NoInput(ty.clone()))?;
                vals.push(canonicalize(sys, &v, &ty));
            }
        }
    }
    Ok(AbstractState::Call(id.clone(), vals))
}

#[derive(Clone, Copy, Debug)]
pub enum Policy {
    First,
    Last,
    Random(u64),
}

/// One step: a matching rule for a call, the next instant for an
/// abstraction. Emissions are final.
pub fn ground_rewrite(
    sys: &EquationSystem,
    rules: &[RewriteRule],
    aux_types: &dyn Fn(&ThreadId) -> Vec<TypeExpr>,
    state: &AbstractState,
    source: &mut dyn ValueSource,
    policy: Policy,
) -> Result<AbstractState, RewriteError> {
    match state {
        AbstractState::Emit(..) => Err(RewriteError::Terminal(state.clone())),
        AbstractState::Lambda(id, _) => feed(sys, &aux_types(id), state, source),
        AbstractState::Call(..) => {
            let mut fuel = Fuel::new(1_000_000);
            let succ = successors(sys, rules, state, &mut fuel)?;
            let pick = match policy {
                Policy::First => 0,
                Policy::Last => succ.len() - 1,
                Policy::Random(seed) => {
                    use rand::SeedableRng;
                    rand_chacha::ChaCha8Rng::seed_from_u64(seed).gen_range(0..succ.len())
                }
            };
            Ok(succ[pick].1.clone())
        }
    }
}
