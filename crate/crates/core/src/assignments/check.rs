//! `q ⊨ C`: bounded exhaustive search for a violating ground substitution,
//! and a symbolic proof for the max-of-affine family.

use std::collections::BTreeMap;

use super::affine::{Linear, MaxAffine};
use super::enumerate::{product, QValues};
use super::natural::Natural;
use super::{hat_key, Assignment, GroundSubstitution};
use crate::constraints::{Constraint, Relation, Term, VarId};
use crate::syntax::*;

#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    /// Largest value size substituted for a variable.
    pub bound: u64,
    /// Most substitutions tried per constraint.
    pub cap: u64,
    pub symbolic: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { bound: 6, cap: 100_000, symbolic: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refutation<N> {
    pub witness: GroundSubstitution,
    /// The component of an index-0 lex constraint whose relation fails.
    pub component: Option<usize>,
    /// Whether the failing relation is the strict one.
    pub strict: bool,
    pub lhs: Vec<N>,
    pub rhs: Vec<N>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckVerdict<N> {
    SymbolicallyProven,
    Satisfied { bound: u64, checked: u64 },
    Refuted(Box<Refutation<N>>),
    Inconclusive { bound: u64, reason: String },
}

impl<N> CheckVerdict<N> {
    pub fn holds(&self) -> bool {
        matches!(self, CheckVerdict::SymbolicallyProven | CheckVerdict::Satisfied { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            CheckVerdict::SymbolicallyProven => "proven",
            CheckVerdict::Satisfied { .. } => "satisfied",
            CheckVerdict::Refuted(_) => "refuted",
            CheckVerdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConstraintResult<N> {
    pub constraint: Constraint,
    pub verdict: CheckVerdict<N>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Overall {
    Proven,
    Satisfied,
    Refuted,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct QiReport<N> {
    pub bound: u64,
    pub results: Vec<ConstraintResult<N>>,
}

impl<N: Natural> QiReport<N> {
    pub fn overall(&self) -> Overall {
        let v = |p: fn(&CheckVerdict<N>) -> bool| self.results.iter().any(|r| p(&r.verdict));
        if v(|c| matches!(c, CheckVerdict::Refuted(_))) {
            Overall::Refuted
        } else if v(|c| matches!(c, CheckVerdict::Inconclusive { .. })) {
            Overall::Inconclusive
        } else if v(|c| matches!(c, CheckVerdict::Satisfied { .. })) {
            Overall::Satisfied
        } else {
            Overall::Proven
        }
    }

    pub fn refuted(&self) -> impl Iterator<Item = (&Constraint, &Refutation<N>)> {
        self.results.iter().filter_map(|r| match &r.verdict {
            CheckVerdict::Refuted(f) => Some((&r.constraint, &**f)),
            _ => None,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let results: Vec<serde_json::Value> = self
            .results
            .iter()
            .map(|r| {
                let mut j = serde_json::json!({
                    "constraint": r.constraint.to_string(),
                    "index": r.constraint.index,
                    "verdict": r.verdict.name(),
                });
                match &r.verdict {
                    CheckVerdict::Satisfied { bound, checked } => {
                        j["bound"] = (*bound).into();
                        j["checked"] = (*checked).into();
                    }
                    CheckVerdict::Inconclusive { bound, reason } => {
                        j["bound"] = (*bound).into();
                        j["reason"] = reason.clone().into();
                    }
                    CheckVerdict::Refuted(f) => {
                        let w: serde_json::Map<String, serde_json::Value> =
                            f.witness.iter().map(|(k, v)| (k.to_string(), v.to_string().into())).collect();
                        j["witness"] = w.into();
                        j["lhs"] = f.lhs.iter().map(|n| n.to_string()).collect::<Vec<_>>().into();
                        j["rhs"] = f.rhs.iter().map(|n| n.to_string()).collect::<Vec<_>>().into();
                        if let Some(c) = f.component {
                            j["component"] = c.into();
                        }
                    }
                    CheckVerdict::SymbolicallyProven => {}
                }
                j
            })
            .collect();
        let overall = match self.overall() {
            Overall::Proven => "proven",
            Overall::Satisfied => "satisfied",
            Overall::Refuted => "refuted",
            Overall::Inconclusive => "inconclusive",
        };
        serde_json::json!({ "bound": self.bound, "verdict": overall, "results": results })
    }
}

pub fn lex_gt<N: Ord>(a: &[N], b: &[N]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x != y {
            return x > y;
        }
    }
    false
}

/// The multiset extension of `>` on naturals: after cancelling common
/// elements, the largest remaining element is on the left.
pub fn mset_gt<N: Ord + Clone>(a: &[N], b: &[N]) -> bool {
    let mut a: Vec<N> = a.to_vec();
    let mut b: Vec<N> = b.to_vec();
    a.sort();
    b.sort();
    let (mut i, mut j) = (a.len(), b.len());
    while i > 0 && j > 0 {
        match a[i - 1].cmp(&b[j - 1]) {
            std::cmp::Ordering::Equal => {
                i -= 1;
                j -= 1;
            }
            std::cmp::Ordering::Greater => return true,
            std::cmp::Ordering::Less => return false,
        }
    }
    i > 0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    Gt,
    Geq,
    Lex,
    Mset,
}

/// Compares two vectors of terms under one ground substitution.
pub fn compare<N: Natural>(
    q: &Assignment<N>,
    sys: &EquationSystem,
    kind: Comparison,
    lhs: &[Term],
    rhs: &[Term],
    sigma: &GroundSubstitution,
) -> Result<bool, super::EvalFormalError> {
    let l = lhs.iter().map(|t| q.eval_formal(sys, t, sigma)).collect::<Result<Vec<N>, _>>()?;
    let r = rhs.iter().map(|t| q.eval_formal(sys, t, sigma)).collect::<Result<Vec<N>, _>>()?;
    Ok(match kind {
        Comparison::Gt => l.iter().zip(&r).all(|(a, b)| a > b),
        Comparison::Geq => l.iter().zip(&r).all(|(a, b)| a >= b),
        Comparison::Lex => lex_gt(&l, &r),
        Comparison::Mset => mset_gt(&l, &r),
    })
}

/// The pairs of terms a constraint compares: the arguments of both hatted
/// identifiers for index 0, the two sides otherwise.
fn sides(c: &Constraint) -> Option<(Vec<Term>, Vec<Term>)> {
    match c.rel {
        Relation::Gt(_) => {
            let (_, l) = c.lhs.hat_args()?;
            let (_, r) = c.rhs.hat_args()?;
            (l.len() == r.len()).then(|| (l.to_vec(), r.to_vec()))
        }
        Relation::Geq => Some((vec![c.lhs.clone()], vec![c.rhs.clone()])),
    }
}

pub fn check_quasi_interpretation<N: Natural>(
    q: &Assignment<N>,
    sys: &EquationSystem,
    cs: &[Constraint],
    opts: CheckOptions,
) -> QiReport<N> {
    let results = std::thread::scope(|s| {
        let handles: Vec<_> = cs
            .iter()
            .map(|c| s.spawn(move || ConstraintResult { constraint: c.clone(), verdict: check_constraint(q, sys, c, opts) }))
            .collect();
        handles.into_iter().map(|h| h.join().expect("constraint check panicked")).collect()
    });
    QiReport { bound: opts.bound, results }
}

pub fn check_constraint<N: Natural>(
    q: &Assignment<N>,
    sys: &EquationSystem,
    c: &Constraint,
    opts: CheckOptions,
) -> CheckVerdict<N> {
    if opts.symbolic && symbolic_proof(q, sys, c) {
        return CheckVerdict::SymbolicallyProven;
    }
    enumerate_constraint(q, sys, c, opts)
}

/// Tries every substitution of values of size at most `bound`. Values are
/// grouped by q-value, which is all a constraint can observe.
pub fn enumerate_constraint<N: Natural>(
    q: &Assignment<N>,
    sys: &EquationSystem,
    c: &Constraint,
    opts: CheckOptions,
) -> CheckVerdict<N> {
    let inconclusive = |reason: String| CheckVerdict::Inconclusive { bound: opts.bound, reason };
    let Some((lhs, rhs)) = sides(c) else {
        return inconclusive("the two sides have different arities".into());
    };
    let mut used = c.lhs.var_set();
    used.extend(c.rhs.var_set());
    let mut vars = Vec::new();
    let mut domains = Vec::new();
    let mut qv = QValues::new(sys, q);
    for v in used {
        let Some(ty) = c.vars.get(&v) else {
            return inconclusive(format!("variable `{v}` has no type"));
        };
        domains.push(qv.up_to(ty, opts.bound).into_iter().collect::<Vec<(N, Value)>>());
        vars.push(v);
    }
    let total = domains.iter().try_fold(1u64, |acc, d| acc.checked_mul(d.len() as u64));
    match total {
        Some(t) if t <= opts.cap => {}
        _ => return inconclusive(format!("more than {} substitutions", opts.cap)),
    }

    let witness = |combo: &[(N, Value)]| -> GroundSubstitution {
        vars.iter().cloned().zip(combo.iter().map(|(_, v)| v.clone())).collect()
    };
    let evaluate = |combo: &[(N, Value)]| -> Result<(Vec<N>, Vec<N>), super::EvalFormalError> {
        let s: BTreeMap<VarId, N> = vars.iter().cloned().zip(combo.iter().map(|(n, _)| n.clone())).collect();
        let l = lhs.iter().map(|t| q.eval_numeric(sys, t, &s)).collect::<Result<Vec<_>, _>>()?;
        let r = rhs.iter().map(|t| q.eval_numeric(sys, t, &s)).collect::<Result<Vec<_>, _>>()?;
        Ok((l, r))
    };
    let refuted = |combo: &[(N, Value)], component, strict, l, r| {
        CheckVerdict::Refuted(Box::new(Refutation { witness: witness(combo), component, strict, lhs: l, rhs: r }))
    };

    let combos = product(&domains, usize::MAX);
    let checked = combos.len() as u64;
    match c.rel {
        Relation::Geq => {
            for combo in &combos {
                match evaluate(combo) {
                    Ok((l, r)) if l[0] < r[0] => return refuted(combo, None, false, l, r),
                    Ok(_) => {}
                    Err(e) => return inconclusive(e.to_string()),
                }
            }
        }
        Relation::Gt(Status::Mset) => {
            for combo in &combos {
                match evaluate(combo) {
                    Ok((l, r)) if !mset_gt(&l, &r) => return refuted(combo, None, true, l, r),
                    Ok(_) => {}
                    Err(e) => return inconclusive(e.to_string()),
                }
            }
        }
        Relation::Gt(Status::Lex) => {
            // For each component: the first substitution breaking `≥`, and
            // the first breaking `>`.
            let n = lhs.len();
            let mut geq_fail: Vec<Option<usize>> = vec![None; n];
            let mut gt_fail: Vec<Option<usize>> = vec![None; n];
            let mut values = Vec::with_capacity(combos.len());
            for (k, combo) in combos.iter().enumerate() {
                let (l, r) = match evaluate(combo) {
                    Ok(x) => x,
                    Err(e) => return inconclusive(e.to_string()),
                };
                for i in 0..n {
                    if geq_fail[i].is_none() && l[i] < r[i] {
                        geq_fail[i] = Some(k);
                    }
                    if gt_fail[i].is_none() && l[i] <= r[i] {
                        gt_fail[i] = Some(k);
                    }
                }
                values.push((l, r));
            }
            let mut last = None;
            for i in 0..n {
                match gt_fail[i] {
                    None => return CheckVerdict::Satisfied { bound: opts.bound, checked },
                    Some(k) => last = Some((i, k)),
                }
                if let Some(k) = geq_fail[i] {
                    let (l, r) = values[k].clone();
                    return refuted(&combos[k], Some(i), false, l, r);
                }
            }
            // No component is strictly larger for every substitution.
            return match last {
                Some((i, k)) => {
                    let (l, r) = values[k].clone();
                    refuted(&combos[k], Some(i), true, l, r)
                }
                None => refuted(&[], None, true, vec![], vec![]),
            };
        }
    }
    CheckVerdict::Satisfied { bound: opts.bound, checked }
}

/// Re-evaluates a refutation: true when the witness does break the
/// recorded relation with the recorded values.
pub fn replay<N: Natural>(q: &Assignment<N>, sys: &EquationSystem, c: &Constraint, f: &Refutation<N>) -> bool {
    let Some((lhs, rhs)) = sides(c) else { return false };
    let eval = |ts: &[Term]| ts.iter().map(|t| q.eval_formal(sys, t, &f.witness)).collect::<Result<Vec<N>, _>>();
    let (Ok(l), Ok(r)) = (eval(&lhs), eval(&rhs)) else { return false };
    if l != f.lhs || r != f.rhs {
        return false;
    }
    match (c.rel, f.component) {
        (Relation::Geq, _) => l[0] < r[0],
        (Relation::Gt(Status::Mset), _) => !mset_gt(&l, &r),
        (Relation::Gt(Status::Lex), Some(i)) => {
            if f.strict {
                l[i] <= r[i]
            } else {
                l[i] < r[i]
            }
        }
        (Relation::Gt(Status::Lex), None) => l.is_empty(),
    }
}

type Form<N> = Vec<Linear<N, VarId>>;

const MAX_ARMS: usize = 4096;

struct Symbolic<'a, N> {
    q: &'a Assignment<N>,
    sys: &'a EquationSystem,
    vars: &'a BTreeMap<VarId, TypeExpr>,
}

impl<N: Natural> Symbolic<'_, N> {
    /// A term as a maximum of affine forms over the q-values of its
    /// variables. `None` when it cannot be expanded.
    fn form(&self, t: &Term) -> Option<Form<N>> {
        let zero = || vec![Linear::constant(N::zero())];
        match t {
            Term::Var(v) => {
                let ty = self.vars.get(v)?;
                Some(if self.sys.is_size_zero_type(ty) { zero() } else { vec![Linear::var(v.clone())] })
            }
            Term::Zero | Term::Signal(_) => Some(zero()),
            Term::Con(c, args) => self.apply(&self.q.constructor(self.sys, c), args),
            Term::Fun(f, args) => {
                if self.sys.function(f).is_some_and(|d| self.sys.is_size_zero_type(&d.result)) {
                    return Some(zero());
                }
                self.apply(self.q.get(f)?, args)
            }
            Term::Hat(id, args) => self.apply(self.q.entries.get(&hat_key(id))?, args),
        }
    }

    fn apply(&self, f: &MaxAffine<N>, args: &[Term]) -> Option<Form<N>> {
        if f.arity() != args.len() {
            return None;
        }
        let forms = args.iter().map(|a| self.form(a)).collect::<Option<Vec<_>>>()?;
        let mut out = Vec::new();
        for arm in &f.arms {
            let mut acc: Form<N> = vec![Linear::constant(arm[0].clone())];
            for (c, form) in arm[1..].iter().zip(&forms) {
                if c.is_zero() {
                    continue;
                }
                let mut next = Vec::new();
                for a in &acc {
                    for b in form {
                        next.push(a.plus(&b.scale(c).ok()?).ok()?);
                    }
                }
                acc = prune(next);
                if acc.len() > MAX_ARMS {
                    return None;
                }
            }
            out.extend(acc);
        }
        Some(prune(out))
    }
}

/// Drops arms dominated by another arm.
fn prune<N: Natural>(mut arms: Form<N>) -> Form<N> {
    arms.dedup();
    let mut keep: Form<N> = Vec::new();
    for a in arms {
        if keep.iter().any(|k| k.dominates(&a, false)) {
            continue;
        }
        keep.retain(|k| !a.dominates(k, false));
        keep.push(a);
    }
    keep
}

fn dominates<N: Natural>(l: &Form<N>, r: &Form<N>, strict: bool) -> bool {
    r.iter().all(|b| l.iter().any(|a| a.dominates(b, strict)))
}

/// A sound sufficient check: every arm of the right side is bounded by an
/// arm of the left side for all values of the variables.
pub fn symbolic_proof<N: Natural>(q: &Assignment<N>, sys: &EquationSystem, c: &Constraint) -> bool {
    let sym = Symbolic { q, sys, vars: &c.vars };
    let Some((lhs, rhs)) = sides(c) else { return false };
    let Some(l) = lhs.iter().map(|t| sym.form(t)).collect::<Option<Vec<_>>>() else { return false };
    let Some(r) = rhs.iter().map(|t| sym.form(t)).collect::<Option<Vec<_>>>() else { return false };
    match c.rel {
        Relation::Geq => dominates(&l[0], &r[0], false),
        Relation::Gt(Status::Lex) => {
            for i in 0..l.len() {
                if dominates(&l[i], &r[i], true) {
                    return true;
                }
                if !dominates(&l[i], &r[i], false) {
                    return false;
                }
            }
            false
        }
        // Componentwise `≥` with one strict component implies the multiset
        // order.
        Relation::Gt(Status::Mset) => {
            l.iter().zip(&r).all(|(a, b)| dominates(a, b, false))
                && l.iter().zip(&r).any(|(a, b)| dominates(a, b, true))
        }
    }
}
