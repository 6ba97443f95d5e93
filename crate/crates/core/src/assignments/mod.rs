//! Assignments: numeric interpretations of constructors, functions and
//! hatted identifiers, and the check that they satisfy a constraint set.

mod affine;
mod check;
mod enumerate;
mod sequences;
mod natural;

use std::collections::BTreeMap;

use thiserror::Error;

pub use affine::{Linear, MaxAffine};
pub use check::{
    check_constraint, check_quasi_interpretation, compare, enumerate_constraint, lex_gt, mset_gt, replay,
    symbolic_proof, CheckOptions, CheckVerdict, Comparison, ConstraintResult, Overall, QiReport, Refutation,
};
pub use enumerate::{canonical_signal, compositions, product, QValues, ValueEnumerator};
pub use sequences::{
    b_lex, b_mset, is_strictly_decreasing, lex_mset_bound_check, random_decreasing_sequence, BoundCheck,
};
pub use natural::{Natural, Overflow};

use crate::constraints::{Term, VarId};
use crate::runtime::eval::{apply, Fuel};
use crate::syntax::*;

pub const ASSIGNMENT_SCHEMA_VERSION: u64 = 1;

/// A type-respecting map from variables to values.
pub type GroundSubstitution = BTreeMap<VarId, Value>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AssignmentError {
    #[error("invalid assignment file: {0}")]
    Json(String),
    #[error("symbol `{0}`: {1}")]
    Entry(String, String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalFormalError {
    #[error("unbound variable `{0}`")]
    Unbound(VarId),
    #[error("no interpretation for `{0}`")]
    Missing(String),
    #[error(transparent)]
    Overflow(#[from] Overflow),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment<N> {
    /// Keyed by constructor or function name, or `A^` for a hatted
    /// identifier.
    pub entries: BTreeMap<String, MaxAffine<N>>,
}

impl<N> Default for Assignment<N> {
    fn default() -> Self {
        Assignment { entries: BTreeMap::new() }
    }
}

pub fn hat_key(id: &ThreadId) -> String {
    format!("{id}^")
}

impl<N: Natural> Assignment<N> {
    pub fn from_json(text: &str) -> Result<Self, AssignmentError> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| AssignmentError::Json(e.to_string()))?;
        let obj = v.as_object().ok_or_else(|| AssignmentError::Json("expected an object".into()))?;
        let mut entries = BTreeMap::new();
        for (sym, spec) in obj {
            if sym == "schema_version" {
                continue;
            }
            let bad = |m: &str| AssignmentError::Entry(sym.clone(), m.into());
            let arms = spec.get("arms").and_then(|a| a.as_array()).ok_or_else(|| bad("missing `arms` list"))?;
            if arms.is_empty() {
                return Err(bad("no arms"));
            }
            let mut parsed = Vec::new();
            for arm in arms {
                let coeffs = arm.as_array().ok_or_else(|| bad("an arm is not a list"))?;
                let row = coeffs
                    .iter()
                    .map(|c| c.as_u64().map(N::from_count))
                    .collect::<Option<Vec<N>>>()
                    .ok_or_else(|| bad("coefficients must be natural numbers"))?;
                if row.is_empty() {
                    return Err(bad("an arm has no constant term"));
                }
                parsed.push(row);
            }
            if parsed.iter().any(|a| a.len() != parsed[0].len()) {
                return Err(bad("arms of different lengths"));
            }
            entries.insert(sym.clone(), MaxAffine { arms: parsed });
        }
        Ok(Assignment { entries })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut obj = serde_json::Map::new();
        obj.insert("schema_version".into(), ASSIGNMENT_SCHEMA_VERSION.into());
        for (k, f) in &self.entries {
            let arms: Vec<Vec<String>> = f.arms.iter().map(|a| a.iter().map(|c| c.to_string()).collect()).collect();
            // Coefficients are written as numbers whenever they fit.
            let arms: Vec<serde_json::Value> = arms
                .into_iter()
                .map(|a| {
                    a.into_iter()
                        .map(|c| c.parse::<u64>().map(Into::into).unwrap_or(serde_json::Value::String(c)))
                        .collect()
                })
                .collect();
            obj.insert(k.clone(), serde_json::json!({ "arms": arms }));
        }
        serde_json::Value::Object(obj)
    }

    pub fn get(&self, symbol: &str) -> Option<&MaxAffine<N>> {
        self.entries.get(symbol)
    }

    pub fn hat(&self, id: &ThreadId) -> Option<&MaxAffine<N>> {
        self.entries.get(&hat_key(id))
    }

    /// The interpretation of a constructor; the default is `1 + Σ x_i`.
    pub fn constructor(&self, sys: &EquationSystem, c: &str) -> MaxAffine<N> {
        let arity = sys.constructor_arity(c).unwrap_or(0);
        if arity == 0 {
            return MaxAffine::constant(N::zero());
        }
        self.entries.get(c).cloned().unwrap_or_else(|| MaxAffine::constructor(N::one(), arity))
    }

    /// `q_v`.
    pub fn value(&self, sys: &EquationSystem, v: &Value) -> Result<N, Overflow> {
        match v {
            Value::Sig(_) => Ok(N::zero()),
            Value::Con(_, args) if args.is_empty() => Ok(N::zero()),
            Value::Con(c, args) => {
                let qs = args.iter().map(|a| self.value(sys, a)).collect::<Result<Vec<_>, _>>()?;
                self.constructor(sys, c).eval(&qs)
            }
        }
    }

    /// `q_{σt}`, with the variables already mapped to their q-values.
    /// A function whose result type has only size-zero values is read as 0.
    pub fn eval_numeric(
        &self,
        sys: &EquationSystem,
        t: &Term,
        sigma: &BTreeMap<VarId, N>,
    ) -> Result<N, EvalFormalError> {
        let args = |xs: &[Term]| xs.iter().map(|a| self.eval_numeric(sys, a, sigma)).collect::<Result<Vec<N>, _>>();
        Ok(match t {
            Term::Var(v) => sigma.get(v).cloned().ok_or_else(|| EvalFormalError::Unbound(v.clone()))?,
            Term::Zero | Term::Signal(_) => N::zero(),
            Term::Con(c, xs) => self.constructor(sys, c).eval(&args(xs)?)?,
            Term::Fun(f, xs) => {
                if sys.function(f).is_some_and(|d| sys.is_size_zero_type(&d.result)) {
                    return Ok(N::zero());
                }
                let q = self.get(f).ok_or_else(|| EvalFormalError::Missing(f.clone()))?;
                q.eval(&args(xs)?)?
            }
            Term::Hat(id, xs) => {
                let q = self.hat(id).ok_or_else(|| EvalFormalError::Missing(hat_key(id)))?;
                q.eval(&args(xs)?)?
            }
        })
    }

    /// `q_{σt}` for a ground substitution.
    pub fn eval_formal(
        &self,
        sys: &EquationSystem,
        t: &Term,
        sigma: &GroundSubstitution,
    ) -> Result<N, EvalFormalError> {
        let mut qs = BTreeMap::new();
        for v in t.var_set() {
            let val = sigma.get(&v).ok_or_else(|| EvalFormalError::Unbound(v.clone()))?;
            qs.insert(v, self.value(sys, val)?);
        }
        self.eval_numeric(sys, t, &qs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Condition {
    /// Every symbol of the system is interpreted, with the right arity.
    Coverage,
    /// Constructors are `d + Σ x_i` with `d ≥ 1`; constants are 0.
    Constructor,
    /// Every argument counts in some arm.
    Subterm,
    /// `f(v̄) ⇓ w` implies `q_f(q_v̄) ≥ q_w`.
    Function,
}

impl std::fmt::Display for Condition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Condition::Coverage => "coverage",
            Condition::Constructor => "condition (1)",
            Condition::Subterm => "condition (2)",
            Condition::Function => "condition (3)",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    pub symbol: String,
    pub message: String,
    pub witness: Option<String>,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} violated by `{}`: {}", self.condition, self.symbol, self.message)?;
        if let Some(w) = &self.witness {
            write!(f, " (witness {w})")?;
        }
        Ok(())
    }
}

/// How many argument tuples and how much evaluation condition (3) may use
/// per function.
#[derive(Clone, Copy, Debug)]
pub struct ValidateOptions {
    pub bound: u64,
    pub cap: usize,
    pub fuel: u64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions { bound: 4, cap: 100_000, fuel: 100_000 }
    }
}

pub fn validate_assignment<N: Natural>(
    q: &Assignment<N>,
    sys: &EquationSystem,
    hatted_arity: impl Fn(&ThreadId) -> usize,
    opts: ValidateOptions,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut v = |condition, symbol: &str, message: String, witness| {
        out.push(Violation { condition, symbol: symbol.to_string(), message, witness })
    };

    let mut expected: BTreeMap<String, (usize, bool)> = BTreeMap::new();
    for eq in &sys.equations {
        expected.insert(hat_key(&eq.name), (hatted_arity(&eq.name), true));
    }
    for f in &sys.functions {
        expected.insert(f.name.clone(), (f.params.len(), true));
    }
    for t in &sys.types {
        for c in &t.ctors {
            expected.insert(c.name.clone(), (c.args.len(), false));
        }
    }
    for (c, n) in [(NIL, 0), (CONS, 2), (UNIT_CTOR, 0)] {
        expected.insert(c.to_string(), (n, false));
    }

    for (sym, (arity, required)) in &expected {
        match q.get(sym) {
            None if *required => v(Condition::Coverage, sym, "no interpretation".into(), None),
            None => {}
            Some(f) if f.arity() != *arity => v(
                Condition::Coverage,
                sym,
                format!("expects {arity} arguments, interpretation has {}", f.arity()),
                None,
            ),
            Some(f) => {
                if sys.constructor(sym).is_some() {
                    if *arity == 0 {
                        if f.arms.iter().any(|a| !a[0].is_zero()) {
                            v(Condition::Constructor, sym, format!("constants are interpreted by 0, not {f}"), None);
                        }
                    } else if f.arms.len() != 1 || f.arms[0][0].is_zero() || f.arms[0][1..].iter().any(|c| !c.is_one())
                    {
                        v(Condition::Constructor, sym, format!("expected d + x1 + ... + x{arity} with d >= 1, got {f}"), None);
                    }
                } else if let Some(i) = f.has_subterm_property() {
                    v(Condition::Subterm, sym, format!("argument {} has coefficient 0 in every arm", i + 1), None);
                }
            }
        }
    }
    for sym in q.entries.keys() {
        if !expected.contains_key(sym) {
            v(Condition::Coverage, sym, "not a symbol of the program".into(), None);
        }
    }

    // Condition (3), by evaluating on every small input.
    for f in &sys.functions {
        let Some(qf) = q.get(&f.name) else { continue };
        if qf.arity() != f.params.len() {
            continue;
        }
        let mut en = ValueEnumerator::new(sys, opts.cap);
        let domains: Vec<Vec<Value>> = f.params.iter().map(|t| en.up_to(t, opts.bound)).collect();
        for args in product(&domains, opts.cap) {
            let mut fuel = Fuel::new(opts.fuel);
            let Ok(w) = apply(sys, &f.name, &args, &mut fuel) else { continue };
            let qs: Vec<N> = match args.iter().map(|a| q.value(sys, a)).collect::<Result<_, _>>() {
                Ok(qs) => qs,
                Err(_) => continue,
            };
            let (Ok(lhs), Ok(rhs)) = (qf.eval(&qs), q.value(sys, &w)) else { continue };
            if lhs < rhs {
                let shown: Vec<String> = args.iter().map(|a| a.to_string()).collect();
                v(
                    Condition::Function,
                    &f.name,
                    format!("q_{} gives {lhs} but the result {w} has q-value {rhs}", f.name),
                    Some(format!("{}({})", f.name, shown.join(", "))),
                );
                break;
            }
        }
    }
    out
}
