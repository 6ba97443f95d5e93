//! Call-by-value evaluation of first-order expressions.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::syntax::{EquationSystem, Expr, Name, Pattern, Value};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("no rule of `{0}` matches ({1})")]
    NoRule(String, String),
    #[error("undeclared function `{0}`")]
    UnknownFunction(String),
    #[error("dereference `!{0}` outside an end-of-instant continuation")]
    Deref(Name),
    #[error("function evaluation exceeded {0} steps")]
    OutOfFuel(u64),
}

/// Counts rule applications; evaluation fails once `limit` is exceeded.
#[derive(Clone, Debug)]
pub struct Fuel {
    pub used: u64,
    pub limit: u64,
}

impl Fuel {
    pub fn new(limit: u64) -> Self {
        Fuel { used: 0, limit }
    }

    pub fn unlimited() -> Self {
        Fuel::new(u64::MAX)
    }
}

pub fn pattern_match(v: &Value, p: &Pattern) -> Option<BTreeMap<Name, Value>> {
    let mut out = BTreeMap::new();
    match_into(v, p, &mut out).then_some(out)
}

fn match_into(v: &Value, p: &Pattern, out: &mut BTreeMap<Name, Value>) -> bool {
    match (p, v) {
        (Pattern::Var(x), _) => {
            out.insert(x.clone(), v.clone());
            true
        }
        (Pattern::Con(c, ps), Value::Con(d, vs)) => {
            c == d && ps.len() == vs.len() && ps.iter().zip(vs).all(|(p, v)| match_into(v, p, out))
        }
        (Pattern::Con(..), Value::Sig(_)) => false,
    }
}

/// Evaluates an expression. Names bound by `env` (pattern variables of a
/// function rule) are replaced by their values; any other name is a signal
/// and evaluates to itself.
pub fn eval_expr(
    sys: &EquationSystem,
    e: &Expr,
    env: &BTreeMap<Name, Value>,
    fuel: &mut Fuel,
) -> Result<Value, EvalError> {
    match e {
        Expr::Var(n) => Ok(env.get(n).cloned().unwrap_or_else(|| Value::Sig(n.clone()))),
        Expr::Deref(n, _) => Err(EvalError::Deref(n.clone())),
        Expr::Con(c, args) => Ok(Value::Con(
            c.clone(),
            args.iter().map(|a| eval_expr(sys, a, env, fuel)).collect::<Result<_, _>>()?,
        )),
        Expr::App(f, args) => {
            let vals = args.iter().map(|a| eval_expr(sys, a, env, fuel)).collect::<Result<Vec<_>, _>>()?;
            apply(sys, f, &vals, fuel)
        }
    }
}

pub fn apply(sys: &EquationSystem, f: &str, args: &[Value], fuel: &mut Fuel) -> Result<Value, EvalError> {
    let decl = sys.function(f).ok_or_else(|| EvalError::UnknownFunction(f.to_string()))?;
    fuel.used += 1;
    if fuel.used > fuel.limit {
        return Err(EvalError::OutOfFuel(fuel.limit));
    }
    for rule in &decl.rules {
        let mut env = BTreeMap::new();
        if rule.patterns.iter().zip(args).all(|(p, v)| match_into(v, p, &mut env)) {
            return eval_expr(sys, &rule.body, &env, fuel);
        }
    }
    let shown: Vec<String> = args.iter().map(|v| v.to_string()).collect();
    Err(EvalError::NoRule(f.to_string(), shown.join(", ")))
}

/// Evaluates an expression whose free names are all signals.
pub fn eval_closed(sys: &EquationSystem, e: &Expr, fuel: &mut Fuel) -> Result<Value, EvalError> {
    eval_expr(sys, e, &BTreeMap::new(), fuel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    #[test]
    fn matching() {
        let a = Value::Sig(Name::new("a"));
        let p = Pattern::Con("cons".into(), vec![Pattern::Var(Name::new("x")), Pattern::Var(Name::new("l"))]);
        let s = pattern_match(&Value::list([a.clone()]), &p).unwrap();
        assert_eq!(s[&Name::new("x")], a);
        assert_eq!(s[&Name::new("l")], Value::nil());
        assert!(pattern_match(&Value::nil(), &p).is_none());
    }

    #[test]
    fn functions_evaluate_by_rules() {
        let sys = parse_program(
            "type state = q0 | q1;
             fun next(state, list(state)) -> state { (q, []) => q0; (q, cons(q1, l)) => q1; (q, cons(q0, l)) => next(q, l); }
             def A() = 0",
        )
        .unwrap();
        let q0 = Value::constant("q0");
        let q1 = Value::constant("q1");
        let mut fuel = Fuel::unlimited();
        assert_eq!(apply(&sys, "next", &[q0.clone(), Value::list([q0.clone(), q1.clone()])], &mut fuel).unwrap(), q1);
        assert_eq!(apply(&sys, "next", &[q1.clone(), Value::nil()], &mut fuel).unwrap(), q0);
        assert_eq!(fuel.used, 3);
        let mut tight = Fuel::new(1);
        assert!(matches!(
            apply(&sys, "next", &[q0.clone(), Value::list([q0.clone(), q0])], &mut tight),
            Err(EvalError::OutOfFuel(1))
        ));
    }
}
