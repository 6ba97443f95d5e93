//! The program as seen by the rewriting system: signal names collapsed to
//! one constant per signal type, restrictions dropped, name comparisons
//! turned into internal choices and inputs replaced by their labels.

use std::collections::BTreeMap;
use std::fmt;

use crate::analysis::Analysis;
use crate::assignments::canonical_signal;
use crate::constraints::{Scope, Term, VarId};
use crate::syntax::*;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AbsProcess {
    Nil,
    Emit { signal: Term, region: Option<RegionId>, value: Term },
    Call(ThreadId, Vec<Term>),
    /// Either branch may run.
    Choice(Box<AbsProcess>, Box<AbsProcess>),
    /// The first branch runs when the scrutinee matches the pattern, whose
    /// variables are fresh in the equation.
    Match { scrutinee: Term, pattern: Term, then: Box<AbsProcess>, otherwise: Box<AbsProcess> },
    Par(Box<AbsProcess>, Box<AbsProcess>),
    /// An input: the body runs within the instant with the bound variable
    /// read as the label, or the thread resumes next instant in the target.
    Input { label: Option<Label>, body: Box<AbsProcess>, target: ThreadId, args: Vec<Term> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbsEquation {
    pub id: ThreadId,
    /// The arguments x̄, y_A of the hatted identifier.
    pub args: Vec<Term>,
    pub body: AbsProcess,
    /// Types of every variable of the equation, pattern variables included.
    pub vars: BTreeMap<VarId, TypeExpr>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AbstractProgram {
    pub equations: Vec<AbsEquation>,
}

fn canonical(_: &Name, ty: &TypeExpr) -> Name {
    canonical_signal(ty)
}

pub fn abstract_program(sys: &EquationSystem, an: &Analysis) -> AbstractProgram {
    let equations = sys
        .equations
        .iter()
        .map(|eq| {
            let (scope, args) = Scope::for_equation(eq, an);
            let mut scope = scope.with_restricted(canonical);
            let mut vars = scope.vars.clone();
            let body = walk(sys, an, &eq.body, &mut scope, &mut vars);
            AbsEquation { id: eq.name.clone(), args, body, vars }
        })
        .collect();
    AbstractProgram { equations }
}

fn walk(
    sys: &EquationSystem,
    an: &Analysis,
    p: &Process,
    scope: &mut Scope,
    vars: &mut BTreeMap<VarId, TypeExpr>,
) -> AbsProcess {
    let sub = |p: &Process, scope: &Scope, vars: &mut BTreeMap<VarId, TypeExpr>| {
        let mut inner = scope.clone();
        inner.vars.extend(vars.clone());
        let out = walk(sys, an, p, &mut inner, vars);
        vars.extend(inner.vars);
        out
    };
    match p {
        Process::Nil => AbsProcess::Nil,
        Process::Emit(s, e) => AbsProcess::Emit {
            signal: scope.lookup(s),
            region: scope.signal_region(s),
            value: scope.term(e),
        },
        Process::Call(b, es) => AbsProcess::Call(b.clone(), es.iter().map(|e| scope.term(e)).collect()),
        Process::Present(pr) => {
            let mut inner = scope.clone();
            if let Some(l) = pr.label {
                inner.bind_read(&pr.bound, l, an);
            }
            let body = sub(&pr.body, &inner, vars);
            AbsProcess::Input {
                label: pr.label,
                body: Box::new(body),
                target: pr.cont.target.clone(),
                args: pr.cont.args.iter().map(|e| scope.term(e)).collect(),
            }
        }
        Process::NameMatch { then, otherwise, .. } => {
            AbsProcess::Choice(Box::new(sub(then, scope, vars)), Box::new(sub(otherwise, scope, vars)))
        }
        Process::Match { scrutinee, pattern, then, otherwise } => {
            let mut inner = scope.clone();
            // Fresh with respect to every variable of the equation so far,
            // including those of sibling branches.
            inner.vars.extend(vars.clone());
            let pat = match scope.expr_type(sys, scrutinee) {
                Some(t) => inner.bind_pattern(sys, pattern, &t),
                None => Term::from_pattern(pattern),
            };
            vars.extend(inner.vars.clone());
            let then = sub(then, &inner, vars);
            let otherwise = sub(otherwise, scope, vars);
            AbsProcess::Match { scrutinee: scope.term(scrutinee), pattern: pat, then: Box::new(then), otherwise: Box::new(otherwise) }
        }
        Process::New { name, ty, body } => {
            let mut inner = scope.clone();
            inner.bind_restricted(name, ty);
            sub(body, &inner, vars)
        }
        Process::Par(l, r) => AbsProcess::Par(Box::new(sub(l, scope, vars)), Box::new(sub(r, scope, vars))),
    }
}

fn args(f: &mut fmt::Formatter<'_>, ts: &[Term]) -> fmt::Result {
    let shown: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
    write!(f, "({})", shown.join(", "))
}

impl fmt::Display for AbsProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbsProcess::Nil => f.write_str("0"),
            AbsProcess::Emit { signal, value, .. } => write!(f, "emit({signal}, {value})"),
            AbsProcess::Call(b, ts) => {
                write!(f, "{b}")?;
                args(f, ts)
            }
            AbsProcess::Choice(l, r) => write!(f, "({l} + {r})"),
            AbsProcess::Match { scrutinee, pattern, then, otherwise } => {
                write!(f, "match {scrutinee} with {pattern} then {then} else {otherwise}")
            }
            AbsProcess::Par(l, r) => write!(f, "({l} | {r})"),
            AbsProcess::Input { label, body, target, args: ts } => {
                match label {
                    Some(l) => write!(f, "input^{l}. {body} else {target}")?,
                    None => write!(f, "pause.{target}")?,
                }
                args(f, ts)
            }
        }
    }
}

impl fmt::Display for AbstractProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for eq in &self.equations {
            write!(f, "{}^", eq.id)?;
            args(f, &eq.args)?;
            writeln!(f, " = {}", eq.body)?;
        }
        Ok(())
    }
}
