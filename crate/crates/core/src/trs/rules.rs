//! Rewriting rules of the abstracted program and the inequalities each
//! rule shape stands for.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::abstraction::{AbsProcess, AbstractProgram};
use crate::analysis::Analysis;
use crate::constraints::{aux_terms, dedup_and_sort, mask_params, mask_regions, Constraint, Relation, Term, VarId};
use crate::syntax::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Shape {
    /// `Â(p) → emit(s, e)`
    R1,
    /// `Â(p) → B̂(e, y_B)`, B not reset.
    R2,
    /// `Â(p) → λy_B. B̂(e, y_B)`, B reset.
    R3,
    /// `Â(p) ↦ B̂(r, y_B)`, B not reset.
    R4,
    /// `Â(p) ↦ λy_B. B̂(r, y_B)`, B reset.
    R5,
}

impl Shape {
    /// Whether the right side runs in the following instant.
    pub fn next_instant(self) -> bool {
        matches!(self, Shape::R4 | Shape::R5)
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rhs {
    Emit { signal: Term, value: Term },
    Call(Term),
    /// The bound variables are fresh; the call is a hatted term.
    Lambda(Vec<VarId>, Term),
}

impl Rhs {
    pub fn call(&self) -> Option<(&ThreadId, &[Term])> {
        match self {
            Rhs::Call(t) | Rhs::Lambda(_, t) => t.hat_args(),
            Rhs::Emit { .. } => None,
        }
    }
}

impl fmt::Display for Rhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rhs::Emit { signal, value } => write!(f, "emit({signal}, {value})"),
            Rhs::Call(t) => write!(f, "{t}"),
            Rhs::Lambda(ys, t) => {
                let ys: Vec<String> = ys.iter().map(|y| y.to_string()).collect();
                write!(f, "\\({}). {t}", ys.join(", "))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteRule {
    pub shape: Shape,
    /// A hatted identifier applied to patterns.
    pub lhs: Term,
    pub rhs: Rhs,
    /// Region of the emitted signal, for R1.
    pub region: Option<RegionId>,
    pub vars: BTreeMap<VarId, TypeExpr>,
}

impl RewriteRule {
    pub fn owner(&self) -> &ThreadId {
        self.lhs.hat_args().expect("rule lhs is hatted").0
    }

    pub fn arrow(&self) -> &'static str {
        if self.shape.next_instant() {
            "|->"
        } else {
            "->"
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "shape": self.shape.to_string(),
            "lhs": self.lhs.to_string(),
            "arrow": self.arrow(),
            "rhs": self.rhs.to_string(),
        })
    }
}

impl fmt::Display for RewriteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.arrow(), self.rhs)
    }
}

/// `λ`-bound variables standing for the auxiliary variables of a reset
/// target, primed to keep them apart from those of the left side.
fn fresh_aux(an: &Analysis, b: &ThreadId, vars: &mut BTreeMap<VarId, TypeExpr>) -> Vec<VarId> {
    an.aux
        .get(b)
        .into_iter()
        .flatten()
        .map(|l| {
            let plain = VarId::Named(Name::new(format!("{l}'")));
            let mut k = 1;
            let v = if !vars.contains_key(&plain) {
                plain
            } else {
                loop {
                    let v = VarId::Named(Name::stamped(format!("{l}'"), k));
                    if !vars.contains_key(&v) {
                        break v;
                    }
                    k += 1;
                }
            };
            if let Some(t) = an.types.label_types.get(l) {
                vars.insert(v.clone(), t.ty.clone());
            }
            v
        })
        .collect()
}

struct RuleGen<'a> {
    sys: &'a EquationSystem,
    an: &'a Analysis,
    vars: BTreeMap<VarId, TypeExpr>,
    out: Vec<RewriteRule>,
}

impl RuleGen<'_> {
    fn push(&mut self, shape: Shape, lhs: Term, rhs: Rhs, region: Option<RegionId>) {
        let mut used = lhs.var_set();
        match &rhs {
            Rhs::Emit { signal, value } => {
                used.extend(signal.var_set());
                used.extend(value.var_set());
            }
            Rhs::Call(t) | Rhs::Lambda(_, t) => used.extend(t.var_set()),
        }
        let vars = self.vars.iter().filter(|(v, _)| used.contains(v)).map(|(v, t)| (v.clone(), t.clone())).collect();
        self.out.push(RewriteRule { shape, lhs, rhs, region, vars });
    }

    fn continuation(&mut self, lhs: &Term, b: &ThreadId, es: &[Term], later: bool) {
        let mut args = es.to_vec();
        if self.sys.is_reset(b) {
            let ys = fresh_aux(self.an, b, &mut self.vars);
            args.extend(ys.iter().cloned().map(Term::Var));
            let shape = if later { Shape::R5 } else { Shape::R3 };
            self.push(shape, lhs.clone(), Rhs::Lambda(ys, Term::Hat(b.clone(), args)), None);
        } else {
            args.extend(aux_terms(self.an, b));
            let shape = if later { Shape::R4 } else { Shape::R2 };
            self.push(shape, lhs.clone(), Rhs::Call(Term::Hat(b.clone(), args)), None);
        }
    }

    fn walk(&mut self, p: &AbsProcess, lhs: &Term) {
        match p {
            AbsProcess::Nil => {}
            AbsProcess::Emit { signal, region, value } => {
                let rhs = Rhs::Emit { signal: signal.clone(), value: value.clone() };
                self.push(Shape::R1, lhs.clone(), rhs, region.clone());
            }
            AbsProcess::Call(b, es) => self.continuation(lhs, b, es, false),
            AbsProcess::Input { body, target, args, .. } => {
                self.walk(body, lhs);
                self.continuation(lhs, target, args, true);
            }
            AbsProcess::Choice(l, r) | AbsProcess::Par(l, r) => {
                self.walk(l, lhs);
                self.walk(r, lhs);
            }
            AbsProcess::Match { scrutinee, pattern, then, otherwise } => {
                let refined = match scrutinee {
                    Term::Var(x) => lhs.subst(&[(x.clone(), pattern.clone())].into_iter().collect()),
                    _ => lhs.clone(),
                };
                self.walk(then, &refined);
                self.walk(otherwise, lhs);
            }
        }
    }
}

/// The rules `R(P, Â(x̄, y_A))` of every equation, without duplicates.
pub fn gen_rewrite_rules(sys: &EquationSystem, an: &Analysis, prog: &AbstractProgram) -> Vec<RewriteRule> {
    let mut out: Vec<RewriteRule> = Vec::new();
    for eq in &prog.equations {
        let mut g = RuleGen { sys, an, vars: eq.vars.clone(), out: Vec::new() };
        g.walk(&eq.body, &Term::Hat(eq.id.clone(), eq.args.clone()));
        for r in g.out {
            if !out.iter().any(|o| o.shape == r.shape && o.lhs == r.lhs && o.rhs == r.rhs) {
                out.push(r);
            }
        }
    }
    out
}

/// The inequalities associated with each rule shape.
pub fn rules_to_inequalities(sys: &EquationSystem, an: &Analysis, rules: &[RewriteRule]) -> Vec<Constraint> {
    let mut out = Vec::new();
    for r in rules {
        let (a, p) = r.lhs.hat_args().expect("rule lhs is hatted");
        let hat = |id: &ThreadId, args: Vec<Term>| Term::Hat(id.clone(), args);
        match (&r.rhs, r.shape) {
            (Rhs::Emit { value, .. }, _) => {
                if let Some(rho) = &r.region {
                    let l = hat(a, mask_regions(sys, an, a, p, rho));
                    out.push(Constraint::new(2, l, Relation::Geq, value.clone(), &r.vars));
                }
            }
            (Rhs::Call(t), shape) => {
                let (b, e) = t.hat_args().expect("call rhs is hatted");
                if shape == Shape::R2 && an.f_order.equiv(a, b) {
                    let st = sys.equation(a).map(|e| e.annotation.status).unwrap_or_default();
                    out.push(Constraint::new(0, r.lhs.clone(), Relation::Gt(st), t.clone(), &r.vars));
                }
                let l1 = hat(a, mask_params(sys, an, a, p));
                let r1 = hat(b, mask_params(sys, an, b, e));
                out.push(Constraint::new(1, l1, Relation::Geq, r1, &r.vars));
                for rho in an.w.get(b).cloned().unwrap_or_default() {
                    let l2 = hat(a, mask_regions(sys, an, a, p, &rho));
                    let r2 = hat(b, mask_regions(sys, an, b, e, &rho));
                    out.push(Constraint::new(2, l2, Relation::Geq, r2, &r.vars));
                }
            }
            (Rhs::Lambda(_, t), _) => {
                let (b, e) = t.hat_args().expect("lambda body is hatted");
                let n = sys.equation(b).map_or(0, |eq| eq.arity());
                let zeroed: Vec<Term> =
                    e.iter().enumerate().map(|(i, x)| if i < n { x.clone() } else { Term::Zero }).collect();
                let l1 = hat(a, mask_params(sys, an, a, p));
                out.push(Constraint::new(1, l1, Relation::Geq, hat(b, zeroed), &r.vars));
            }
        }
    }
    dedup_and_sort(out)
}
