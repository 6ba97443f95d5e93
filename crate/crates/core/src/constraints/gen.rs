//! The functions C_0, C_1, C_2, computed together in one walk of each body.

use super::scope::Scope;
use super::term::Term;
use super::{aux_terms, dedup_and_sort, mask_params, mask_regions, Constraint, Relation};
use crate::analysis::Analysis;
use crate::syntax::*;

struct Gen<'a> {
    sys: &'a EquationSystem,
    an: &'a Analysis,
    owner: &'a Equation,
    out: Vec<Constraint>,
}

pub fn gen_constraints(sys: &EquationSystem, an: &Analysis) -> Vec<Constraint> {
    let mut out = Vec::new();
    for eq in &sys.equations {
        let (scope, args) = Scope::for_equation(eq, an);
        let mut g = Gen { sys, an, owner: eq, out: Vec::new() };
        g.walk(&eq.body, &args, &scope);
        out.extend(g.out);
    }
    dedup_and_sort(out)
}

impl Gen<'_> {
    fn me(&self) -> &ThreadId {
        &self.owner.name
    }

    fn hat(&self, id: &ThreadId, args: Vec<Term>) -> Term {
        Term::Hat(id.clone(), args)
    }

    fn push(&mut self, index: u8, lhs: Term, rel: Relation, rhs: Term, scope: &Scope) {
        self.out.push(Constraint::new(index, lhs, rel, rhs, &scope.vars));
    }

    fn walk(&mut self, p: &Process, lhs: &[Term], scope: &Scope) {
        match p {
            Process::Nil => {}
            Process::Emit(s, e) => {
                let Some(rho) = scope.signal_region(s) else { return };
                let l = self.hat(self.me(), mask_regions(self.sys, self.an, self.me(), lhs, &rho));
                self.push(2, l, Relation::Geq, scope.term(e), scope);
            }
            Process::Call(b, es) => {
                let mut args: Vec<Term> = es.iter().map(|e| scope.term(e)).collect();
                args.extend(aux_terms(self.an, b));
                if !self.an.f_order.greater(self.me(), b) {
                    let st = self.owner.annotation.status;
                    self.push(0, self.hat(self.me(), lhs.to_vec()), Relation::Gt(st), self.hat(b, args.clone()), scope);
                }
                self.cycle_call(lhs, b, &args, scope);
            }
            Process::Present(pr) => {
                let mut inner = scope.clone();
                if let Some(l) = pr.label {
                    inner.bind_read(&pr.bound, l, self.an);
                }
                self.walk(&pr.body, lhs, &inner);
                let mut args: Vec<Term> = pr.cont.args.iter().map(|e| scope.term(e)).collect();
                args.extend(aux_terms(self.an, &pr.cont.target));
                self.cycle_call(lhs, &pr.cont.target, &args, scope);
            }
            Process::NameMatch { then, otherwise, .. } => {
                self.walk(then, lhs, scope);
                self.walk(otherwise, lhs, scope);
            }
            Process::Match { scrutinee, pattern, then, otherwise } => {
                let mut inner = scope.clone();
                let ty = scope.expr_type(self.sys, scrutinee);
                let pat = match &ty {
                    Some(t) => inner.bind_pattern(self.sys, pattern, t),
                    None => Term::from_pattern(pattern),
                };
                let refined: Vec<Term> = match scope.term(scrutinee) {
                    Term::Var(x) => {
                        let s = [(x, pat)].into_iter().collect();
                        lhs.iter().map(|t| t.subst(&s)).collect()
                    }
                    _ => lhs.to_vec(),
                };
                self.walk(then, &refined, &inner);
                self.walk(otherwise, lhs, scope);
            }
            Process::New { name, ty, body } => {
                let mut inner = scope.clone();
                inner.bind_restricted(name, ty);
                self.walk(body, lhs, &inner);
            }
            Process::Par(l, r) => {
                self.walk(l, lhs, scope);
                self.walk(r, lhs, scope);
            }
        }
    }

    /// The index-1 constraint of any call, and the index-2 constraints of a
    /// call to an identifier that does not start a new cycle.
    fn cycle_call(&mut self, lhs: &[Term], b: &ThreadId, args: &[Term], scope: &Scope) {
        let me = self.me().clone();
        let l1 = self.hat(&me, mask_params(self.sys, self.an, &me, lhs));
        let r1 = self.hat(b, mask_params(self.sys, self.an, b, args));
        self.push(1, l1, Relation::Geq, r1, scope);
        if self.sys.is_reset(b) {
            return;
        }
        for rho in self.an.w.get(b).cloned().unwrap_or_default() {
            let l2 = self.hat(&me, mask_regions(self.sys, self.an, &me, lhs, &rho));
            let r2 = self.hat(b, mask_regions(self.sys, self.an, b, args, &rho));
            self.push(2, l2, Relation::Geq, r2, scope);
        }
    }
}
