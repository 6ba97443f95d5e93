//! Capture-avoiding substitution of expressions for names in processes.

use std::collections::{BTreeMap, BTreeSet};

use super::ast::*;

pub type Subst = BTreeMap<Name, Expr>;

fn max_stamp_expr(e: &Expr, text: &str, acc: &mut u32) {
    match e {
        Expr::Var(n) | Expr::Deref(n, _) => bump(n, text, acc),
        Expr::Con(_, args) | Expr::App(_, args) => args.iter().for_each(|a| max_stamp_expr(a, text, acc)),
    }
}

fn bump(n: &Name, text: &str, acc: &mut u32) {
    if n.text == text {
        *acc = (*acc).max(n.stamp.unwrap_or(0));
    }
}

fn max_stamp(p: &Process, text: &str, acc: &mut u32) {
    match p {
        Process::Nil => {}
        Process::Call(_, args) => args.iter().for_each(|a| max_stamp_expr(a, text, acc)),
        Process::Emit(s, e) => {
            bump(s, text, acc);
            max_stamp_expr(e, text, acc);
        }
        Process::Present(pr) => {
            bump(&pr.signal, text, acc);
            bump(&pr.bound, text, acc);
            max_stamp(&pr.body, text, acc);
            pr.cont.args.iter().for_each(|a| max_stamp_expr(a, text, acc));
        }
        Process::NameMatch { left, right, then, otherwise } => {
            bump(left, text, acc);
            bump(right, text, acc);
            max_stamp(then, text, acc);
            max_stamp(otherwise, text, acc);
        }
        Process::Match { scrutinee, pattern, then, otherwise } => {
            max_stamp_expr(scrutinee, text, acc);
            max_stamp_expr(&pattern.to_expr(), text, acc);
            max_stamp(then, text, acc);
            max_stamp(otherwise, text, acc);
        }
        Process::New { name, body, .. } => {
            bump(name, text, acc);
            max_stamp(body, text, acc);
        }
        Process::Par(l, r) => {
            max_stamp(l, text, acc);
            max_stamp(r, text, acc);
        }
    }
}

struct Ctx<'a> {
    range_fv: &'a BTreeSet<Name>,
}

impl Ctx<'_> {
    /// Prepares the substitution for the scope of `binder` inside `scope`:
    /// the binder shadows any mapping for itself and is renamed if it would
    /// capture a name of the substituted terms.
    fn enter(&self, binder: &Name, scope: &Process, s: &Subst) -> (Name, Subst) {
        let mut inner = s.clone();
        inner.remove(binder);
        if !self.range_fv.contains(binder) || inner.is_empty() {
            return (binder.clone(), inner);
        }
        let mut top = 0;
        max_stamp(scope, &binder.text, &mut top);
        for n in self.range_fv.iter().chain(s.keys()) {
            bump(n, &binder.text, &mut top);
        }
        let fresh = Name::stamped(binder.text.clone(), top + 1);
        inner.insert(binder.clone(), Expr::Var(fresh.clone()));
        (fresh, inner)
    }

    fn name(&self, n: &Name, s: &Subst) -> Name {
        match s.get(n) {
            Some(Expr::Var(m)) => m.clone(),
            _ => n.clone(),
        }
    }

    fn go(&self, p: &Process, s: &Subst) -> Process {
        if s.is_empty() {
            return p.clone();
        }
        match p {
            Process::Nil => Process::Nil,
            Process::Call(id, args) => Process::Call(id.clone(), args.iter().map(|a| a.subst(s)).collect()),
            Process::Emit(sig, e) => Process::Emit(self.name(sig, s), e.subst(s)),
            Process::Present(pr) => {
                let (bound, inner) = self.enter(&pr.bound, &pr.body, s);
                Process::Present(Box::new(Present {
                    signal: self.name(&pr.signal, s),
                    label: pr.label,
                    bound,
                    body: self.go(&pr.body, &inner),
                    cont: Continuation {
                        target: pr.cont.target.clone(),
                        args: pr.cont.args.iter().map(|a| a.subst(s)).collect(),
                    },
                    pause: pr.pause,
                }))
            }
            Process::NameMatch { left, right, then, otherwise } => Process::NameMatch {
                left: self.name(left, s),
                right: self.name(right, s),
                then: Box::new(self.go(then, s)),
                otherwise: Box::new(self.go(otherwise, s)),
            },
            Process::Match { scrutinee, pattern, then, otherwise } => {
                let mut inner = s.clone();
                let mut renaming = BTreeMap::new();
                for v in pattern.var_set() {
                    let (fresh, next) = self.enter(&v, then, &inner);
                    inner = next;
                    if fresh != v {
                        renaming.insert(v, fresh);
                    }
                }
                Process::Match {
                    scrutinee: scrutinee.subst(s),
                    pattern: pattern.rename(&renaming),
                    then: Box::new(self.go(then, &inner)),
                    otherwise: Box::new(self.go(otherwise, s)),
                }
            }
            Process::New { name, ty, body } => {
                let (fresh, inner) = self.enter(name, body, s);
                Process::New { name: fresh, ty: ty.clone(), body: Box::new(self.go(body, &inner)) }
            }
            Process::Par(l, r) => Process::par(self.go(l, s), self.go(r, s)),
        }
    }
}

impl Process {
    /// Simultaneous substitution of expressions for free names.
    pub fn subst(&self, s: &Subst) -> Process {
        let mut range_fv = BTreeSet::new();
        for e in s.values() {
            e.free_vars(&mut range_fv);
        }
        Ctx { range_fv: &range_fv }.go(self, s)
    }

    pub fn subst_values(&self, s: &BTreeMap<Name, Value>) -> Process {
        let s: Subst = s.iter().map(|(k, v)| (k.clone(), v.to_expr())).collect();
        self.subst(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Name {
        Name::new(s)
    }

    #[test]
    fn shadowed_names_are_left_alone() {
        let p = Process::New {
            name: n("x"),
            ty: TypeExpr::Unit,
            body: Box::new(Process::Emit(n("x"), Expr::var("y"))),
        };
        let s: Subst = [(n("x"), Expr::var("z"))].into_iter().collect();
        assert_eq!(p.subst(&s), p);
    }

    #[test]
    fn binders_are_renamed_to_avoid_capture() {
        // nu x. emit x y   with y := x   must not become   nu x. emit x x
        let p = Process::New {
            name: n("x"),
            ty: TypeExpr::Unit,
            body: Box::new(Process::Emit(n("x"), Expr::var("y"))),
        };
        let s: Subst = [(n("y"), Expr::var("x"))].into_iter().collect();
        match p.subst(&s) {
            Process::New { name, body, .. } => {
                assert_ne!(name, n("x"));
                assert_eq!(*body, Process::Emit(name.clone(), Expr::var("x")));
            }
            other => panic!("{other:?}"),
        }
    }
}
