//! Symbolic walking of an equation body: how body names read as terms, and
//! the types of the variables introduced along the way.

use std::collections::BTreeMap;

use super::term::{Term, VarId};
use crate::analysis::Analysis;
use crate::syntax::typecheck::bind_pattern;
use crate::syntax::*;

#[derive(Clone, Debug)]
pub struct Scope {
    /// What each name of the body stands for, and its type.
    names: BTreeMap<Name, (Term, TypeExpr)>,
    /// Types of every variable introduced so far.
    pub vars: BTreeMap<VarId, TypeExpr>,
    /// Maps a restricted name to the constant replacing it.
    restricted: fn(&Name, &TypeExpr) -> Name,
}

fn keep_name(n: &Name, _: &TypeExpr) -> Name {
    n.clone()
}

impl Scope {
    /// The scope at the start of `A(x̄) = P`, with the arguments
    /// x̄, y_A of the hatted identifier.
    pub fn for_equation(eq: &Equation, an: &Analysis) -> (Scope, Vec<Term>) {
        let mut scope = Scope { names: BTreeMap::new(), vars: BTreeMap::new(), restricted: keep_name };
        let mut args = Vec::new();
        for p in &eq.params {
            let v = VarId::Named(p.name.clone());
            scope.names.insert(p.name.clone(), (Term::Var(v.clone()), p.ty.clone()));
            scope.vars.insert(v.clone(), p.ty.clone());
            args.push(Term::Var(v));
        }
        for l in an.aux.get(&eq.name).into_iter().flatten() {
            scope.declare_label(*l, an);
            args.push(Term::label(*l));
        }
        (scope, args)
    }

    /// Restricted names are replaced through `f` rather than kept.
    pub fn with_restricted(mut self, f: fn(&Name, &TypeExpr) -> Name) -> Self {
        self.restricted = f;
        self
    }

    pub fn declare_label(&mut self, l: Label, an: &Analysis) {
        if let Some(t) = an.types.label_types.get(&l) {
            self.vars.insert(VarId::Label(l), t.ty.clone());
        }
    }

    pub fn ty(&self, n: &Name) -> Option<&TypeExpr> {
        self.names.get(n).map(|(_, t)| t)
    }

    pub fn signal_region(&self, n: &Name) -> Option<RegionId> {
        self.ty(n).and_then(|t| t.as_sig()).map(|(r, _)| r.clone())
    }

    pub fn lookup(&self, n: &Name) -> Term {
        match self.names.get(n) {
            Some((t, _)) => t.clone(),
            None => Term::Signal(n.clone()),
        }
    }

    /// An expression as a term; `!^y s` reads as the variable y.
    pub fn term(&self, e: &Expr) -> Term {
        match e {
            Expr::Var(n) => self.lookup(n),
            Expr::Deref(_, l) => Term::label(*l),
            Expr::Con(c, args) => Term::Con(c.clone(), args.iter().map(|a| self.term(a)).collect()),
            Expr::App(f, args) => Term::Fun(f.clone(), args.iter().map(|a| self.term(a)).collect()),
        }
    }

    pub fn bind_restricted(&mut self, n: &Name, ty: &TypeExpr) {
        let c = (self.restricted)(n, ty);
        self.names.insert(n.clone(), (Term::Signal(c), ty.clone()));
    }

    /// `[y/x]`: the bound variable of a present statement is its label.
    pub fn bind_read(&mut self, x: &Name, l: Label, an: &Analysis) {
        let ty = an.types.label_types.get(&l).map(|t| t.ty.clone()).unwrap_or(TypeExpr::Unit);
        self.vars.insert(VarId::Label(l), ty.clone());
        self.names.insert(x.clone(), (Term::label(l), ty));
    }

    /// Brings the variables of a pattern into scope, renaming those that
    /// would clash with a variable already in use. Returns the pattern as a
    /// term.
    pub fn bind_pattern(&mut self, sys: &EquationSystem, p: &Pattern, ty: &TypeExpr) -> Term {
        let mut renaming = BTreeMap::new();
        for v in p.var_set() {
            if self.vars.contains_key(&VarId::Named(v.clone())) {
                let mut k = v.stamp.unwrap_or(0) + 1;
                while self.vars.contains_key(&VarId::Named(Name::stamped(v.text.clone(), k))) {
                    k += 1;
                }
                renaming.insert(v.clone(), Name::stamped(v.text.clone(), k));
            }
        }
        let renamed = p.rename(&renaming);
        let mut types = TypeEnv::new();
        bind_pattern(sys, &renamed, ty, &mut types);
        for v in p.var_set() {
            let fresh = renaming.get(&v).cloned().unwrap_or_else(|| v.clone());
            let t = types.get(&fresh).cloned().unwrap_or(TypeExpr::Unit);
            self.vars.insert(VarId::Named(fresh.clone()), t.clone());
            self.names.insert(v, (Term::named(fresh), t));
        }
        Term::from_pattern(&renamed)
    }

    /// The type of an expression in this scope, for a match scrutinee.
    pub fn expr_type(&self, sys: &EquationSystem, e: &Expr) -> Option<TypeExpr> {
        let env: TypeEnv = self.names.iter().map(|(n, (_, t))| (n.clone(), t.clone())).collect();
        infer_expr(sys, &env, e)
    }
}
