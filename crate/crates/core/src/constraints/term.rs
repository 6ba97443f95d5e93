//! First-order terms over hatted identifiers, used by constraints and by
//! the rewriting abstraction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::syntax::*;

/// A variable of a constraint or rule: a parameter or pattern variable, or
/// the auxiliary variable standing for a read label.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum VarId {
    Named(Name),
    Label(Label),
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarId::Named(n) => write!(f, "{n}"),
            VarId::Label(l) => write!(f, "{l}"),
        }
    }
}

impl Serialize for VarId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Var(VarId),
    /// The constant standing for a masked parameter.
    Zero,
    /// A signal constant: a restricted name or a canonical signal.
    Signal(Name),
    Con(String, Vec<Term>),
    Fun(String, Vec<Term>),
    Hat(ThreadId, Vec<Term>),
}

impl Term {
    pub fn label(l: Label) -> Term {
        Term::Var(VarId::Label(l))
    }

    pub fn named(n: Name) -> Term {
        Term::Var(VarId::Named(n))
    }

    pub fn vars(&self, out: &mut BTreeSet<VarId>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Zero | Term::Signal(_) => {}
            Term::Con(_, args) | Term::Fun(_, args) | Term::Hat(_, args) => args.iter().for_each(|a| a.vars(out)),
        }
    }

    pub fn var_set(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.vars(&mut out);
        out
    }

    pub fn subst(&self, s: &BTreeMap<VarId, Term>) -> Term {
        match self {
            Term::Var(v) => s.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::Zero | Term::Signal(_) => self.clone(),
            Term::Con(c, args) => Term::Con(c.clone(), args.iter().map(|a| a.subst(s)).collect()),
            Term::Fun(f, args) => Term::Fun(f.clone(), args.iter().map(|a| a.subst(s)).collect()),
            Term::Hat(id, args) => Term::Hat(id.clone(), args.iter().map(|a| a.subst(s)).collect()),
        }
    }

    pub fn hat_args(&self) -> Option<(&ThreadId, &[Term])> {
        match self {
            Term::Hat(id, args) => Some((id, args)),
            _ => None,
        }
    }

    /// The term of a pattern, with its variables as named variables.
    pub fn from_pattern(p: &Pattern) -> Term {
        match p {
            Pattern::Var(n) => Term::named(n.clone()),
            Pattern::Con(c, args) => Term::Con(c.clone(), args.iter().map(Term::from_pattern).collect()),
        }
    }

    /// A ground term back as an expression, if it contains no hatted call
    /// and no masked constant. Variables become names.
    pub fn to_expr(&self) -> Option<Expr> {
        Some(match self {
            Term::Var(VarId::Named(n)) | Term::Signal(n) => Expr::Var(n.clone()),
            Term::Var(VarId::Label(_)) | Term::Zero | Term::Hat(..) => return None,
            Term::Con(c, args) => Expr::Con(c.clone(), args.iter().map(Term::to_expr).collect::<Option<_>>()?),
            Term::Fun(f, args) => Expr::App(f.clone(), args.iter().map(Term::to_expr).collect::<Option<_>>()?),
        })
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Term]) -> fmt::Result {
    f.write_str("(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str(")")
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Zero => f.write_str("0"),
            Term::Signal(n) => write!(f, "{n}"),
            Term::Con(c, args) if args.is_empty() => {
                if c == NIL {
                    f.write_str("[]")
                } else {
                    f.write_str(c)
                }
            }
            Term::Con(c, args) | Term::Fun(c, args) => {
                f.write_str(c)?;
                write_args(f, args)
            }
            Term::Hat(id, args) => {
                write!(f, "{id}^")?;
                write_args(f, args)
            }
        }
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Renames variables and signal constants by order of first occurrence,
/// for comparisons up to renaming.
#[derive(Default)]
pub struct Canonicalizer {
    vars: BTreeMap<VarId, usize>,
    signals: BTreeMap<Name, usize>,
}

impl Canonicalizer {
    pub fn term(&mut self, t: &Term) -> String {
        match t {
            Term::Var(v) => {
                let k = self.vars.len();
                format!("v{}", self.vars.entry(v.clone()).or_insert(k))
            }
            Term::Signal(n) => {
                let k = self.signals.len();
                format!("c{}", self.signals.entry(n.clone()).or_insert(k))
            }
            Term::Zero => "0".into(),
            Term::Con(c, args) => self.app(c, args),
            Term::Fun(fun, args) => self.app(&format!("{fun}!"), args),
            Term::Hat(id, args) => self.app(&format!("{id}^"), args),
        }
    }

    fn app(&mut self, head: &str, args: &[Term]) -> String {
        let inner: Vec<String> = args.iter().map(|a| self.term(a)).collect();
        format!("{head}({})", inner.join(","))
    }
}
