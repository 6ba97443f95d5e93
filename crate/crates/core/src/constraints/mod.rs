//! Inequalities over hatted identifiers: for every equation `A(x̄) = P`,
//! the symbolic execution of P from Â(x̄, y_A) yields constraints of
//! index 0 (termination within an instant), 1 (sizes at the start of a
//! cycle) and 2 (sizes within a cycle).

pub mod gen;
pub mod scope;
pub mod term;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

pub use gen::gen_constraints;
pub use scope::Scope;
pub use term::{Canonicalizer, Term, VarId};

use crate::analysis::Analysis;
use crate::syntax::*;

pub const CONSTRAINTS_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Relation {
    /// `>_0`, compared with the status of the identifiers.
    Gt(Status),
    Geq,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Constraint {
    pub index: u8,
    pub lhs: Term,
    pub rel: Relation,
    pub rhs: Term,
    /// The variables of both sides with their types.
    pub vars: BTreeMap<VarId, TypeExpr>,
}

impl Constraint {
    pub fn new(index: u8, lhs: Term, rel: Relation, rhs: Term, types: &BTreeMap<VarId, TypeExpr>) -> Self {
        let mut used = lhs.var_set();
        rhs.vars(&mut used);
        let vars = used
            .into_iter()
            .map(|v| {
                let t = types.get(&v).cloned().unwrap_or(TypeExpr::Unit);
                (v, t)
            })
            .collect();
        Constraint { index, lhs, rel, rhs, vars }
    }

    pub fn rel_symbol(&self) -> String {
        match self.rel {
            Relation::Gt(_) => format!(">{}", self.index),
            Relation::Geq => format!(">={}", self.index),
        }
    }

    /// The identifier on the left, which every constraint has.
    pub fn owner(&self) -> Option<&ThreadId> {
        self.lhs.hat_args().map(|(id, _)| id)
    }

    /// A key equal for constraints that are equal up to renaming.
    pub fn canonical(&self) -> String {
        let mut c = Canonicalizer::default();
        let l = c.term(&self.lhs);
        let r = c.term(&self.rhs);
        let rel = match self.rel {
            Relation::Gt(st) => format!(">{}[{st}]", self.index),
            Relation::Geq => format!(">={}", self.index),
        };
        format!("{l} {rel} {r}")
    }

    pub fn to_json(&self) -> serde_json::Value {
        let vars: Vec<serde_json::Value> = self
            .vars
            .iter()
            .map(|(v, t)| serde_json::json!({"name": v.to_string(), "type": t.to_string()}))
            .collect();
        let mut obj = serde_json::json!({
            "index": self.index,
            "lhs": self.lhs.to_string(),
            "rel": self.rel_symbol(),
            "rhs": self.rhs.to_string(),
            "vars": vars,
        });
        if let Relation::Gt(st) = self.rel {
            obj["status"] = serde_json::json!(st.to_string());
        }
        obj
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.rel_symbol(), self.rhs)
    }
}

impl Serialize for Constraint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// Removes syntactic duplicates and sorts by index, left identifier and
/// printed form.
pub fn dedup_and_sort(mut cs: Vec<Constraint>) -> Vec<Constraint> {
    let mut seen = BTreeSet::new();
    cs.retain(|c| seen.insert((c.index, c.to_string(), c.rel)));
    cs.sort_by(|a, b| {
        (a.index, a.owner().map(|t| t.to_string()), a.to_string()).cmp(&(
            b.index,
            b.owner().map(|t| t.to_string()),
            b.to_string(),
        ))
    });
    cs
}

/// The constraints as a set of keys up to renaming.
pub fn canonical_set(cs: &[Constraint]) -> BTreeSet<String> {
    cs.iter().map(|c| format!("{}: {}", c.index, c.canonical())).collect()
}

/// `h(ē)_I`: the arguments of Â outside the mask I_A set to 0. Auxiliary
/// positions are never in I_A.
pub fn mask_params(sys: &EquationSystem, an: &Analysis, id: &ThreadId, args: &[Term]) -> Vec<Term> {
    let keep = an.mask(sys, id);
    let n = sys.equation(id).map_or(0, |e| e.arity());
    args.iter()
        .enumerate()
        .map(|(i, a)| if i < n && keep.contains(&(i + 1)) { a.clone() } else { Term::Zero })
        .collect()
}

/// `Â(ē)_{↓ρ}`: auxiliary arguments whose label reads a region outside
/// ↓ρ set to 0. Proper arguments are kept.
pub fn mask_regions(sys: &EquationSystem, an: &Analysis, id: &ThreadId, args: &[Term], rho: &RegionId) -> Vec<Term> {
    let below = an.regions.below(rho);
    let n = sys.equation(id).map_or(0, |e| e.arity());
    let aux = an.aux.get(id).cloned().unwrap_or_default();
    args.iter()
        .enumerate()
        .map(|(i, a)| {
            if i < n {
                return a.clone();
            }
            match aux.get(i - n).and_then(|l| an.gamma(*l)) {
                Some(r) if below.contains(r) => a.clone(),
                _ => Term::Zero,
            }
        })
        .collect()
}

/// The auxiliary variables y_B as terms.
pub fn aux_terms(an: &Analysis, id: &ThreadId) -> Vec<Term> {
    an.aux.get(id).into_iter().flatten().map(|l| Term::label(*l)).collect()
}
