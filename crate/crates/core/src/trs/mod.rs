//! The program as a term-rewriting system: abstraction, rule generation,
//! the inequalities of each rule, and ground rewriting.

mod abstraction;
mod ground;
mod rules;

pub use abstraction::{abstract_program, AbsEquation, AbsProcess, AbstractProgram};
pub use ground::{
    canonicalize, eval_term, feed, ground_rewrite, match_args, successors, AbstractState, EnumeratedSource, Policy,
    ReplaySource, RewriteError, ValueSource,
};
pub use rules::{gen_rewrite_rules, rules_to_inequalities, Rhs, RewriteRule, Shape};

use crate::analysis::Analysis;
use crate::syntax::*;

/// Abstraction and rule generation in one step.
pub fn rewrite_rules(sys: &EquationSystem, an: &Analysis) -> Vec<RewriteRule> {
    gen_rewrite_rules(sys, an, &abstract_program(sys, an))
}

/// Types of the auxiliary arguments of each identifier, in order.
pub fn aux_types(an: &Analysis, id: &ThreadId) -> Vec<TypeExpr> {
    an.aux
        .get(id)
        .into_iter()
        .flatten()
        .map(|l| an.types.label_types.get(l).map(|t| t.ty.clone()).unwrap_or(TypeExpr::Unit))
        .collect()
}
