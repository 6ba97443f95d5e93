//! Toolchain for the synchronous π-calculus: parsing and typing, an
//! instant-by-instant interpreter, the static analyses behind feasible
//! reactivity, constraint generation, quasi-interpretation checking, and the
//! abstraction into a term-rewriting system.

pub mod syntax;
pub mod runtime;
pub mod analysis;
pub mod constraints;
pub mod assignments;
pub mod trs;
pub mod corpus;
pub mod generate;
pub mod monitor;
pub mod invariants;

/// Assignments over machine integers; overflow is reported, not wrapped.
pub type Assignment = assignments::Assignment<u64>;
/// Assignments over arbitrary-precision naturals.
pub type BigAssignment = assignments::Assignment<num_bigint::BigUint>;
pub type CheckVerdict = assignments::CheckVerdict<u64>;
pub type QiReport = assignments::QiReport<u64>;
