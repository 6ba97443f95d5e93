//! Abstract syntax, concrete format, sizes and typing.

pub mod ast;
pub mod error;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod size;
pub mod subst;
pub mod trivial;
pub mod typecheck;

pub use ast::*;
pub use error::SyntaxError;
pub use parser::{parse_program, parse_value};
pub use pretty::{pretty_equation, pretty_program};
pub use size::{size_of_config, size_of_input, size_of_value, SizeError};
pub use trivial::remove_trivial_matches;
pub use typecheck::{bind_pattern, check_process, infer_expr, typecheck, LabelType, TypeEnv, TypeError, TypeReport};
