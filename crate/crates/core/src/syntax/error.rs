use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("line {line}: duplicate {what} `{name}`")]
    Duplicate { line: usize, what: &'static str, name: String },
    #[error("line {line}: undeclared region `{region}`")]
    UndeclaredRegion { line: usize, region: String },
    #[error("line {line}: `{name}` expects {expected} argument(s), found {found}")]
    Arity { line: usize, name: String, expected: usize, found: usize },
}

impl SyntaxError {
    pub fn at(line: usize, col: usize, msg: impl Into<String>) -> Self {
        SyntaxError::Parse { line, col, msg: msg.into() }
    }

    pub fn position(&self) -> Option<(usize, usize)> {
        match self {
            SyntaxError::Parse { line, col, .. } => Some((*line, *col)),
            _ => None,
        }
    }

    pub fn line(&self) -> usize {
        match self {
            SyntaxError::Parse { line, .. }
            | SyntaxError::Duplicate { line, .. }
            | SyntaxError::UndeclaredRegion { line, .. }
            | SyntaxError::Arity { line, .. } => *line,
        }
    }
}
