//! Size measures on values, initial configurations and inputs.

use thiserror::Error;

use super::ast::*;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SizeError {
    #[error("the program has no initial configuration")]
    NoInit,
    #[error("argument `{0}` of the initial configuration is not a value")]
    NotAValue(String),
}

pub fn size_of_value(v: &Value) -> u64 {
    v.size()
}

/// Number of threads plus the sizes of their arguments.
pub fn size_of_config(sys: &EquationSystem) -> Result<u64, SizeError> {
    let init = sys.init.as_ref().ok_or(SizeError::NoInit)?;
    let mut total = init.threads.len() as u64;
    for (_, args) in &init.threads {
        for a in args {
            total += a.to_value().ok_or_else(|| SizeError::NotAValue(a.to_string()))?.size();
        }
    }
    Ok(total)
}

/// Size of the list of emitted values: `n + Σ |v_i|`.
pub fn size_of_input<'a>(values: impl IntoIterator<Item = &'a Value>) -> u64 {
    values.into_iter().map(|v| 1 + v.size()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: &str) -> Value {
        Value::Sig(Name::new(n))
    }

    #[test]
    fn value_sizes() {
        assert_eq!(size_of_value(&s("s")), 0);
        assert_eq!(size_of_value(&Value::list([s("s1"), s("s2")])), 2);
        assert_eq!(size_of_value(&Value::list([Value::list([s("s")])])), 2);
        assert_eq!(size_of_value(&Value::constant("q0")), 0);
    }

    #[test]
    fn input_sizes() {
        assert_eq!(size_of_input(&[s("a"), s("b")]), 2);
        assert_eq!(size_of_input(&[]), 0);
    }
}
