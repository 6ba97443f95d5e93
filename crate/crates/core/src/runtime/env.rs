//! Inputs: emissions injected at the start of an instant.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{parse_value, size_of_input, EquationSystem, Name, Value};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum EnvError {
    #[error("value {value} emitted twice on `{signal}` in one input")]
    Duplicate { signal: Name, value: Value },
    #[error("malformed input schedule: {0}")]
    Format(String),
}

/// The emissions of one input, values distinct per signal.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Env {
    emissions: Vec<(Name, Value)>,
}

impl Env {
    pub fn new(emissions: Vec<(Name, Value)>) -> Result<Self, EnvError> {
        for (i, (s, v)) in emissions.iter().enumerate() {
            if emissions[..i].iter().any(|(t, w)| t == s && w == v) {
                return Err(EnvError::Duplicate { signal: s.clone(), value: v.clone() });
            }
        }
        Ok(Env { emissions })
    }

    pub fn empty() -> Self {
        Env::default()
    }

    pub fn emissions(&self) -> &[(Name, Value)] {
        &self.emissions
    }

    /// Size of the list of emitted values.
    pub fn size(&self) -> u64 {
        size_of_input(self.emissions.iter().map(|(_, v)| v))
    }
}

#[derive(Serialize, Deserialize)]
struct RawEmission {
    signal: String,
    value: String,
}

/// Inputs per instant; instants past the end of the list receive none.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EnvSchedule {
    pub instants: Vec<Env>,
}

impl EnvSchedule {
    pub fn empty() -> Self {
        EnvSchedule::default()
    }

    pub fn get(&self, instant: usize) -> Env {
        self.instants.get(instant).cloned().unwrap_or_default()
    }

    /// Reads `[[{"signal": "s", "value": "req(a, zero)"}, ...], ...]`, one
    /// inner list per instant. Names without a stamp denote stamp 0.
    pub fn from_json(sys: &EquationSystem, text: &str) -> Result<Self, EnvError> {
        let raw: Vec<Vec<RawEmission>> =
            serde_json::from_str(text).map_err(|e| EnvError::Format(e.to_string()))?;
        let mut instants = Vec::new();
        for list in raw {
            let mut emissions = Vec::new();
            for e in list {
                let signal = match parse_value(sys, &e.signal) {
                    Ok(Value::Sig(n)) => n,
                    _ => return Err(EnvError::Format(format!("`{}` is not a signal name", e.signal))),
                };
                let value = parse_value(sys, &e.value).map_err(|err| EnvError::Format(err.to_string()))?;
                emissions.push((signal, value));
            }
            instants.push(Env::new(emissions)?);
        }
        Ok(EnvSchedule { instants })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.instants
                .iter()
                .map(|env| {
                    serde_json::Value::Array(
                        env.emissions
                            .iter()
                            .map(|(s, v)| serde_json::json!({"signal": s.to_string(), "value": v.to_string()}))
                            .collect(),
                    )
                })
                .collect(),
        )
    }
}
