use std::collections::{BTreeMap, BTreeSet};

use serde_json::json;

use crate::syntax::{Name, Value};

use super::soup::Soup;

pub const TRACE_SCHEMA_VERSION: u32 = 1;

/// What happened during one instant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstantTrace {
    pub instant: u64,
    /// Reductions performed before suspension (or before the step cap).
    pub steps: u64,
    /// False when the step cap was reached before suspension.
    pub suspended: bool,
    /// The lists `V(s)` built at the end of the instant.
    pub signals: BTreeMap<Name, Vec<Value>>,
    pub free: BTreeSet<Name>,
    /// Restricted names that became free at the end of the instant.
    pub extruded: BTreeSet<Name>,
    /// Size of the program at the start of the instant, inputs excluded.
    pub config_size: u64,
    pub input_size: u64,
    pub max_value_size: u64,
    /// Rule applications spent evaluating user functions.
    pub function_steps: u64,
    pub suspended_soup: Soup,
}

impl InstantTrace {
    pub fn to_json(&self) -> serde_json::Value {
        let signals: serde_json::Map<String, serde_json::Value> = self
            .signals
            .iter()
            .map(|(s, vs)| (s.to_string(), json!(vs.iter().map(|v| v.to_string()).collect::<Vec<_>>())))
            .collect();
        json!({
            "schema_version": TRACE_SCHEMA_VERSION,
            "instant": self.instant,
            "steps": self.steps,
            "suspended": self.suspended,
            "signals": signals,
            "extruded": self.extruded.iter().map(|n| n.to_string()).collect::<Vec<_>>(),
            "configSize": self.config_size,
            "inputSize": self.input_size,
            "maxValueSize": self.max_value_size,
            "functionSteps": self.function_steps,
        })
    }
}
