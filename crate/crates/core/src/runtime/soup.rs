//! Programs in normal form: hoisted restrictions and a flat list of threads.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use indexmap::IndexSet;

use crate::syntax::{Expr, Label, Name, Process, ThreadId, Value};

/// Values emitted on each signal during the current instant, in order of
/// first emission. Emitting a value twice has no further effect.
pub type EmissionStore = BTreeMap<Name, IndexSet<Value>>;

/// Bookkeeping attached to each thread: the cycle it belongs to, the
/// identifier that started the cycle, the last identifier unfolded and the
/// labels read since then.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Lineage {
    pub cycle: u64,
    pub root: Option<ThreadId>,
    pub last: Option<ThreadId>,
    pub labels: BTreeSet<Label>,
    /// Arguments of the last unfolded call.
    pub last_args: Vec<Value>,
    /// Instant in which the last call was unfolded.
    pub unfolded_at: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Thread {
    pub process: Process,
    pub lineage: Lineage,
}

/// `ν restricted (T1 | ... | Tn)` where no `Ti` is a parallel composition,
/// a restriction or `0`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Soup {
    pub restricted: BTreeSet<Name>,
    pub threads: Vec<Thread>,
}

impl Soup {
    pub fn free_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for t in &self.threads {
            out.extend(t.process.free_vars());
        }
        out.retain(|n| !self.restricted.contains(n));
        out
    }

    /// The size of a start-of-instant program: one per call plus the sizes
    /// of the call arguments. Other threads are not counted.
    pub fn config_size(&self) -> u64 {
        self.threads
            .iter()
            .filter_map(|t| match &t.process {
                Process::Call(_, args) => Some(
                    1 + args.iter().map(|a| a.to_value().map_or(0, |v| v.size())).sum::<u64>(),
                ),
                _ => None,
            })
            .sum()
    }

    /// Calls with value arguments, the shape of every thread at the start
    /// of an instant.
    pub fn calls(&self) -> Vec<(ThreadId, Vec<Value>)> {
        self.threads
            .iter()
            .filter_map(|t| match &t.process {
                Process::Call(id, args) => {
                    Some((id.clone(), args.iter().filter_map(Expr::to_value).collect()))
                }
                _ => None,
            })
            .collect()
    }

    pub fn max_arg_size(&self) -> u64 {
        self.calls()
            .iter()
            .flat_map(|(_, args)| args.iter().map(Value::size))
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for Soup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.restricted.is_empty() {
            let names: Vec<String> = self.restricted.iter().map(|n| n.to_string()).collect();
            write!(f, "nu {}. ", names.join(", "))?;
        }
        if self.threads.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.threads.iter().map(|t| t.process.to_string()).collect();
        write!(f, "{}", parts.join(" | "))
    }
}
