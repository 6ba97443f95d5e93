//! Hooks for instrumented runs.

use crate::syntax::{Label, Name, ThreadId, Value};

use super::machine::Runtime;
use super::soup::{EmissionStore, Lineage, Soup};
use super::trace::InstantTrace;

/// Every method has an empty default, so observers implement only what
/// they watch.
pub trait Observer {
    /// A call to `target` is about to be unfolded by a thread with the given
    /// lineage; `new_cycle` is set when `target` is a reset identifier.
    fn unfolded(&mut self, _before: &Lineage, _target: &ThreadId, _args: &[Value], _new_cycle: bool) {}

    /// A read: a present statement fired with the given value, or a
    /// dereference was evaluated to the given list.
    fn read(&mut self, _lineage: &Lineage, _label: Label, _value: &Value) {}

    fn emitted(&mut self, _lineage: &Lineage, _signal: &Name, _value: &Value, _store: &EmissionStore) {}

    /// Called after every reduction step.
    fn stepped(&mut self, _rt: &Runtime) {}

    fn instant_ended(&mut self, _trace: &InstantTrace, _next: &Soup) {}
}

/// The observer that watches nothing.
pub struct NoObserver;

impl Observer for NoObserver {}
