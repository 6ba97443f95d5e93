//! Instant-by-instant execution.

pub mod env;
pub mod eval;
pub mod machine;
pub mod observer;
pub mod soup;
pub mod trace;

pub use env::{Env, EnvError, EnvSchedule};
pub use eval::{apply, eval_closed, eval_expr, pattern_match, EvalError, Fuel};
pub use machine::{
    run_computation, run_observed, Runtime, RuntimeError, SchedulerMode, SchedulerPolicy, DEFAULT_STEP_CAP,
};
pub use observer::{NoObserver, Observer};
pub use soup::{EmissionStore, Lineage, Soup, Thread};
pub use trace::{InstantTrace, TRACE_SCHEMA_VERSION};
