//! Static structures over a typed equation system: finite control, the
//! reset discipline, call graphs and the read-once condition, auxiliary
//! parameters, the ≥_F order, region ranks and written regions.

pub mod control;
pub mod graph;
pub mod order;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

pub use control::{check_finite_control, validate_reset, ControlViolation, ResetReport, ResetViolation};
pub use graph::{auxiliary_params, build_cycle_graph, build_instant_graph, check_read_once, CallGraph, Edge, Node};
pub use order::{f_order, region_ranks, w_sets, FOrder, RegionCycle, RegionOrder};

use crate::syntax::*;

#[derive(Clone, Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("the program is ill typed: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    Type(Vec<TypeError>),
    #[error(transparent)]
    Regions(#[from] RegionCycle),
}

#[derive(Clone, Debug, Serialize)]
pub struct Analysis {
    #[serde(skip)]
    pub types: TypeReport,
    pub finite_control: Vec<ControlViolation>,
    pub reset: ResetReport,
    pub cycle_graph: CallGraph,
    pub instant_graph: CallGraph,
    pub read_once: Result<(), Vec<Edge>>,
    /// y_A for every identifier, in label order.
    pub aux: BTreeMap<ThreadId, Vec<Label>>,
    pub f_order: FOrder,
    pub regions: RegionOrder,
    pub w: BTreeMap<ThreadId, BTreeSet<RegionId>>,
}

impl Analysis {
    /// Whether the program passes every check that constraint generation
    /// relies on.
    pub fn accepted(&self) -> bool {
        self.finite_control.is_empty() && self.reset.is_ok() && self.read_once.is_ok() && self.f_order.errors.is_empty()
    }

    /// Human-readable reasons for rejection.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        for v in &self.finite_control {
            out.push(format!("line {}: `{}` may spawn two calls in parallel: {}", v.line, v.thread, v.site));
        }
        for v in &self.reset.violations {
            let from: Vec<String> = v.called_from.iter().map(|t| t.to_string()).collect();
            out.push(format!(
                "`{}` is declared reset but is called within an instant by {}",
                v.thread,
                from.join(", ")
            ));
        }
        if let Err(cycle) = &self.read_once {
            let edges: Vec<String> = cycle.iter().map(|e| e.to_string()).collect();
            out.push(format!("read-once condition fails on the cycle {}", edges.join(" ")));
        }
        out.extend(self.f_order.errors.iter().cloned());
        out
    }

    /// The region read through a label.
    pub fn gamma(&self, l: Label) -> Option<&RegionId> {
        self.types.label_region(l)
    }

    pub fn hatted_arity(&self, sys: &EquationSystem, id: &ThreadId) -> usize {
        sys.equation(id).map_or(0, |e| e.arity()) + self.aux.get(id).map_or(0, |a| a.len())
    }

    /// I_A as a set of 1-based positions among the proper parameters.
    pub fn mask(&self, sys: &EquationSystem, id: &ThreadId) -> BTreeSet<usize> {
        match sys.equation(id) {
            Some(e) if e.annotation.reset => (1..=e.arity()).collect(),
            Some(e) => e.annotation.mask.clone(),
            None => BTreeSet::new(),
        }
    }
}

pub fn analyze(sys: &EquationSystem) -> Result<Analysis, AnalysisError> {
    let types = typecheck(sys).map_err(AnalysisError::Type)?;
    let regions = region_ranks(sys)?;
    let cycle_graph = build_cycle_graph(sys);
    let instant_graph = build_instant_graph(sys);
    let read_once = check_read_once(&cycle_graph);
    let aux: BTreeMap<ThreadId, Vec<Label>> =
        sys.equations.iter().map(|e| (e.name.clone(), auxiliary_params(&cycle_graph, &e.name))).collect();
    let hatted: BTreeMap<ThreadId, usize> = sys.equations.iter().map(|e| (e.name.clone(), e.arity() + aux[&e.name].len())).collect();
    let f_order = f_order(sys, &instant_graph, &hatted);
    let w = w_sets(sys, &cycle_graph, &types.emit_regions, &regions);
    Ok(Analysis {
        finite_control: check_finite_control(sys),
        reset: validate_reset(sys),
        cycle_graph,
        instant_graph,
        read_once,
        aux,
        f_order,
        regions,
        w,
        types,
    })
}
