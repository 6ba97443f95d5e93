//! The ≥_F pre-order on thread identifiers, region ranks and the sets
//! W(A) of regions written within a cycle.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::graph::{CallGraph, Node};
use crate::syntax::*;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FOrder {
    /// `geq[A]` holds every B with A ≥_F B, A included.
    pub geq: BTreeMap<ThreadId, BTreeSet<ThreadId>>,
    pub rank: BTreeMap<ThreadId, usize>,
    pub status: BTreeMap<ThreadId, Status>,
    /// The =_F classes, each sorted, listed by their least member.
    pub classes: Vec<Vec<ThreadId>>,
    /// Classes that mix statuses or arities.
    pub errors: Vec<String>,
}

impl FOrder {
    pub fn geq(&self, a: &ThreadId, b: &ThreadId) -> bool {
        self.geq.get(a).is_some_and(|s| s.contains(b))
    }

    pub fn equiv(&self, a: &ThreadId, b: &ThreadId) -> bool {
        self.geq(a, b) && self.geq(b, a)
    }

    pub fn greater(&self, a: &ThreadId, b: &ThreadId) -> bool {
        self.geq(a, b) && !self.geq(b, a)
    }
}

/// Builds ≥_F from the within-instant graph. `hatted_arity` gives the
/// arity of Â, checked alongside the proper arity and the status.
pub fn f_order(sys: &EquationSystem, instant: &CallGraph, hatted_arity: &BTreeMap<ThreadId, usize>) -> FOrder {
    let ids: Vec<ThreadId> = sys.equations.iter().map(|e| e.name.clone()).collect();
    let mut order = FOrder::default();
    for id in &ids {
        let reach: BTreeSet<ThreadId> =
            instant.reachable(&Node::Thread(id.clone())).into_iter().filter_map(|n| n.as_thread().cloned()).collect();
        order.geq.insert(id.clone(), reach);
        order.status.insert(id.clone(), sys.equation(id).map(|e| e.annotation.status).unwrap_or_default());
    }
    let mut seen = BTreeSet::new();
    for id in &ids {
        if seen.contains(id) {
            continue;
        }
        let class: Vec<ThreadId> = ids.iter().filter(|b| order.equiv(id, b)).cloned().collect();
        seen.extend(class.iter().cloned());
        let statuses: BTreeSet<Status> = class.iter().map(|c| order.status[c]).collect();
        let arities: BTreeSet<usize> = class.iter().filter_map(|c| sys.equation(c)).map(|e| e.arity()).collect();
        let hatted: BTreeSet<usize> = class.iter().filter_map(|c| hatted_arity.get(c).copied()).collect();
        let names = class.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ");
        if statuses.len() > 1 {
            order.errors.push(format!("identifiers {names} are =_F-equivalent but have different statuses"));
        }
        if arities.len() > 1 || hatted.len() > 1 {
            order.errors.push(format!("identifiers {names} are =_F-equivalent but have different arities"));
        }
        order.classes.push(class);
    }
    let mut memo = BTreeMap::new();
    for id in &ids {
        let r = rank_of(&order, &ids, id, &mut memo);
        order.rank.insert(id.clone(), r);
    }
    order
}

fn rank_of(order: &FOrder, ids: &[ThreadId], a: &ThreadId, memo: &mut BTreeMap<ThreadId, usize>) -> usize {
    if let Some(r) = memo.get(a) {
        return *r;
    }
    let r = ids
        .iter()
        .filter(|b| order.greater(a, b))
        .map(|b| 1 + rank_of(order, ids, b, memo))
        .max()
        .unwrap_or(0);
    memo.insert(a.clone(), r);
    r
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegionOrder {
    pub rank: BTreeMap<RegionId, usize>,
    /// A region above every declared one, standing for "no emission".
    pub top: RegionId,
}

impl RegionOrder {
    pub fn top_id() -> RegionId {
        RegionId::new("_top")
    }

    pub fn rank_of(&self, r: &RegionId) -> usize {
        if *r == self.top {
            self.rank.values().map(|x| x + 1).max().unwrap_or(0)
        } else {
            self.rank.get(r).copied().unwrap_or(0)
        }
    }

    /// ↓ρ: the declared regions whose rank is strictly below that of ρ.
    pub fn below(&self, r: &RegionId) -> BTreeSet<RegionId> {
        let k = self.rank_of(r);
        self.rank.iter().filter(|(_, x)| **x < k).map(|(r, _)| r.clone()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("region declarations are cyclic through `{0}`")]
pub struct RegionCycle(pub RegionId);

/// rank(ρ) is the length of the longest descending chain from ρ.
pub fn region_ranks(sys: &EquationSystem) -> Result<RegionOrder, RegionCycle> {
    fn go(
        r: &RegionId,
        below: &BTreeMap<&RegionId, Vec<&RegionId>>,
        memo: &mut BTreeMap<RegionId, usize>,
        stack: &mut BTreeSet<RegionId>,
    ) -> Result<usize, RegionCycle> {
        if let Some(k) = memo.get(r) {
            return Ok(*k);
        }
        if !stack.insert(r.clone()) {
            return Err(RegionCycle(r.clone()));
        }
        let mut k = 0;
        for l in below.get(r).into_iter().flatten() {
            k = k.max(1 + go(l, below, memo, stack)?);
        }
        stack.remove(r);
        memo.insert(r.clone(), k);
        Ok(k)
    }
    let mut below: BTreeMap<&RegionId, Vec<&RegionId>> = BTreeMap::new();
    for (g, l) in &sys.region_order {
        below.entry(g).or_default().push(l);
    }
    let mut memo = BTreeMap::new();
    for r in &sys.regions {
        go(r, &below, &mut memo, &mut BTreeSet::new())?;
    }
    Ok(RegionOrder { rank: memo, top: RegionOrder::top_id() })
}

/// W(A): the regions emitted on by the definitions reachable from A in the
/// cycle graph (the sink excluded), or {ρ_⊤} when there are none.
pub fn w_sets(
    sys: &EquationSystem,
    cycle: &CallGraph,
    emit_regions: &BTreeMap<ThreadId, BTreeSet<RegionId>>,
    regions: &RegionOrder,
) -> BTreeMap<ThreadId, BTreeSet<RegionId>> {
    let mut out = BTreeMap::new();
    for eq in &sys.equations {
        let mut w = BTreeSet::new();
        for n in cycle.reachable(&Node::Thread(eq.name.clone())) {
            if let Some(id) = n.as_thread() {
                w.extend(emit_regions.get(id).into_iter().flatten().filter(|r| !r.is_local()).cloned());
            }
        }
        if w.is_empty() {
            w.insert(regions.top.clone());
        }
        out.insert(eq.name.clone(), w);
    }
    out
}
