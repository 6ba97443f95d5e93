//! Values of a type, by size. Signals are represented by one canonical
//! constant per signal type since no assignment can tell them apart.

use std::collections::{BTreeMap, HashMap};

use super::natural::Natural;
use super::Assignment;
use crate::syntax::*;

/// The constant standing for every signal of type `ty`.
pub fn canonical_signal(ty: &TypeExpr) -> Name {
    match ty.as_sig() {
        Some((r, t)) => Name::new(format!("#sig<{r}>_{t}")),
        None => Name::new(format!("#sig_{ty}")),
    }
}

/// Enumerates closed values by exact size, stopping once `cap` values of a
/// single type and size have been produced.
pub struct ValueEnumerator<'a> {
    sys: &'a EquationSystem,
    cap: usize,
    memo: HashMap<(TypeExpr, u64), Vec<Value>>,
    pub truncated: bool,
}

impl<'a> ValueEnumerator<'a> {
    pub fn new(sys: &'a EquationSystem, cap: usize) -> Self {
        ValueEnumerator { sys, cap, memo: HashMap::new(), truncated: false }
    }

    /// Values of size at most `k`, smallest first.
    pub fn up_to(&mut self, ty: &TypeExpr, k: u64) -> Vec<Value> {
        let mut out = Vec::new();
        for n in 0..=k {
            out.extend(self.exact(ty, n));
            if out.len() > self.cap {
                out.truncate(self.cap);
                self.truncated = true;
                break;
            }
        }
        out
    }

    pub fn exact(&mut self, ty: &TypeExpr, n: u64) -> Vec<Value> {
        let key = (ty.clone(), n);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let mut out = Vec::new();
        if ty.is_signal() {
            if n == 0 {
                out.push(Value::Sig(canonical_signal(ty)));
            }
        } else {
            for (c, args) in self.sys.constructors_of(ty).unwrap_or_default() {
                if args.is_empty() {
                    if n == 0 {
                        out.push(Value::Con(c, vec![]));
                    }
                } else if n >= 1 {
                    for split in compositions(n - 1, args.len()) {
                        let parts: Vec<Vec<Value>> =
                            args.iter().zip(&split).map(|(t, &m)| self.exact(t, m)).collect();
                        for combo in product(&parts, self.cap.saturating_sub(out.len())) {
                            out.push(Value::Con(c.clone(), combo));
                        }
                        if out.len() >= self.cap {
                            self.truncated = true;
                            break;
                        }
                    }
                }
            }
        }
        self.memo.insert(key, out.clone());
        out
    }
}

/// Ways of writing `total` as an ordered sum of `parts` naturals.
pub fn compositions(total: u64, parts: usize) -> Vec<Vec<u64>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Cartesian product, last factor varying fastest, at most `limit` tuples.
pub fn product<T: Clone>(parts: &[Vec<T>], limit: usize) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![vec![]];
    for part in parts {
        let mut next = Vec::new();
        'outer: for prefix in &out {
            for x in part {
                if next.len() >= limit {
                    break 'outer;
                }
                let mut t = prefix.clone();
                t.push(x.clone());
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// The distinct q-values reached by values of a type of size at most `k`,
/// each with a smallest witness. Computed from the q-values of the
/// arguments, so types with many values stay cheap.
pub struct QValues<'a, N> {
    sys: &'a EquationSystem,
    q: &'a Assignment<N>,
    memo: HashMap<(TypeExpr, u64), BTreeMap<N, Value>>,
}

impl<'a, N: Natural> QValues<'a, N> {
    pub fn new(sys: &'a EquationSystem, q: &'a Assignment<N>) -> Self {
        QValues { sys, q, memo: HashMap::new() }
    }

    pub fn up_to(&mut self, ty: &TypeExpr, k: u64) -> BTreeMap<N, Value> {
        let mut out = BTreeMap::new();
        for n in 0..=k {
            for (v, w) in self.exact(ty, n) {
                out.entry(v).or_insert(w);
            }
        }
        out
    }

    fn exact(&mut self, ty: &TypeExpr, n: u64) -> BTreeMap<N, Value> {
        let key = (ty.clone(), n);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let mut out = BTreeMap::new();
        if ty.is_signal() {
            if n == 0 {
                out.insert(N::zero(), Value::Sig(canonical_signal(ty)));
            }
        } else {
            for (c, args) in self.sys.constructors_of(ty).unwrap_or_default() {
                if args.is_empty() {
                    if n == 0 {
                        out.entry(N::zero()).or_insert(Value::Con(c, vec![]));
                    }
                    continue;
                }
                if n == 0 {
                    continue;
                }
                let f = self.q.constructor(self.sys, &c);
                for split in compositions(n - 1, args.len()) {
                    let parts: Vec<Vec<(N, Value)>> = args
                        .iter()
                        .zip(&split)
                        .map(|(t, &m)| self.exact(t, m).into_iter().collect())
                        .collect();
                    for combo in product(&parts, usize::MAX) {
                        let qs: Vec<N> = combo.iter().map(|(v, _)| v.clone()).collect();
                        // Overflowing values are out of reach of the check anyway.
                        let Ok(v) = f.eval(&qs) else { continue };
                        out.entry(v)
                            .or_insert_with(|| Value::Con(c.clone(), combo.into_iter().map(|(_, w)| w).collect()));
                    }
                }
            }
        }
        self.memo.insert(key, out.clone());
        out
    }
}
