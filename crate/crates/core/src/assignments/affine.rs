//! Maxima of affine forms with natural coefficients.

use std::collections::BTreeMap;
use std::fmt;

use super::natural::{add, mul, Natural, Overflow};

/// `max_j (c_j0 + Σ_i c_ji · x_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxAffine<N> {
    pub arms: Vec<Vec<N>>,
}

impl<N: Natural> MaxAffine<N> {
    pub fn arity(&self) -> usize {
        self.arms.first().map_or(0, |a| a.len().saturating_sub(1))
    }

    pub fn constant(c: N) -> Self {
        MaxAffine { arms: vec![vec![c]] }
    }

    /// The constructor shape `d + Σ x_i`.
    pub fn constructor(d: N, arity: usize) -> Self {
        let mut arm = vec![d];
        arm.extend(std::iter::repeat_n(N::one(), arity));
        MaxAffine { arms: vec![arm] }
    }

    pub fn eval(&self, xs: &[N]) -> Result<N, Overflow> {
        let mut best = N::zero();
        for arm in &self.arms {
            let mut v = arm[0].clone();
            for (c, x) in arm[1..].iter().zip(xs) {
                if !c.is_zero() {
                    v = add(&v, &mul(c, x)?)?;
                }
            }
            if v > best {
                best = v;
            }
        }
        Ok(best)
    }

    /// Every argument has a positive coefficient in some arm: then the
    /// function dominates each of its arguments.
    pub fn has_subterm_property(&self) -> Option<usize> {
        (0..self.arity()).find(|&i| self.arms.iter().all(|a| a[i + 1].is_zero()))
    }
}

impl<N: Natural> fmt::Display for MaxAffine<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arms: Vec<String> = self
            .arms
            .iter()
            .map(|arm| {
                let mut parts = vec![arm[0].to_string()];
                for (i, c) in arm[1..].iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    if c.is_one() {
                        parts.push(format!("x{}", i + 1));
                    } else {
                        parts.push(format!("{c}*x{}", i + 1));
                    }
                }
                if parts.len() > 1 && arm[0].is_zero() {
                    parts.remove(0);
                }
                parts.join(" + ")
            })
            .collect();
        if arms.len() == 1 {
            f.write_str(&arms[0])
        } else {
            write!(f, "max({})", arms.join(", "))
        }
    }
}

/// An affine form over named variables, used by the symbolic check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Linear<N, V> {
    pub constant: N,
    pub coeffs: BTreeMap<V, N>,
}

impl<N: Natural, V: Ord + Clone> Linear<N, V> {
    pub fn constant(c: N) -> Self {
        Linear { constant: c, coeffs: BTreeMap::new() }
    }

    pub fn var(v: V) -> Self {
        Linear { constant: N::zero(), coeffs: BTreeMap::from([(v, N::one())]) }
    }

    pub fn plus(&self, other: &Self) -> Result<Self, Overflow> {
        let mut out = self.clone();
        out.constant = add(&out.constant, &other.constant)?;
        for (v, c) in &other.coeffs {
            let cur = out.coeffs.entry(v.clone()).or_insert_with(N::zero);
            *cur = add(cur, c)?;
        }
        Ok(out)
    }

    pub fn scale(&self, k: &N) -> Result<Self, Overflow> {
        let mut coeffs = BTreeMap::new();
        for (v, c) in &self.coeffs {
            let p = mul(c, k)?;
            if !p.is_zero() {
                coeffs.insert(v.clone(), p);
            }
        }
        Ok(Linear { constant: mul(&self.constant, k)?, coeffs })
    }

    /// Pointwise `self ≥ other` (or `>` on the constant when `strict`) for
    /// every valuation of the variables in the naturals.
    pub fn dominates(&self, other: &Self, strict: bool) -> bool {
        let constant_ok = if strict { self.constant > other.constant } else { self.constant >= other.constant };
        constant_ok
            && other
                .coeffs
                .iter()
                .all(|(v, c)| self.coeffs.get(v).is_some_and(|d| d >= c))
    }
}
