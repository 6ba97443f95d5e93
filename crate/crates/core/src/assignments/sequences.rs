//! Strictly decreasing sequences of bounded tuples, and their encodings as
//! numbers in base c.

use rand::Rng;

use super::check::{lex_gt, mset_gt};
use super::natural::{add, mul, pow, Natural, Overflow};
use crate::syntax::Status;

/// `Σ a_i c^i` for the tuple `(a_{n-1}, ..., a_0)`, most significant first.
pub fn b_lex<N: Natural>(a: &[u64], c: u64) -> Result<N, Overflow> {
    let base = N::from_count(c);
    let mut acc = N::zero();
    for x in a {
        acc = add(&mul(&acc, &base)?, &N::from_count(*x))?;
    }
    Ok(acc)
}

/// The same encoding after sorting, so that the largest element is the
/// most significant digit. Any sorting permutation gives the same value.
pub fn b_mset<N: Natural>(a: &[u64], c: u64) -> Result<N, Overflow> {
    let mut sorted = a.to_vec();
    sorted.sort_unstable_by(|x, y| y.cmp(x));
    b_lex(&sorted, c)
}

pub fn is_strictly_decreasing(status: Status, seq: &[Vec<u64>]) -> bool {
    seq.windows(2).all(|w| match status {
        Status::Lex => lex_gt(&w[0], &w[1]),
        Status::Mset => mset_gt(&w[0], &w[1]),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundCheck<N> {
    pub well_formed: bool,
    pub decreasing: bool,
    pub length: usize,
    /// `c^n`.
    pub bound: N,
    /// The encoding of each element.
    pub encodings: Vec<N>,
    pub encodings_decrease: bool,
}

impl<N: Natural> BoundCheck<N> {
    pub fn holds(&self) -> bool {
        self.well_formed && self.decreasing && N::from_count(self.length as u64) <= self.bound && self.encodings_decrease
    }
}

/// Checks a sequence of n-tuples with entries below c: strictly decreasing,
/// no longer than `c^n`, with strictly decreasing encodings.
pub fn lex_mset_bound_check<N: Natural>(
    n: usize,
    c: u64,
    status: Status,
    seq: &[Vec<u64>],
) -> Result<BoundCheck<N>, Overflow> {
    let well_formed = seq.iter().all(|t| t.len() == n && t.iter().all(|&x| x < c));
    let encodings = seq
        .iter()
        .map(|t| match status {
            Status::Lex => b_lex(t, c),
            Status::Mset => b_mset(t, c),
        })
        .collect::<Result<Vec<N>, _>>()?;
    Ok(BoundCheck {
        well_formed,
        decreasing: is_strictly_decreasing(status, seq),
        length: seq.len(),
        bound: pow(&N::from_count(c), n as u32)?,
        encodings_decrease: encodings.windows(2).all(|w| w[0] > w[1]),
        encodings,
    })
}

/// A random strictly decreasing sequence of n-tuples over `0..c`, run until
/// no smaller tuple is reachable by the chosen moves.
pub fn random_decreasing_sequence(rng: &mut impl Rng, status: Status, n: usize, c: u64) -> Vec<Vec<u64>> {
    let mut cur: Vec<u64> = (0..n).map(|_| rng.gen_range(0..c)).collect();
    let mut out = vec![cur.clone()];
    loop {
        let positive: Vec<usize> = (0..n).filter(|&i| cur[i] > 0).collect();
        if positive.is_empty() {
            return out;
        }
        let i = positive[rng.gen_range(0..positive.len())];
        let top = cur[i];
        match status {
            Status::Lex => {
                cur[i] = rng.gen_range(0..top);
                for x in &mut cur[i + 1..] {
                    *x = rng.gen_range(0..c);
                }
            }
            Status::Mset => {
                // Remove a_i and some elements not above it; add elements
                // below a_i in their place.
                cur[i] = rng.gen_range(0..top);
                for j in 0..n {
                    if j != i && cur[j] <= top && rng.gen_bool(0.5) {
                        cur[j] = rng.gen_range(0..top);
                    }
                }
            }
        }
        out.push(cur.clone());
    }
}
