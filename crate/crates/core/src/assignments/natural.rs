use std::fmt::{Debug, Display};

use num_traits::{CheckedAdd, CheckedMul, FromPrimitive, One, Zero};

/// Natural numbers as used by assignments. Arithmetic is checked so that a
/// fixed-width type reports overflow rather than wrapping.
pub trait Natural:
    Clone + Ord + Debug + Display + Zero + One + CheckedAdd + CheckedMul + FromPrimitive + Send + Sync + 'static
{
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("every natural type holds small counts")
    }
}

impl<T> Natural for T where
    T: Clone + Ord + Debug + Display + Zero + One + CheckedAdd + CheckedMul + FromPrimitive + Send + Sync + 'static
{
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("arithmetic overflow")]
pub struct Overflow;

pub fn add<N: Natural>(a: &N, b: &N) -> Result<N, Overflow> {
    a.checked_add(b).ok_or(Overflow)
}

pub fn mul<N: Natural>(a: &N, b: &N) -> Result<N, Overflow> {
    a.checked_mul(b).ok_or(Overflow)
}

pub fn pow<N: Natural>(base: &N, exp: u32) -> Result<N, Overflow> {
    let mut acc = N::one();
    for _ in 0..exp {
        acc = mul(&acc, base)?;
    }
    Ok(acc)
}
