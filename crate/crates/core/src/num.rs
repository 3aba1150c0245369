//! Natural-number carrier for ranks and codes.
//!
//! Everything that produces an integer code (Lehmer ranks, subset ranks,
//! mixed-radix packing, coset codes) is generic over [`Natural`]. Fixed-width
//! types (`u64`, `u128`) are fast but report [`Error::Overflow`] once a
//! range no longer fits; [`BigNat`](crate::BigNat) never overflows.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, ToPrimitive, Unsigned};

use crate::error::{Error, Result};

/// An unsigned integer type usable as a code carrier.
pub trait Natural:
    Clone
    + Debug
    + Display
    + FromStr
    + Ord
    + Hash
    + Unsigned
    + Integer
    + CheckedAdd
    + CheckedMul
    + CheckedSub
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    fn from_count(v: usize) -> Self {
        Self::from_usize(v).expect("every Natural holds usize counts")
    }

    fn mul_checked(&self, other: &Self, what: &'static str) -> Result<Self> {
        self.checked_mul(other).ok_or(Error::Overflow(what))
    }

    fn add_checked(&self, other: &Self, what: &'static str) -> Result<Self> {
        self.checked_add(other).ok_or(Error::Overflow(what))
    }
}

impl<T> Natural for T where
    T: Clone
        + Debug
        + Display
        + FromStr
        + Ord
        + Hash
        + Unsigned
        + Integer
        + CheckedAdd
        + CheckedMul
        + CheckedSub
        + FromPrimitive
        + ToPrimitive
        + Send
        + Sync
        + 'static
{
}

/// `n!`
pub fn factorial<N: Natural>(n: usize) -> Result<N> {
    (2..=n).try_fold(N::one(), |acc, k| acc.mul_checked(&N::from_count(k), "factorial"))
}

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial<N: Natural>(n: usize, k: usize) -> Result<N> {
    if k > n {
        return Ok(N::zero());
    }
    let k = k.min(n - k);
    let mut acc = N::one();
    for i in 1..=k {
        // acc * (n - k + i) is divisible by i at every step
        acc = acc.mul_checked(&N::from_count(n - k + i), "binomial")? / N::from_count(i);
    }
    Ok(acc)
}

/// Product of a list of naturals.
pub fn product<N: Natural>(values: &[N]) -> Result<N> {
    values
        .iter()
        .try_fold(N::one(), |acc, v| acc.mul_checked(v, "product"))
}

/// `log2(n!)` as a float; exact enough for thresholds.
pub fn log2_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).log2()).sum()
}

/// Number of bits needed to write any value in `[0, range)`, i.e. `ceil(log2 range)`.
pub fn bits_for_range(range: &num_bigint::BigUint) -> u64 {
    if range <= &num_bigint::BigUint::from(1u8) {
        0
    } else {
        (range - 1u8).bits()
    }
}

/// `log2` of a big natural, accurate to double precision.
pub fn log2_big(x: &num_bigint::BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().map(f64::log2).unwrap_or(f64::INFINITY)
    } else {
        let shift = bits - 64;
        let top = (x >> shift).to_f64().unwrap_or(0.0);
        top.log2() + shift as f64
    }
}
