//! Exact integer encodings: colex subset ranks and mixed-radix packing.

use crate::error::{Error, Result};
use crate::num::{binomial, product, Natural};

/// Colex rank of a strictly increasing subset of `0..n`, in `[0, C(n, k))`.
///
/// `{0, .., k-1}` has rank 0.
pub fn subset_rank<N: Natural>(n: usize, subset: &[usize]) -> Result<N> {
    if subset.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::range(format!("{subset:?} is not strictly increasing")));
    }
    if let Some(&last) = subset.last() {
        if last >= n {
            return Err(Error::range(format!("{subset:?} is not a subset of 0..{n}")));
        }
    }
    subset.iter().enumerate().try_fold(N::zero(), |acc, (i, &c)| {
        acc.add_checked(&binomial(c, i + 1)?, "subset rank")
    })
}

/// Inverse of [`subset_rank`]: the `k`-subset of `0..n` with the given rank.
pub fn subset_unrank<N: Natural>(n: usize, k: usize, rank: &N) -> Result<Vec<usize>> {
    let total: N = binomial(n, k)?;
    if k > n || rank >= &total {
        return Err(Error::range(format!("subset rank {rank} is not below C({n}, {k})")));
    }
    let mut rest = rank.clone();
    let mut out = vec![0; k];
    let mut hi = n;
    for i in (1..=k).rev() {
        // largest c < hi with C(c, i) <= rest
        let mut c = hi - 1;
        loop {
            let b: N = binomial(c, i)?;
            if b <= rest {
                rest = rest - b;
                break;
            }
            c -= 1;
        }
        out[i - 1] = c;
        hi = c;
    }
    Ok(out)
}

/// Packs `values[i] < radices[i]` into one number below `∏ radices`:
/// `x = v0 + r0 * (v1 + r1 * (v2 + ..))`.
pub fn radix_pack<N: Natural>(values: &[N], radices: &[N]) -> Result<N> {
    if values.len() != radices.len() {
        return Err(Error::Dimension { expected: radices.len(), found: values.len() });
    }
    let mut acc = N::zero();
    for (v, r) in values.iter().zip(radices).rev() {
        if v >= r {
            return Err(Error::range(format!("digit {v} is not below radix {r}")));
        }
        acc = acc.mul_checked(r, "radix pack")?.add_checked(v, "radix pack")?;
    }
    Ok(acc)
}

/// Inverse of [`radix_pack`].
pub fn radix_unpack<N: Natural>(x: &N, radices: &[N]) -> Result<Vec<N>> {
    // if the product overflows N, every value of N is below it
    if let Ok(total) = product(radices) {
        if x >= &total {
            return Err(Error::range(format!("{x} is not below the radix product {total}")));
        }
    }
    let mut rest = x.clone();
    let mut out = Vec::with_capacity(radices.len());
    for r in radices {
        if r.is_zero() {
            return Err(Error::range("zero radix"));
        }
        let (q, d) = rest.div_rem(r);
        out.push(d);
        rest = q;
    }
    Ok(out)
}

/// Extracts digit `index` of `x` without unpacking the others.
pub fn radix_digit<N: Natural>(x: &N, radices: &[N], index: usize) -> Result<N> {
    let below = product(&radices[..index])?;
    Ok((x.clone() / below) % radices[index].clone())
}
