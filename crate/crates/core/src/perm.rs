//! Permutations of `{0, .., n-1}` in one-line notation.
//!
//! Internally vertices are 0-based; the text form (`"2 3 1"`) is 1-based.
//! Composition applies the right operand first: `p.compose(&q)` maps `i` to
//! `p(q(i))`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{ColoredGraph, Graph};
use crate::num::{factorial, Natural};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    /// Builds a permutation from 0-based images, checking bijectivity.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v >= n || seen[v] {
                return Err(Error::range(format!("{images:?} is not a permutation of 0..{n}")));
            }
            seen[v] = true;
        }
        Ok(Permutation { images })
    }

    pub(crate) fn from_images_unchecked(images: Vec<usize>) -> Self {
        debug_assert!(Self::from_images(images.clone()).is_ok());
        Permutation { images }
    }

    /// Builds a permutation from the 1-based image list `[π(1), .., π(n)]`.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        let zero = images
            .iter()
            .map(|&v| v.checked_sub(1).ok_or_else(|| Error::range("vertex 0 in 1-based list")))
            .collect::<Result<Vec<_>>>()?;
        Self::from_images(zero)
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.images.iter().map(|v| v + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// `(self ∘ q)(i) = self(q(i))`.
    pub fn compose(&self, q: &Permutation) -> Result<Permutation> {
        if self.len() != q.len() {
            return Err(Error::Dimension { expected: self.len(), found: q.len() });
        }
        Ok(Permutation { images: q.images.iter().map(|&j| self.images[j]).collect() })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { images: inv }
    }

    /// Position of `self` in the lexicographic order of all permutations of
    /// the same length (the Lehmer code read as a factorial-base number).
    pub fn lehmer_rank<N: Natural>(&self) -> Result<N> {
        let n = self.len();
        let mut rank = N::zero();
        for i in 0..n {
            let smaller_later = self.images[i + 1..]
                .iter()
                .filter(|&&v| v < self.images[i])
                .count();
            rank = rank
                .mul_checked(&N::from_count(n - i), "lehmer rank")?
                .add_checked(&N::from_count(smaller_later), "lehmer rank")?;
        }
        Ok(rank)
    }

    /// Inverse of [`lehmer_rank`](Self::lehmer_rank).
    pub fn lehmer_unrank<N: Natural>(n: usize, rank: &N) -> Result<Permutation> {
        // if n! does not fit in N, every value of N is below it
        let in_range = match factorial::<N>(n) {
            Ok(total) => rank < &total,
            Err(_) => true,
        };
        if !in_range {
            return Err(Error::range(format!("Lehmer rank {rank} is not below {n}!")));
        }
        let mut digits = vec![0usize; n];
        let mut rest = rank.clone();
        for i in (0..n).rev() {
            let radix = N::from_count(n - i);
            let (q, r) = rest.div_rem(&radix);
            digits[i] = r.to_usize().expect("digit below radix");
            rest = q;
        }
        let mut available: Vec<usize> = (0..n).collect();
        let images = digits.into_iter().map(|d| available.remove(d)).collect();
        Ok(Permutation { images })
    }

    /// The copy `π(G)`: `(π(v), π(w))` is an edge of the result iff `(v, w)` is an edge of `G`.
    pub fn apply_to_graph(&self, g: &Graph) -> Result<Graph> {
        g.permuted(self)
    }

    /// As [`apply_to_graph`](Self::apply_to_graph), carrying colors along with their vertices.
    pub fn apply_to_colored(&self, g: &ColoredGraph) -> Result<ColoredGraph> {
        g.permuted(self)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.images {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{}", v + 1)?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let images = s
            .split_whitespace()
            .map(|tok| tok.parse::<usize>().map_err(|e| Error::parse(1, format!("{tok:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_one_based(&images)
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> impl Iterator<Item = Permutation> {
    let mut next = Some((0..n).collect::<Vec<_>>());
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut a = current.clone();
        // standard next-permutation step
        if let Some(i) = (1..a.len()).rev().find(|&i| a[i - 1] < a[i]) {
            let j = (i..a.len()).rev().find(|&j| a[j] > a[i - 1]).unwrap();
            a.swap(i - 1, j);
            a[i..].reverse();
            next = Some(a);
        }
        Some(Permutation { images: current })
    })
}
