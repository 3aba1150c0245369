//! Exact-range codes for isomorphic copies of a graph.
//!
//! Every copy `π(G)` gets a number in `[0, n!/|Aut(G)|)`. The encoder walks
//! the pointwise stabilizer chain `Aut(G) = A_0 ≥ A_1 ≥ ..`: it first names
//! the image of every `Aut(G)`-orbit as a set, then for each vertex `i` in
//! turn names how the images of the `A_{i-1}`-orbits split into images of
//! `A_i`-orbits. Before each split, `π` is replaced by `π ∘ ρ` for some
//! `ρ ∈ A_{i-1}` so that vertex `i` lands on the smallest vertex of its
//! orbit's image; this is what makes the code depend only on the copy.

mod aux;
mod decode;

use serde::{Serialize, Serializer};

pub use aux::{AuxData, AuxLevel};
pub use decode::{decode, decode_value};

#[allow(unused_imports)]
pub(crate) use aux::{bit_length, push_uint, read_uint};

use crate::error::{Error, Result};
use crate::graph::{ColoredGraph, Graph, Structure};
use crate::group::{automorphism_group, find_isomorphism, StabilizerChain};
use crate::num::{factorial, Natural};
use crate::perm::Permutation;
use crate::ranks::{radix_pack, subset_rank};

fn decimal<N: Natural, S: Serializer>(v: &N, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// A 0-based code `value < range` with `range = n!/|Aut(G)|`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CosetCode<N: Natural = crate::BigNat> {
    #[serde(serialize_with = "decimal")]
    pub value: N,
    #[serde(serialize_with = "decimal")]
    pub range: N,
}

/// Bookkeeping for one decoding stage (`stage` runs from -1 to n).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageRecord<N: Natural = crate::BigNat> {
    pub stage: i64,
    /// Range consumed by the code up to and including this stage.
    #[serde(serialize_with = "decimal")]
    pub consumed: N,
    /// Color class sizes of the partially built copy.
    pub class_sizes: Vec<usize>,
    /// Product of the class size factorials.
    #[serde(serialize_with = "decimal")]
    pub copy_aut_order: N,
    /// Order of the automorphism group of `G` colored by this stage's orbits.
    #[serde(serialize_with = "decimal")]
    pub base_aut_order: N,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(bound = "")]
pub struct StageTrace<N: Natural = crate::BigNat> {
    pub stages: Vec<StageRecord<N>>,
}

impl<N: Natural> StageTrace<N> {
    /// Checks `consumed · copy_aut_order = (n!/|Aut(G)|) · base_aut_order` at every stage,
    /// the consumed ranges divide each other, and the first and last ranges.
    pub fn check(&self, n: usize, range: &N) -> Result<()> {
        let first = self.stages.first().ok_or_else(|| Error::Format("empty trace".into()))?;
        if !first.consumed.is_one() {
            return Err(Error::Format("stage -1 consumed a nonzero range".into()));
        }
        let mut prev = N::one();
        for rec in &self.stages {
            let lhs = rec.consumed.mul_checked(&rec.copy_aut_order, "trace")?;
            let rhs = range.mul_checked(&rec.base_aut_order, "trace")?;
            if lhs != rhs {
                return Err(Error::Format(format!("stage {} breaks the range identity", rec.stage)));
            }
            if !(rec.consumed.clone() % prev.clone()).is_zero() {
                return Err(Error::Format(format!("stage {} range does not extend the previous", rec.stage)));
            }
            if rec.class_sizes.iter().sum::<usize>() != n {
                return Err(Error::Format(format!("stage {} classes do not cover the vertices", rec.stage)));
            }
            prev = rec.consumed.clone();
        }
        if &prev != range {
            return Err(Error::Format("final consumed range is not n!/|Aut|".into()));
        }
        Ok(())
    }

    /// Ratio `r_i / r_{i-1}` for each stage after -1.
    pub fn stage_factors(&self) -> Vec<N> {
        self.stages
            .windows(2)
            .map(|w| w[1].consumed.clone() / w[0].consumed.clone())
            .collect()
    }
}

/// Encoder for the copies of one base graph. Building it computes `Aut(G)`
/// once; encoding a copy then costs one isomorphism search.
#[derive(Clone, Debug)]
pub struct CosetEncoder {
    base: ColoredGraph,
    chain: StabilizerChain,
    aux: AuxData,
}

impl CosetEncoder {
    pub fn new<S: Structure>(g: &S) -> Result<Self> {
        let base = g.to_colored();
        let chain = StabilizerChain::new(automorphism_group(&base)?);
        let aux = build_aux_from_chain(&base, &chain)?;
        Ok(CosetEncoder { base, chain, aux })
    }

    pub fn base(&self) -> &ColoredGraph {
        &self.base
    }

    pub fn aux(&self) -> &AuxData {
        &self.aux
    }

    pub fn chain(&self) -> &StabilizerChain {
        &self.chain
    }

    pub fn aut_order(&self) -> usize {
        self.chain.group().order()
    }

    pub fn range<N: Natural>(&self) -> Result<N> {
        let total: N = factorial(self.base.n())?;
        Ok(total / N::from_count(self.aut_order()))
    }

    /// Code of the copy `h`; fails with [`Error::NotIsomorphic`] when `h` is not a copy.
    pub fn encode<N: Natural, T: Structure>(&self, h: &T) -> Result<CosetCode<N>> {
        let pi = find_isomorphism(&self.base, h)?.ok_or(Error::NotIsomorphic)?;
        self.encode_permutation(&pi)
    }

    /// As [`encode`](Self::encode), also returning the per-stage bookkeeping.
    pub fn encode_traced<N: Natural, T: Structure>(&self, h: &T) -> Result<(CosetCode<N>, StageTrace<N>)> {
        let code = self.encode(h)?;
        let trace = self.trace(&code.range)?;
        Ok((code, trace))
    }

    /// Code of `π(G)` for a known `π`.
    pub fn encode_permutation<N: Natural>(&self, pi: &Permutation) -> Result<CosetCode<N>> {
        let n = self.base.n();
        if pi.len() != n {
            return Err(Error::Dimension { expected: n, found: pi.len() });
        }
        let mut pi = pi.clone();
        let steps = self.aux.steps();
        let mut digits: Vec<N> = Vec::with_capacity(steps.len());
        let mut radices: Vec<N> = Vec::with_capacity(steps.len());
        let mut steps = steps.iter().peekable();
        let levels = self.aux.levels();

        let image_of = |pi: &Permutation, block: &[usize]| -> Vec<usize> {
            let mut img: Vec<usize> = block.iter().map(|&v| pi.apply(v)).collect();
            img.sort_unstable();
            img
        };

        let mut remaining: Vec<usize> = (0..n).collect();
        while let Some(step) = steps.next_if(|s| s.stage == 0) {
            let img = image_of(&pi, &levels[0].partition.blocks()[step.block]);
            digits.push(rank_within(&mut remaining, &img)?);
            radices.push(crate::num::binomial(step.available, step.take)?);
        }

        for stage in 1..n {
            let fixed = stage - 1;
            let prev = &levels[stage - 1].partition;
            let home = prev.block_of(fixed).expect("fixed vertex lies in its level");
            let target = image_of(&pi, &prev.blocks()[home])[0];
            let source = pi.inverse().apply(target);
            let rho = self
                .chain
                .transversal_element(fixed, source)
                .expect("source lies in the orbit of the fixed vertex");
            pi = pi.compose(rho)?;
            debug_assert_eq!(pi.apply(fixed), target);

            let mut available: Vec<Vec<usize>> = prev.blocks().iter().map(|b| image_of(&pi, b)).collect();
            available[home].retain(|&u| u != target);
            while let Some(step) = steps.next_if(|s| s.stage == stage) {
                let img = image_of(&pi, &levels[stage].partition.blocks()[step.block]);
                digits.push(rank_within(&mut available[step.parent], &img)?);
                radices.push(crate::num::binomial(step.available, step.take)?);
            }
        }
        let value = radix_pack(&digits, &radices)?;
        let range = crate::num::product(&radices)?;
        Ok(CosetCode { value, range })
    }

    /// The stage bookkeeping; it depends only on `G`, not on the copy.
    pub fn trace<N: Natural>(&self, range: &N) -> Result<StageTrace<N>> {
        let n = self.base.n();
        let fact = |k: usize| factorial::<N>(k);
        let copy_order = |sizes: &[usize]| -> Result<N> {
            sizes.iter().try_fold(N::one(), |acc, &s| acc.mul_checked(&fact(s)?, "trace"))
        };
        let aut = N::from_count(self.aut_order());
        let mut stages = Vec::with_capacity(n + 2);
        stages.push(StageRecord {
            stage: -1,
            consumed: N::one(),
            class_sizes: if n == 0 { vec![] } else { vec![n] },
            copy_aut_order: fact(n)?,
            base_aut_order: aut.clone(),
        });
        let steps = self.aux.steps();
        let mut consumed = N::one();
        for stage in 0..=n {
            for s in steps.iter().filter(|s| s.stage == stage) {
                consumed = consumed.mul_checked(&crate::num::binomial(s.available, s.take)?, "trace")?;
            }
            let class_sizes: Vec<usize> = if stage == 0 {
                self.aux.orbits().map(|o| o.sizes()).unwrap_or_default()
            } else {
                let mut sizes = vec![1; stage];
                if stage < n {
                    sizes.extend(self.aux.levels()[stage].partition.sizes());
                }
                sizes
            };
            stages.push(StageRecord {
                stage: stage as i64,
                consumed: consumed.clone(),
                copy_aut_order: copy_order(&class_sizes)?,
                class_sizes,
                base_aut_order: N::from_count(self.chain.level(stage).order),
            });
        }
        if &consumed != range {
            return Err(Error::Format("trace range disagrees with the code range".into()));
        }
        Ok(StageTrace { stages })
    }
}

/// Colex rank of `subset` inside `pool`, removing it from `pool`.
fn rank_within<N: Natural>(pool: &mut Vec<usize>, subset: &[usize]) -> Result<N> {
    let positions: Vec<usize> = subset
        .iter()
        .map(|u| pool.binary_search(u).map_err(|_| Error::range(format!("vertex {} not available", u + 1))))
        .collect::<Result<_>>()?;
    let rank = subset_rank(pool.len(), &positions)?;
    pool.retain(|u| subset.binary_search(u).is_err());
    Ok(rank)
}

fn build_aux_from_chain(g: &ColoredGraph, chain: &StabilizerChain) -> Result<AuxData> {
    let n = g.n();
    let mut levels = Vec::with_capacity(n);
    for i in 0..n {
        let partition = if i == 0 { chain.level(0).orbits.clone() } else { chain.tail_orbits(i) };
        let neighbor_flags = if i == 0 {
            Vec::new()
        } else {
            partition
                .blocks()
                .iter()
                .map(|b| {
                    let adj = g.graph().has_edge(i - 1, b[0]);
                    assert!(
                        b.iter().all(|&u| g.graph().has_edge(i - 1, u) == adj),
                        "orbit of A_{i} disagrees on adjacency to vertex {i}"
                    );
                    adj
                })
                .collect()
        };
        levels.push(AuxLevel { partition, neighbor_flags });
    }
    let orbit_colors = levels
        .first()
        .map(|l| l.partition.blocks().iter().map(|b| g.color(b[0])).collect())
        .unwrap_or_default();
    AuxData::new(n, levels, orbit_colors)
}

/// Side information for decoding copies of `g`.
pub fn build_aux<S: Structure>(g: &S) -> Result<AuxData> {
    Ok(CosetEncoder::new(g)?.aux)
}

/// Code of the copy `h` of `g`, with its stage trace.
pub fn encode<N: Natural, S: Structure, T: Structure>(g: &S, h: &T) -> Result<(CosetCode<N>, StageTrace<N>)> {
    CosetEncoder::new(g)?.encode_traced(h)
}

/// `n! / |Aut(g)|`.
pub fn code_range<N: Natural, S: Structure>(g: &S) -> Result<N> {
    CosetEncoder::new(g)?.range()
}

/// Decodes to a plain graph, dropping colors.
pub fn decode_graph<N: Natural>(aux: &AuxData, code: &CosetCode<N>) -> Result<Graph> {
    Ok(decode(aux, code)?.into_graph())
}
