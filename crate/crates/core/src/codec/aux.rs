//! Side information for the coset decoder: orbit partitions of every
//! pointwise stabilizer, neighbor flags, and orbit colors.

use bitvec::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::OrbitPartition;
use crate::num::{binomial, Natural};

/// Orbits of one stabilizer level.
///
/// Level 0 partitions all of `0..n` into `Aut(G)`-orbits and has no flags.
/// Level `i >= 1` partitions `i..n` into `A_i`-orbits, with one flag per
/// orbit telling whether its vertices are adjacent to vertex `i - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuxLevel {
    pub partition: OrbitPartition,
    pub neighbor_flags: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuxData {
    n: usize,
    levels: Vec<AuxLevel>,
    /// One color per level-0 orbit.
    orbit_colors: Vec<u32>,
}

/// One subset choice consumed by the code, in code order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Step {
    /// 0 for the `Aut(G)`-orbit images, `i` for the split made after fixing vertex `i - 1`.
    pub stage: usize,
    /// Block index in `levels[stage]`.
    pub block: usize,
    /// Parent block index in `levels[stage - 1]` (unused for stage 0).
    pub parent: usize,
    /// Size of the set the block's image is chosen from.
    pub available: usize,
    pub take: usize,
}

impl AuxData {
    pub(crate) fn new(n: usize, levels: Vec<AuxLevel>, orbit_colors: Vec<u32>) -> Result<Self> {
        let aux = AuxData { n, levels, orbit_colors };
        aux.validate()?;
        Ok(aux)
    }

    fn validate(&self) -> Result<()> {
        if self.levels.len() != self.n {
            return Err(Error::Format(format!("{} levels for n = {}", self.levels.len(), self.n)));
        }
        for (i, level) in self.levels.iter().enumerate() {
            let mut covered: Vec<usize> = level.partition.blocks().iter().flatten().copied().collect();
            covered.sort_unstable();
            if covered != (i..self.n).collect::<Vec<_>>() {
                return Err(Error::Format(format!("level {i} does not partition {}..{}", i + 1, self.n)));
            }
            let want_flags = if i == 0 { 0 } else { level.partition.len() };
            if level.neighbor_flags.len() != want_flags {
                return Err(Error::Format(format!("level {i} has {} flags", level.neighbor_flags.len())));
            }
            if i > 0 {
                // every block must sit inside one block of the previous level
                let prev = &self.levels[i - 1].partition;
                for b in level.partition.blocks() {
                    let p = prev.block_of(b[0]);
                    if b.iter().any(|&v| prev.block_of(v) != p) {
                        return Err(Error::Format(format!("level {i} does not refine level {}", i - 1)));
                    }
                }
            }
        }
        if let Some(last) = self.levels.last() {
            if last.partition.blocks() != [vec![self.n - 1]] {
                return Err(Error::Format("last level is not a singleton".into()));
            }
        }
        let expected_colors = self.levels.first().map_or(0, |l| l.partition.len());
        if self.orbit_colors.len() != expected_colors {
            return Err(Error::Format("one color per orbit expected".into()));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn levels(&self) -> &[AuxLevel] {
        &self.levels
    }

    pub fn orbit_colors(&self) -> &[u32] {
        &self.orbit_colors
    }

    /// `Aut(G)`-orbits.
    pub fn orbits(&self) -> Option<&OrbitPartition> {
        self.levels.first().map(|l| &l.partition)
    }

    pub fn color_width(&self) -> u32 {
        let max = self.orbit_colors.iter().copied().max().unwrap_or(0);
        u32::BITS - max.leading_zeros()
    }

    /// The subset choices a code is made of, in the order their digits are packed.
    pub(crate) fn steps(&self) -> Vec<Step> {
        let n = self.n;
        let mut steps = Vec::new();
        if n == 0 {
            return steps;
        }
        let mut remaining = n;
        for (block, b) in self.levels[0].partition.blocks().iter().enumerate() {
            steps.push(Step { stage: 0, block, parent: 0, available: remaining, take: b.len() });
            remaining -= b.len();
        }
        for stage in 1..n {
            let fixed = stage - 1;
            let prev = &self.levels[stage - 1].partition;
            let mut available: Vec<usize> = prev.sizes();
            available[prev.block_of(fixed).expect("fixed vertex is in its level")] -= 1;
            for (block, b) in self.levels[stage].partition.blocks().iter().enumerate() {
                let parent = prev.block_of(b[0]).expect("levels refine");
                steps.push(Step { stage, block, parent, available: available[parent], take: b.len() });
                available[parent] -= b.len();
            }
        }
        steps
    }

    /// Radix of every step; their product is the code range.
    pub fn radices<N: Natural>(&self) -> Result<Vec<N>> {
        self.steps().iter().map(|s| binomial(s.available, s.take)).collect()
    }

    /// `n! / |Aut(G)|`, derived from the partitions alone.
    pub fn code_range<N: Natural>(&self) -> Result<N> {
        crate::num::product(&self.radices()?)
    }

    fn index_width(&self) -> usize {
        bit_length(self.n.saturating_sub(1).max(1))
    }

    /// First level whose orbits are all singletons; every later level is too.
    fn first_discrete_level(&self) -> usize {
        self.levels
            .iter()
            .enumerate()
            .position(|(i, l)| l.partition.len() == self.n - i)
            .unwrap_or(self.n)
    }

    /// Bit-exact serialization; `color_width` is carried outside (in the description header).
    ///
    /// First `k`, the first all-singleton level, in `bit_length(n)` bits. For
    /// each level `i < k`: the block index of every vertex of `i..n` (fixed
    /// width), then for `i >= 1` one neighbor flag per block. Levels from `k`
    /// on store only their flags, one per vertex. Finally one
    /// `color_width`-bit color per level-0 block.
    pub fn to_bits(&self, color_width: u32) -> BitVec<u8, Msb0> {
        let mut out = BitVec::new();
        if self.n == 0 {
            return out;
        }
        let w = self.index_width();
        let k = self.first_discrete_level();
        push_uint(&mut out, k as u64, bit_length(self.n));
        for (i, level) in self.levels.iter().enumerate() {
            if i < k {
                for v in i..self.n {
                    let idx = level.partition.block_of(v).expect("partition covers its domain");
                    push_uint(&mut out, idx as u64, w);
                }
            }
            out.extend(level.neighbor_flags.iter().copied());
        }
        for &c in &self.orbit_colors {
            push_uint(&mut out, u64::from(c), color_width as usize);
        }
        out
    }

    /// Number of bits [`to_bits`](Self::to_bits) produces.
    pub fn serialized_bits(&self, color_width: u32) -> usize {
        if self.n == 0 {
            return 0;
        }
        let n = self.n;
        let k = self.first_discrete_level();
        let indices: usize = (0..k).map(|i| n - i).sum::<usize>() * self.index_width();
        let flags: usize = self.levels.iter().map(|l| l.neighbor_flags.len()).sum();
        bit_length(n) + indices + flags + self.orbit_colors.len() * color_width as usize
    }

    /// Inverse of [`to_bits`](Self::to_bits); returns the data and the number of bits read.
    pub fn from_bits(bits: &BitSlice<u8, Msb0>, n: usize, color_width: u32) -> Result<(AuxData, usize)> {
        let mut pos = 0;
        if n == 0 {
            return Ok((AuxData::new(0, Vec::new(), Vec::new())?, 0));
        }
        let w = bit_length(n.saturating_sub(1).max(1));
        let k = read_uint(bits, &mut pos, bit_length(n))? as usize;
        if k >= n {
            return Err(Error::Format(format!("first discrete level {k} out of range")));
        }
        let mut levels = Vec::with_capacity(n);
        for i in 0..n {
            let blocks: Vec<Vec<usize>> = if i < k {
                let mut blocks: Vec<Vec<usize>> = Vec::new();
                for v in i..n {
                    let idx = read_uint(bits, &mut pos, w)? as usize;
                    // block indices follow first appearance order
                    if idx > blocks.len() {
                        return Err(Error::Format(format!("level {i}: block index {idx} out of order")));
                    }
                    if idx == blocks.len() {
                        blocks.push(Vec::new());
                    }
                    blocks[idx].push(v);
                }
                blocks
            } else {
                (i..n).map(|v| vec![v]).collect()
            };
            let flag_count = if i == 0 { 0 } else { blocks.len() };
            let mut neighbor_flags = Vec::with_capacity(flag_count);
            for _ in 0..flag_count {
                neighbor_flags.push(read_uint(bits, &mut pos, 1)? == 1);
            }
            levels.push(AuxLevel { partition: OrbitPartition::from_blocks(blocks), neighbor_flags });
        }
        let color_count = levels.first().map_or(0, |l| l.partition.len());
        let mut orbit_colors = Vec::with_capacity(color_count);
        for _ in 0..color_count {
            orbit_colors.push(read_uint(bits, &mut pos, color_width as usize)? as u32);
        }
        let aux = AuxData::new(n, levels, orbit_colors)?;
        if aux.first_discrete_level() != k {
            return Err(Error::Format("stored discrete level is not the first one".into()));
        }
        Ok((aux, pos))
    }
}

pub(crate) fn bit_length(v: usize) -> usize {
    (usize::BITS - v.leading_zeros()) as usize
}

pub(crate) fn push_uint(out: &mut BitVec<u8, Msb0>, value: u64, width: usize) {
    debug_assert!(width == 64 || value >> width == 0, "{value} does not fit in {width} bits");
    for k in (0..width).rev() {
        out.push(value >> k & 1 == 1);
    }
}

pub(crate) fn read_uint(bits: &BitSlice<u8, Msb0>, pos: &mut usize, width: usize) -> Result<u64> {
    if *pos + width > bits.len() {
        return Err(Error::Format(format!("truncated: need {width} bits at {}", *pos)));
    }
    let mut v = 0u64;
    for k in 0..width {
        v = v << 1 | u64::from(bits[*pos + k]);
    }
    *pos += width;
    Ok(v)
}
