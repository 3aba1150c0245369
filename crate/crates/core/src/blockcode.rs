//! Blocked descriptions of target strings.
//!
//! A target string is the concatenation of `t` copies of one or two base
//! graphs. Its description stores the base graph(s) once and packs the
//! per-copy codes `b` at a time into fixed-width blocks, so any bit of the
//! padded string can be recomputed from the header, one block and one base
//! record. The bit layout is documented in `FORMAT.md` next to this crate.

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;

use bitvec::prelude::*;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::codec::{bit_length, build_aux, decode_value, push_uint, read_uint, AuxData};
use crate::error::{Error, Result};
use crate::graph::{ColoredGraph, Graph, Structure};
use crate::num::{bits_for_range, factorial, log2_big};
use crate::perm::Permutation;
use crate::ranks::{radix_digit, radix_pack};
use crate::BigNat;

pub const HEADER_BITS: usize = 64;

pub type Bits = BitVec<u8, Msb0>;

/// What the per-copy numbers are.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeMode {
    /// Lehmer rank of a permutation, in `[0, n!)`.
    Rank,
    /// Coset code, in `[0, n!/|Aut(G)|)`.
    Coset,
}

/// A base graph as stored in a description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Base {
    /// The graph itself; copies are named by permutation rank.
    Rank(ColoredGraph),
    /// Decoder side information only; copies are named by coset code.
    Coset(AuxData),
}

impl Base {
    pub fn rank<S: Structure>(g: &S) -> Self {
        Base::Rank(g.to_colored())
    }

    pub fn coset<S: Structure>(g: &S) -> Result<Self> {
        Ok(Base::Coset(build_aux(g)?))
    }

    pub fn mode(&self) -> CodeMode {
        match self {
            Base::Rank(_) => CodeMode::Rank,
            Base::Coset(_) => CodeMode::Coset,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Base::Rank(g) => g.n(),
            Base::Coset(aux) => aux.n(),
        }
    }

    pub fn color_width(&self) -> u32 {
        match self {
            Base::Rank(g) => g.color_width(),
            Base::Coset(aux) => aux.color_width(),
        }
    }

    /// Number of distinct codes, `m`.
    pub fn range(&self) -> Result<BigNat> {
        match self {
            Base::Rank(g) => factorial(g.n()),
            Base::Coset(aux) => aux.code_range(),
        }
    }

    /// The copy named by `code`.
    pub fn segment(&self, code: &BigNat) -> Result<ColoredGraph> {
        match self {
            Base::Rank(g) => Permutation::lehmer_unrank(g.n(), code)?.apply_to_colored(g),
            Base::Coset(aux) => decode_value(aux, code),
        }
    }

    fn record_len(&self, cw: u32) -> usize {
        match self {
            Base::Rank(g) => rank_record_len(g.n(), cw),
            Base::Coset(aux) => aux.serialized_bits(cw),
        }
    }

    fn write_record(&self, out: &mut Bits, cw: u32) {
        match self {
            Base::Rank(g) => {
                let n = g.n();
                for u in 0..n {
                    for v in (u + 1)..n {
                        out.push(g.graph().has_edge(u, v));
                    }
                }
                for &c in g.colors() {
                    push_uint(out, u64::from(c), cw as usize);
                }
            }
            Base::Coset(aux) => out.extend_from_bitslice(&aux.to_bits(cw)),
        }
    }

    fn read_record(bits: &BitSlice<u8, Msb0>, mode: CodeMode, n: usize, cw: u32) -> Result<(Base, usize)> {
        match mode {
            CodeMode::Rank => {
                let mut pos = 0;
                let mut g = Graph::empty(n);
                for u in 0..n {
                    for v in (u + 1)..n {
                        if read_uint(bits, &mut pos, 1)? == 1 {
                            g.add_edge(u, v)?;
                        }
                    }
                }
                let mut colors = Vec::with_capacity(n);
                for _ in 0..n {
                    colors.push(read_uint(bits, &mut pos, cw as usize)? as u32);
                }
                Ok((Base::Rank(ColoredGraph::new(g, colors)?), pos))
            }
            CodeMode::Coset => {
                let (aux, used) = AuxData::from_bits(bits, n, cw)?;
                Ok((Base::Coset(aux), used))
            }
        }
    }
}

fn rank_record_len(n: usize, cw: u32) -> usize {
    n * n.saturating_sub(1) / 2 + n * cw as usize
}

/// The fixed 64-bit header: mode byte, `b` (8 bits), `n` (16 bits), `t` (32 bits).
///
/// The mode byte holds the code mode in bit 0, the mixed flag in bit 1 and
/// the color width in bits 2..8.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Header {
    pub mode: CodeMode,
    pub mixed: bool,
    pub color_width: u32,
    pub b: usize,
    pub n: usize,
    pub t: usize,
}

impl Header {
    fn validate(&self) -> Result<()> {
        if self.b == 0 || self.b > 255 {
            return Err(Error::range(format!("block size {} not in 1..=255", self.b)));
        }
        if self.n > u16::MAX as usize {
            return Err(Error::range(format!("n = {} does not fit the header", self.n)));
        }
        if self.t > u32::MAX as usize {
            return Err(Error::range(format!("t = {} does not fit the header", self.t)));
        }
        if self.color_width > 63 {
            return Err(Error::range(format!("color width {} does not fit the header", self.color_width)));
        }
        Ok(())
    }

    fn write(&self, out: &mut Bits) {
        let mode = u64::from(self.mode == CodeMode::Coset) | u64::from(self.mixed) << 1 | u64::from(self.color_width) << 2;
        push_uint(out, mode, 8);
        push_uint(out, self.b as u64, 8);
        push_uint(out, self.n as u64, 16);
        push_uint(out, self.t as u64, 32);
    }

    fn read(bits: &BitSlice<u8, Msb0>) -> Result<Header> {
        let mut pos = 0;
        let mode = read_uint(bits, &mut pos, 8)?;
        let header = Header {
            mode: if mode & 1 == 1 { CodeMode::Coset } else { CodeMode::Rank },
            mixed: mode & 2 == 2,
            color_width: (mode >> 2) as u32,
            b: read_uint(bits, &mut pos, 8)? as usize,
            n: read_uint(bits, &mut pos, 16)? as usize,
            t: read_uint(bits, &mut pos, 32)? as usize,
        };
        header.validate()?;
        Ok(header)
    }

    /// Number of blocks `t'`.
    pub fn t_prime(&self) -> usize {
        self.t.div_ceil(self.b)
    }

    pub fn segment_bits(&self) -> usize {
        segment_bits(self.n, self.color_width)
    }

    fn base_count(&self) -> usize {
        if self.mixed {
            2
        } else {
            1
        }
    }

    fn has_directory(&self) -> bool {
        self.mixed && self.mode == CodeMode::Coset
    }
}

/// Bits per copy in a target string: the adjacency matrix row by row, then
/// each vertex color in `color_width` bits.
pub fn segment_bits(n: usize, color_width: u32) -> usize {
    n * n + n * color_width as usize
}

pub fn push_segment<S: Structure>(out: &mut Bits, g: &S, color_width: u32) {
    let n = g.n();
    for u in 0..n {
        out.extend(g.graph().row(u).iter().copied());
    }
    for v in 0..n {
        push_uint(out, u64::from(g.color(v)), color_width as usize);
    }
}

fn segment_bit(g: &ColoredGraph, color_width: u32, offset: usize) -> bool {
    let n = g.n();
    if offset < n * n {
        g.graph().has_edge(offset / n, offset % n)
    } else {
        let k = offset - n * n;
        let cw = color_width as usize;
        let (v, j) = (k / cw, k % cw);
        g.color(v) >> (cw - 1 - j) & 1 == 1
    }
}

/// A bit of the padded string, or the end marker past its length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum XBit {
    Bit(bool),
    End,
}

impl fmt::Display for XBit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XBit::Bit(false) => f.write_str("0"),
            XBit::Bit(true) => f.write_str("1"),
            XBit::End => f.write_str("*"),
        }
    }
}

/// `x`, the concatenated copies, and its padded form `x'`.
///
/// `x'` extends `x` to the next power of two with the complement of the last
/// bit of `x`, so the end of `x` can be located from `x'` alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetString {
    x: Bits,
    segment_bits: usize,
}

impl TargetString {
    pub fn from_segments<S: Structure>(segments: &[S], color_width: u32) -> Self {
        let n = segments.first().map_or(0, |g| g.n());
        let mut x = Bits::with_capacity(segments.len() * segment_bits(n, color_width));
        for g in segments {
            assert_eq!(g.n(), n, "segments must have equal order");
            push_segment(&mut x, g, color_width);
        }
        TargetString { x, segment_bits: segment_bits(n, color_width) }
    }

    pub fn x(&self) -> &BitSlice<u8, Msb0> {
        &self.x
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn segment_bits(&self) -> usize {
        self.segment_bits
    }

    pub fn padded_len(&self) -> usize {
        padded_len(self.x.len())
    }

    pub fn bit(&self, i: usize) -> XBit {
        if i < self.x.len() {
            XBit::Bit(self.x[i])
        } else if i < self.padded_len() {
            XBit::Bit(!self.x[self.x.len() - 1])
        } else {
            XBit::End
        }
    }

    pub fn x_prime(&self) -> Bits {
        let mut out = self.x.clone();
        if let Some(last) = self.x.last().map(|b| *b) {
            out.resize(self.padded_len(), !last);
        }
        out
    }
}

fn padded_len(len: usize) -> usize {
    if len == 0 {
        0
    } else {
        len.next_power_of_two()
    }
}

/// Regions of a serialized description, as bit ranges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub header: Range<usize>,
    /// Record lengths and code ranges of both bases; only in mixed coset mode.
    pub directory: Range<usize>,
    pub bases: Vec<Range<usize>>,
    pub w: Option<Range<usize>>,
    pub blocks: Vec<Range<usize>>,
}

/// Bit ranges read while answering one query.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AccessLog {
    pub reads: Vec<Range<usize>>,
}

impl AccessLog {
    pub fn total_bits(&self) -> usize {
        self.reads.iter().map(|r| r.len()).sum()
    }
}

/// A serialized description `(header, bases, [w], blocks)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockedDescription {
    header: Header,
    bases: Vec<Base>,
    ranges: Vec<BigNat>,
    w: Option<Bits>,
    blocks: Vec<BigNat>,
    bits: Bits,
    layout: Layout,
}

/// Description of `t` copies of one base, one code per copy.
pub fn describe_single(base: &Base, codes: &[BigNat], b: usize) -> Result<BlockedDescription> {
    describe_single_with_width(base, codes, b, base.color_width())
}

/// As [`describe_single`], writing colors `color_width` bits wide.
pub fn describe_single_with_width(base: &Base, codes: &[BigNat], b: usize, color_width: u32) -> Result<BlockedDescription> {
    if color_width < base.color_width() {
        return Err(Error::range(format!("color width {color_width} is too narrow for the base")));
    }
    let header = Header { mode: base.mode(), mixed: false, color_width, b, n: base.n(), t: codes.len() };
    BlockedDescription::assemble(header, vec![base.clone()], None, codes)
}

/// Description of `t` copies drawn from two bases: copy `i` is a copy of base `w[i]`.
pub fn describe_mixed(base0: &Base, base1: &Base, w: &BitSlice<u8, Msb0>, codes: &[BigNat], b: usize) -> Result<BlockedDescription> {
    if base0.mode() != base1.mode() {
        return Err(Error::range("both bases must use the same code mode"));
    }
    if base0.n() != base1.n() {
        return Err(Error::Dimension { expected: base0.n(), found: base1.n() });
    }
    if w.len() != codes.len() {
        return Err(Error::Dimension { expected: codes.len(), found: w.len() });
    }
    let header = Header {
        mode: base0.mode(),
        mixed: true,
        color_width: base0.color_width().max(base1.color_width()),
        b,
        n: base0.n(),
        t: codes.len(),
    };
    BlockedDescription::assemble(header, vec![base0.clone(), base1.clone()], Some(w.to_bitvec()), codes)
}

/// Block widths by `(members, members from base 1)`.
struct WidthTable<'a> {
    ranges: &'a [BigNat],
    cache: HashMap<(usize, usize), usize>,
}

impl<'a> WidthTable<'a> {
    fn new(ranges: &'a [BigNat]) -> Self {
        WidthTable { ranges, cache: HashMap::new() }
    }

    fn width(&mut self, members: usize, ones: usize) -> usize {
        let ranges = self.ranges;
        *self.cache.entry((members, ones)).or_insert_with(|| {
            let m0 = ranges[0].pow((members - ones) as u32);
            let m1 = if ones == 0 { BigNat::one() } else { ranges[1].pow(ones as u32) };
            bits_for_range(&(m0 * m1)) as usize
        })
    }
}

fn block_members(t: usize, b: usize, j: usize) -> Range<usize> {
    j * b..(j * b + b).min(t)
}

fn ones_in(w: Option<&BitSlice<u8, Msb0>>, r: Range<usize>) -> usize {
    w.map_or(0, |w| w[r].count_ones())
}

/// Total bits of the block section for these ranges and indicator string.
fn blocks_bits(ranges: &[BigNat], w: Option<&BitSlice<u8, Msb0>>, t: usize, b: usize) -> usize {
    let mut table = WidthTable::new(ranges);
    (0..t.div_ceil(b))
        .map(|j| {
            let r = block_members(t, b, j);
            let ones = ones_in(w, r.clone());
            table.width(r.len(), ones)
        })
        .sum()
}

/// Field widths of a directory entry: record length, then the bit length of the code range.
fn directory_widths(n: usize, cw: u32) -> (usize, usize) {
    let max_record = bit_length(n) + n * (n + 1) / 2 * bit_length(n.saturating_sub(1).max(1)) + n * n.saturating_sub(1) / 2 + n * cw as usize;
    let max_range_bits = factorial::<BigNat>(n).expect("BigNat never overflows").bits() as usize;
    (bit_length(max_record), bit_length(max_range_bits))
}

fn directory_bits(ranges: &[BigNat], n: usize, cw: u32) -> usize {
    let (len_w, range_w) = directory_widths(n, cw);
    ranges.iter().map(|m| len_w + range_w + m.bits() as usize).sum()
}

/// Length in bits of `describe_single(base, codes, b)` for any `t` codes, without building it.
pub fn single_bits(base: &Base, t: usize, b: usize) -> Result<usize> {
    single_bits_with_width(base, t, b, base.color_width())
}

pub fn single_bits_with_width(base: &Base, t: usize, b: usize, color_width: u32) -> Result<usize> {
    let ranges = [base.range()?];
    Ok(HEADER_BITS + base.record_len(color_width) + blocks_bits(&ranges, None, t, b))
}

/// Length in bits of `describe_mixed(base0, base1, w, codes, b)`, without building it.
pub fn mixed_bits(base0: &Base, base1: &Base, w: &BitSlice<u8, Msb0>, b: usize) -> Result<usize> {
    let ranges = [base0.range()?, base1.range()?];
    let cw = base0.color_width().max(base1.color_width());
    let directory = if base0.mode() == CodeMode::Coset { directory_bits(&ranges, base0.n(), cw) } else { 0 };
    Ok(HEADER_BITS
        + directory
        + base0.record_len(cw)
        + base1.record_len(cw)
        + w.len()
        + blocks_bits(&ranges, Some(w), w.len(), b))
}

fn push_big(out: &mut Bits, value: &BigNat, width: usize) {
    debug_assert!(value.bits() as usize <= width);
    for k in (0..width as u64).rev() {
        out.push(value.bit(k));
    }
}

fn read_big(bits: &BitSlice<u8, Msb0>) -> BigNat {
    let mut acc = BigNat::zero();
    for chunk in bits.chunks(32).filter(|c| !c.is_empty()) {
        acc = (acc << chunk.len()) + BigNat::from(chunk.load_be::<u32>());
    }
    acc
}

impl BlockedDescription {
    fn assemble(header: Header, bases: Vec<Base>, w: Option<Bits>, codes: &[BigNat]) -> Result<Self> {
        header.validate()?;
        let ranges: Vec<BigNat> = bases.iter().map(Base::range).collect::<Result<_>>()?;
        let base_of = |i: usize| w.as_ref().map_or(0, |w| usize::from(w[i]));
        for (i, code) in codes.iter().enumerate() {
            let m = &ranges[base_of(i)];
            if code >= m {
                return Err(Error::range(format!("code {code} of copy {} is not below {m}", i + 1)));
            }
        }
        let (b, t) = (header.b, header.t);
        let blocks: Vec<BigNat> = (0..header.t_prime())
            .map(|j| {
                let r = block_members(t, b, j);
                let radices: Vec<BigNat> = r.clone().map(|i| ranges[base_of(i)].clone()).collect();
                radix_pack(&codes[r], &radices)
            })
            .collect::<Result<_>>()?;

        let cw = header.color_width;
        let mut bits = Bits::new();
        header.write(&mut bits);
        let header_range = 0..bits.len();
        let dir_start = bits.len();
        if header.has_directory() {
            let (len_w, range_w) = directory_widths(header.n, cw);
            for (base, m) in bases.iter().zip(&ranges) {
                push_uint(&mut bits, base.record_len(cw) as u64, len_w);
                push_uint(&mut bits, m.bits(), range_w);
                push_big(&mut bits, m, m.bits() as usize);
            }
        }
        let directory = dir_start..bits.len();
        let mut base_ranges = Vec::new();
        for base in &bases {
            let start = bits.len();
            base.write_record(&mut bits, cw);
            base_ranges.push(start..bits.len());
        }
        let w_range = w.as_ref().map(|w| {
            let start = bits.len();
            bits.extend_from_bitslice(w);
            start..bits.len()
        });
        let mut table = WidthTable::new(&ranges);
        let mut block_ranges = Vec::with_capacity(blocks.len());
        for (j, block) in blocks.iter().enumerate() {
            let r = block_members(t, b, j);
            let width = table.width(r.len(), ones_in(w.as_deref(), r));
            let start = bits.len();
            push_big(&mut bits, block, width);
            block_ranges.push(start..bits.len());
        }
        let layout = Layout { header: header_range, directory, bases: base_ranges, w: w_range, blocks: block_ranges };
        let desc = BlockedDescription { header, bases, ranges, w, blocks, bits, layout };
        debug_assert_eq!(desc.bits.len(), desc.planned_bits()?);
        Ok(desc)
    }

    fn planned_bits(&self) -> Result<usize> {
        match (&self.bases[..], &self.w) {
            ([base], None) => single_bits_with_width(base, self.header.t, self.header.b, self.header.color_width),
            ([b0, b1], Some(w)) => mixed_bits(b0, b1, w, self.header.b),
            _ => unreachable!("one base without w or two with w"),
        }
    }

    pub fn header(&self) -> &Header {
        &self.header
    }

    pub fn bases(&self) -> &[Base] {
        &self.bases
    }

    /// Code range of each base.
    pub fn ranges(&self) -> &[BigNat] {
        &self.ranges
    }

    pub fn w(&self) -> Option<&BitSlice<u8, Msb0>> {
        self.w.as_deref()
    }

    pub fn blocks(&self) -> &[BigNat] {
        &self.blocks
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn bits(&self) -> &BitSlice<u8, Msb0> {
        &self.bits
    }

    /// Exact serialized length in bits.
    pub fn description_bits(&self) -> usize {
        self.bits.len()
    }

    /// The per-copy codes, unpacked from the blocks.
    pub fn codes(&self) -> Result<Vec<BigNat>> {
        let (t, b) = (self.header.t, self.header.b);
        let mut out = Vec::with_capacity(t);
        for (j, block) in self.blocks.iter().enumerate() {
            let radices = self.radices(block_members(t, b, j));
            out.extend(crate::ranks::radix_unpack(block, &radices)?);
        }
        Ok(out)
    }

    fn radices(&self, members: Range<usize>) -> Vec<BigNat> {
        members
            .map(|i| self.ranges[self.w.as_ref().map_or(0, |w| usize::from(w[i]))].clone())
            .collect()
    }

    /// The copies this description names, in order.
    pub fn segments(&self) -> Result<Vec<ColoredGraph>> {
        let codes = self.codes()?;
        codes
            .iter()
            .enumerate()
            .map(|(i, c)| self.bases[self.w.as_ref().map_or(0, |w| usize::from(w[i]))].segment(c))
            .collect()
    }

    /// The target string, rebuilt in full.
    pub fn target(&self) -> Result<TargetString> {
        let segs = self.segments()?;
        let mut ts = TargetString::from_segments(&segs, self.header.color_width);
        ts.segment_bits = self.header.segment_bits();
        Ok(ts)
    }

    /// `2n² + Σ log2 m + t' + 64` for one base; `4n² + t + Σ log2 m_{w_i} + t' + 64` for two.
    pub fn length_bound(&self) -> f64 {
        let h = &self.header;
        let n2 = (h.n * h.n) as f64;
        let logs: Vec<f64> = self.ranges.iter().map(log2_big).collect();
        let ones = self.w.as_ref().map_or(0, |w| w.count_ones());
        let sum_log = (h.t - ones) as f64 * logs[0] + ones as f64 * logs.get(1).copied().unwrap_or(0.0);
        let base_allowance = if h.mixed { 4.0 * n2 + h.t as f64 } else { 2.0 * n2 };
        base_allowance + sum_log + h.t_prime() as f64 + HEADER_BITS as f64
    }

    /// Bit `i` of `x'` (0-based), or [`XBit::End`] past its end.
    pub fn reconstruct_bit(&self, i: usize) -> XBit {
        self.reconstruct_bit_logged(i, &mut AccessLog::default())
    }

    /// As [`reconstruct_bit`](Self::reconstruct_bit), recording every bit range read.
    ///
    /// Only the serialized bits are consulted, never the parsed fields.
    pub fn reconstruct_bit_logged(&self, i: usize, log: &mut AccessLog) -> XBit {
        let mut reader = Reader { bits: &self.bits, log };
        let header = Header::read(reader.read(0..HEADER_BITS)).expect("description was validated");
        let x_len = header.t * header.segment_bits();
        if i >= padded_len(x_len) {
            return XBit::End;
        }
        if i >= x_len {
            return XBit::Bit(!x_bit(&mut reader, &header, x_len - 1));
        }
        XBit::Bit(x_bit(&mut reader, &header, i))
    }

    /// Byte form: the bits, zero-padded to a whole byte.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut bits = self.bits.clone();
        bits.set_uninitialized(false);
        bits.into_vec()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let all = BitSlice::<u8, Msb0>::from_slice(bytes);
        let header = Header::read(all)?;
        let mut pos = HEADER_BITS;
        let cw = header.color_width;
        let mut dir_lens = Vec::new();
        if header.has_directory() {
            let (len_w, range_w) = directory_widths(header.n, cw);
            for _ in 0..2 {
                let len = read_uint(all, &mut pos, len_w)? as usize;
                let width = read_uint(all, &mut pos, range_w)? as usize;
                if pos + width > all.len() {
                    return Err(Error::Format("truncated directory".into()));
                }
                let m = read_big(&all[pos..pos + width]);
                pos += width;
                dir_lens.push((len, m));
            }
        }
        let mut bases = Vec::new();
        for k in 0..header.base_count() {
            let (base, used) = Base::read_record(&all[pos..], header.mode, header.n, cw)?;
            if let Some((len, m)) = dir_lens.get(k) {
                if *len != used || m != &base.range()? {
                    return Err(Error::Format(format!("directory entry {k} disagrees with its record")));
                }
            }
            pos += used;
            bases.push(base);
        }
        let w = if header.mixed {
            if pos + header.t > all.len() {
                return Err(Error::Format("truncated indicator string".into()));
            }
            let w = all[pos..pos + header.t].to_bitvec();
            pos += header.t;
            Some(w)
        } else {
            None
        };
        let ranges: Vec<BigNat> = bases.iter().map(Base::range).collect::<Result<_>>()?;
        let mut table = WidthTable::new(&ranges);
        let mut codes = Vec::with_capacity(header.t);
        for j in 0..header.t_prime() {
            let r = block_members(header.t, header.b, j);
            let width = table.width(r.len(), ones_in(w.as_deref(), r.clone()));
            if pos + width > all.len() {
                return Err(Error::Format(format!("truncated block {}", j + 1)));
            }
            let block = read_big(&all[pos..pos + width]);
            pos += width;
            let radices: Vec<BigNat> = r.map(|i| ranges[w.as_ref().map_or(0, |w| usize::from(w[i]))].clone()).collect();
            codes.extend(crate::ranks::radix_unpack(&block, &radices).map_err(|e| Error::Format(e.to_string()))?);
        }
        if all.len() - pos >= 8 || all[pos..].any() {
            return Err(Error::Format("unexpected trailing bits".into()));
        }
        let desc = BlockedDescription::assemble(header, bases, w, &codes)?;
        if desc.bits.len() != pos {
            return Err(Error::Format("description is not in canonical form".into()));
        }
        Ok(desc)
    }
}

struct Reader<'a> {
    bits: &'a BitSlice<u8, Msb0>,
    log: &'a mut AccessLog,
}

impl Reader<'_> {
    fn read(&mut self, r: Range<usize>) -> &BitSlice<u8, Msb0> {
        self.log.reads.push(r.clone());
        &self.bits[r]
    }

    fn uint(&mut self, pos: &mut usize, width: usize) -> u64 {
        let r = *pos..*pos + width;
        *pos += width;
        let bits = self.read(r);
        if bits.is_empty() {
            0
        } else {
            bits.load_be::<u64>()
        }
    }
}

fn x_bit(reader: &mut Reader<'_>, h: &Header, i: usize) -> bool {
    let seg = h.segment_bits();
    let (k, offset) = (i / seg, i % seg);
    let (j, slot) = (k / h.b, k % h.b);
    let members = block_members(h.t, h.b, j);
    let cw = h.color_width;

    // code ranges and record positions
    let mut pos = HEADER_BITS;
    let mut record_lens = Vec::new();
    let ranges: Vec<BigNat> = if h.has_directory() {
        let (len_w, range_w) = directory_widths(h.n, cw);
        (0..2)
            .map(|_| {
                record_lens.push(reader.uint(&mut pos, len_w) as usize);
                let width = reader.uint(&mut pos, range_w) as usize;
                let m = read_big(reader.read(pos..pos + width));
                pos += width;
                m
            })
            .collect()
    } else {
        vec![factorial(h.n).expect("BigNat never overflows"); h.base_count()]
    };
    let mut base_starts = Vec::new();
    let mut ranges = ranges;
    if h.mode == CodeMode::Rank {
        for _ in 0..h.base_count() {
            base_starts.push(pos);
            pos += rank_record_len(h.n, cw);
        }
    } else if h.mixed {
        for len in &record_lens {
            base_starts.push(pos);
            pos += len;
        }
    } else {
        // a single coset record is read anyway; it gives its own length and range
        let (base, used) = Base::read_record(reader.read(pos..reader.bits.len()), h.mode, h.n, cw)
            .expect("description was validated");
        let log = reader.log.reads.last_mut().expect("just read");
        log.end = pos + used;
        base_starts.push(pos);
        ranges = vec![base.range().expect("BigNat never overflows")];
        pos += used;
    }

    let (which, blocks_start) = if h.mixed {
        let w_start = pos;
        let which: Vec<usize> = reader.read(w_start + members.start..w_start + members.end).iter().map(|b| usize::from(*b)).collect();
        (which, w_start + h.t)
    } else {
        (vec![0; members.len()], pos)
    };
    let mut table = WidthTable::new(&ranges);
    let block_start = if !h.mixed || ranges[0] == ranges[1] {
        blocks_start + j * table.width(h.b, 0)
    } else {
        let prefix = reader.read(pos..pos + j * h.b).to_bitvec();
        blocks_start + (0..j).map(|jj| table.width(h.b, prefix[jj * h.b..(jj + 1) * h.b].count_ones())).sum::<usize>()
    };
    let ones = which.iter().sum();
    let width = table.width(members.len(), ones);
    let block = read_big(reader.read(block_start..block_start + width));
    let radices: Vec<BigNat> = which.iter().map(|&k| ranges[k].clone()).collect();
    let code = radix_digit(&block, &radices, slot).expect("block radices are consistent");

    let k_base = which[slot];
    let start = base_starts[k_base];
    let (base, used) = Base::read_record(reader.read(start..reader.bits.len()), h.mode, h.n, cw).expect("description was validated");
    reader.log.reads.last_mut().expect("just read").end = start + used;
    let segment = base.segment(&code).expect("codes are below their ranges");
    segment_bit(&segment, cw, offset)
}

/// `ceil(log2 m^b)` for a block of `b` codes below `m`.
pub fn full_block_bits(m: &BigNat, b: usize) -> usize {
    bits_for_range(&m.pow(b as u32)) as usize
}
