//! Randomized reductions driven by a description-length oracle.
//!
//! A trial draws `t` random copies of two graphs, each copy from `G0` or `G1`
//! as a fair coin decides, and asks an oracle how short a description of the
//! concatenation can be. When the graphs are rigid and not isomorphic the
//! coin flips are incompressible, so the string needs about `t(s+1)` bits
//! with `s = log2 n!`; when they are isomorphic, `ts` bits plus lower-order
//! terms suffice. [`rigid_noniso_test`] thresholds this gap, [`gi_test`]
//! compares mixed against unmixed strings, and [`ga_test`] finds
//! automorphisms by individualizing vertices.

use num_bigint::RandBigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::blockcode::{
    describe_mixed, describe_single_with_width, mixed_bits, single_bits_with_width, Base, Bits, CodeMode, TargetString,
    HEADER_BITS,
};
use crate::codec::CosetEncoder;
use crate::error::{Error, Result};
use crate::graph::{individualize, ColoredGraph, Graph, Structure};
use crate::group::find_isomorphism;
use crate::num::{factorial, log2_big, log2_factorial};
use crate::perm::Permutation;
use crate::BigNat;

/// Sample sizes and repetition for the reductions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReductionParams {
    /// Copies per sample.
    pub t: usize,
    /// Codes per block.
    pub b: usize,
    /// Subtracted from `t(s+1)` to form the threshold; `4n log2 n` by default.
    pub theta_slack: f64,
    /// Independent samples per query; the majority decides.
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// `t = 3n^5`.
    Paper,
    /// `t = max(256, 8 n^2 ceil(log2 n))`.
    Desk,
}

pub const DEFAULT_B: usize = 3;
pub const DEFAULT_TRIALS: usize = 3;

fn log2_ceil(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

impl ReductionParams {
    pub fn preset(preset: Preset, n: usize) -> Self {
        let t = match preset {
            Preset::Paper => 3 * n.pow(5),
            Preset::Desk => (8 * n * n * log2_ceil(n)).max(256),
        };
        ReductionParams { t, b: DEFAULT_B, theta_slack: default_slack(n), trials: DEFAULT_TRIALS, seed: 0 }
    }

    pub fn desk(n: usize) -> Self {
        Self::preset(Preset::Desk, n)
    }

    pub fn with_t(mut self, t: usize) -> Self {
        self.t = t;
        self
    }

    pub fn with_b(mut self, b: usize) -> Self {
        self.b = b;
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.t == 0 || self.b == 0 || self.trials == 0 {
            return Err(Error::range("t, b and trials must be positive"));
        }
        Ok(())
    }
}

/// `4 n log2 n`.
pub fn default_slack(n: usize) -> f64 {
    if n <= 1 {
        0.0
    } else {
        4.0 * n as f64 * (n as f64).log2()
    }
}

fn decimal_opt<S: Serializer>(v: &[Option<BigNat>; 2], s: S) -> std::result::Result<S::Ok, S::Error> {
    let strs: Vec<Option<String>> = v.iter().map(|o| o.as_ref().map(ToString::to_string)).collect();
    strs.serialize(s)
}

/// Claimed automorphism group orders `a_0, a_1`.
///
/// With a hint the threshold uses `s = min_i log2(n!/a_i)` instead of `log2 n!`,
/// which lets the test run on non-rigid pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GroupSizeHint {
    #[serde(serialize_with = "decimal_opt")]
    pub orders: [Option<BigNat>; 2],
    /// Check the claims against the brute-force orders.
    pub verify: bool,
}

/// One sample: coin flips `w`, permutations, and the resulting string.
#[derive(Clone, Debug)]
pub struct TrialSample {
    pub w: Bits,
    pub perms: Vec<Permutation>,
    pub target: TargetString,
}

impl TrialSample {
    pub fn t(&self) -> usize {
        self.perms.len()
    }
}

/// Uniform permutation of `0..n`.
pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Permutation {
    if let Ok(total) = factorial::<u64>(n) {
        let rank = rng.gen_range(0..total);
        return Permutation::lehmer_unrank(n, &rank).expect("rank is below n!");
    }
    let total: BigNat = factorial(n).expect("BigNat never overflows");
    let rank = rng.gen_biguint_below(&total);
    Permutation::lehmer_unrank(n, &rank).expect("rank is below n!")
}

/// Draws `t` copies, copy `j` being `π_j(G_{w_j})`.
pub fn sample_x<S: Structure, T: Structure, R: Rng + ?Sized>(g0: &S, g1: &T, t: usize, rng: &mut R) -> Result<TrialSample> {
    sample_x_forced(g0, g1, t, rng, None)
}

/// As [`sample_x`], with every `w_j` fixed to `forced` when given.
pub fn sample_x_forced<S: Structure, T: Structure, R: Rng + ?Sized>(
    g0: &S,
    g1: &T,
    t: usize,
    rng: &mut R,
    forced: Option<bool>,
) -> Result<TrialSample> {
    let n = g0.n();
    if g1.n() != n {
        return Err(Error::Dimension { expected: n, found: g1.n() });
    }
    let bases = [g0.to_colored(), g1.to_colored()];
    let cw = bases[0].color_width().max(bases[1].color_width());
    let mut w = Bits::with_capacity(t);
    let mut perms = Vec::with_capacity(t);
    let mut segments = Vec::with_capacity(t);
    for _ in 0..t {
        let bit = forced.unwrap_or_else(|| rng.gen());
        let p = random_permutation(n, rng);
        segments.push(p.apply_to_colored(&bases[usize::from(bit)])?);
        w.push(bit);
        perms.push(p);
    }
    let target = TargetString::from_segments(&segments, cw);
    Ok(TrialSample { w, perms, target })
}

/// Everything the oracle is allowed to precompute about the two base graphs.
#[derive(Clone, Debug)]
pub struct PairContext {
    graphs: [ColoredGraph; 2],
    rank: [Base; 2],
    coset: [(CosetEncoder, Base); 2],
    /// `σ` with `σ(G0) = G1`, if the graphs are isomorphic.
    iso: Option<Permutation>,
}

impl PairContext {
    pub fn new<S: Structure, T: Structure>(g0: &S, g1: &T) -> Result<Self> {
        if g0.n() != g1.n() {
            return Err(Error::Dimension { expected: g0.n(), found: g1.n() });
        }
        let graphs = [g0.to_colored(), g1.to_colored()];
        let rank = [Base::rank(&graphs[0]), Base::rank(&graphs[1])];
        let prepare = |g: &ColoredGraph| -> Result<(CosetEncoder, Base)> {
            let enc = CosetEncoder::new(g)?;
            let base = Base::Coset(enc.aux().clone());
            Ok((enc, base))
        };
        let coset = [prepare(&graphs[0])?, prepare(&graphs[1])?];
        let iso = find_isomorphism(&graphs[0], &graphs[1])?;
        Ok(PairContext { graphs, rank, coset, iso })
    }

    pub fn n(&self) -> usize {
        self.graphs[0].n()
    }

    pub fn graphs(&self) -> &[ColoredGraph; 2] {
        &self.graphs
    }

    pub fn isomorphic(&self) -> bool {
        self.iso.is_some()
    }

    pub fn aut_order(&self, k: usize) -> usize {
        self.coset[k].0.aut_order()
    }

    /// Shared color width of both bases, so their segments line up.
    fn color_width(&self) -> u32 {
        self.graphs[0].color_width().max(self.graphs[1].color_width())
    }

    /// `π` with `π(G_k) = π_j(G_{w_j})`, if copy `j` is a copy of `G_k`.
    fn map_from(&self, k: usize, from: usize, p: &Permutation) -> Option<Permutation> {
        match (k, from) {
            (a, b) if a == b => Some(p.clone()),
            // π_j(G1) = π_j σ (G0)
            (0, 1) => self.iso.as_ref().map(|s| p.compose(s).expect("same degree")),
            // π_j(G0) = π_j σ^{-1} (G1)
            _ => self.iso.as_ref().map(|s| p.compose(&s.inverse()).expect("same degree")),
        }
    }

    fn bases(&self, mode: CodeMode, k: usize) -> &Base {
        match mode {
            CodeMode::Rank => &self.rank[k],
            CodeMode::Coset => &self.coset[k].1,
        }
    }
}

/// Lengths of every description the oracle considered; `None` where a
/// single-base description does not apply.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Candidates {
    pub raw: usize,
    pub single_rank: [Option<usize>; 2],
    pub single_coset: [Option<usize>; 2],
    pub mixed_rank: usize,
    pub mixed_coset: usize,
}

impl Candidates {
    pub fn min(&self) -> usize {
        self.single_rank
            .iter()
            .chain(&self.single_coset)
            .flatten()
            .copied()
            .chain([self.raw, self.mixed_rank, self.mixed_coset])
            .min()
            .expect("raw always applies")
    }
}

/// A computable stand-in for time-bounded Kolmogorov complexity.
///
/// Implementations must be sound in one direction: the value never exceeds
/// the length of any description the implementation could build for the sample.
pub trait ComplexityOracle {
    fn complexity(&self, sample: &TrialSample, pair: &PairContext) -> Result<usize>;
}

/// Minimum description length over a fixed family: the literal string, one
/// base graph with rank or coset codes, or both base graphs with the coin flips.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MdlOracle {
    pub b: usize,
    /// Build every candidate description and check it reproduces the sample,
    /// instead of computing lengths from the layout.
    pub exact: bool,
}

impl MdlOracle {
    pub fn new(b: usize) -> Self {
        MdlOracle { b, exact: false }
    }

    pub fn exact(b: usize) -> Self {
        MdlOracle { b, exact: true }
    }

    pub fn candidates(&self, sample: &TrialSample, pair: &PairContext) -> Result<Candidates> {
        let t = sample.t();
        let b = self.b;
        let raw = HEADER_BITS + sample.target.len();
        let w = &sample.w;
        let cw = pair.color_width();
        let mut single_rank = [None, None];
        let mut single_coset = [None, None];
        for k in 0..2 {
            let maps: Option<Vec<Permutation>> = sample
                .perms
                .iter()
                .zip(w.iter())
                .map(|(p, from)| pair.map_from(k, usize::from(*from), p))
                .collect();
            let Some(maps) = maps else { continue };
            if self.exact {
                let rank_codes: Vec<BigNat> = maps.iter().map(|p| p.lehmer_rank()).collect::<Result<_>>()?;
                let coset_codes: Vec<BigNat> = maps
                    .iter()
                    .map(|p| pair.coset[k].0.encode_permutation(p).map(|c| c.value))
                    .collect::<Result<_>>()?;
                let d_rank = describe_single_with_width(pair.bases(CodeMode::Rank, k), &rank_codes, b, cw)?;
                let d_coset = describe_single_with_width(pair.bases(CodeMode::Coset, k), &coset_codes, b, cw)?;
                check_reproduces(&d_rank.target()?, &sample.target)?;
                check_reproduces(&d_coset.target()?, &sample.target)?;
                single_rank[k] = Some(d_rank.description_bits());
                single_coset[k] = Some(d_coset.description_bits());
            } else {
                single_rank[k] = Some(single_bits_with_width(pair.bases(CodeMode::Rank, k), t, b, cw)?);
                single_coset[k] = Some(single_bits_with_width(pair.bases(CodeMode::Coset, k), t, b, cw)?);
            }
        }
        let (mixed_rank, mixed_coset) = if self.exact {
            let rank_codes: Vec<BigNat> = sample.perms.iter().map(|p| p.lehmer_rank()).collect::<Result<_>>()?;
            let coset_codes: Vec<BigNat> = sample
                .perms
                .iter()
                .zip(w.iter())
                .map(|(p, from)| pair.coset[usize::from(*from)].0.encode_permutation(p).map(|c| c.value))
                .collect::<Result<_>>()?;
            let (r0, r1) = (pair.bases(CodeMode::Rank, 0), pair.bases(CodeMode::Rank, 1));
            let (c0, c1) = (pair.bases(CodeMode::Coset, 0), pair.bases(CodeMode::Coset, 1));
            let d_rank = describe_mixed(r0, r1, w, &rank_codes, b)?;
            let d_coset = describe_mixed(c0, c1, w, &coset_codes, b)?;
            check_reproduces(&d_rank.target()?, &sample.target)?;
            check_reproduces(&d_coset.target()?, &sample.target)?;
            (d_rank.description_bits(), d_coset.description_bits())
        } else {
            (
                mixed_bits(pair.bases(CodeMode::Rank, 0), pair.bases(CodeMode::Rank, 1), w, b)?,
                mixed_bits(pair.bases(CodeMode::Coset, 0), pair.bases(CodeMode::Coset, 1), w, b)?,
            )
        };
        Ok(Candidates { raw, single_rank, single_coset, mixed_rank, mixed_coset })
    }
}

fn check_reproduces(built: &TargetString, want: &TargetString) -> Result<()> {
    if built.x() != want.x() {
        return Err(Error::Format("candidate description does not reproduce the sample".into()));
    }
    Ok(())
}

impl ComplexityOracle for MdlOracle {
    fn complexity(&self, sample: &TrialSample, pair: &PairContext) -> Result<usize> {
        Ok(self.candidates(sample, pair)?.min())
    }
}

fn trial_rng(seed: u64, stream: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream << 32 | trial as u64);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NonisoDecision {
    #[serde(rename = "noniso")]
    Noniso,
    #[serde(rename = "iso-or-unknown")]
    IsoOrUnknown,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub value: usize,
    /// `value - theta`.
    pub margin: f64,
    pub noniso: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonisoReport {
    pub n: usize,
    pub t: usize,
    pub b: usize,
    /// `log2 n!`, or the smallest `log2(n!/a_i)` under a hint.
    pub s: f64,
    pub theta: f64,
    /// Smallest `t` from which isomorphic pairs always stay at or below `theta`.
    pub crossover: Option<usize>,
    pub below_crossover: bool,
    pub trials: Vec<TrialRecord>,
    pub decision: NonisoDecision,
}

/// Threshold exponent `s`: `log2 n!`, or `min_i log2(n!/a_i)` under a hint.
fn threshold_s(pair: &PairContext, hint: Option<&GroupSizeHint>) -> Result<f64> {
    let n = pair.n();
    let Some(hint) = hint else { return Ok(log2_factorial(n)) };
    let total: BigNat = factorial(n)?;
    let mut s = log2_factorial(n);
    for (k, claim) in hint.orders.iter().enumerate() {
        let Some(a) = claim else { continue };
        if hint.verify {
            let actual = BigNat::from(pair.aut_order(k));
            if &actual != a {
                return Err(Error::HintMismatch { claimed: a.to_string(), actual: actual.to_string() });
            }
        }
        if a == &BigNat::from(0u8) || &total % a != BigNat::from(0u8) {
            return Err(Error::range(format!("{a} does not divide {n}!")));
        }
        s = s.min(log2_big(&(&total / a)));
    }
    Ok(s)
}

/// Smallest `t0` with `min single length(t) <= t(s+1) - slack` for every `t >= t0`,
/// or `None` if no such `t0` exists.
pub fn crossover(pair: &PairContext, b: usize, s: f64, slack: f64) -> Result<Option<usize>> {
    let mut worst: Option<usize> = Some(0);
    for k in 0..2 {
        let bases = [pair.bases(CodeMode::Rank, k), pair.bases(CodeMode::Coset, k)];
        let per_base: Vec<Option<usize>> =
            bases.iter().map(|base| crossover_for(base, pair.color_width(), b, s, slack)).collect::<Result<_>>()?;
        let best = per_base.into_iter().flatten().min();
        worst = match (worst, best) {
            (Some(a), Some(c)) => Some(a.max(c)),
            _ => None,
        };
    }
    Ok(worst)
}

fn crossover_for(base: &Base, cw: u32, b: usize, s: f64, slack: f64) -> Result<Option<usize>> {
    let single_bits = |base: &Base, t: usize, b: usize| single_bits_with_width(base, t, b, cw);
    let fixed = single_bits(base, 0, b)? as f64;
    let full = (single_bits(base, b, b)? as f64) - fixed;
    let gain = b as f64 * (s + 1.0) - full;
    if gain <= 1e-9 {
        return Ok(None);
    }
    // past q full blocks the shortfall of any partial block is covered
    let worst_partial = (0..b)
        .map(|r| Ok(single_bits(base, r, b)? as f64 - fixed - r as f64 * (s + 1.0)))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::MIN, f64::max);
    let q = ((fixed + slack + worst_partial) / gain).ceil().max(0.0) as usize + 1;
    let upper = q * b;
    let mut last_fail = None;
    for t in 0..=upper {
        let len = single_bits(base, t, b)? as f64;
        if len > t as f64 * (s + 1.0) - slack {
            last_fail = Some(t);
        }
    }
    Ok(Some(last_fail.map_or(0, |t| t + 1)))
}

/// Decides "not isomorphic" for a pair of rigid graphs.
///
/// Answers [`NonisoDecision::Noniso`] iff the majority of trials have oracle
/// value above `theta = t(s+1) - slack`. For isomorphic inputs with `t` past
/// the crossover this never happens.
pub fn rigid_noniso_test<S: Structure, T: Structure, O: ComplexityOracle>(
    g0: &S,
    g1: &T,
    params: &ReductionParams,
    oracle: &O,
) -> Result<NonisoReport> {
    rigid_noniso_test_with(g0, g1, params, oracle, None, 0)
}

/// As [`rigid_noniso_test`], with an optional group size hint and RNG stream.
pub fn rigid_noniso_test_with<S: Structure, T: Structure, O: ComplexityOracle>(
    g0: &S,
    g1: &T,
    params: &ReductionParams,
    oracle: &O,
    hint: Option<&GroupSizeHint>,
    stream: u64,
) -> Result<NonisoReport> {
    params.validate()?;
    let pair = PairContext::new(g0, g1)?;
    let s = threshold_s(&pair, hint)?;
    let theta = params.t as f64 * (s + 1.0) - params.theta_slack;
    let crossover = crossover(&pair, params.b, s, params.theta_slack)?;
    let mut trials = Vec::with_capacity(params.trials);
    for trial in 0..params.trials {
        let mut rng = trial_rng(params.seed, stream, trial);
        let sample = sample_x(&pair.graphs[0], &pair.graphs[1], params.t, &mut rng)?;
        let value = oracle.complexity(&sample, &pair)?;
        trials.push(TrialRecord { trial, value, margin: value as f64 - theta, noniso: value as f64 > theta });
    }
    let yes = trials.iter().filter(|r| r.noniso).count();
    let decision = if 2 * yes > trials.len() { NonisoDecision::Noniso } else { NonisoDecision::IsoOrUnknown };
    Ok(NonisoReport {
        n: pair.n(),
        t: params.t,
        b: params.b,
        s,
        theta,
        crossover,
        below_crossover: crossover.is_none_or(|c| params.t < c),
        trials,
        decision,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Profile {
    pub est_mix: usize,
    pub est_0: usize,
    pub est_1: usize,
    pub mix_values: Vec<usize>,
    pub values_0: Vec<usize>,
    pub values_1: Vec<usize>,
}

impl Profile {
    /// `est_mix - min(est_0, est_1)`.
    pub fn margin(&self) -> i64 {
        self.est_mix as i64 - self.est_0.min(self.est_1) as i64
    }
}

/// Oracle estimates for mixed strings and for strings of copies of one graph,
/// each the maximum over `params.trials` samples.
pub fn estimate_profile<S: Structure, T: Structure, O: ComplexityOracle>(
    g0: &S,
    g1: &T,
    params: &ReductionParams,
    oracle: &O,
) -> Result<Profile> {
    estimate_profile_with(&PairContext::new(g0, g1)?, params, oracle, 0)
}

fn estimate_profile_with<O: ComplexityOracle>(pair: &PairContext, params: &ReductionParams, oracle: &O, stream: u64) -> Result<Profile> {
    params.validate()?;
    let run = |forced: Option<bool>, sub: u64| -> Result<Vec<usize>> {
        (0..params.trials)
            .map(|trial| {
                let mut rng = trial_rng(params.seed, stream * 3 + sub, trial);
                let sample = sample_x_forced(&pair.graphs[0], &pair.graphs[1], params.t, &mut rng, forced)?;
                oracle.complexity(&sample, pair)
            })
            .collect()
    };
    let mix_values = run(None, 0)?;
    let values_0 = run(Some(false), 1)?;
    let values_1 = run(Some(true), 2)?;
    let max = |v: &[usize]| v.iter().copied().max().expect("trials >= 1");
    Ok(Profile { est_mix: max(&mix_values), est_0: max(&values_0), est_1: max(&values_1), mix_values, values_0, values_1 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GiDecision {
    Isomorphic,
    NonIsomorphic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GiReport {
    pub t: usize,
    /// Margin at which the answer flips to non-isomorphic, `t/2`.
    pub threshold: f64,
    pub profile: Option<Profile>,
    pub margin: Option<i64>,
    pub decision: GiDecision,
}

/// Isomorphism test: non-isomorphic iff `est_mix - min(est_0, est_1) >= t/2`.
pub fn gi_test<S: Structure, T: Structure, O: ComplexityOracle>(g0: &S, g1: &T, params: &ReductionParams, oracle: &O) -> Result<GiReport> {
    params.validate()?;
    let threshold = params.t as f64 / 2.0;
    if g0.n() != g1.n() {
        return Ok(GiReport { t: params.t, threshold, profile: None, margin: None, decision: GiDecision::NonIsomorphic });
    }
    let profile = estimate_profile(g0, g1, params, oracle)?;
    let margin = profile.margin();
    let decision = if margin as f64 >= threshold { GiDecision::NonIsomorphic } else { GiDecision::Isomorphic };
    Ok(GiReport { t: params.t, threshold, profile: Some(profile), margin: Some(margin), decision })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaDecision {
    Rigid,
    HasNontrivialAutomorphism,
}

/// One individualized pair: vertex `i` against vertex `j` after fixing `1..i-1` (1-based).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaQuery {
    pub i: usize,
    pub j: usize,
    pub report: NonisoReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaReport {
    pub n: usize,
    pub queries: Vec<GaQuery>,
    pub decision: GaDecision,
}

/// Graph automorphism test.
///
/// For `i = n-1` down to 1 and `j = i+1..n` it asks whether `G` with
/// `1..i-1` individualized and `i` distinguished is not isomorphic to the
/// same with `j` distinguished. A pair that is not shown non-isomorphic
/// witnesses an automorphism; if every pair is, `G` is rigid.
pub fn ga_test<O: ComplexityOracle>(g: &Graph, params: &ReductionParams, oracle: &O) -> Result<GaReport> {
    params.validate()?;
    let n = g.n();
    let mut queries = Vec::new();
    let mut stream = 0;
    for i in (1..n).rev() {
        for j in (i + 1)..=n {
            let h0 = individualize(g, i - 1, i - 1)?;
            let h1 = individualize(g, i - 1, j - 1)?;
            let report = rigid_noniso_test_with(&h0, &h1, params, oracle, None, stream)?;
            stream += 1;
            let noniso = report.decision == NonisoDecision::Noniso;
            queries.push(GaQuery { i, j, report });
            if !noniso {
                return Ok(GaReport { n, queries, decision: GaDecision::HasNontrivialAutomorphism });
            }
        }
    }
    Ok(GaReport { n, queries, decision: GaDecision::Rigid })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RigidGiDecision {
    Isomorphic,
    NonIsomorphic,
    NotRigid,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RigidGiReport {
    pub ga: [GaReport; 2],
    pub noniso: Option<NonisoReport>,
    pub decision: RigidGiDecision,
}

/// Isomorphism of rigid graphs: first checks both are rigid, then runs the
/// non-isomorphism test.
pub fn rigid_gi<O: ComplexityOracle>(g: &Graph, h: &Graph, params: &ReductionParams, oracle: &O) -> Result<RigidGiReport> {
    let ga = [ga_test(g, params, oracle)?, ga_test(h, params, oracle)?];
    if ga.iter().any(|r| r.decision != GaDecision::Rigid) {
        return Ok(RigidGiReport { ga, noniso: None, decision: RigidGiDecision::NotRigid });
    }
    if g.n() != h.n() {
        return Ok(RigidGiReport { ga, noniso: None, decision: RigidGiDecision::NonIsomorphic });
    }
    let report = rigid_noniso_test_with(g, h, params, oracle, None, 1 << 24)?;
    let decision = match report.decision {
        NonisoDecision::Noniso => RigidGiDecision::NonIsomorphic,
        NonisoDecision::IsoOrUnknown => RigidGiDecision::Isomorphic,
    };
    Ok(RigidGiReport { ga, noniso: Some(report), decision })
}
