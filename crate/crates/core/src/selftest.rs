//! Built-in self-test over a fixed corpus, at two scales.
//!
//! `Small` trims sample counts so the whole run takes seconds; `Full` runs
//! every check at the sizes the acceptance suite uses, including the
//! enumeration of all 30240 Petersen codes.

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::blockcode::{describe_single, Base, TargetString, XBit};
use crate::codec::{decode_value, CosetCode, CosetEncoder};
use crate::graph::{individualize, ColoredGraph, Graph, Structure};
use crate::group::{automorphism_group, are_isomorphic, is_rigid};
use crate::num::{binomial, factorial};
use crate::perm::{all_permutations, Permutation};
use crate::ranks::{radix_pack, radix_unpack, subset_rank, subset_unrank};
use crate::reduction::{
    estimate_profile, ga_test, gi_test, random_permutation, rigid_gi, rigid_noniso_test, GaDecision, GiDecision,
    MdlOracle, NonisoDecision, ReductionParams, RigidGiDecision,
};
use crate::BigNat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Small,
    Full,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u64,
}

type Outcome = std::result::Result<String, String>;
type Check = (u8, &'static str, Box<dyn Fn() -> Outcome>);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if $cond {
        } else {
            return Err(format!($($msg)+));
        }
    };
}

fn fixture(text: &str) -> Graph {
    text.parse().expect("shipped fixtures parse")
}

/// Named graphs shipped with the crate.
pub fn fixtures() -> Vec<(&'static str, Graph)> {
    vec![
        ("petersen", fixture(include_str!("../fixtures/petersen.txt"))),
        ("c8", fixture(include_str!("../fixtures/c8.txt"))),
        ("dumbbell10", fixture(include_str!("../fixtures/dumbbell10.txt"))),
        ("k4", fixture(include_str!("../fixtures/k4.txt"))),
        ("asym6", fixture(include_str!("../fixtures/asym6.txt"))),
        ("rigid7a", fixture(include_str!("../fixtures/rigid7a.txt"))),
        ("rigid7b", fixture(include_str!("../fixtures/rigid7b.txt"))),
        ("rigid8a", fixture(include_str!("../fixtures/rigid8a.txt"))),
        ("rigid8b", fixture(include_str!("../fixtures/rigid8b.txt"))),
    ]
}

fn fixture_named(name: &str) -> Graph {
    fixtures().into_iter().find(|(n, _)| *n == name).expect("known fixture").1
}

fn err(e: crate::Error) -> String {
    e.to_string()
}

/// Runs every check and returns one result per check.
pub fn run(scale: Scale, seed: u64) -> Vec<CheckResult> {
    let checks: Vec<Check> = vec![
        (1, "codec exactness (Petersen)", Box::new(move || petersen(scale))),
        (2, "codec exactness (families)", Box::new(families)),
        (3, "codec bijectivity", Box::new(move || bijectivity(scale, seed))),
        (4, "stage invariant", Box::new(stage_invariant)),
        (5, "orbit-stabilizer", Box::new(orbit_stabilizer)),
        (6, "description length and bit access", Box::new(move || description(scale, seed))),
        (7, "reduction separation", Box::new(move || separation(scale, seed))),
        (8, "graph automorphism end to end", Box::new(move || ga_end_to_end(scale, seed))),
        (9, "graph isomorphism end to end", Box::new(move || gi_end_to_end(scale, seed))),
        (10, "unit bijections", Box::new(unit_bijections)),
    ];
    checks
        .into_iter()
        .map(|(id, name, f)| {
            let start = Instant::now();
            let outcome = f();
            let millis = start.elapsed().as_millis() as u64;
            let (passed, detail) = match outcome {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckResult { id, name, passed, detail, millis }
        })
        .collect()
}

fn petersen(scale: Scale) -> Outcome {
    let g = fixture_named("petersen");
    let enc = CosetEncoder::new(&g).map_err(err)?;
    let range: u64 = enc.range().map_err(err)?;
    ensure!(range == 30240, "range {range}");
    let trace = enc.trace(&range).map_err(err)?;
    let c = |n, k| binomial::<u64>(n, k).unwrap();
    let factors: Vec<u64> = trace.stage_factors().into_iter().filter(|&f| f != 1).collect();
    ensure!(
        factors == [c(9, 3), c(5, 2) * c(3, 2) * c(3, 2), 4],
        "stage factors {factors:?}"
    );
    if scale == Scale::Small {
        return Ok("range 30240 = 84 * 90 * 4".into());
    }
    let mut seen = HashSet::new();
    for value in 0..range {
        let copy = decode_value(enc.aux(), &value).map_err(err)?;
        ensure!(seen.insert(copy.graph().adjacency_bits()), "code {value} repeats a copy");
        let back: CosetCode<u64> = enc.encode(&copy).map_err(err)?;
        ensure!(back.value == value, "code {value} re-encodes to {}", back.value);
    }
    Ok("30240 codes decode to distinct copies and re-encode".into())
}

fn families() -> Outcome {
    let cases = [
        ("c8", fixture_named("c8"), 2520u64),
        ("dumbbell10", fixture_named("dumbbell10"), 453_600),
        ("asym6", fixture_named("asym6"), 720),
        ("rigid7a", fixture_named("rigid7a"), 5040),
        ("rigid7b", fixture_named("rigid7b"), 5040),
        ("rigid8a", fixture_named("rigid8a"), 40320),
        ("rigid8b", fixture_named("rigid8b"), 40320),
    ];
    for (name, g, want) in cases {
        let got: u64 = crate::codec::code_range(&g).map_err(err)?;
        ensure!(got == want, "{name}: range {got}, expected {want}");
    }
    Ok("C8 2520, dumbbell 453600, rigid n!".into())
}

type CopyKey = (Vec<bool>, Vec<u32>);

fn copy_key(g: &ColoredGraph) -> CopyKey {
    (g.graph().adjacency_bits(), g.colors().to_vec())
}

/// Checks that every permutation's copy gets a code below the range, equal
/// copies get equal codes and distinct copies distinct codes.
fn exhaustive_bijection(g: &ColoredGraph) -> Outcome {
    let enc = CosetEncoder::new(g).map_err(err)?;
    let range: u64 = enc.range().map_err(err)?;
    let mut code_of: HashMap<CopyKey, u64> = HashMap::new();
    let mut copy_of: HashMap<u64, CopyKey> = HashMap::new();
    for p in all_permutations(g.n()) {
        let key = copy_key(&p.apply_to_colored(g).map_err(err)?);
        let code: CosetCode<u64> = enc.encode_permutation(&p).map_err(err)?;
        ensure!(code.value < range, "code {} not below {range}", code.value);
        if let Some(&c) = code_of.get(&key) {
            ensure!(c == code.value, "one copy got codes {c} and {}", code.value);
        }
        if let Some(k) = copy_of.get(&code.value) {
            ensure!(k == &key, "code {} names two copies", code.value);
        }
        code_of.insert(key.clone(), code.value);
        copy_of.insert(code.value, key);
    }
    ensure!(copy_of.len() as u64 == range, "{} codes used of {range}", copy_of.len());
    Ok(String::new())
}

fn bijectivity(scale: Scale, seed: u64) -> Outcome {
    let per_n = if scale == Scale::Full { 50 } else { 5 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut count = 0;
    for n in 4..=6 {
        for _ in 0..per_n {
            let g = Graph::random(n, 0.5, &mut rng).map_err(err)?;
            exhaustive_bijection(&g.to_colored())?;
            count += 1;
        }
    }
    for (name, g) in fixtures() {
        if g.n() > 8 && scale == Scale::Small {
            continue;
        }
        exhaustive_bijection(&g.to_colored()).map_err(|e| format!("{name}: {e}"))?;
        count += 1;
    }
    Ok(format!("{count} graphs"))
}

fn stage_invariant() -> Outcome {
    for (name, g) in fixtures() {
        let enc = CosetEncoder::new(&g).map_err(err)?;
        let range: BigNat = enc.range().map_err(err)?;
        let trace = enc.trace(&range).map_err(err)?;
        trace.check(g.n(), &range).map_err(|e| format!("{name}: {e}"))?;
        for rec in &trace.stages {
            let fixed = rec.stage.max(0) as usize;
            let colored = individualize_prefix(&g, fixed);
            let order = automorphism_group(&colored).map_err(err)?.order();
            ensure!(
                rec.base_aut_order == BigNat::from(order),
                "{name} stage {}: |Aut(G_i)| {} vs {order}",
                rec.stage,
                rec.base_aut_order
            );
        }
    }
    Ok(format!("{} graphs", fixtures().len()))
}

/// `g` with vertices `0..prefix` colored `1..=prefix`.
fn individualize_prefix(g: &Graph, prefix: usize) -> ColoredGraph {
    if prefix == 0 {
        return g.to_colored();
    }
    // distinguishing the last prefix vertex with color `prefix` is the same coloring
    individualize(g, prefix - 1, prefix - 1).expect("prefix within range")
}

fn orbit_stabilizer() -> Outcome {
    for (name, g) in fixtures() {
        let enc = CosetEncoder::new(&g).map_err(err)?;
        let chain = enc.chain();
        for i in 1..g.n() {
            let above = chain.level(i - 1);
            let orbit = &above.orbits.blocks()[above.orbits.block_of(i - 1).expect("vertex in level")];
            ensure!(
                above.order == chain.level(i).order * orbit.len(),
                "{name} level {i}: {} != {} * {}",
                above.order,
                chain.level(i).order,
                orbit.len()
            );
        }
    }
    Ok(format!("{} graphs", fixtures().len()))
}

fn description(scale: Scale, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ts: &[usize] = if scale == Scale::Full { &[64, 256, 1024] } else { &[64, 256] };
    for name in ["rigid8a", "c8"] {
        let g = fixture_named(name);
        for &t in ts {
            let perms: Vec<Permutation> = (0..t).map(|_| random_permutation(8, &mut rng)).collect();
            let codes: Vec<BigNat> = perms.iter().map(|p| p.lehmer_rank()).collect::<crate::Result<_>>().map_err(err)?;
            let d = describe_single(&Base::rank(&g), &codes, 3).map_err(err)?;
            let bits = d.description_bits() as f64;
            ensure!(bits < d.length_bound(), "{name} t={t}: {bits} bits, bound {}", d.length_bound());
            let copies: Vec<Graph> = perms.iter().map(|p| p.apply_to_graph(&g)).collect::<crate::Result<_>>().map_err(err)?;
            let x = TargetString::from_segments(&copies, 0);
            for i in 0..x.padded_len() + 2 {
                ensure!(d.reconstruct_bit(i) == x.bit(i), "{name} t={t}: bit {i} differs");
            }
            ensure!(d.reconstruct_bit(x.padded_len()) == XBit::End, "missing end marker");
        }
    }
    Ok("bound holds; every bit of x' matches".into())
}

fn separation(scale: Scale, seed: u64) -> Outcome {
    let runs = if scale == Scale::Full { 100 } else { 10 };
    let (g0, g1) = (fixture_named("rigid8a"), fixture_named("rigid8b"));
    ensure!(!are_isomorphic(&g0, &g1).map_err(err)?, "fixtures are isomorphic");
    let oracle = MdlOracle::new(3);
    let t = 2048;
    let mut noniso = 0;
    for k in 0..runs {
        let params = ReductionParams::desk(8).with_t(t).with_trials(1).with_seed(seed.wrapping_add(k));
        let report = rigid_noniso_test(&g0, &g1, &params, &oracle).map_err(err)?;
        if report.decision == NonisoDecision::Noniso {
            noniso += 1;
            let profile = estimate_profile(&g0, &g1, &params, &oracle).map_err(err)?;
            ensure!(profile.margin() as f64 >= t as f64 / 2.0, "margin {} below t/2", profile.margin());
        }
    }
    ensure!(noniso * 100 >= 95 * runs, "noniso in {noniso}/{runs}");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let copy = random_permutation(8, &mut rng).apply_to_graph(&g0).map_err(err)?;
    let mut false_alarms = 0;
    for k in 0..runs {
        let params = ReductionParams::desk(8).with_t(t).with_trials(1).with_seed(seed.wrapping_add(k));
        let report = rigid_noniso_test(&g0, &copy, &params, &oracle).map_err(err)?;
        if report.decision == NonisoDecision::Noniso {
            false_alarms += 1;
        }
    }
    ensure!(false_alarms == 0, "isomorphic pair answered noniso {false_alarms} times");
    Ok(format!("noniso {noniso}/{runs}, isomorphic pair 0/{runs}"))
}

fn ga_end_to_end(scale: Scale, seed: u64) -> Outcome {
    let count = if scale == Scale::Full { 200 } else { 20 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut graphs: Vec<Graph> = (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=6);
            Graph::random(n, 0.5, &mut rng).expect("valid probability")
        })
        .collect();
    graphs.extend([Graph::complete(4), Graph::cycle(5), Graph::petersen()]);
    graphs.extend(["asym6", "rigid7a", "rigid8a"].map(fixture_named));
    let oracle = MdlOracle::new(3);
    for (k, g) in graphs.iter().enumerate() {
        let params = ReductionParams::desk(g.n()).with_seed(seed.wrapping_add(k as u64));
        let got = ga_test(g, &params, &oracle).map_err(err)?.decision == GaDecision::Rigid;
        let want = is_rigid(g).map_err(err)?;
        ensure!(got == want, "graph {k} (n = {}): rigid {got}, brute force {want}", g.n());
    }
    Ok(format!("{} graphs agree", graphs.len()))
}

fn gi_end_to_end(scale: Scale, seed: u64) -> Outcome {
    let count = if scale == Scale::Full { 100 } else { 20 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37);
    let oracle = MdlOracle::new(3);
    let mut agree = 0;
    for k in 0..count {
        let n = rng.gen_range(2..=7);
        let g = Graph::random(n, 0.5, &mut rng).map_err(err)?;
        let h = if k % 2 == 0 {
            random_permutation(n, &mut rng).apply_to_graph(&g).map_err(err)?
        } else {
            Graph::random(n, 0.5, &mut rng).map_err(err)?
        };
        let params = ReductionParams::desk(n).with_seed(seed.wrapping_add(k as u64));
        let got = gi_test(&g, &h, &params, &oracle).map_err(err)?.decision == GiDecision::Isomorphic;
        if got == are_isomorphic(&g, &h).map_err(err)? {
            agree += 1;
        }
    }
    ensure!(agree * 100 >= 98 * count, "agreement {agree}/{count}");
    let (a, b) = (fixture_named("rigid7a"), fixture_named("rigid7b"));
    let params = ReductionParams::desk(7).with_trials(1).with_seed(seed);
    let cases = [
        (&a, &a, RigidGiDecision::Isomorphic),
        (&a, &b, RigidGiDecision::NonIsomorphic),
        (&a, &Graph::complete(7), RigidGiDecision::NotRigid),
    ];
    for (g, h, want) in cases {
        let got = rigid_gi(g, h, &params, &oracle).map_err(err)?.decision;
        ensure!(got == want, "rigid_gi gave {got:?}, expected {want:?}");
    }
    Ok(format!("gi agreement {agree}/{count}; rigid_gi cases pass"))
}

fn unit_bijections() -> Outcome {
    for n in 0..=6 {
        let total: u64 = factorial(n).map_err(err)?;
        for (r, p) in all_permutations(n).enumerate() {
            ensure!(p.lehmer_rank::<u64>().map_err(err)? == r as u64, "lehmer rank at n = {n}");
            ensure!(Permutation::lehmer_unrank(n, &(r as u64)).map_err(err)? == p, "lehmer unrank at n = {n}");
        }
        ensure!(all_permutations(n).count() as u64 == total, "permutation count at n = {n}");
    }
    for n in 0..=8 {
        for k in 0..=n {
            let total: u64 = binomial(n, k).map_err(err)?;
            let mut seen = HashSet::new();
            for r in 0..total {
                let s = subset_unrank(n, k, &r).map_err(err)?;
                ensure!(subset_rank::<u64>(n, &s).map_err(err)? == r, "subset rank at n = {n}");
                ensure!(seen.insert(s), "subset unrank repeats at n = {n}");
            }
        }
    }
    let radices = [3u32, 4, 5];
    let mut seen = HashSet::new();
    for a in 0..3 {
        for b in 0..4 {
            for c in 0..5 {
                let x = radix_pack(&[a, b, c], &radices).map_err(err)?;
                ensure!(x < 60 && seen.insert(x), "radix pack collision");
                ensure!(radix_unpack(&x, &radices).map_err(err)? == [a, b, c], "radix unpack");
            }
        }
    }
    Ok("lehmer n <= 6, subsets n <= 8, radices (3,4,5)".into())
}
