use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use isocode::blockcode::{describe_mixed, describe_single, Base, BlockedDescription, CodeMode};
use isocode::codec::{decode, AuxData, CosetCode, CosetEncoder};
use isocode::graph::{ColoredGraph, Graph};
use isocode::group::{automorphism_group, StabilizerChain};
use isocode::reduction::{
    ga_test, gi_test, rigid_gi, rigid_noniso_test_with, sample_x, GaDecision, GiDecision, GroupSizeHint, MdlOracle,
    NonisoDecision, Preset, ReductionParams, RigidGiDecision,
};
use isocode::report::RunReport;
use isocode::selftest::{self, Scale};
use isocode::{BigNat, Error};

/// Optimal codes for graph copies and description-length reductions.
#[derive(Parser)]
#[command(name = "isocode", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Automorphism group order, orbits, generators and stabilizer chain.
    Aut { graph: PathBuf },
    /// Code of COPY as a copy of BASE.
    Encode {
        base: PathBuf,
        copy: PathBuf,
        /// Include per-stage bookkeeping.
        #[arg(long)]
        trace: bool,
    },
    /// The copy of BASE with the given code.
    Decode { base: PathBuf, code: String },
    /// Sample copies of one or two graphs and write their blocked description.
    Describe {
        g0: PathBuf,
        g1: Option<PathBuf>,
        /// Output description file.
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "rank")]
        mode: ModeArg,
        /// Also write x' as a line of 0s and 1s.
        #[arg(long)]
        x_out: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Bit I (0-based) of x' from a description file; `*` past the end.
    Xbit { desc: PathBuf, i: usize },
    /// Threshold test for non-isomorphism of rigid graphs.
    ReduceNoniso {
        g0: PathBuf,
        g1: PathBuf,
        /// Claimed |Aut(G0)|.
        #[arg(long)]
        hint_a0: Option<BigNat>,
        /// Claimed |Aut(G1)|.
        #[arg(long)]
        hint_a1: Option<BigNat>,
        /// Check claimed group orders by brute force.
        #[arg(long)]
        verify_hint: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Isomorphism test from oracle estimates.
    ReduceGi {
        g0: PathBuf,
        g1: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Nontrivial automorphism test by individualization.
    ReduceGa {
        graph: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Isomorphism of rigid graphs, after checking rigidity.
    RigidGi {
        g: PathBuf,
        h: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the built-in checks.
    Selftest {
        #[arg(long, value_enum, default_value = "small")]
        scale: ScaleArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Clone, Debug)]
struct CommonArgs {
    /// Copies per sample; overrides the preset.
    #[arg(long)]
    t: Option<usize>,
    /// Codes per block.
    #[arg(long, default_value_t = isocode::reduction::DEFAULT_B)]
    b: usize,
    /// Samples per query.
    #[arg(long, default_value_t = isocode::reduction::DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "desk")]
    preset: PresetArg,
    /// Exit with status 1 when the decision is negative.
    #[arg(long)]
    decision_exit: bool,
}

impl CommonArgs {
    fn params(&self, n: usize) -> ReductionParams {
        let preset = match self.preset {
            PresetArg::Paper => Preset::Paper,
            PresetArg::Desk => Preset::Desk,
        };
        let mut p = ReductionParams::preset(preset, n).with_b(self.b).with_trials(self.trials).with_seed(self.seed);
        if let Some(t) = self.t {
            p = p.with_t(t);
        }
        p
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Rank,
    Coset,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum PresetArg {
    Paper,
    Desk,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ScaleArg {
    Small,
    Full,
}

/// Failure with the exit status it maps to.
enum Failure {
    Usage(String),
    Capability(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Capability { .. } => Failure::Capability(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type CliResult = std::result::Result<Outcome, Failure>;

/// What to print and whether the decision was negative.
struct Outcome {
    stdout: String,
    negative: bool,
}

fn read_graph(path: &Path) -> std::result::Result<ColoredGraph, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    text.parse().map_err(|e: Error| Failure::Usage(format!("{}: {e}", path.display())))
}

fn report<P: Serialize, R: Serialize, D: Serialize>(
    command: &str,
    seed: Option<u64>,
    params: &P,
    result: &R,
    decision: Option<D>,
    start: Instant,
) -> std::result::Result<String, Failure> {
    let mut r = RunReport::new(command, seed, params, result)?;
    if let Some(d) = decision {
        r = r.with_decision(d);
    }
    r.wall_time_ms = start.elapsed().as_millis() as u64;
    Ok(r.to_json())
}

fn hint(a0: Option<BigNat>, a1: Option<BigNat>, verify: bool) -> Option<GroupSizeHint> {
    (a0.is_some() || a1.is_some()).then_some(GroupSizeHint { orders: [a0, a1], verify })
}

fn run(cli: Cli) -> CliResult {
    let start = Instant::now();
    let done = |stdout: String| Ok(Outcome { stdout, negative: false });
    match cli.command {
        Command::Aut { graph } => {
            let g = read_graph(&graph)?;
            let group = automorphism_group(&g)?;
            let generators: Vec<Vec<usize>> = group.generators().iter().map(|p| p.one_based()).collect();
            let chain = StabilizerChain::new(group);
            let orbits = chain.level(0).orbits.one_based();
            let result = json!({
                "n": g.n(),
                "order": chain.group().order(),
                "rigid": chain.group().is_trivial(),
                "orbits": orbits,
                "generators": generators,
                "chain_orders": chain.levels().iter().map(|l| l.order).collect::<Vec<_>>(),
            });
            done(report("aut", None, &json!({ "graph": graph }), &result, None::<()>, start)?)
        }
        Command::Encode { base, copy, trace } => {
            let g = read_graph(&base)?;
            let h = read_graph(&copy)?;
            let enc = CosetEncoder::new(&g)?;
            let (code, stages) = enc.encode_traced::<BigNat, _>(&h)?;
            let mut result = serde_json::to_value(&code).expect("codes serialize");
            if trace {
                result["trace"] = serde_json::to_value(&stages).expect("traces serialize");
            }
            done(report("encode", None, &json!({ "base": base, "copy": copy }), &result, None::<()>, start)?)
        }
        Command::Decode { base, code } => {
            let g = read_graph(&base)?;
            let enc = CosetEncoder::new(&g)?;
            let value: BigNat = code.trim().parse().map_err(|_| Failure::Usage(format!("bad code {code:?}")))?;
            let range = enc.range()?;
            let copy = decode(enc.aux(), &CosetCode { value, range })?;
            done(copy.to_string())
        }
        Command::Describe { g0, g1, out, mode, x_out, common } => {
            let g0 = read_graph(&g0)?;
            let g1 = g1.map(|p| read_graph(&p)).transpose()?;
            let params = common.params(g0.n());
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            let other = g1.clone().unwrap_or_else(|| g0.clone());
            let mut sample = sample_x(&g0, &other, params.t, &mut rng)?;
            let mode = match mode {
                ModeArg::Rank => CodeMode::Rank,
                ModeArg::Coset => CodeMode::Coset,
            };
            let d = describe_sample(&g0, g1.as_ref(), &mut sample, mode, params.b)?;
            fs::write(&out, d.to_bytes()).map_err(|e| Failure::Usage(format!("{}: {e}", out.display())))?;
            let target = d.target()?;
            if let Some(path) = &x_out {
                let line: String = target.x_prime().iter().map(|b| if *b { '1' } else { '0' }).collect();
                fs::write(path, line + "\n").map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            }
            let result = json!({
                "mode": mode,
                "mixed": g1.is_some(),
                "n": g0.n(),
                "t": d.header().t,
                "b": d.header().b,
                "t_prime": d.header().t_prime(),
                "description_bits": d.description_bits(),
                "length_bound": d.length_bound(),
                "x_len": target.len(),
                "x_prime_len": target.padded_len(),
            });
            done(report("describe", Some(params.seed), &params, &result, None::<()>, start)?)
        }
        Command::Xbit { desc, i } => {
            let bytes = fs::read(&desc).map_err(|e| Failure::Usage(format!("{}: {e}", desc.display())))?;
            let d = BlockedDescription::from_bytes(&bytes)?;
            done(format!("{}\n", d.reconstruct_bit(i)))
        }
        Command::ReduceNoniso { g0, g1, hint_a0, hint_a1, verify_hint, common } => {
            let (g0, g1) = (read_graph(&g0)?, read_graph(&g1)?);
            let params = common.params(g0.n());
            let hint = hint(hint_a0, hint_a1, verify_hint);
            let oracle = MdlOracle::new(params.b);
            let r = rigid_noniso_test_with(&g0, &g1, &params, &oracle, hint.as_ref(), 0)?;
            let negative = common.decision_exit && r.decision != NonisoDecision::Noniso;
            let stdout = report("reduce-noniso", Some(params.seed), &json!({ "params": params, "hint": hint }), &r, Some(r.decision), start)?;
            Ok(Outcome { stdout, negative })
        }
        Command::ReduceGi { g0, g1, common } => {
            let (g0, g1) = (read_graph(&g0)?, read_graph(&g1)?);
            let params = common.params(g0.n().max(g1.n()));
            let r = gi_test(&g0, &g1, &params, &MdlOracle::new(params.b))?;
            let negative = common.decision_exit && r.decision != GiDecision::Isomorphic;
            let stdout = report("reduce-gi", Some(params.seed), &params, &r, Some(r.decision), start)?;
            Ok(Outcome { stdout, negative })
        }
        Command::ReduceGa { graph, common } => {
            let g = plain(read_graph(&graph)?)?;
            let params = common.params(g.n());
            let r = ga_test(&g, &params, &MdlOracle::new(params.b))?;
            let negative = common.decision_exit && r.decision != GaDecision::HasNontrivialAutomorphism;
            let stdout = report("reduce-ga", Some(params.seed), &params, &r, Some(r.decision), start)?;
            Ok(Outcome { stdout, negative })
        }
        Command::RigidGi { g, h, common } => {
            let (g, h) = (plain(read_graph(&g)?)?, plain(read_graph(&h)?)?);
            let params = common.params(g.n().max(h.n()));
            let r = rigid_gi(&g, &h, &params, &MdlOracle::new(params.b))?;
            let negative = common.decision_exit && r.decision != RigidGiDecision::Isomorphic;
            let stdout = report("rigid-gi", Some(params.seed), &params, &r, Some(r.decision), start)?;
            Ok(Outcome { stdout, negative })
        }
        Command::Selftest { scale, seed } => {
            let scale = match scale {
                ScaleArg::Small => Scale::Small,
                ScaleArg::Full => Scale::Full,
            };
            let results = selftest::run(scale, seed);
            let mut out = String::new();
            for r in &results {
                let status = if r.passed { "PASS" } else { "FAIL" };
                out += &format!("[{status}] {:>2} {} ({} ms) {}\n", r.id, r.name, r.millis, r.detail);
            }
            let passed = results.iter().filter(|r| r.passed).count();
            out += &format!("{passed}/{} checks passed\n", results.len());
            Ok(Outcome { stdout: out, negative: passed != results.len() })
        }
    }
}

fn plain(g: ColoredGraph) -> std::result::Result<Graph, Failure> {
    if g.is_colored() {
        return Err(Failure::Usage("this command takes an uncolored graph".into()));
    }
    Ok(g.into_graph())
}

/// Codes for the sampled copies and their description.
fn describe_sample(
    g0: &ColoredGraph,
    g1: Option<&ColoredGraph>,
    sample: &mut isocode::reduction::TrialSample,
    mode: CodeMode,
    b: usize,
) -> std::result::Result<BlockedDescription, Failure> {
    if g1.is_none() {
        sample.w.fill(false);
    }
    let graphs = [g0, g1.unwrap_or(g0)];
    let codes: Vec<BigNat> = match mode {
        CodeMode::Rank => sample.perms.iter().map(|p| p.lehmer_rank()).collect::<isocode::Result<_>>()?,
        CodeMode::Coset => {
            let encoders = [CosetEncoder::new(graphs[0])?, CosetEncoder::new(graphs[1])?];
            sample
                .perms
                .iter()
                .zip(sample.w.iter())
                .map(|(p, w)| encoders[usize::from(*w)].encode_permutation(p).map(|c| c.value))
                .collect::<isocode::Result<_>>()?
        }
    };
    let base = |g: &ColoredGraph| -> isocode::Result<Base> {
        match mode {
            CodeMode::Rank => Ok(Base::rank(g)),
            CodeMode::Coset => Ok(Base::Coset(AuxData::clone(CosetEncoder::new(g)?.aux()))),
        }
    };
    let d = match g1 {
        None => describe_single(&base(g0)?, &codes, b)?,
        Some(g1) => describe_mixed(&base(g0)?, &base(g1)?, &sample.w, &codes, b)?,
    };
    Ok(d)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let newline = if out.stdout.ends_with('\n') { "" } else { "\n" };
            // a closed pipe is not an error worth reporting
            let _ = write!(stdout, "{}{newline}", out.stdout);
            ExitCode::from(u8::from(out.negative))
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Capability(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
