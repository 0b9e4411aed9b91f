//! The `wlclose` command line.
//!
//! Defaults can be overridden by a TOML file named in `WLCLOSE_CONFIG`; flags
//! override both. Recognized keys: `mode`, `m`, `k`, `C`, `policy`, `trials`,
//! `backend`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::axioms::{make_fixture, verify_coherent, Fixture};
use crate::classical::{classical_closure, classical_step};
use crate::coloring::{rainbow_refine, ColorMatrix};
use crate::error::{Error, Result};
use crate::io::{read_graph_file, write_atomic, write_graph, write_graph_file, RunReport};
use crate::matmul::{bench_multiply, median, Backend};
use crate::probabilistic::{
    self, check_coherent, error_bound, paired_closure, practical_miss_probability,
    probabilistic_closure, seeded_rng, RunParams, StoppingPolicy, DEFAULT_K, DEFAULT_M,
};

pub const CONFIG_ENV: &str = "WLCLOSE_CONFIG";
/// Largest size accepted by `bench`.
pub const BENCH_SIZE_CAP: usize = 4096;

#[derive(Debug, Parser)]
#[command(name = "wlclose", version, about = "Coherent closure of colored complete digraphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the coherent closure of a graph file.
    Close(CloseArgs),
    /// Probabilistic coherence test.
    Check(CheckArgs),
    /// Run two graphs on shared randomness and look for an isomorphism.
    Isopair(IsopairArgs),
    /// Time refinement steps and closures on random inputs.
    Bench(BenchArgs),
    /// Write a fixture graph.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Practical,
    Theoretical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchMode {
    Exact,
    Mc,
    Matmul,
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    /// Substitution range bound.
    #[arg(long)]
    pub m: Option<u64>,
    /// Consecutive quiet steps before stopping (practical policy).
    #[arg(long)]
    pub k: Option<usize>,
    /// Iteration budget constant (theoretical policy).
    #[arg(long = "C", alias = "c")]
    pub c: Option<f64>,
    #[arg(long, value_enum)]
    pub policy: Option<PolicyKind>,
    /// RNG seed; drawn from system entropy and echoed when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Matrix multiplication backend (naive|blocked).
    #[arg(long)]
    pub backend: Option<Backend>,
}

#[derive(Debug, Clone, Args)]
pub struct CloseArgs {
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[command(flatten)]
    pub mc: McArgs,
    /// Write the closure here as a graph file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Append the closure matrix to the report.
    #[arg(long)]
    pub print_closure: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also run the exact axiom verifier and compare.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Clone, Args)]
pub struct IsopairArgs {
    pub first: PathBuf,
    pub second: PathBuf,
    #[command(flatten)]
    pub mc: McArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = vec![64, 128, 256])]
    pub sizes: Vec<usize>,
    #[arg(long, value_enum, default_value_t = BenchMode::Mc)]
    pub mode: BenchMode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    /// Colors in the random inputs.
    #[arg(long, default_value_t = 4)]
    pub colors: usize,
    #[arg(long)]
    pub backend: Option<Backend>,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    /// Fixture: `trivial N`, `cyclic N`, `cycle5`, `petersen`, `path N`, `random N R`.
    #[arg(required = true, num_args = 1..)]
    pub fixture: Vec<String>,
    /// Seed for `random`.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Defaults read from the file named by [`CONFIG_ENV`].
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub mode: Option<Mode>,
    pub m: Option<u64>,
    pub k: Option<usize>,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    pub policy: Option<PolicyKind>,
    pub trials: Option<usize>,
    pub backend: Option<String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Parse {
            line: e.span().map_or(0, |s| text[..s.start].lines().count().max(1)),
            msg: format!("{}: {}", path.display(), e.message()),
        })
    }

    pub fn from_env() -> Result<Self> {
        match std::env::var_os(CONFIG_ENV) {
            Some(path) if !path.is_empty() => Self::load(Path::new(&path)),
            _ => Ok(Config::default()),
        }
    }

    fn backend(&self) -> Result<Option<Backend>> {
        self.backend
            .as_deref()
            .map(|b| b.parse().map_err(|msg| Error::Parse { line: 0, msg }))
            .transpose()
    }
}

fn entropy_seed() -> u64 {
    rand::random()
}

impl McArgs {
    fn params(&self, config: &Config) -> Result<RunParams> {
        let policy = match self.policy.or(config.policy).unwrap_or(PolicyKind::Practical) {
            PolicyKind::Practical => StoppingPolicy::Practical {
                k: self.k.or(config.k).unwrap_or(DEFAULT_K),
            },
            PolicyKind::Theoretical => StoppingPolicy::Theoretical {
                c: self.c.or(config.c).unwrap_or(1.0),
            },
        };
        Ok(RunParams {
            m: self.m.or(config.m).unwrap_or(DEFAULT_M),
            policy,
            seed: self.seed.unwrap_or_else(entropy_seed),
            backend: self.backend.or(config.backend()?).unwrap_or_default(),
        })
    }
}

/// Process exit code for a failed command.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::MagnitudeGuard { .. } | Error::ArithmeticOverflow => 3,
        Error::Internal(_) => 4,
        _ => 2,
    }
}

/// Runs a parsed command line, writing human/machine output to `out`.
/// Returns the exit code for successful runs.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let config = Config::from_env()?;
    match &cli.command {
        Command::Close(args) => cmd_close(args, &config, out),
        Command::Check(args) => cmd_check(args, &config, out),
        Command::Isopair(args) => cmd_isopair(args, &config, out),
        Command::Bench(args) => cmd_bench(args, &config, out),
        Command::Gen(args) => cmd_gen(args, out),
    }
}

pub fn cmd_close(args: &CloseArgs, config: &Config, out: &mut dyn Write) -> Result<i32> {
    let start = Instant::now();
    let (input, digest) = read_graph_file(&args.input)?;
    let t_read = start.elapsed().as_secs_f64();
    let mode = args.mode.or(config.mode).unwrap_or(Mode::Mc);

    let mut report = RunReport {
        input_digest: digest,
        n: input.n(),
        r_input: input.r(),
        ..Default::default()
    };
    let start = Instant::now();
    let result = match mode {
        Mode::Exact => {
            report.mode = "exact".into();
            classical_closure(&input)?
        }
        Mode::Mc => {
            let params = args.mc.params(config)?;
            report.mode = "mc".into();
            report.seed = Some(params.seed);
            report.m = Some(params.m);
            report.policy = Some(params.policy.to_string());
            report.backend = Some(params.backend.to_string());
            match params.policy {
                StoppingPolicy::Theoretical { c } => {
                    report.notes.push((
                        "error_bound".into(),
                        format!("{:e}", error_bound(input.n(), params.m as f64, c)),
                    ));
                    report.notes.push((
                        "error_bound_note".into(),
                        "C is a user-supplied guess; the true iteration constant is unknown".into(),
                    ));
                }
                StoppingPolicy::Practical { k } => report.notes.push((
                    "miss_probability_per_refinement".into(),
                    format!("{:e}", practical_miss_probability(params.m, k)),
                )),
            }
            probabilistic_closure(&input, &params)?
        }
    };
    let t_close = start.elapsed().as_secs_f64();
    drop(input);

    report.iterations = result.iterations;
    report.refining_iterations = result.refining_iterations();
    report.trace = result.trace.clone();
    report.stopping_reason = result.stopping_reason.to_string();
    report.max_value = result.max_value;
    report.r_closure = result.closure.r();

    let start = Instant::now();
    if let Some(path) = &args.out {
        write_graph_file(path, &result.closure)?;
    }
    let t_write = start.elapsed().as_secs_f64();
    report.timings = vec![
        ("read".into(), t_read),
        ("closure".into(), t_close),
        ("write".into(), t_write),
    ];
    if args.print_closure {
        report.closure = Some(result.closure);
    }
    write!(out, "{report}")?;
    Ok(0)
}

pub fn cmd_check(args: &CheckArgs, config: &Config, out: &mut dyn Write) -> Result<i32> {
    let (x, _) = read_graph_file(&args.input)?;
    let m = args.m.or(config.m).unwrap_or(DEFAULT_M);
    let trials = args.trials.or(config.trials).unwrap_or(DEFAULT_K).max(1);
    let seed = args.seed.unwrap_or_else(entropy_seed);
    let coherent = check_coherent(&x, m, trials, &mut seeded_rng(seed))?;
    writeln!(out, "seed: {seed}")?;
    writeln!(out, "m: {m}")?;
    writeln!(out, "trials: {trials}")?;
    if !x.is_rainbow() {
        writeln!(out, "note: coloring is not rainbow")?;
    }
    writeln!(out, "{}", if coherent { "coherent" } else { "not coherent (probabilistic)" })?;
    if coherent {
        writeln!(out, "false_accept_bound: {:e}", practical_miss_probability(m, trials))?;
    }
    if args.exact {
        let report = verify_coherent(&x);
        match &report.witness {
            None => writeln!(out, "exact: coherent")?,
            Some(w) => writeln!(
                out,
                "exact: not coherent (color {} at {:?} vs {:?}: {:?})",
                w.color, w.first, w.second, w.violation
            )?,
        }
        let agree = report.coherent == coherent;
        writeln!(out, "agreement: {}", if agree { "yes" } else { "no" })?;
    }
    Ok(if coherent { 0 } else { 1 })
}

/// Outcome of [`isopair`].
#[derive(Debug, Clone)]
pub struct IsoPairReport {
    pub outcome: probabilistic::PairedOutcome,
    /// Present when a candidate mapping was produced: whether it preserves colors.
    pub verified: Option<bool>,
}

pub fn isopair(x: &ColorMatrix, y: &ColorMatrix, params: &RunParams) -> Result<IsoPairReport> {
    let outcome = paired_closure(x, y, params)?;
    let verified = outcome
        .mapping
        .as_ref()
        .map(|m| probabilistic::is_isomorphism(x, y, m));
    Ok(IsoPairReport { outcome, verified })
}

impl IsoPairReport {
    pub fn render(&self, params: &RunParams) -> String {
        let o = &self.outcome;
        let mut s = String::new();
        let join = |t: &[usize]| t.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
        let _ = writeln!(s, "seed: {}", params.seed);
        let _ = writeln!(s, "m: {}", params.m);
        let _ = writeln!(s, "policy: {}", params.policy);
        let _ = writeln!(s, "trace_first: {}", join(&o.first.trace));
        let _ = writeln!(s, "trace_second: {}", join(&o.second.trace));
        match (o.divergence, &o.mapping) {
            (Some(i), _) => {
                let _ = writeln!(s, "verdict: color multisets diverge at iteration {i}");
            }
            (None, None) => {
                let _ = writeln!(s, "verdict: identical color multisets at every iteration");
                let _ = writeln!(s, "mapping: none (closure not discrete)");
            }
            (None, Some(map)) => {
                let _ = writeln!(s, "verdict: identical color multisets at every iteration");
                let pairs: Vec<String> = map.iter().enumerate().map(|(u, v)| format!("{u}->{v}")).collect();
                let _ = writeln!(s, "mapping: {}", pairs.join(" "));
                let status = if self.verified == Some(true) { "verified" } else { "unverified" };
                let _ = writeln!(s, "mapping_status: {status}");
            }
        }
        s
    }
}

pub fn cmd_isopair(args: &IsopairArgs, config: &Config, out: &mut dyn Write) -> Result<i32> {
    let (x, _) = read_graph_file(&args.first)?;
    let (y, _) = read_graph_file(&args.second)?;
    let params = args.mc.params(config)?;
    let report = isopair(&x, &y, &params)?;
    out.write_all(report.render(&params).as_bytes())?;
    Ok(0)
}

fn time_median<T>(reps: usize, mut f: impl FnMut() -> Result<T>) -> Result<f64> {
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        std::hint::black_box(f()?);
        times.push(start.elapsed().as_secs_f64());
    }
    Ok(median(times))
}

pub fn cmd_bench(args: &BenchArgs, config: &Config, out: &mut dyn Write) -> Result<i32> {
    if let Some(&n) = args.sizes.iter().find(|&&n| n == 0 || n > BENCH_SIZE_CAP) {
        return Err(Error::Parse {
            line: 0,
            msg: format!("bench size {n} outside 1..={BENCH_SIZE_CAP}"),
        });
    }
    let backend = args.backend.or(config.backend()?).unwrap_or_default();
    if args.mode == BenchMode::Matmul {
        writeln!(out, "{:>6} {:>8} {:>12}", "n", "backend", "multiply_s")?;
        for row in bench_multiply(&args.sizes, backend, args.reps, args.seed) {
            writeln!(out, "{:>6} {:>8} {:>12.6}", row.n, row.backend, row.median_secs)?;
        }
        return Ok(0);
    }
    writeln!(out, "{:>6} {:>12} {:>12} {:>6}", "n", "step_s", "closure_s", "iters")?;
    for &n in &args.sizes {
        let x = make_fixture(&Fixture::Random {
            n,
            r: args.colors.max(1),
            seed: args.seed,
        })?;
        let rainbow = rainbow_refine(&x);
        let (step, closure, iters) = match args.mode {
            BenchMode::Exact => {
                let step = time_median(args.reps, || Ok(classical_step(&rainbow)))?;
                let iters = classical_closure(&x)?.iterations;
                let closure = time_median(args.reps, || classical_closure(&x))?;
                (step, closure, iters)
            }
            _ => {
                let mut rng = seeded_rng(args.seed);
                let step = time_median(args.reps, || {
                    let sub = probabilistic::draw_substitution(rainbow.r() as usize, DEFAULT_M, &mut rng)?;
                    probabilistic::substitution_step(&rainbow, &sub, backend)
                })?;
                let params = RunParams {
                    backend,
                    ..RunParams::new(args.seed)
                };
                let iters = probabilistic_closure(&x, &params)?.iterations;
                let closure = time_median(args.reps, || probabilistic_closure(&x, &params))?;
                (step, closure, iters)
            }
        };
        writeln!(out, "{n:>6} {step:>12.6} {closure:>12.6} {iters:>6}")?;
    }
    Ok(0)
}

pub fn cmd_gen(args: &GenArgs, out: &mut dyn Write) -> Result<i32> {
    let mut fixture: Fixture = args.fixture.join(" ").parse()?;
    if let (Fixture::Random { seed, .. }, Some(s)) = (&mut fixture, args.seed) {
        *seed = s;
    }
    let x = make_fixture(&fixture)?;
    match &args.out {
        Some(path) => write_atomic(path, |w| {
            writeln!(w, "# {fixture}")?;
            write_graph(w, &x)
        })?,
        None => {
            writeln!(out, "# {fixture}")?;
            write_graph(&mut *out, &x)?;
        }
    }
    Ok(0)
}
