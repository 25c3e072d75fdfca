use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use decospan::commands::{self, BenchConfig, BuildConfig, BuildSidecar, EvalConfig, ProbeConfig, SchemeName};
use decospan::io::{self, Instance};
use decospan::{gen, CliError, Result};

#[derive(Parser)]
#[command(name = "decospan", version, about = "Light spanners from stochastic decompositions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic instance.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Build a spanner; writes `u v w` lines to --out and a JSON log to `<out>.log.json`.
    Build(BuildArgs),
    /// Measure stretch, lightness and sparsity of a spanner file.
    Eval(EvalArgs),
    /// Estimate same-cluster probabilities of close pairs.
    Probe(ProbeArgs),
    /// Build and evaluate over a grid of t values and seeds; CSV output.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenOut {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenKind {
    /// Standard Gaussian points: `gaussian <n> <d> <p>`.
    Gaussian {
        n: usize,
        d: usize,
        p: f64,
        #[command(flatten)]
        out: GenOut,
    },
    /// Uniform points of the unit cube: `hypercube <n> <d> <p>`.
    Hypercube {
        n: usize,
        d: usize,
        p: f64,
        #[command(flatten)]
        out: GenOut,
    },
    /// Unit-weight k×k grid graph.
    Grid {
        k: usize,
        #[command(flatten)]
        out: GenOut,
    },
    /// Random geometric graph on the unit square, made connected with its MST.
    GeometricGraph {
        n: usize,
        radius: f64,
        #[command(flatten)]
        out: GenOut,
    },
}

#[derive(Args)]
struct SchemeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    scheme: SchemeName,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// Use batches sized for co-clustering probability n_i^-beta.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Leave wall-clock times out of the output, making it reproducible byte for byte.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    common: SchemeArgs,
    #[arg(long, default_value_t = 2.0)]
    t: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    spanner: PathBuf,
    /// Defaults to the value in `<spanner>.log.json`.
    #[arg(long)]
    t: Option<f64>,
    /// Defaults to the value in `<spanner>.log.json`.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct ProbeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    scheme: SchemeName,
    #[arg(long, default_value_t = 2.0)]
    t: f64,
    /// Δ in normalized units, where the closest pair is at distance 1.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Number of close pairs to sample.
    #[arg(long, default_value_t = 10)]
    pairs: usize,
    /// Probe one pair `u,v` instead of sampling.
    #[arg(long, value_parser = parse_pair)]
    pair: Option<(usize, usize)>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: SchemeArgs,
    /// Comma-separated t values.
    #[arg(long, value_delimiter = ',', default_value = "2,3,5,8")]
    ts: Vec<f64>,
    /// Comma-separated seeds; overrides --seed.
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_pair(s: &str) -> std::result::Result<(usize, usize), String> {
    let (u, v) = s.split_once(',').ok_or("expected `u,v`")?;
    let idx = |x: &str| x.trim().parse::<usize>().map_err(|e| e.to_string());
    Ok((idx(u)?, idx(v)?))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => io::write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn sidecar_path(spanner: &Path) -> PathBuf {
    let mut s = spanner.as_os_str().to_owned();
    s.push(".log.json");
    PathBuf::from(s)
}

fn run_gen(kind: GenKind) -> Result<()> {
    let (instance, out) = match kind {
        GenKind::Gaussian { n, d, p, out } => (Instance::Points(gen::gaussian(n, d, p, out.seed)?), out),
        GenKind::Hypercube { n, d, p, out } => (Instance::Points(gen::hypercube(n, d, p, out.seed)?), out),
        GenKind::Grid { k, out } => (Instance::Graph(gen::grid(k)?), out),
        GenKind::GeometricGraph { n, radius, out } => {
            (Instance::Graph(gen::geometric_graph(n, radius, out.seed)?), out)
        }
    };
    emit(out.out.as_deref(), &io::format_instance(&instance))
}

fn run_build(args: BuildArgs) -> Result<()> {
    let c = args.common;
    let instance = io::load_instance(&c.input)?;
    let built = commands::build(
        &instance,
        &BuildConfig {
            scheme: c.scheme,
            t: args.t,
            eps: c.eps,
            beta: c.beta,
            seed: c.seed,
            timing: !c.no_timing,
        },
    )?;
    io::write_text(&args.out, &io::format_edges(&built.edges_in_input_units()))?;
    io::write_text(&sidecar_path(&args.out), &json(&built.sidecar)?)
}

fn run_eval(args: EvalArgs) -> Result<()> {
    let instance = io::load_instance(&args.input)?;
    let edges = io::parse_edges(&io::read_text(&args.spanner)?, instance.len())?;
    let side = sidecar_path(&args.spanner);
    let sidecar: Option<BuildSidecar> = if side.exists() {
        Some(serde_json::from_str(&io::read_text(&side)?)?)
    } else {
        None
    };
    let pick = |flag: Option<f64>, from: fn(&BuildSidecar) -> f64, name: &str| {
        flag.or(sidecar.as_ref().map(from))
            .ok_or_else(|| CliError::invalid(format!("--{name} is required without a build log")))
    };
    let cfg = EvalConfig {
        t: pick(args.t, |s| s.t, "t")?,
        eps: pick(args.eps, |s| s.eps, "eps")?,
        delta: sidecar.as_ref().and_then(|s| s.delta),
        build_log: sidecar.as_ref().map(|s| s.build_log.clone()).unwrap_or_default(),
        build_millis: sidecar.as_ref().and_then(|s| s.build_millis).filter(|_| !args.no_timing),
        timing: !args.no_timing,
    };
    let report = commands::evaluate(&instance, &edges, &cfg)?;
    let text = match args.format {
        Format::Json => json(&report)?,
        Format::Csv => commands::report_csv(&report),
    };
    emit(args.out.as_deref(), &text)?;
    if !report.pass {
        return Err(CliError::Verification {
            measured: report.max_stretch,
            bound: report.alpha,
        });
    }
    Ok(())
}

fn run_probe(args: ProbeArgs) -> Result<()> {
    let instance = io::load_instance(&args.input)?;
    let report = commands::probe(
        &instance,
        &ProbeConfig {
            scheme: args.scheme,
            t: args.t,
            scale: args.scale,
            trials: args.trials,
            seed: args.seed,
            pairs: args.pairs,
            pair: args.pair,
        },
    )?;
    emit(args.out.as_deref(), &json(&report)?)
}

fn run_bench(args: BenchArgs) -> Result<()> {
    let c = args.common;
    let instance = io::load_instance(&c.input)?;
    let seeds = if args.seeds.is_empty() { vec![c.seed] } else { args.seeds };
    let rows = commands::bench(
        &instance,
        &BenchConfig {
            scheme: c.scheme,
            ts: args.ts,
            seeds,
            eps: c.eps,
            beta: c.beta,
            timing: !c.no_timing,
        },
    )?;
    emit(args.out.as_deref(), &commands::bench_csv(&rows))?;
    if let Some(bad) = rows.iter().find(|r| !r.pass) {
        return Err(CliError::Verification {
            measured: bad.max_stretch,
            bound: bad.alpha,
        });
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen { kind } => run_gen(kind),
        Command::Build(a) => run_build(a),
        Command::Eval(a) => run_eval(a),
        Command::Probe(a) => run_probe(a),
        Command::Bench(a) => run_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
