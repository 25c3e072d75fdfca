//! The work behind each subcommand, independent of argument parsing.

use std::fmt::Write as _;
use std::time::Instant;

use clap::ValueEnum;
use rand::seq::index;
use serde::{Deserialize, Serialize};

use decospan_core::decomp::{
    cap_ratio_mc, close_pairs, empirical_cluster_probability, BallCarving, DecompositionScheme,
    LshScheme, RandomShift, StrongGraph,
};
use decospan_core::eval::{assemble_report, verify_stretch, EvalReport};
use decospan_core::spanner::{
    build_graph_spanner, build_spanner_subset_decomposable, build_spanner_with, effective_stretch,
    BuildOptions, ScaleRecord,
};
use decospan_core::{rng, MetricSpace, Spanner};

use crate::error::{CliError, Result};
use crate::io::Instance;

/// Monte-Carlo draws behind ball-carving δ and the probe reference bound.
pub const CALIBRATION_SAMPLES: usize = 100_000;

pub const BENCH_HEADER: &str = "t,seed,edges,lightness,max_stretch,alpha,millis";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeName {
    BallCarving,
    LshPstable,
    RandomShift,
    StrongGraph,
}

impl SchemeName {
    pub fn as_str(self) -> &'static str {
        match self {
            SchemeName::BallCarving => "ball-carving",
            SchemeName::LshPstable => "lsh-pstable",
            SchemeName::RandomShift => "random-shift",
            SchemeName::StrongGraph => "strong-graph",
        }
    }
}

fn need_points(instance: &Instance, name: SchemeName) -> Result<&decospan_core::PointSet> {
    match instance {
        Instance::Points(p) => Ok(p),
        Instance::Graph(_) => Err(CliError::invalid(format!("{} needs a point set", name.as_str()))),
    }
}

/// The scheme named `name` for `instance`. Calibration draws come from the
/// `"scheme"` stream of `seed`.
pub fn make_scheme(name: SchemeName, t: f64, instance: &Instance, seed: u64) -> Result<Box<dyn DecompositionScheme>> {
    let mut r = rng::stream(seed, "scheme");
    Ok(match name {
        SchemeName::BallCarving => {
            let p = need_points(instance, name)?;
            if p.p() != 2.0 {
                return Err(CliError::invalid("ball-carving needs an l2 point set"));
            }
            Box::new(BallCarving::calibrated(p.dim(), t, CALIBRATION_SAMPLES, &mut r)?)
        }
        SchemeName::LshPstable => {
            let p = need_points(instance, name)?;
            Box::new(LshScheme::with_default_width(p.p(), p.dim(), t, &mut r)?)
        }
        SchemeName::RandomShift => Box::new(RandomShift::new(t)?),
        SchemeName::StrongGraph => {
            if !matches!(instance, Instance::Graph(_)) {
                return Err(CliError::invalid("strong-graph needs a graph"));
            }
            Box::new(StrongGraph::new(t)?)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildConfig {
    pub scheme: SchemeName,
    pub t: f64,
    pub eps: f64,
    pub beta: Option<f64>,
    pub seed: u64,
    pub timing: bool,
}

/// JSON written next to a spanner file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildSidecar {
    pub scheme: SchemeName,
    pub t: f64,
    pub eps: f64,
    pub beta: Option<f64>,
    pub seed: u64,
    pub n: usize,
    /// Factor that maps input distances to normalized ones.
    pub scale_factor: f64,
    pub alpha: f64,
    /// The scheme's fixed δ, absent when it is estimated per scale.
    pub delta: Option<f64>,
    pub edge_count: usize,
    pub build_log: Vec<ScaleRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub build_millis: Option<u64>,
}

pub struct Built {
    pub space: MetricSpace,
    /// Edges in normalized units.
    pub spanner: Spanner,
    pub sidecar: BuildSidecar,
}

impl Built {
    /// Edges in the units of the input file.
    pub fn edges_in_input_units(&self) -> Vec<(usize, usize, f64)> {
        let s = self.space.scale_factor();
        self.spanner.edges.iter().map(|&(u, v, w)| (u, v, w / s)).collect()
    }
}

pub fn build(instance: &Instance, cfg: &BuildConfig) -> Result<Built> {
    let space = instance.space()?;
    let scheme = make_scheme(cfg.scheme, cfg.t, instance, cfg.seed)?;
    let alpha = effective_stretch(cfg.eps, cfg.t)?;
    let mut r = rng::stream(cfg.seed, "build");
    let options = BuildOptions::default();
    let start = Instant::now();
    let spanner = match (instance, cfg.scheme, cfg.beta) {
        (Instance::Graph(_), SchemeName::StrongGraph, None) => {
            build_graph_spanner(&space, scheme.as_ref(), cfg.eps, options, &mut r)?
        }
        (_, SchemeName::StrongGraph, Some(_)) => {
            return Err(CliError::invalid("--beta is not supported with strong-graph"))
        }
        (_, _, Some(beta)) => {
            build_spanner_subset_decomposable(&space, scheme.as_ref(), cfg.eps, beta, options, &mut r)?
        }
        _ => build_spanner_with(&space, scheme.as_ref(), cfg.eps, options, &mut r)?,
    };
    let millis = start.elapsed().as_millis() as u64;
    let sidecar = BuildSidecar {
        scheme: cfg.scheme,
        t: cfg.t,
        eps: cfg.eps,
        beta: cfg.beta,
        seed: cfg.seed,
        n: space.len(),
        scale_factor: space.scale_factor(),
        alpha,
        delta: scheme.params().numeric_delta(),
        edge_count: spanner.edges.len(),
        build_log: spanner.build_log.clone(),
        build_millis: cfg.timing.then_some(millis),
    };
    Ok(Built {
        space,
        spanner,
        sidecar,
    })
}

/// What `eval` needs beyond the instance and the edges.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub t: f64,
    pub eps: f64,
    pub delta: Option<f64>,
    pub build_log: Vec<ScaleRecord>,
    pub build_millis: Option<u64>,
    pub timing: bool,
}

/// Evaluates a spanner given in input units against `instance`.
pub fn evaluate(instance: &Instance, edges: &[(usize, usize, f64)], cfg: &EvalConfig) -> Result<EvalReport> {
    let space = instance.space()?;
    let s = space.scale_factor();
    let mut spanner = Spanner::empty(space.len(), cfg.eps, cfg.t);
    spanner.edges = edges.iter().map(|&(u, v, w)| (u, v, w * s)).collect();
    spanner.build_log = cfg.build_log.clone();
    let alpha = effective_stretch(cfg.eps, cfg.t)?;
    let start = Instant::now();
    let stretch = verify_stretch(&space, &spanner, alpha)?;
    let millis = cfg.timing.then(|| start.elapsed().as_millis() as u64);
    Ok(assemble_report(&space, &spanner, &stretch, cfg.delta, cfg.build_millis, millis)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeConfig {
    pub scheme: SchemeName,
    pub t: f64,
    /// `Δ` in normalized units (minimum distance 1).
    pub scale: f64,
    pub trials: usize,
    pub seed: u64,
    /// How many close pairs to sample when `pair` is not given.
    pub pairs: usize,
    pub pair: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairProbe {
    pub u: usize,
    pub v: usize,
    pub distance: f64,
    pub probability: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub scheme: SchemeName,
    pub t: f64,
    pub scale: f64,
    pub trials: usize,
    pub pairs: Vec<PairProbe>,
    /// Smallest measured probability; 1 when there is nothing to separate.
    pub min_probability: f64,
    /// Ball carving only: `C_d(Δ, tΔ/2) / (2·V_d(tΔ/2))`.
    pub reference_bound: Option<f64>,
}

/// Measures same-cluster frequencies for close pairs of the whole instance.
pub fn probe(instance: &Instance, cfg: &ProbeConfig) -> Result<ProbeReport> {
    let space = instance.space()?;
    let n = space.len();
    let scheme = make_scheme(cfg.scheme, cfg.t, instance, cfg.seed)?;
    let domain: Vec<usize> = (0..n).collect();
    let chosen = match cfg.pair {
        Some((u, v)) => {
            if u >= n || v >= n {
                return Err(CliError::invalid(format!("pair ({u}, {v}) out of range for n = {n}")));
            }
            vec![(u.min(v), u.max(v))]
        }
        None => {
            let close = close_pairs(&space, &domain, cfg.scale);
            let mut r = rng::stream(cfg.seed, "probe/pairs");
            let mut picked: Vec<usize> = index::sample(&mut r, close.len(), cfg.pairs.min(close.len())).into_vec();
            picked.sort_unstable();
            picked.into_iter().map(|k| close[k]).collect()
        }
    };
    let mut r = rng::stream(cfg.seed, "probe");
    let mut pairs = Vec::with_capacity(chosen.len());
    for (u, v) in chosen {
        let (probability, std_error) = if u == v {
            (1.0, 0.0)
        } else {
            empirical_cluster_probability(scheme.as_ref(), &space, &domain, (u, v), cfg.scale, cfg.trials, &mut r)?
        };
        pairs.push(PairProbe {
            u,
            v,
            distance: space.dist(u, v),
            probability,
            std_error,
        });
    }
    let reference_bound = match (cfg.scheme, instance) {
        (SchemeName::BallCarving, Instance::Points(p)) => {
            let mut r = rng::stream(cfg.seed, "probe/reference");
            let ratio = cap_ratio_mc(p.dim(), cfg.scale, cfg.t * cfg.scale / 2.0, CALIBRATION_SAMPLES, &mut r)?;
            Some(ratio / 2.0)
        }
        _ => None,
    };
    Ok(ProbeReport {
        scheme: cfg.scheme,
        t: cfg.t,
        scale: cfg.scale,
        trials: cfg.trials,
        min_probability: pairs.iter().map(|p| p.probability).fold(1.0, f64::min),
        pairs,
        reference_bound,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub scheme: SchemeName,
    pub ts: Vec<f64>,
    pub seeds: Vec<u64>,
    pub eps: f64,
    pub beta: Option<f64>,
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub t: f64,
    pub seed: u64,
    pub edges: usize,
    pub lightness: f64,
    pub max_stretch: f64,
    pub alpha: f64,
    pub pass: bool,
    pub millis: Option<u64>,
}

impl BenchRow {
    pub fn csv(&self) -> String {
        let millis = self.millis.map(|m| m.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            self.t, self.seed, self.edges, self.lightness, self.max_stretch, self.alpha, millis
        )
    }
}

/// One build and evaluation per `(t, seed)`, `t` varying slowest. Each cell
/// is exactly what `build` with that `t` and seed produces.
pub fn bench(instance: &Instance, cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::with_capacity(cfg.ts.len() * cfg.seeds.len());
    for &t in &cfg.ts {
        for &seed in &cfg.seeds {
            let built = build(
                instance,
                &BuildConfig {
                    scheme: cfg.scheme,
                    t,
                    eps: cfg.eps,
                    beta: cfg.beta,
                    seed,
                    timing: true,
                },
            )?;
            let alpha = built.sidecar.alpha;
            let stretch = verify_stretch(&built.space, &built.spanner, alpha)?;
            let report = assemble_report(&built.space, &built.spanner, &stretch, None, None, None)?;
            rows.push(BenchRow {
                t,
                seed,
                edges: report.edge_count,
                lightness: report.lightness,
                max_stretch: report.max_stretch,
                alpha,
                pass: report.pass,
                millis: if cfg.timing { built.sidecar.build_millis } else { None },
            });
        }
    }
    Ok(rows)
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{BENCH_HEADER}");
    for row in rows {
        let _ = writeln!(out, "{}", row.csv());
    }
    out
}

pub fn report_csv(report: &EvalReport) -> String {
    format!("{}\n{}\n", EvalReport::CSV_HEADER, report.csv_row())
}
