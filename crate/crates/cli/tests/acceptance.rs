//! Acceptance criteria A1–A9. Each test prints one `PASS`/`FAIL` line to
//! stderr (bypassing the test harness capture) and then asserts.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};
use std::io::Write as _;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use decospan::commands::{self, BuildConfig, SchemeName};
use decospan::gen;
use decospan::io::Instance;
use decospan_core::decomp::{
    cap_ratio_mc, covering_batch, empirical_cluster_probability, initial_phi,
    lsh_amplify, BallCarving, CollisionModel, CoveringOptions, DecompositionScheme, HashFamily,
    LshFamily, PointHash,
};
use decospan_core::eval::verify_stretch;
use decospan_core::math::Ordf;
use decospan_core::nets::{build_hierarchy, build_net};
use decospan_core::spanner::{build_graph_spanner, effective_stretch, BuildOptions, ScaleLadder};
use decospan_core::{rng, MetricSpace, Net, WeightedGraph};
use rand::{Rng, RngCore};

fn line(id: &str, what: &str, pass: bool, detail: &str, start: Instant) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(
        std::io::stderr(),
        "{id} {verdict} {what}: {detail} [{:.1}s]",
        start.elapsed().as_secs_f64()
    );
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len();
    if m % 2 == 1 {
        xs[m / 2]
    } else {
        (xs[m / 2 - 1] + xs[m / 2]) / 2.0
    }
}

#[test]
fn a1_stretch_soundness() {
    let start = Instant::now();
    let configs = [(2.0, 64, 4), (2.0, 64, 16), (2.0, 256, 4), (2.0, 256, 16), (1.5, 128, 8)];
    let (mut runs, mut failures, mut worst) = (0, Vec::new(), 0.0f64);
    for &(p, n, d) in &configs {
        for inst_seed in 0..4u64 {
            let inst = Instance::Points(gen::gaussian(n, d, p, 1000 + inst_seed).unwrap());
            let mut schemes = vec![SchemeName::LshPstable, SchemeName::RandomShift];
            if p == 2.0 {
                schemes.insert(0, SchemeName::BallCarving);
            }
            for &t in &[2.0, 3.0] {
                for &scheme in &schemes {
                    for seed in 0..3u64 {
                        runs += 1;
                        let cfg = BuildConfig { scheme, t, eps: 0.1, beta: None, seed, timing: false };
                        let tag = format!("p={p} n={n} d={d} inst={inst_seed} t={t} {} seed={seed}", scheme.as_str());
                        match commands::build(&inst, &cfg) {
                            Ok(b) => {
                                let alpha = effective_stretch(0.1, t).unwrap();
                                let r = verify_stretch(&b.space, &b.spanner, alpha).unwrap();
                                worst = worst.max(r.max_stretch / alpha);
                                if !r.pass {
                                    failures.push(format!("{tag}: stretch {}", r.max_stretch));
                                }
                            }
                            Err(e) => failures.push(format!("{tag}: {e}")),
                        }
                    }
                }
            }
        }
    }
    let pass = failures.is_empty();
    line(
        "A1",
        "stretch soundness",
        pass,
        &format!("{runs} builds, {} failures, max stretch/alpha {worst:.3}", failures.len()),
        start,
    );
    assert!(pass, "{failures:#?}");
}

fn net_valid(space: &MetricSpace, net: &Net) -> bool {
    let m = &net.members;
    let packing = m
        .iter()
        .enumerate()
        .all(|(a, &x)| m[a + 1..].iter().all(|&y| space.dist(x, y) > net.radius));
    let covering = (0..space.len()).all(|x| m.iter().any(|&y| space.dist(x, y) <= net.radius));
    packing && covering
}

#[test]
fn a2_net_guarantees() {
    let start = Instant::now();
    let mut r = rng::stream(2, "a2");
    let (mut nets, mut bad) = (0, Vec::new());
    for k in 0..100u64 {
        let n = r.random_range(10..80);
        let space = if k % 5 == 4 {
            let g = gen::geometric_graph(n, 0.25, k).unwrap();
            MetricSpace::from_graph(g)
        } else {
            let d = r.random_range(1..6);
            let p = [1.0, 1.5, 2.0][(k % 3) as usize];
            let pts = if k % 2 == 0 { gen::gaussian(n, d, p, k) } else { gen::hypercube(n, d, p, k) };
            MetricSpace::from_points(pts.unwrap())
        }
        .normalize()
        .unwrap();
        let l = space.mst().weight;
        let ladder = ScaleLadder::new(0.1, l).unwrap();
        let radii = ladder.net_radii();
        let h = build_hierarchy(&space, &radii).unwrap();
        for (i, level) in h.levels.iter().enumerate() {
            nets += 1;
            if !net_valid(&space, level) {
                bad.push(format!("instance {k} level {i}: not a net"));
            }
            if i + 1 < h.levels.len() && !h.levels[i + 1].members.iter().all(|&x| level.contains(x)) {
                bad.push(format!("instance {k} level {i}: not nested"));
            }
            if level.len() as f64 > 2.0 * l / level.radius {
                bad.push(format!("instance {k} level {i}: {} > 2L/r", level.len()));
            }
        }
        for &rad in &[0.5, 1.0, l / 4.0, l] {
            nets += 1;
            let net = build_net(&space, rad, None).unwrap();
            if !net_valid(&space, &net) || net.len() as f64 > 2.0 * l / rad {
                bad.push(format!("instance {k} single net at r = {rad}"));
            }
        }
    }
    let pass = bad.is_empty();
    line("A2", "net guarantees", pass, &format!("100 instances, {nets} nets, {} violations", bad.len()), start);
    assert!(pass, "{bad:#?}");
}

#[test]
fn a3_covering_batches() {
    let start = Instant::now();
    let mut bad = Vec::new();
    if initial_phi(100, 0.5) != 19 {
        bad.push("phi(100, 0.5) != 19".to_string());
    }
    let mut r = rng::stream(3, "a3");
    let (mut samples, mut few_rounds) = (0, 0);
    for k in 0..50u64 {
        let n = 40 + (k as usize % 5) * 15;
        let d = 2 + (k as usize % 3);
        let space = MetricSpace::from_points(gen::gaussian(n, d, 2.0, 300 + k).unwrap()).normalize().unwrap();
        let t = [2.0, 3.0][(k % 2) as usize];
        let scheme = BallCarving::calibrated(d, t, 20_000, &mut r).unwrap();
        let delta = scheme.params().numeric_delta().unwrap();
        let scale = [1.0, 1.5, 3.0, 6.0, 12.0][(k % 5) as usize];
        let domain: Vec<usize> = (0..n).collect();
        let batch = covering_batch(&scheme, &space, &domain, &domain, scale, CoveringOptions::default(), &mut r);
        let Ok(batch) = batch else {
            bad.push(format!("sample {k}: {}", batch.unwrap_err()));
            continue;
        };
        samples += 1;
        let want = (2.0 * (n as f64).ln() / delta).ceil() as usize;
        if batch.phi != want {
            bad.push(format!("sample {k}: phi {} != {want}", batch.phi));
        }
        for x in 0..n {
            for y in x + 1..n {
                let close = space.dist(x, y) <= scale * (1.0 + 1e-9);
                if close && !batch.partitions.iter().any(|p| p.same_cluster(x, y)) {
                    bad.push(format!("sample {k}: pair ({x}, {y}) never co-clustered"));
                }
            }
        }
        if batch.resample_rounds <= 3 {
            few_rounds += 1;
        }
    }
    let share = few_rounds as f64 / samples.max(1) as f64;
    let pass = bad.is_empty() && share >= 0.9;
    line(
        "A3",
        "covering batches",
        pass,
        &format!("{samples} samples, {} violations, {:.0}% with <= 3 resample rounds", bad.len(), 100.0 * share),
        start,
    );
    assert!(pass, "{bad:#?} share {share}");
}

struct Never;
struct Zero;
impl PointHash for Zero {
    fn bucket(&self, _: &[f64]) -> i64 {
        0
    }
}
impl HashFamily for Never {
    type Hash = Zero;
    fn draw(&self, _: &mut dyn RngCore) -> Zero {
        Zero
    }
}

/// Each component puts two fixed points together with probability `q`.
struct Coin(f64);
struct CoinHash(bool);
impl PointHash for CoinHash {
    fn bucket(&self, x: &[f64]) -> i64 {
        if self.0 {
            0
        } else {
            1 + x[0] as i64
        }
    }
}
impl HashFamily for Coin {
    type Hash = CoinHash;
    fn draw(&self, rng: &mut dyn RngCore) -> CoinHash {
        CoinHash(rng.random::<f64>() < self.0)
    }
}

#[test]
fn a4_lsh_amplification() {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut r = rng::stream(4, "a4");
    for _ in 0..50 {
        let p2: f64 = r.random_range(0.02..0.98);
        let n: usize = r.random_range(2..100_000);
        let model = CollisionModel::new(1.0, 2.0, 1.0, p2).unwrap();
        let k = lsh_amplify(LshFamily::new(Never, model), n).unwrap().k;
        // least k with p2^k <= n^-2, by direct search
        let target = 1.0 / (n as f64 * n as f64);
        let mut want = 1;
        while p2.powi(want) > target * (1.0 + 1e-12) {
            want += 1;
        }
        if k != want as usize {
            bad.push(format!("p2 {p2} n {n}: k {k} != {want}"));
        }
    }
    let mut freqs = Vec::new();
    for &q in &[0.3, 0.5, 0.9] {
        let model = CollisionModel::new(1.0, 2.0, q, q).unwrap();
        let fam = lsh_amplify(LshFamily::new(Coin(q), model), 3).unwrap();
        let want = q.powi(fam.k as i32);
        let trials = 10_000;
        let hits = (0..trials).filter(|_| fam.draw(&mut r).collide(&[0.0], &[1.0])).count();
        let got = hits as f64 / trials as f64;
        let sigma = (want * (1.0 - want) / trials as f64).sqrt();
        freqs.push(format!("q={q} k={} {got:.4}/{want:.4}", fam.k));
        if (got - want).abs() > 3.0 * sigma {
            bad.push(format!("q {q}: frequency {got} vs {want} (sigma {sigma})"));
        }
    }
    let pass = bad.is_empty();
    line("A4", "lsh amplification", pass, &format!("50 k checks, {}", freqs.join(", ")), start);
    assert!(pass, "{bad:#?}");
}

fn lens_ratio(u: f64, r: f64) -> f64 {
    let area = 2.0 * r * r * (u / (2.0 * r)).acos() - 0.5 * u * (4.0 * r * r - u * u).sqrt();
    area / (std::f64::consts::PI * r * r)
}

#[test]
fn a5_ball_carving_probability() {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut r = rng::stream(5, "a5");
    let (d, t, samples, trials) = (4, 4.0, 100_000, 2000);
    let inst = Instance::Points(gen::gaussian(40, d, 2.0, 55).unwrap());
    let space = inst.space().unwrap();
    let scheme = BallCarving::new(t, decospan_core::decomp::DeltaHint::Adaptive).unwrap();
    let domain: Vec<usize> = (0..40).collect();
    let mut shown = Vec::new();
    for &(x, y) in &[(0usize, 1usize), (2, 3), (5, 17), (8, 30)] {
        // Δ is the pair's own distance
        let delta = space.dist(x, y);
        let (p, se) = empirical_cluster_probability(&scheme, &space, &domain, (x, y), delta, trials, &mut r).unwrap();
        let bound = cap_ratio_mc(d, delta, t * delta / 2.0, samples, &mut r).unwrap() / 2.0;
        shown.push(format!("{p:.3}>={bound:.3}"));
        if p < bound - 3.0 * se {
            bad.push(format!("pair ({x}, {y}): {p} below {bound} - 3*{se}"));
        }
    }
    let want = lens_ratio(1.0, 1.0);
    let got = cap_ratio_mc(2, 1.0, 1.0, samples, &mut r).unwrap();
    let sigma = (want * (1.0 - want) / samples as f64).sqrt();
    if (want - 0.3910).abs() > 5e-5 || (got - want).abs() > 3.0 * sigma {
        bad.push(format!("lens ratio {got} vs {want}"));
    }
    let pass = bad.is_empty();
    line(
        "A5",
        "ball-carving probability",
        pass,
        &format!("co-clustering {}; lens {got:.4} vs {want:.4}", shown.join(" ")),
        start,
    );
    assert!(pass, "{bad:#?}");
}

#[test]
fn a6_tradeoff_direction() {
    let start = Instant::now();
    let inst = Instance::Points(gen::gaussian(512, 16, 2.0, 6).unwrap());
    let mut bad = Vec::new();
    let (mut med_edges, mut med_light) = (Vec::new(), Vec::new());
    for &t in &[2.0, 3.0, 5.0, 8.0] {
        let (mut edges, mut light) = (Vec::new(), Vec::new());
        for seed in 0..5u64 {
            let cfg = BuildConfig { scheme: SchemeName::BallCarving, t, eps: 0.1, beta: None, seed, timing: false };
            let b = commands::build(&inst, &cfg).unwrap();
            let r = verify_stretch(&b.space, &b.spanner, b.sidecar.alpha).unwrap();
            if !r.pass {
                bad.push(format!("t {t} seed {seed}: stretch {}", r.max_stretch));
            }
            edges.push(b.spanner.edges.len() as f64);
            light.push(decospan_core::eval::lightness(&b.spanner, &b.space.mst()));
        }
        med_edges.push(median(edges));
        med_light.push(median(light));
    }
    let mono = |xs: &[f64]| xs.windows(2).all(|w| w[1] <= w[0]);
    if !mono(&med_edges) || !mono(&med_light) {
        bad.push("medians are not non-increasing in t".into());
    }
    let pass = bad.is_empty();
    let fmt = |xs: &[f64]| xs.iter().map(|x| format!("{x:.1}")).collect::<Vec<_>>().join(" > ");
    line(
        "A6",
        "tradeoff direction",
        pass,
        &format!("median edges {}; median lightness {}", fmt(&med_edges), fmt(&med_light)),
        start,
    );
    assert!(pass, "{bad:#?}");
}

/// Exact strong diameter of `cluster` by Dijkstra from each member inside
/// the induced subgraph.
fn strong_diameter(g: &WeightedGraph, scale: f64, cluster: &[usize]) -> f64 {
    let local = |x: usize| cluster.binary_search(&x).ok();
    let m = cluster.len();
    let mut adj = vec![Vec::new(); m];
    for &(u, v, w) in g.edges() {
        if let (Some(a), Some(b)) = (local(u), local(v)) {
            adj[a].push((b, w * scale));
            adj[b].push((a, w * scale));
        }
    }
    let mut worst = 0.0f64;
    for s in 0..m {
        let mut dist = vec![f64::INFINITY; m];
        dist[s] = 0.0;
        let mut heap = BinaryHeap::from([Reverse((Ordf(0.0), s))]);
        while let Some(Reverse((Ordf(d), a))) = heap.pop() {
            if d > dist[a] {
                continue;
            }
            for &(b, w) in &adj[a] {
                if d + w < dist[b] {
                    dist[b] = d + w;
                    heap.push(Reverse((Ordf(d + w), b)));
                }
            }
        }
        worst = dist.into_iter().fold(worst, f64::max);
    }
    worst
}

struct Dsu(Vec<usize>);
impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        if self.0[x] != x {
            let r = self.find(self.0[x]);
            self.0[x] = r;
        }
        self.0[x]
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
        ra != rb
    }
}

#[test]
fn a7_graph_spanner() {
    let start = Instant::now();
    let (t, eps) = (3.0, 0.1);
    let mut graphs: Vec<(String, WeightedGraph)> = (0..10u64)
        .map(|k| (format!("geometric {k}"), gen::geometric_graph(200, 0.12, 700 + k).unwrap()))
        .collect();
    graphs.push(("grid 5".into(), gen::grid(5).unwrap()));
    graphs.push(("grid 12".into(), gen::grid(12).unwrap()));
    let mut bad = Vec::new();
    let mut partitions = 0;
    for (k, (name, g)) in graphs.iter().enumerate() {
        let space = MetricSpace::from_graph(g.clone()).normalize().unwrap();
        let s = space.scale_factor();
        let scheme = decospan_core::decomp::StrongGraph::new(t).unwrap();
        let options = BuildOptions { trace: true, ..BuildOptions::default() };
        let mut r = rng::stream(k as u64, "a7");
        let h = match build_graph_spanner(&space, &scheme, eps, options, &mut r) {
            Ok(h) => h,
            Err(e) => {
                bad.push(format!("{name}: {e}"));
                continue;
            }
        };
        let graph_edges: BTreeSet<(usize, usize)> = g.edges().iter().map(|e| (e.0.min(e.1), e.0.max(e.1))).collect();
        if !h.edges.iter().all(|e| graph_edges.contains(&(e.0, e.1))) {
            bad.push(format!("{name}: spanner edge outside the graph"));
        }
        for entry in h.trace.as_ref().unwrap() {
            partitions += 1;
            let mut dsu = Dsu((0..g.len()).collect());
            if !entry.edges.iter().all(|&(u, v)| dsu.union(u, v)) {
                bad.push(format!("{name}: cycle in a partition's edges"));
            }
            let bound = t * (1.0 + 2.0 * eps) * h.build_log[entry.scale].delta_i;
            for c in entry.partition.clusters() {
                if strong_diameter(g, s, c) > bound * (1.0 + 1e-9) {
                    bad.push(format!("{name}: cluster exceeds strong diameter {bound}"));
                }
            }
        }
        let rep = verify_stretch(&space, &h, h.alpha().unwrap()).unwrap();
        if !rep.pass {
            bad.push(format!("{name}: stretch {}", rep.max_stretch));
        }
    }
    let pass = bad.is_empty();
    line(
        "A7",
        "graph spanner",
        pass,
        &format!("{} graphs, {partitions} partitions checked, {} violations", graphs.len(), bad.len()),
        start,
    );
    assert!(pass, "{bad:#?}");
}

fn kruskal_weights(space: &MetricSpace) -> Vec<f64> {
    let n = space.len();
    let mut all: Vec<(f64, usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| (space.dist(i, j), i, j)).collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut dsu = Dsu((0..n).collect());
    all.into_iter().filter(|e| dsu.union(e.1, e.2)).map(|e| e.0).collect()
}

fn run(bin: &str, args: &[&str], dir: &Path) -> (i32, Vec<u8>) {
    let out = Command::new(bin).args(args).current_dir(dir).output().unwrap();
    let mut bytes = out.stdout;
    for name in ["out.txt", "out.txt.log.json"] {
        if let Ok(b) = std::fs::read(dir.join(name)) {
            bytes.extend(b);
            std::fs::remove_file(dir.join(name)).unwrap();
        }
    }
    (out.status.code().unwrap_or(-1), bytes)
}

#[test]
fn a8_oracles_and_determinism() {
    let start = Instant::now();
    let mut bad = Vec::new();
    for k in 0..100u64 {
        let n = 20 + (k as usize % 7) * 10;
        let space = if k % 4 == 3 {
            MetricSpace::from_graph(gen::geometric_graph(n, 0.2, k).unwrap())
        } else {
            MetricSpace::from_points(gen::gaussian(n, 1 + k as usize % 6, [1.0, 1.5, 2.0][k as usize % 3], k).unwrap())
        };
        let mst = space.mst();
        let mut prim: Vec<f64> = mst.tree_edges.iter().map(|e| e.2).collect();
        prim.sort_by(f64::total_cmp);
        let kw = kruskal_weights(&space);
        let total: f64 = kw.iter().sum();
        if prim != kw || (mst.weight - total).abs() > 1e-12 * total {
            bad.push(format!("instance {k}: Prim {} vs Kruskal {total}", mst.weight));
        }
    }
    let bin = env!("CARGO_BIN_EXE_decospan");
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("pts.txt"), run(bin, &["gen", "gaussian", "40", "3", "2", "--seed", "8"], d).1).unwrap();
    std::fs::write(d.join("g.txt"), run(bin, &["gen", "geometric-graph", "40", "0.3", "--seed", "8"], d).1).unwrap();
    run(bin, &["build", "--input", "pts.txt", "--scheme", "random-shift", "--seed", "8", "--out", "sp.txt", "--no-timing"], d);
    let commands: Vec<Vec<&str>> = vec![
        vec!["gen", "gaussian", "30", "4", "2", "--seed", "7"],
        vec!["gen", "hypercube", "30", "3", "1.5", "--seed", "7"],
        vec!["gen", "grid", "5"],
        vec!["gen", "geometric-graph", "30", "0.3", "--seed", "7"],
        vec!["build", "--input", "pts.txt", "--scheme", "ball-carving", "--t", "3", "--seed", "3", "--out", "out.txt", "--no-timing"],
        vec!["build", "--input", "pts.txt", "--scheme", "lsh-pstable", "--t", "3", "--seed", "3", "--out", "out.txt", "--no-timing"],
        vec!["build", "--input", "pts.txt", "--scheme", "random-shift", "--beta", "0.5", "--seed", "3", "--out", "out.txt", "--no-timing"],
        vec!["build", "--input", "g.txt", "--scheme", "strong-graph", "--t", "3", "--seed", "3", "--out", "out.txt", "--no-timing"],
        vec!["eval", "--input", "pts.txt", "--spanner", "sp.txt", "--no-timing"],
        vec!["eval", "--input", "pts.txt", "--spanner", "sp.txt", "--format", "csv", "--no-timing"],
        vec!["probe", "--input", "pts.txt", "--scheme", "ball-carving", "--t", "4", "--scale", "2", "--trials", "100", "--seed", "3"],
        vec!["bench", "--input", "pts.txt", "--scheme", "random-shift", "--ts", "2,3", "--seeds", "1,2", "--no-timing"],
    ];
    for c in &commands {
        let (code_a, a) = run(bin, c, d);
        let (code_b, b) = run(bin, c, d);
        if code_a != 0 || code_b != 0 || a != b || a.is_empty() {
            bad.push(format!("`{}`: exit {code_a}/{code_b}, identical {}", c.join(" "), a == b));
        }
    }
    let pass = bad.is_empty();
    line(
        "A8",
        "oracle equivalence and determinism",
        pass,
        &format!("100 MST instances, {} commands run twice, {} violations", commands.len(), bad.len()),
        start,
    );
    assert!(pass, "{bad:#?}");
}

#[test]
fn a9_subset_decomposable() {
    let start = Instant::now();
    let inst = Instance::Points(gen::gaussian(256, 4, 2.0, 9).unwrap());
    let cfg = BuildConfig { scheme: SchemeName::BallCarving, t: 3.0, eps: 0.1, beta: Some(0.5), seed: 9, timing: false };
    let b = commands::build(&inst, &cfg).unwrap();
    let mut bad = Vec::new();
    for rec in &b.spanner.build_log {
        let n = rec.n_i as f64;
        let want = if rec.n_i < 2 { 0 } else { (2.0 * n.sqrt() * n.ln()).ceil() as usize };
        if rec.phi_i != want {
            bad.push(format!("scale {}: phi {} != {want} (n_i = {})", rec.i, rec.phi_i, rec.n_i));
        }
    }
    let r = verify_stretch(&b.space, &b.spanner, b.sidecar.alpha).unwrap();
    if !r.pass {
        bad.push(format!("stretch {}", r.max_stretch));
    }
    let pass = bad.is_empty();
    line(
        "A9",
        "subset-decomposable variant",
        pass,
        &format!(
            "{} scales, phi_0 = {}, stretch {:.3} <= {:.3}",
            b.spanner.build_log.len(),
            b.spanner.build_log[0].phi_i,
            r.max_stretch,
            b.sidecar.alpha
        ),
        start,
    );
    assert!(pass, "{bad:#?}");
}
