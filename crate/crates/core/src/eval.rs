//! Stretch, lightness and sparsity of a built spanner.

use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::math::{self, REL_TOL};
use crate::paths::{dijkstra, Search};
use crate::rng;
use crate::spanner::{effective_stretch, ScaleRecord, Spanner};
use crate::{Error, MetricSpace, MstSummary, Result};

/// Above this many points stretch is checked on sampled pairs.
pub const EXACT_LIMIT: usize = 4096;
pub const SAMPLED_PAIRS: usize = 10_000;
const SAMPLING_SEED: u64 = 0x5eed_0f5a_3b1e;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StretchReport {
    /// `max d_H / d_X`; infinite when the spanner is disconnected.
    pub max_stretch: f64,
    pub worst_pair: Option<(usize, usize)>,
    /// `min d_H / d_X`, which is at least 1 for true-distance edges.
    pub min_ratio: f64,
    pub pass: bool,
    /// False when only a sample of pairs was checked.
    pub exact: bool,
}

/// Measures the stretch of `spanner` against `space` and compares it with
/// `bound` up to `1e-9` relative.
pub fn verify_stretch(space: &MetricSpace, spanner: &Spanner, bound: f64) -> Result<StretchReport> {
    let n = space.len();
    if spanner.n != n {
        return Err(Error::invalid("spanner and space have different sizes"));
    }
    let mut report = StretchReport {
        max_stretch: 1.0,
        worst_pair: None,
        min_ratio: 1.0,
        pass: true,
        exact: n <= EXACT_LIMIT,
    };
    if n < 2 {
        return Ok(report);
    }
    let adj = spanner.adjacency();
    let mut first = true;
    let mut record = |report: &mut StretchReport, u: usize, v: usize, dh: f64| {
        let ratio = dh / space.dist(u, v);
        if first || ratio > report.max_stretch {
            report.max_stretch = ratio;
            report.worst_pair = Some((u, v));
        }
        if first || ratio < report.min_ratio {
            report.min_ratio = ratio;
        }
        first = false;
    };
    if report.exact {
        for u in 0..n {
            let dist = dijkstra(&adj, u);
            for (v, &d) in dist.iter().enumerate().skip(u + 1) {
                record(&mut report, u, v, d);
            }
        }
    } else {
        let mut rng = rng::stream(SAMPLING_SEED, "stretch-sample");
        let mut search = Search::new(n);
        for _ in 0..SAMPLED_PAIRS {
            let u = rng.random_range(0..n);
            let mut v = rng.random_range(0..n - 1);
            if v >= u {
                v += 1;
            }
            search.run(&adj, u, |_| true, Some(v));
            record(&mut report, u.min(v), u.max(v), search.dist[v]);
        }
    }
    report.pass = report.max_stretch <= bound * (1.0 + REL_TOL);
    Ok(report)
}

/// Spanner weight over MST weight; 1 when the MST is empty.
pub fn lightness(spanner: &Spanner, mst: &MstSummary) -> f64 {
    if !(mst.weight > 0.0) {
        return 1.0;
    }
    spanner.weight() / mst.weight
}

/// Number of distinct spanner edges.
pub fn sparsity(spanner: &Spanner) -> usize {
    spanner.edges.len()
}

/// Everything measured for one build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n: usize,
    pub t: f64,
    pub eps: f64,
    pub alpha: f64,
    pub max_stretch: f64,
    pub worst_pair: Option<(usize, usize)>,
    pub pass: bool,
    pub exact: bool,
    pub lightness: f64,
    pub edge_count: usize,
    pub build_log: Vec<ScaleRecord>,
    /// `1/δ^t`, present only when the scheme had a fixed δ.
    pub nu: Option<f64>,
    pub build_millis: Option<u64>,
    pub eval_millis: Option<u64>,
}

impl EvalReport {
    pub const CSV_HEADER: &'static str =
        "n,t,eps,alpha,max_stretch,worst_u,worst_v,pass,exact,lightness,edge_count,nu,build_millis,eval_millis";

    /// One CSV row matching [`EvalReport::CSV_HEADER`]; absent values are empty.
    pub fn csv_row(&self) -> alloc::string::String {
        use alloc::format;
        use alloc::string::ToString;
        let opt = |x: Option<alloc::string::String>| x.unwrap_or_default();
        let (wu, wv) = match self.worst_pair {
            Some((u, v)) => (u.to_string(), v.to_string()),
            None => Default::default(),
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.t,
            self.eps,
            self.alpha,
            self.max_stretch,
            wu,
            wv,
            self.pass,
            self.exact,
            self.lightness,
            self.edge_count,
            opt(self.nu.map(|x| x.to_string())),
            opt(self.build_millis.map(|x| x.to_string())),
            opt(self.eval_millis.map(|x| x.to_string())),
        )
    }
}

/// Packs the measurements of one build. `delta` is the scheme's fixed δ, if any.
pub fn assemble_report(
    space: &MetricSpace,
    spanner: &Spanner,
    stretch: &StretchReport,
    delta: Option<f64>,
    build_millis: Option<u64>,
    eval_millis: Option<u64>,
) -> Result<EvalReport> {
    Ok(EvalReport {
        n: spanner.n,
        t: spanner.t,
        eps: spanner.eps,
        alpha: effective_stretch(spanner.eps, spanner.t)?,
        max_stretch: stretch.max_stretch,
        worst_pair: stretch.worst_pair,
        pass: stretch.pass,
        exact: stretch.exact,
        lightness: lightness(spanner, &space.mst()),
        edge_count: sparsity(spanner),
        build_log: spanner.build_log.clone(),
        nu: delta.map(|d| math::powf(d, -spanner.t)),
        build_millis,
        eval_millis,
    })
}
