//! Plain-text instance and spanner files.
//!
//! Point sets:
//!
//! ```text
//! p 2 d 3
//! 0.5 1.25 -3
//! ...
//! ```
//!
//! Graphs, with 0-based vertices:
//!
//! ```text
//! graph 4
//! 0 1 1.5
//! ...
//! ```
//!
//! Spanners are bare `u v w` lines. Blank lines and lines starting with `#`
//! are skipped everywhere. Floats are written with Rust's shortest
//! round-trip formatting, so files are reproducible byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use decospan_core::{MetricSpace, PointSet, WeightedGraph};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Points(PointSet),
    Graph(WeightedGraph),
}

impl Instance {
    pub fn len(&self) -> usize {
        match self {
            Instance::Points(p) => p.len(),
            Instance::Graph(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Normalized metric space of the instance.
    pub fn space(&self) -> Result<MetricSpace> {
        let space = match self {
            Instance::Points(p) => MetricSpace::from_points(p.clone()),
            Instance::Graph(g) => MetricSpace::from_graph(g.clone()),
        };
        Ok(space.normalize()?)
    }
}

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_err(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Parse {
        line,
        msg: msg.into(),
    }
}

fn float(line: usize, tok: &str) -> Result<f64> {
    let x: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("`{tok}` is not a number")))?;
    if !x.is_finite() {
        return Err(parse_err(line, format!("non-finite value `{tok}`")));
    }
    Ok(x)
}

fn index(line: usize, tok: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("`{tok}` is not a vertex index")))
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut it = lines(text);
    let (line, header) = it.next().ok_or_else(|| CliError::invalid("empty instance file"))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    match head.as_slice() {
        ["p", p, "d", d] => {
            let p = float(line, p)?;
            let dim = index(line, d)?;
            let mut coords = Vec::new();
            for (line, l) in it {
                let before = coords.len();
                for tok in l.split_whitespace() {
                    coords.push(float(line, tok)?);
                }
                if coords.len() - before != dim {
                    return Err(parse_err(line, format!("expected {dim} coordinates")));
                }
            }
            Ok(Instance::Points(PointSet::new(dim, p, coords)?))
        }
        ["graph", n] => {
            let n = index(line, n)?;
            let mut edges = Vec::new();
            for (line, l) in it {
                edges.push(edge_line(line, l)?);
            }
            Ok(Instance::Graph(WeightedGraph::new(n, edges)?))
        }
        _ => Err(parse_err(line, "expected `p <exponent> d <dim>` or `graph <n>`")),
    }
}

fn edge_line(line: usize, l: &str) -> Result<(usize, usize, f64)> {
    let tok: Vec<&str> = l.split_whitespace().collect();
    let [u, v, w] = tok.as_slice() else {
        return Err(parse_err(line, "expected `u v w`"));
    };
    Ok((index(line, u)?, index(line, v)?, float(line, w)?))
}

pub fn format_instance(instance: &Instance) -> String {
    let mut out = String::new();
    match instance {
        Instance::Points(p) => {
            let _ = writeln!(out, "p {} d {}", p.p(), p.dim());
            for i in 0..p.len() {
                let row: Vec<String> = p.point(i).iter().map(|c| c.to_string()).collect();
                let _ = writeln!(out, "{}", row.join(" "));
            }
        }
        Instance::Graph(g) => {
            let _ = writeln!(out, "graph {}", g.len());
            for &(u, v, w) in g.edges() {
                let _ = writeln!(out, "{u} {v} {w}");
            }
        }
    }
    out
}

/// Reads `u v w` lines for a spanner over `n` points. Rejects loops,
/// repeated pairs, out-of-range indices and non-positive weights.
pub fn parse_edges(text: &str, n: usize) -> Result<Vec<(usize, usize, f64)>> {
    let mut edges = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (line, l) in lines(text) {
        let (u, v, w) = edge_line(line, l)?;
        if u >= n || v >= n {
            return Err(parse_err(line, format!("vertex out of range for n = {n}")));
        }
        if u == v || !(w > 0.0) {
            return Err(parse_err(line, "edges need distinct ends and positive weight"));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(parse_err(line, "repeated edge"));
        }
        edges.push((u.min(v), u.max(v), w));
    }
    Ok(edges)
}

pub fn format_edges(edges: &[(usize, usize, f64)]) -> String {
    let mut out = String::new();
    for &(u, v, w) in edges {
        let _ = writeln!(out, "{u} {v} {w}");
    }
    out
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    parse_instance(&read_text(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_round_trip() {
        let text = "p 1.5 d 2\n0 0\n1 0.25\n-3 1e-7\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.len(), 3);
        assert_eq!(format_instance(&inst), "p 1.5 d 2\n0 0\n1 0.25\n-3 0.0000001\n");
        assert_eq!(parse_instance(&format_instance(&inst)).unwrap(), inst);
    }

    #[test]
    fn graph_round_trip() {
        let text = "# triangle\ngraph 3\n0 1 1\n1 2 2.5\n\n0 2 3\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(parse_instance(&format_instance(&inst)).unwrap(), inst);
    }

    #[test]
    fn rejects_bad_input() {
        for bad in [
            "",
            "p 2 d 2\n0 NaN\n",
            "p 2 d 2\n0 inf\n",
            "p 2 d 2\n0 1 2\n",
            "p 2 d 2\n1 1\n1 1\n",
            "p 3 d 1\n0\n1\n",
            "graph 3\n0 1 1\n",
            "graph 2\n0 1 -1\n",
            "graph 2\n0 5 1\n",
            "mesh 4\n",
        ] {
            assert!(parse_instance(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn edge_lists() {
        let e = parse_edges("1 0 2\n2 1 0.5\n", 3).unwrap();
        assert_eq!(e, vec![(0, 1, 2.0), (1, 2, 0.5)]);
        assert_eq!(format_edges(&e), "0 1 2\n1 2 0.5\n");
        assert!(parse_edges("0 1 1\n1 0 1\n", 2).is_err());
        assert!(parse_edges("0 0 1\n", 2).is_err());
        assert!(parse_edges("0 3 1\n", 2).is_err());
    }
}
