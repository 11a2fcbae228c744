//! Plain-text instance files.
//!
//! * matrix: `n`, then `n` rows of `n` numbers;
//! * graph: `n m`, then `m` lines `u v w`, 1-based, root is vertex 1;
//! * points: `n`, `depot_x depot_y rate`, then `n` lines `x y c_s`;
//! * manifest `instance.txt`: `key=value` lines naming the others.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::scenario::{Scenario, ScenarioData, ScenarioInstance};
use crate::error::{Error, Result};
use crate::objectives::{CovarianceMatrix, SimilarityMatrix};
use crate::routing::{CostKind, PointSet, WeightedGraph};

pub const MANIFEST: &str = "instance.txt";

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

/// Non-empty, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn numbers<T: std::str::FromStr>(path: &Path, line: usize, text: &str) -> Result<Vec<T>> {
    text.split_whitespace()
        .map(|tok| tok.parse().map_err(|_| parse_err(path, line, format!("bad number `{tok}`"))))
        .collect()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Reads a square matrix file; returns `(n, row-major entries)`.
pub fn read_matrix(path: &Path) -> Result<(usize, Vec<f64>)> {
    let text = read(path)?;
    let mut lines = content_lines(&text);
    let (l0, header) = lines.next().ok_or_else(|| parse_err(path, 1, "empty matrix file"))?;
    let n: usize = header.parse().map_err(|_| parse_err(path, l0, "first line must be the size n"))?;
    let mut entries = Vec::with_capacity(n * n);
    let mut rows = 0;
    for (ln, line) in lines {
        let row: Vec<f64> = numbers(path, ln, line)?;
        if row.len() != n {
            return Err(parse_err(path, ln, format!("row has {} entries, expected {n}", row.len())));
        }
        entries.extend(row);
        rows += 1;
    }
    if rows != n {
        return Err(parse_err(path, 0, format!("matrix has {rows} rows, expected {n}")));
    }
    Ok((n, entries))
}

pub fn write_matrix(path: &Path, n: usize, entries: &[f64]) -> Result<()> {
    let mut out = format!("{n}\n");
    for row in entries.chunks(n.max(1)) {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", cells.join(" "));
    }
    write(path, &out)
}

pub fn read_graph(path: &Path) -> Result<WeightedGraph> {
    let text = read(path)?;
    let mut lines = content_lines(&text);
    let (l0, header) = lines.next().ok_or_else(|| parse_err(path, 1, "empty graph file"))?;
    let nm: Vec<usize> = numbers(path, l0, header)?;
    let [n, m] = nm[..] else {
        return Err(parse_err(path, l0, "header must be `n m`"));
    };
    let mut edges = Vec::with_capacity(m);
    for (ln, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(parse_err(path, ln, "edge line must be `u v w`"));
        }
        let u: usize = numbers(path, ln, parts[0])?[0];
        let v: usize = numbers(path, ln, parts[1])?[0];
        let w: f64 = numbers(path, ln, parts[2])?[0];
        if u == 0 || v == 0 || u > n || v > n {
            return Err(parse_err(path, ln, format!("vertex out of 1..={n}")));
        }
        edges.push((u - 1, v - 1, w));
    }
    if edges.len() != m {
        return Err(parse_err(path, 0, format!("{} edges listed, header says {m}", edges.len())));
    }
    WeightedGraph::new(n, &edges)
}

pub fn write_graph(path: &Path, graph: &WeightedGraph) -> Result<()> {
    let edges = graph.edges();
    let mut out = format!("{} {}\n", graph.vertex_count(), edges.len());
    for (u, v, w) in edges {
        let _ = writeln!(out, "{} {} {w}", u + 1, v + 1);
    }
    write(path, &out)
}

/// Points file; returns the point set and the per-point visiting costs.
pub fn read_points(path: &Path) -> Result<(PointSet, Vec<f64>)> {
    let text = read(path)?;
    let mut lines = content_lines(&text);
    let (l0, header) = lines.next().ok_or_else(|| parse_err(path, 1, "empty points file"))?;
    let n: usize = header.parse().map_err(|_| parse_err(path, l0, "first line must be the count n"))?;
    let (l1, depot_line) = lines.next().ok_or_else(|| parse_err(path, 2, "missing depot line"))?;
    let depot: Vec<f64> = numbers(path, l1, depot_line)?;
    let [dx, dy, rate] = depot[..] else {
        return Err(parse_err(path, l1, "depot line must be `x y rate`"));
    };
    let mut coords = Vec::with_capacity(n);
    let mut visiting = Vec::with_capacity(n);
    for (ln, line) in lines {
        let v: Vec<f64> = numbers(path, ln, line)?;
        let [x, y, c] = v[..] else {
            return Err(parse_err(path, ln, "point line must be `x y c_s`"));
        };
        coords.push([x, y]);
        visiting.push(c);
    }
    if coords.len() != n {
        return Err(parse_err(path, 0, format!("{} points listed, header says {n}", coords.len())));
    }
    Ok((PointSet::new(coords, [dx, dy], rate)?, visiting))
}

pub fn write_points(path: &Path, points: &PointSet, visiting: &[f64]) -> Result<()> {
    let d = points.depot();
    let mut out = format!("{}\n{} {} {}\n", points.len(), d[0], d[1], points.travel_rate());
    for (p, c) in points.coords().iter().zip(visiting) {
        let _ = writeln!(out, "{} {} {c}", p[0], p[1]);
    }
    write(path, &out)
}

/// Writes the instance files and manifest into `dir` (created if needed).
/// Returns the paths written.
pub fn write_instance(dir: &Path, inst: &ScenarioInstance) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut manifest = format!(
        "scenario={}\nseed={}\nn={}\noracle={}\n",
        inst.scenario,
        inst.seed,
        inst.n(),
        inst.cost.kind()
    );
    let mut written = Vec::new();
    match &inst.data {
        ScenarioData::Multicast {
            graph,
            similarity,
            lambda,
        } => {
            let g = dir.join("graph.txt");
            let s = dir.join("similarity.txt");
            write_graph(&g, graph)?;
            write_matrix(&s, similarity.len(), similarity.entries())?;
            let _ = write!(manifest, "objective=cut-diversity\nlambda={lambda}\ngraph=graph.txt\nsimilarity=similarity.txt\n");
            written.extend([g, s]);
        }
        ScenarioData::Poi {
            points,
            collection,
            covariance,
        } => {
            let p = dir.join("points.txt");
            let c = dir.join("covariance.txt");
            write_points(&p, points, collection)?;
            write_matrix(&c, covariance.len(), covariance.entries())?;
            let _ = write!(manifest, "objective=mutual-information\npoints=points.txt\ncovariance=covariance.txt\n");
            written.extend([p, c]);
        }
    }
    let m = dir.join(MANIFEST);
    write(&m, &manifest)?;
    written.push(m);
    Ok(written)
}

/// Parses `key=value` lines; `#` starts a comment line.
pub fn parse_key_values(path: &Path, text: &str) -> Result<Vec<(usize, String, String)>> {
    content_lines(text)
        .map(|(ln, line)| {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| parse_err(path, ln, "expected key=value"))?;
            Ok((ln, k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

/// Loads an instance directory (or its manifest path) written by
/// [`write_instance`] or by hand.
pub fn read_instance(path: &Path) -> Result<ScenarioInstance> {
    let manifest = if path.is_dir() { path.join(MANIFEST) } else { path.to_path_buf() };
    let dir = manifest.parent().unwrap_or(Path::new(".")).to_path_buf();
    let text = read(&manifest)?;
    let mut scenario = None;
    let mut seed = 0;
    let mut oracle = None;
    let mut lambda = 1.0;
    let mut files = std::collections::HashMap::new();
    for (ln, key, value) in parse_key_values(&manifest, &text)? {
        let bad = |what: &str| parse_err(&manifest, ln, format!("bad {what} `{value}`"));
        match key.as_str() {
            "scenario" => scenario = Some(value.parse::<Scenario>()?),
            "seed" => seed = value.parse().map_err(|_| bad("seed"))?,
            "oracle" => oracle = Some(value.parse::<CostKind>()?),
            "lambda" => lambda = value.parse().map_err(|_| bad("lambda"))?,
            "graph" | "similarity" | "points" | "covariance" => {
                files.insert(key.clone(), dir.join(&value));
            }
            "n" | "objective" => {}
            _ => return Err(parse_err(&manifest, ln, format!("unknown key `{key}`"))),
        }
    }
    let scenario = scenario.ok_or_else(|| parse_err(&manifest, 0, "missing scenario"))?;
    let file = |key: &str| {
        files
            .get(key)
            .cloned()
            .ok_or_else(|| parse_err(&manifest, 0, format!("missing {key} file")))
    };
    let data = match scenario {
        Scenario::Multicast => {
            let graph = read_graph(&file("graph")?)?;
            let (n, entries) = read_matrix(&file("similarity")?)?;
            ScenarioData::Multicast {
                graph,
                similarity: SimilarityMatrix::new(n, entries)?,
                lambda,
            }
        }
        Scenario::Poi => {
            let (points, collection) = read_points(&file("points")?)?;
            let (n, entries) = read_matrix(&file("covariance")?)?;
            ScenarioData::Poi {
                points,
                collection,
                covariance: CovarianceMatrix::new(n, entries)?,
            }
        }
    };
    let kind = oracle.unwrap_or(match scenario {
        Scenario::Multicast => CostKind::SteinerKmb,
        Scenario::Poi => CostKind::TspTwoOpt,
    });
    ScenarioInstance::assemble(scenario, seed, data, kind)
}
