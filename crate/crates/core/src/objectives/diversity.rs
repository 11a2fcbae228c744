//! Similarity-based diversity objectives.

use std::sync::Arc;

use super::{ObjectiveKind, SetFunction};
use crate::error::{Error, Result};

/// Square matrix of pairwise similarity scores.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    entries: Vec<f64>,
    symmetric: bool,
}

impl SimilarityMatrix {
    /// Row-major `n x n` entries.
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("similarity matrix must be nonempty"));
        }
        if entries.len() != n * n {
            return Err(Error::param(format!(
                "similarity matrix has {} entries, expected {}",
                entries.len(),
                n * n
            )));
        }
        if let Some(bad) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::param(format!(
                "similarity entry ({}, {}) is not finite",
                bad / n,
                bad % n
            )));
        }
        let symmetric = (0..n).all(|i| (0..i).all(|j| entries[i * n + j] == entries[j * n + i]));
        Ok(Self {
            n,
            entries,
            symmetric,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::param("similarity matrix is not square"));
        }
        Self::new(n, rows.concat())
    }

    /// Gram matrix of the given feature vectors (plain inner products).
    pub fn from_features(features: &[Vec<f64>]) -> Result<Self> {
        let n = features.len();
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let dot: f64 = features[i].iter().zip(&features[j]).map(|(a, b)| a * b).sum();
                entries[i * n + j] = dot;
                entries[j * n + i] = dot;
            }
        }
        Self::new(n, entries)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
}

fn membership(n: usize, set: &[usize]) -> Result<Vec<bool>> {
    let mut member = vec![false; n];
    for &i in set {
        if i >= n {
            return Err(Error::ItemOutOfRange { item: i, n });
        }
        member[i] = true;
    }
    Ok(member)
}

/// `sum_{i not in S} sum_{j in S} s_ij - lambda * sum_{i in S} sum_{j in S} s_ij`.
pub fn cut_diversity(sim: &SimilarityMatrix, lambda: f64, set: &[usize]) -> Result<f64> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::param(format!("lambda must lie in (0, 1], got {lambda}")));
    }
    let member = membership(sim.n, set)?;
    let mut cross = 0.0;
    let mut inner = 0.0;
    for i in 0..sim.n {
        let row: f64 = set.iter().map(|&j| sim.get(i, j)).sum();
        if member[i] {
            inner += row;
        } else {
            cross += row;
        }
    }
    Ok(cross - lambda * inner)
}

/// `sum_{i not in S} max_{j in S} d_ij - (1/|complement|) * sum_{i,j in S} d_ij`.
///
/// The empty set scores 0. The full set is a domain error.
pub fn summarization_diversity(sim: &SimilarityMatrix, set: &[usize]) -> Result<f64> {
    let member = membership(sim.n, set)?;
    let inside = member.iter().filter(|&&m| m).count();
    if inside == 0 {
        return Ok(0.0);
    }
    let outside = sim.n - inside;
    if outside == 0 {
        return Err(Error::FullSetUndefined);
    }
    let mut coverage = 0.0;
    let mut inner = 0.0;
    for i in 0..sim.n {
        if member[i] {
            inner += set.iter().map(|&j| sim.get(i, j)).sum::<f64>();
        } else {
            coverage += set
                .iter()
                .map(|&j| sim.get(i, j))
                .fold(f64::NEG_INFINITY, f64::max);
        }
    }
    Ok(coverage - inner / outside as f64)
}

#[derive(Debug, Clone)]
pub struct CutDiversity {
    sim: Arc<SimilarityMatrix>,
    lambda: f64,
}

impl CutDiversity {
    pub fn new(sim: Arc<SimilarityMatrix>, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::param(format!("lambda must lie in (0, 1], got {lambda}")));
        }
        Ok(Self { sim, lambda })
    }

    pub fn similarity(&self) -> &SimilarityMatrix {
        &self.sim
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

impl SetFunction for CutDiversity {
    fn ground_size(&self) -> usize {
        self.sim.n
    }

    fn kind(&self) -> ObjectiveKind {
        ObjectiveKind::CutDiversity
    }

    fn value(&self, set: &[usize]) -> Result<f64> {
        cut_diversity(&self.sim, self.lambda, set)
    }
}

#[derive(Debug, Clone)]
pub struct SummarizationDiversity {
    sim: Arc<SimilarityMatrix>,
}

impl SummarizationDiversity {
    pub fn new(sim: Arc<SimilarityMatrix>) -> Self {
        Self { sim }
    }
}

impl SetFunction for SummarizationDiversity {
    fn ground_size(&self) -> usize {
        self.sim.n
    }

    fn kind(&self) -> ObjectiveKind {
        ObjectiveKind::SummarizationDiversity
    }

    fn value(&self, set: &[usize]) -> Result<f64> {
        summarization_diversity(&self.sim, set)
    }
}
