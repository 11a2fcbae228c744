//! Submodular objectives and the counting oracle wrapper used by every solver.
//!
//! A [`SetFunction`] is a pure map from canonical item sets to reals. The
//! [`ObjectiveOracle`] wraps one behind an `Arc`, validates inputs and counts
//! evaluations. Forked oracles share the function but carry their own
//! counter, so parallel runs never mix their call counts.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::set;

mod check;
mod diversity;
mod gaussian;
mod tabulated;

pub use check::{check_submodularity, SubmodularityMode};
pub use diversity::{cut_diversity, summarization_diversity, CutDiversity, SimilarityMatrix,
    SummarizationDiversity};
pub use gaussian::{gaussian_entropy, mutual_information, CovarianceMatrix, MutualInformation};
pub use tabulated::Tabulated;

/// Which concrete objective backs an oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveKind {
    CutDiversity,
    SummarizationDiversity,
    MutualInformation,
    Tabulated,
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObjectiveKind::CutDiversity => "cut-diversity",
            ObjectiveKind::SummarizationDiversity => "summarization-diversity",
            ObjectiveKind::MutualInformation => "mutual-information",
            ObjectiveKind::Tabulated => "tabulated",
        })
    }
}

/// A set function over the ground set `0..ground_size()`.
///
/// `value` receives a canonical set (sorted, unique, in range) and must be
/// deterministic.
pub trait SetFunction: Send + Sync + fmt::Debug {
    fn ground_size(&self) -> usize;
    fn kind(&self) -> ObjectiveKind;
    fn value(&self, set: &[usize]) -> Result<f64>;
}

/// Counting wrapper around a [`SetFunction`].
#[derive(Debug)]
pub struct ObjectiveOracle {
    function: Arc<dyn SetFunction>,
    calls: AtomicU64,
}

impl ObjectiveOracle {
    pub fn new(function: impl SetFunction + 'static) -> Self {
        Self::from_arc(Arc::new(function))
    }

    pub fn from_arc(function: Arc<dyn SetFunction>) -> Self {
        Self {
            function,
            calls: AtomicU64::new(0),
        }
    }

    pub fn cut_diversity(sim: SimilarityMatrix, lambda: f64) -> Result<Self> {
        Ok(Self::new(CutDiversity::new(Arc::new(sim), lambda)?))
    }

    pub fn summarization_diversity(sim: SimilarityMatrix) -> Self {
        Self::new(SummarizationDiversity::new(Arc::new(sim)))
    }

    pub fn mutual_information(cov: CovarianceMatrix) -> Result<Self> {
        Ok(Self::new(MutualInformation::new(Arc::new(cov))?))
    }

    pub fn tabulated(n: usize, table: Vec<f64>) -> Result<Self> {
        Ok(Self::new(Tabulated::new(n, table)?))
    }

    /// Same function, fresh counter.
    pub fn fork(&self) -> Self {
        Self::from_arc(Arc::clone(&self.function))
    }

    pub fn function(&self) -> &Arc<dyn SetFunction> {
        &self.function
    }

    pub fn ground_size(&self) -> usize {
        self.function.ground_size()
    }

    pub fn kind(&self) -> ObjectiveKind {
        self.function.kind()
    }

    /// Number of `eval` invocations so far (including those made by `marginal_gain`).
    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    /// `f(set)`. Counts one call even when the evaluation fails.
    pub fn eval(&self, set: &[usize]) -> Result<f64> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        let n = self.ground_size();
        if set::is_canonical(set) {
            if let Some(&last) = set.last() {
                if last >= n {
                    return Err(Error::ItemOutOfRange { item: last, n });
                }
            }
            self.function.value(set)
        } else {
            self.function.value(&set::canonical(set, n)?)
        }
    }

    /// `f(set + x) - f(set)`, computed as that difference.
    pub fn marginal_gain(&self, set: &[usize], x: usize) -> Result<f64> {
        let n = self.ground_size();
        if x >= n {
            return Err(Error::ItemOutOfRange { item: x, n });
        }
        let base = set::canonical(set, n)?;
        if base.binary_search(&x).is_ok() {
            return Err(Error::AlreadyInSet { item: x });
        }
        let with = set::with_item(&base, x);
        Ok(self.eval(&with)? - self.eval(&base)?)
    }

    /// Like [`eval`](Self::eval) but maps sets on which the objective is
    /// undefined to `-inf`, so they are never selected.
    pub fn eval_or_neg_inf(&self, set: &[usize]) -> Result<f64> {
        match self.eval(set) {
            Err(Error::FullSetUndefined) => Ok(f64::NEG_INFINITY),
            other => other,
        }
    }
}

/// All `2^n` values of `f`, indexed by bitmask. Undefined sets map to `-inf`.
/// Uses the uncounted function directly.
pub fn value_table(function: &dyn SetFunction) -> Result<Vec<f64>> {
    let n = function.ground_size();
    if n > 24 {
        return Err(Error::TooLarge {
            what: "ground set for tabulation",
            size: n,
            limit: 24,
        });
    }
    (0..1u64 << n)
        .map(|mask| match function.value(&set::from_mask(mask)) {
            Err(Error::FullSetUndefined) => Ok(f64::NEG_INFINITY),
            other => other,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cut_example() -> ObjectiveOracle {
        let sim = SimilarityMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        ObjectiveOracle::cut_diversity(sim, 1.0).unwrap()
    }

    #[test]
    fn eval_counts_and_validates() {
        let f = cut_example();
        assert_eq!(f.eval(&[]).unwrap(), 0.0);
        assert_eq!(f.eval(&[0]).unwrap(), 1.0);
        assert!(matches!(f.eval(&[2]), Err(Error::ItemOutOfRange { .. })));
        assert_eq!(f.calls(), 3);
        let g = f.fork();
        assert_eq!(g.calls(), 0);
        assert_eq!(g.eval(&[1, 0]).unwrap(), f.eval(&[0, 1]).unwrap());
    }

    #[test]
    fn marginal_gain_is_difference() {
        let f = cut_example();
        assert_eq!(f.marginal_gain(&[], 0).unwrap(), 1.0);
        assert_eq!(f.calls(), 2);
        assert!(matches!(f.marginal_gain(&[0], 0), Err(Error::AlreadyInSet { item: 0 })));
        let cov = CovarianceMatrix::new(3, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let mi = ObjectiveOracle::mutual_information(cov).unwrap();
        assert_eq!(mi.marginal_gain(&[0], 2).unwrap(), 0.0);
    }

    #[test]
    fn undefined_maps_to_neg_inf() {
        let sim = SimilarityMatrix::from_rows(&[vec![1.0, 3.0], vec![3.0, 1.0]]).unwrap();
        let f = ObjectiveOracle::summarization_diversity(sim);
        assert_eq!(f.eval_or_neg_inf(&[0, 1]).unwrap(), f64::NEG_INFINITY);
        assert!(matches!(f.eval(&[0, 1]), Err(Error::FullSetUndefined)));
    }
}
