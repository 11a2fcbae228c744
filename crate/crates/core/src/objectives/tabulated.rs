use super::{ObjectiveKind, SetFunction};
use crate::error::{Error, Result};
use crate::set;

/// Explicit value per subset, indexed by bitmask. Test and counterexample use only.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    n: usize,
    table: Vec<f64>,
}

pub const MAX_TABULATED: usize = 20;

impl Tabulated {
    pub fn new(n: usize, table: Vec<f64>) -> Result<Self> {
        if n == 0 || n > MAX_TABULATED {
            return Err(Error::TooLarge {
                what: "tabulated ground set",
                size: n,
                limit: MAX_TABULATED,
            });
        }
        if table.len() != 1 << n {
            return Err(Error::param(format!(
                "table has {} entries, expected {}",
                table.len(),
                1usize << n
            )));
        }
        Ok(Self { n, table })
    }

    /// Tabulates `f` over every subset of `0..n`.
    pub fn from_fn(n: usize, f: impl Fn(&[usize]) -> f64) -> Result<Self> {
        if n > MAX_TABULATED {
            return Err(Error::TooLarge {
                what: "tabulated ground set",
                size: n,
                limit: MAX_TABULATED,
            });
        }
        let table = (0..1u64 << n).map(|m| f(&set::from_mask(m))).collect();
        Self::new(n, table)
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }
}

impl SetFunction for Tabulated {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn kind(&self) -> ObjectiveKind {
        ObjectiveKind::Tabulated
    }

    fn value(&self, set: &[usize]) -> Result<f64> {
        Ok(self.table[set::to_mask(set) as usize])
    }
}
