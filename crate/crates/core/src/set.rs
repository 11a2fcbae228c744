//! Small helpers for item sets represented as index slices and bitmasks.

use crate::error::{Error, Result};

/// Sorted, deduplicated copy of `items`, checked against a ground set of size `n`.
pub fn canonical(items: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut out = items.to_vec();
    out.sort_unstable();
    out.dedup();
    if let Some(&last) = out.last() {
        if last >= n {
            return Err(Error::ItemOutOfRange { item: last, n });
        }
    }
    Ok(out)
}

pub(crate) fn is_canonical(items: &[usize]) -> bool {
    items.windows(2).all(|w| w[0] < w[1])
}

/// Items of `mask`, ascending.
pub fn from_mask(mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        out.push(i);
        m &= m - 1;
    }
    out
}

pub fn to_mask(items: &[usize]) -> u64 {
    items.iter().fold(0u64, |m, &i| m | (1u64 << i))
}

/// Items of the ground set `0..n` that are not in the canonical set `items`.
pub fn complement(items: &[usize], n: usize) -> Vec<usize> {
    let mut member = vec![false; n];
    for &i in items {
        member[i] = true;
    }
    (0..n).filter(|&i| !member[i]).collect()
}

pub(crate) fn with_item(items: &[usize], x: usize) -> Vec<usize> {
    let pos = items.partition_point(|&i| i < x);
    let mut out = Vec::with_capacity(items.len() + 1);
    out.extend_from_slice(&items[..pos]);
    out.push(x);
    out.extend_from_slice(&items[pos..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_sorts_and_rejects() {
        assert_eq!(canonical(&[3, 1, 3], 4).unwrap(), vec![1, 3]);
        assert!(matches!(
            canonical(&[4], 4),
            Err(Error::ItemOutOfRange { item: 4, n: 4 })
        ));
    }

    #[test]
    fn masks() {
        assert_eq!(from_mask(0b1011), vec![0, 1, 3]);
        assert_eq!(to_mask(&[0, 1, 3]), 0b1011);
        assert_eq!(complement(&[0, 2], 4), vec![1, 3]);
        assert_eq!(with_item(&[0, 2, 5], 3), vec![0, 2, 3, 5]);
    }
}
