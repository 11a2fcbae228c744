//! Gaussian entropy and mutual information over a covariance prior.

use std::f64::consts::{E, PI};
use std::sync::Arc;

use super::{ObjectiveKind, SetFunction};
use crate::error::{Error, Result};
use crate::set;

/// Cholesky pivots at or below this value are treated as singular.
pub const PIVOT_FLOOR: f64 = 1e-12;

/// Diagonal jitter, relative to the mean diagonal, added when the full
/// matrix has a pivot below [`PIVOT_FLOOR`].
pub const JITTER_SCALE: f64 = 1e-8;

/// Symmetric positive-definite covariance matrix.
///
/// `entries` keeps the matrix as given; `jitter` is the diagonal shift
/// applied before every factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    n: usize,
    entries: Vec<f64>,
    jitter: f64,
}

impl CovarianceMatrix {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("covariance matrix must be nonempty"));
        }
        if entries.len() != n * n {
            return Err(Error::param(format!(
                "covariance matrix has {} entries, expected {}",
                entries.len(),
                n * n
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("covariance matrix has non-finite entries"));
        }
        for i in 0..n {
            for j in 0..i {
                let (a, b) = (entries[i * n + j], entries[j * n + i]);
                if (a - b).abs() > 1e-9 * a.abs().max(b.abs()).max(1.0) {
                    return Err(Error::param(format!(
                        "covariance matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let mut cov = Self {
            n,
            entries,
            jitter: 0.0,
        };
        let all: Vec<usize> = (0..n).collect();
        if let Err(Error::IllConditioned { .. }) = cov.log_det(&all) {
            let mean_diag = (0..n).map(|i| cov.entries[i * n + i]).sum::<f64>() / n as f64;
            cov.jitter = JITTER_SCALE * mean_diag.abs().max(f64::MIN_POSITIVE);
            log::debug!("covariance regularized with jitter {:e}", cov.jitter);
            cov.log_det(&all)?;
        }
        Ok(cov)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::param("covariance matrix is not square"));
        }
        Self::new(n, rows.concat())
    }

    /// `K(p, q) = variance * exp(-|p - q|^2 / (2 length_scale^2))` over planar points.
    pub fn squared_exponential(coords: &[[f64; 2]], variance: f64, length_scale: f64) -> Result<Self> {
        if !(variance > 0.0 && length_scale > 0.0) {
            return Err(Error::param("kernel variance and length scale must be positive"));
        }
        let n = coords.len();
        let mut entries = vec![0.0; n * n];
        for (i, p) in coords.iter().enumerate() {
            for (j, q) in coords.iter().enumerate() {
                let d2 = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2);
                entries[i * n + j] = variance * (-d2 / (2.0 * length_scale * length_scale)).exp();
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

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// `log det(B_S)` via Cholesky on the principal submatrix indexed by `set`.
    pub fn log_det(&self, set: &[usize]) -> Result<f64> {
        let m = set.len();
        let mut a = vec![0.0; m * m];
        for (r, &i) in set.iter().enumerate() {
            if i >= self.n {
                return Err(Error::ItemOutOfRange { item: i, n: self.n });
            }
            for (c, &j) in set.iter().enumerate().take(r + 1) {
                a[r * m + c] = self.entries[i * self.n + j];
            }
            a[r * m + r] += self.jitter;
        }
        cholesky_log_det(&mut a, m).map_err(|pivot| Error::IllConditioned {
            subset: set.to_vec(),
            pivot,
        })
    }
}

/// In-place lower Cholesky of a row-major `m x m` matrix (lower triangle
/// read). Returns `log det` or the first failing pivot.
fn cholesky_log_det(a: &mut [f64], m: usize) -> std::result::Result<f64, f64> {
    let mut log_det = 0.0;
    for j in 0..m {
        let mut pivot = a[j * m + j];
        for k in 0..j {
            pivot -= a[j * m + k] * a[j * m + k];
        }
        if !(pivot > PIVOT_FLOOR) {
            return Err(pivot);
        }
        let d = pivot.sqrt();
        a[j * m + j] = d;
        log_det += 2.0 * d.ln();
        for i in j + 1..m {
            let mut v = a[i * m + j];
            for k in 0..j {
                v -= a[i * m + k] * a[j * m + k];
            }
            a[i * m + j] = v / d;
        }
    }
    Ok(log_det)
}

/// `h(S) = 1/2 log[(2 pi e)^|S| det(B_S)]`, with `h(empty) = 0`.
pub fn gaussian_entropy(cov: &CovarianceMatrix, set: &[usize]) -> Result<f64> {
    if set.is_empty() {
        return Ok(0.0);
    }
    let log_det = cov.log_det(set)?;
    Ok(0.5 * (set.len() as f64 * (2.0 * PI * E).ln() + log_det))
}

/// `I(S; complement) = h(S) + h(complement) - h(ground set)`.
pub fn mutual_information(cov: &CovarianceMatrix, set: &[usize]) -> Result<f64> {
    let set = set::canonical(set, cov.n)?;
    let rest = set::complement(&set, cov.n);
    let all: Vec<usize> = (0..cov.n).collect();
    Ok(gaussian_entropy(cov, &set)? + gaussian_entropy(cov, &rest)? - gaussian_entropy(cov, &all)?)
}

/// Mutual-information objective with the full-set entropy cached.
#[derive(Debug, Clone)]
pub struct MutualInformation {
    cov: Arc<CovarianceMatrix>,
    full_entropy: f64,
}

impl MutualInformation {
    pub fn new(cov: Arc<CovarianceMatrix>) -> Result<Self> {
        let all: Vec<usize> = (0..cov.n).collect();
        let full_entropy = gaussian_entropy(&cov, &all)?;
        Ok(Self { cov, full_entropy })
    }

    pub fn covariance(&self) -> &CovarianceMatrix {
        &self.cov
    }
}

impl SetFunction for MutualInformation {
    fn ground_size(&self) -> usize {
        self.cov.n
    }

    fn kind(&self) -> ObjectiveKind {
        ObjectiveKind::MutualInformation
    }

    fn value(&self, set: &[usize]) -> Result<f64> {
        let rest = set::complement(set, self.cov.n);
        Ok(gaussian_entropy(&self.cov, set)? + gaussian_entropy(&self.cov, &rest)?
            - self.full_entropy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity(n: usize) -> CovarianceMatrix {
        let mut e = vec![0.0; n * n];
        for i in 0..n {
            e[i * n + i] = 1.0;
        }
        CovarianceMatrix::new(n, e).unwrap()
    }

    #[test]
    fn entropy_closed_forms() {
        let one = 0.5 * (2.0 * PI * E).ln();
        assert!((one - 1.418_938_533_204_672_7).abs() < 1e-12);
        let cov = identity(2);
        assert_eq!(gaussian_entropy(&cov, &[]).unwrap(), 0.0);
        assert!((gaussian_entropy(&cov, &[1]).unwrap() - one).abs() < 1e-12);
        assert!((gaussian_entropy(&cov, &[0, 1]).unwrap() - 2.837_877_066_409_345).abs() < 1e-9);
    }

    #[test]
    fn entropy_matches_explicit_determinant() {
        // det [[2, 0.5], [0.5, 1]] = 1.75
        let cov = CovarianceMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let expected = 0.5 * (2.0 * (2.0 * PI * E).ln() + 1.75f64.ln());
        assert!((gaussian_entropy(&cov, &[0, 1]).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn mutual_information_edge_cases() {
        let cov = identity(3);
        for mask in 0..8 {
            assert!(mutual_information(&cov, &crate::set::from_mask(mask)).unwrap().abs() < 1e-12);
        }
        let cov = CovarianceMatrix::from_rows(&[
            vec![1.0, 0.6, 0.2],
            vec![0.6, 1.0, 0.3],
            vec![0.2, 0.3, 1.0],
        ])
        .unwrap();
        assert_eq!(mutual_information(&cov, &[]).unwrap(), 0.0);
        assert_eq!(mutual_information(&cov, &[0, 1, 2]).unwrap(), 0.0);
        let a = mutual_information(&cov, &[0]).unwrap();
        let b = mutual_information(&cov, &[1, 2]).unwrap();
        assert!(a > 0.0);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn singular_matrix_gets_jitter() {
        let cov = CovarianceMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(cov.jitter() > 0.0);
        assert!(gaussian_entropy(&cov, &[0, 1]).unwrap().is_finite());
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let err = CovarianceMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap_err();
        match err {
            Error::IllConditioned { subset, .. } => assert_eq!(subset, vec![0, 1]),
            other => panic!("unexpected {other:?}"),
        }
        assert!(CovarianceMatrix::from_rows(&[vec![1.0, 0.2], vec![0.3, 1.0]]).is_err());
    }
}
