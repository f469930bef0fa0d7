//! Tanimoto and MinMax similarity kernels over sparse fingerprints.
//!
//! Both kernels are computed exactly on the full-dimensionality sparse
//! representation; no folding or projection happens here. On binary inputs
//! the MinMax kernel coincides with the Tanimoto kernel.

use crate::fingerprint::SparseFingerprint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("gram matrix requires non-empty fingerprint lists")]
    EmptyInput,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    #[serde(rename = "tanimoto")]
    TanimotoBinary,
    #[serde(rename = "minmax")]
    MinMaxCount,
}

impl KernelKind {
    pub fn evaluate(self, a: &SparseFingerprint, b: &SparseFingerprint) -> f64 {
        match self {
            KernelKind::TanimotoBinary => tanimoto(a, b),
            KernelKind::MinMaxCount => minmax(a, b),
        }
    }
}

/// Tanimoto (Jaccard) similarity of the key sets: |a ∩ b| / |a ∪ b|.
///
/// Counts are ignored, so count fingerprints are binarized implicitly.
/// Two empty fingerprints compare as 1.0 (both denominators would vanish);
/// empty against non-empty is 0.0. This keeps k(x, x) = 1 universally.
pub fn tanimoto(a: &SparseFingerprint, b: &SparseFingerprint) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let mut ia = a.entries().keys().peekable();
    let mut ib = b.entries().keys().peekable();
    let mut intersection = 0u64;
    let mut union = 0u64;
    loop {
        match (ia.peek(), ib.peek()) {
            (Some(&&ka), Some(&&kb)) => {
                union += 1;
                if ka == kb {
                    intersection += 1;
                    ia.next();
                    ib.next();
                } else if ka < kb {
                    ia.next();
                } else {
                    ib.next();
                }
            }
            (Some(_), None) => {
                union += 1;
                ia.next();
            }
            (None, Some(_)) => {
                union += 1;
                ib.next();
            }
            (None, None) => break,
        }
    }
    intersection as f64 / union as f64
}

/// MinMax similarity: Σ_k min(a_k, b_k) / Σ_k max(a_k, b_k) over the key
/// union, with absent keys counting as zero. Two empty fingerprints
/// compare as 1.0.
pub fn minmax(a: &SparseFingerprint, b: &SparseFingerprint) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let mut ia = a.entries().iter().peekable();
    let mut ib = b.entries().iter().peekable();
    let mut min_sum = 0u64;
    let mut max_sum = 0u64;
    loop {
        match (ia.peek(), ib.peek()) {
            (Some(&(&ka, &ca)), Some(&(&kb, &cb))) => {
                if ka == kb {
                    min_sum += u64::from(ca.min(cb));
                    max_sum += u64::from(ca.max(cb));
                    ia.next();
                    ib.next();
                } else if ka < kb {
                    max_sum += u64::from(ca);
                    ia.next();
                } else {
                    max_sum += u64::from(cb);
                    ib.next();
                }
            }
            (Some(&(_, &ca)), None) => {
                max_sum += u64::from(ca);
                ia.next();
            }
            (None, Some(&(_, &cb))) => {
                max_sum += u64::from(cb);
                ib.next();
            }
            (None, None) => break,
        }
    }
    min_sum as f64 / max_sum as f64
}

/// Dense kernel matrix with entry (i, j) = `k(rows[i], cols[j])`.
///
/// When `rows` and `cols` are the same list the result is symmetric with a
/// unit diagonal (for non-empty fingerprints).
pub fn gram_matrix(
    rows: &[SparseFingerprint],
    cols: &[SparseFingerprint],
    kind: KernelKind,
) -> Result<Vec<Vec<f64>>, KernelError> {
    if rows.is_empty() || cols.is_empty() {
        return Err(KernelError::EmptyInput);
    }
    Ok(rows
        .iter()
        .map(|a| cols.iter().map(|b| kind.evaluate(a, b)).collect())
        .collect())
}
