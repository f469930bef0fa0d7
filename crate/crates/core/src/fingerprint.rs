//! Morgan-style circular count fingerprints at full sparse dimensionality.
//!
//! Identifiers live in the raw 64-bit hash space: a fingerprint is a sparse
//! map from substructure id to occurrence count, not a folded bit vector.
//! Folding to a fixed width is available separately to study the
//! information loss it causes. Hashing is seed-free FNV-1a over a canonical
//! byte encoding, so identical graphs produce identical fingerprints across
//! processes and platforms. Environments are not deduplicated: every
//! (atom, iteration) pair emits one count, so the total count mass of a
//! fingerprint is always `num_atoms * (radius + 1)`.

use crate::smiles::MolGraph;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FingerprintError {
    #[error("fingerprint is already folded to width {0}")]
    AlreadyFolded(u64),
    #[error("fold width must be at least 1")]
    ZeroFoldWidth,
    #[error("cannot fingerprint an empty molecular graph")]
    EmptyGraph,
}

/// Radius and fold width for fingerprint generation.
///
/// `fold_dim == 0` means full dimensionality (no folding).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FingerprintConfig {
    #[serde(default = "default_radius")]
    pub radius: u32,
    #[serde(default)]
    pub fold_dim: u64,
}

fn default_radius() -> u32 {
    2
}

impl Default for FingerprintConfig {
    fn default() -> Self {
        FingerprintConfig { radius: 2, fold_dim: 0 }
    }
}

/// Sparse count fingerprint: substructure id -> number of occurrences.
///
/// Keys are kept in a sorted map so iteration order, equality and
/// serialization are all deterministic. Counts are always >= 1; a key with
/// count zero is simply absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseFingerprint {
    entries: BTreeMap<u64, u32>,
    radius: u32,
    fold_dim: u64,
}

impl SparseFingerprint {
    /// Build directly from key/count pairs. Zero counts are dropped,
    /// repeated keys accumulate.
    pub fn from_counts(pairs: impl IntoIterator<Item = (u64, u32)>, radius: u32, fold_dim: u64) -> Self {
        let mut entries = BTreeMap::new();
        for (key, count) in pairs {
            if count > 0 {
                *entries.entry(key).or_insert(0) += count;
            }
        }
        SparseFingerprint { entries, radius, fold_dim }
    }

    pub fn entries(&self) -> &BTreeMap<u64, u32> {
        &self.entries
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// Folded width; 0 means full dimensionality.
    pub fn fold_dim(&self) -> u64 {
        self.fold_dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sum of all counts.
    pub fn total_count(&self) -> u64 {
        self.entries.values().map(|&c| u64::from(c)).sum()
    }

    pub fn count(&self, key: u64) -> u32 {
        self.entries.get(&key).copied().unwrap_or(0)
    }

    /// Fold every key to `key % width`, summing counts of colliding keys.
    /// Total count mass is preserved.
    pub fn fold(&self, width: u64) -> Result<SparseFingerprint, FingerprintError> {
        if width == 0 {
            return Err(FingerprintError::ZeroFoldWidth);
        }
        if self.fold_dim != 0 {
            return Err(FingerprintError::AlreadyFolded(self.fold_dim));
        }
        let mut entries = BTreeMap::new();
        for (&key, &count) in &self.entries {
            *entries.entry(key % width).or_insert(0) += count;
        }
        Ok(SparseFingerprint { entries, radius: self.radius, fold_dim: width })
    }

    /// Replace every count by 1, keeping the key set.
    pub fn to_binary(&self) -> SparseFingerprint {
        SparseFingerprint {
            entries: self.entries.keys().map(|&k| (k, 1)).collect(),
            radius: self.radius,
            fold_dim: self.fold_dim,
        }
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// Seed-free FNV-1a, the stable hash behind every substructure id.
pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Iteration-0 id: hash of the atom's local invariants.
fn initial_id(mol: &MolGraph, atom: usize) -> u64 {
    let a = &mol.atoms[atom];
    let mut buf = Vec::with_capacity(24);
    buf.extend_from_slice(b"atom0|");
    buf.extend_from_slice(a.element.as_bytes());
    buf.push(0);
    buf.push(mol.degree(atom) as u8);
    buf.push(a.total_h() as u8);
    buf.extend_from_slice(&a.formal_charge.to_le_bytes());
    buf.push(u8::from(a.aromatic));
    fnv1a(&buf)
}

/// Iteration-t id: hash of the previous own id and the sorted
/// (bond code, previous neighbor id) pairs. Atoms without neighbors hash
/// the empty list, so their id still evolves deterministically with t.
fn updated_id(prev_own: u64, mut neighborhood: Vec<(u8, u64)>) -> u64 {
    neighborhood.sort_unstable();
    let mut buf = Vec::with_capacity(16 + 9 * neighborhood.len());
    buf.extend_from_slice(b"iter|");
    buf.extend_from_slice(&prev_own.to_le_bytes());
    buf.extend_from_slice(&(neighborhood.len() as u16).to_le_bytes());
    for (code, id) in neighborhood {
        buf.push(code);
        buf.extend_from_slice(&id.to_le_bytes());
    }
    fnv1a(&buf)
}

/// Generate the Morgan-style count fingerprint of a molecular graph.
///
/// Every atom emits one id per iteration 0..=radius; folding (if
/// configured) is applied to the finished full-dimensionality map.
pub fn morgan_count_fingerprint(
    mol: &MolGraph,
    config: &FingerprintConfig,
) -> Result<SparseFingerprint, FingerprintError> {
    if mol.num_atoms() == 0 {
        return Err(FingerprintError::EmptyGraph);
    }
    let mut counts: BTreeMap<u64, u32> = BTreeMap::new();
    let mut ids: Vec<u64> = (0..mol.num_atoms()).map(|i| initial_id(mol, i)).collect();
    for &id in &ids {
        *counts.entry(id).or_insert(0) += 1;
    }
    for _ in 1..=config.radius {
        let next: Vec<u64> = (0..mol.num_atoms())
            .map(|i| {
                let neighborhood: Vec<(u8, u64)> = mol
                    .neighbors(i)
                    .iter()
                    .map(|&(n, b)| (mol.bonds[b].order.code(), ids[n]))
                    .collect();
                updated_id(ids[i], neighborhood)
            })
            .collect();
        for &id in &next {
            *counts.entry(id).or_insert(0) += 1;
        }
        ids = next;
    }
    let full = SparseFingerprint { entries: counts, radius: config.radius, fold_dim: 0 };
    if config.fold_dim > 0 {
        full.fold(config.fold_dim)
    } else {
        Ok(full)
    }
}

/// One line of the fingerprint JSONL store. Keys are serialized as decimal
/// strings because 64-bit identifiers do not survive JSON number parsing in
/// every reader.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct FingerprintRecord {
    pub smiles: String,
    pub radius: u32,
    pub fold: u64,
    pub fp: BTreeMap<String, u32>,
}

impl FingerprintRecord {
    pub fn new(smiles: &str, fp: &SparseFingerprint) -> Self {
        FingerprintRecord {
            smiles: smiles.to_string(),
            radius: fp.radius(),
            fold: fp.fold_dim(),
            fp: fp.entries().iter().map(|(&k, &v)| (k.to_string(), v)).collect(),
        }
    }

    pub fn to_fingerprint(&self) -> Result<SparseFingerprint, std::num::ParseIntError> {
        let mut entries = BTreeMap::new();
        for (key, &count) in &self.fp {
            entries.insert(key.parse::<u64>()?, count);
        }
        Ok(SparseFingerprint { entries, radius: self.radius, fold_dim: self.fold })
    }
}
