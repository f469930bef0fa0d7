//! Deterministic synthetic molecule corpora.
//!
//! Generates valid-by-construction SMILES strings from a seeded stream:
//! branched heteroatom chains with occasional double bonds and benzene
//! attachments. Used by tests and the benchmark subcommand wherever a
//! reproducible pool of distinct molecules is needed without shipping a
//! dataset.

use crate::rng::substream;
use rand::Rng;
use std::collections::HashSet;

fn chain(rng: &mut impl Rng, out: &mut String, atoms: usize, allow_branch: bool) {
    for i in 0..atoms {
        if i > 0 && rng.random_range(0..10) == 0 {
            out.push('=');
        }
        let atom = match rng.random_range(0..12) {
            0 => "N",
            1 => "O",
            2 => "S",
            _ => "C",
        };
        out.push_str(atom);
        if allow_branch && rng.random_range(0..5) == 0 {
            out.push('(');
            let len = rng.random_range(1..4);
            chain(rng, out, len, false);
            out.push(')');
        }
        if allow_branch && rng.random_range(0..8) == 0 {
            out.push_str("c1ccccc1");
        }
    }
}

/// `count` distinct synthetic molecules, deterministic in `seed`.
pub fn synthetic_smiles(count: usize, seed: u64) -> Vec<String> {
    let mut rng = substream(seed, "synthetic-corpus");
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut smiles = String::new();
        let len = rng.random_range(2..9);
        chain(&mut rng, &mut smiles, len, true);
        if seen.insert(smiles.clone()) {
            out.push(smiles);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fingerprint::{morgan_count_fingerprint, FingerprintConfig};
    use crate::smiles::parse_smiles;

    #[test]
    fn corpus_is_valid_and_deterministic() {
        let a = synthetic_smiles(200, 5);
        let b = synthetic_smiles(200, 5);
        assert_eq!(a, b);
        for smiles in &a {
            let mol = parse_smiles(smiles).unwrap();
            morgan_count_fingerprint(&mol, &FingerprintConfig::default()).unwrap();
        }
        let c = synthetic_smiles(200, 6);
        assert_ne!(a, c);
    }
}
