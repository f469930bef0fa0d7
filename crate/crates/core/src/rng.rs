//! Deterministic RNG sub-streams.
//!
//! All randomness in a run flows from one master seed. Each consumer asks
//! for a stream by name, so adding a new consumer never perturbs the draws
//! of existing ones.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::fingerprint;

/// Named, independent RNG stream derived from the master seed.
pub fn substream(master_seed: u64, label: &str) -> ChaCha12Rng {
    let mut bytes = Vec::with_capacity(8 + label.len());
    bytes.extend_from_slice(&master_seed.to_le_bytes());
    bytes.extend_from_slice(label.as_bytes());
    ChaCha12Rng::seed_from_u64(fingerprint::fnv1a(&bytes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = substream(7, "ehvi").random_iter().take(4).collect();
        let b: Vec<u64> = substream(7, "ehvi").random_iter().take(4).collect();
        let c: Vec<u64> = substream(7, "random-baseline").random_iter().take(4).collect();
        let d: Vec<u64> = substream(8, "ehvi").random_iter().take(4).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }
}
