//! Multi-objective Bayesian optimization over molecules.
//!
//! The pipeline this crate implements:
//!
//! 1. [`smiles`] parses a practical subset of SMILES into molecular graphs.
//! 2. [`fingerprint`] turns graphs into sparse Morgan-style count
//!    fingerprints at full 64-bit identifier dimensionality (optionally
//!    folded to a fixed width).
//! 3. [`kernels`] scores fingerprint similarity with the Tanimoto (binary)
//!    and MinMax (count) kernels and assembles Gram matrices.
//! 4. [`gp`] runs exact kernel-only Gaussian process regression per
//!    objective: Cholesky fit, posterior prediction, NLML and NLPD.
//! 5. [`pareto`] provides dominance tests, non-dominated filtering,
//!    two exact hypervolume engines plus two cross-check estimators,
//!    hypervolume improvement and reference-point inference.
//! 6. [`acquisition`] implements Monte-Carlo expected hypervolume
//!    improvement and the scalarized EI/UCB baselines.
//! 7. [`bo`] ties it together into the outer optimization loop over a
//!    fixed candidate pool, with CSV- and similarity-backed oracles.
//! 8. [`io`] reads SMILES/CSV datasets and run configs and writes the
//!    per-run results bundle.
//!
//! Everything is deterministic given a master seed: named RNG sub-streams
//! keep the EHVI sampler, the random baseline and the known-pool selection
//! independent of each other.

#![forbid(unsafe_code)]

pub mod acquisition;
pub mod bo;
pub mod fingerprint;
pub mod gp;
pub mod io;
pub mod kernels;
pub mod pareto;
pub mod rng;
pub mod smiles;
pub mod synthetic;

pub use fingerprint::{FingerprintConfig, SparseFingerprint};
pub use gp::{FittedGp, GpHyperparams, MultiObjectiveGp};
pub use kernels::KernelKind;
pub use pareto::{ObjectiveVector, ParetoFront, ReferencePointConfig};
pub use smiles::MolGraph;
