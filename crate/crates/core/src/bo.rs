//! The multi-objective Bayesian optimization outer loop over a fixed
//! candidate pool, plus the scalarized single-objective and random-sampling
//! baselines.
//!
//! Every runner follows the same skeleton per iteration: fit the surrogate
//! on all known data, score every query candidate, pick the argmax (ties
//! break toward the lower index), evaluate it through the oracle, and move
//! it from the query pool to the known pool. Candidates the oracle cannot
//! evaluate are discarded and selection retries within the same iteration.
//! Sampling is strictly without replacement; a run is a pure function of
//! (pool, oracle, config, seed).
//!
//! Hypervolume telemetry is recorded at two reference points: the one
//! re-inferred each iteration from the current front, and the fixed
//! reference inferred once from the initial front. The cumulative series at
//! the fixed reference is non-decreasing by construction.

use crate::acquisition::{
    self, AcquisitionConfig, AcquisitionError, AcquisitionKind, NormalBatch,
};
use crate::fingerprint::{
    morgan_count_fingerprint, FingerprintConfig, FingerprintError, SparseFingerprint,
};
use crate::gp::{FittedGp, GpError, GpHyperparams, MultiObjectiveGp};
use crate::io::IoError;
use crate::kernels::KernelKind;
use crate::pareto::{
    hv_filtered, infer_reference_point, pareto_filter, ObjectiveVector, ParetoError,
    ParetoFront, PreparedHvi, ReferencePointConfig,
};
use crate::rng::substream;
use crate::smiles::{parse_smiles, SmilesError};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::collections::HashSet;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BoError {
    #[error("invalid candidate pool: {0}")]
    InvalidPool(String),
    #[error("query pool is empty")]
    PoolExhausted,
    #[error("known molecule {smiles:?} failed to parse: {source}")]
    KnownSmiles { smiles: String, source: SmilesError },
    #[error("acquisition kind {got:?} cannot drive {runner}")]
    WrongAcquisition { runner: &'static str, got: AcquisitionKind },
    #[error("objective dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invalid run config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Gp(#[from] GpError),
    #[error(transparent)]
    Pareto(#[from] ParetoError),
    #[error(transparent)]
    Acquisition(#[from] AcquisitionError),
    #[error(transparent)]
    Fingerprint(#[from] FingerprintError),
    #[error(transparent)]
    Io(#[from] IoError),
}

/// Maps a molecule to its objective vector, or `None` when the molecule
/// cannot be evaluated. Implementations must be deterministic per SMILES
/// within a run.
pub trait Oracle {
    fn dim(&self) -> usize;
    fn evaluate(&self, smiles: &str) -> Option<ObjectiveVector>;
}

/// Single-objective oracle scoring fingerprint similarity to a fixed
/// reference molecule.
pub struct SimilarityOracle {
    reference_fp: SparseFingerprint,
    kind: KernelKind,
    config: FingerprintConfig,
}

impl SimilarityOracle {
    pub fn new(
        reference: &str,
        kind: KernelKind,
        config: FingerprintConfig,
    ) -> Result<Self, SmilesError> {
        let mol = parse_smiles(reference)?;
        let reference_fp = morgan_count_fingerprint(&mol, &config)
            .expect("a parsed molecule always has at least one atom");
        Ok(SimilarityOracle { reference_fp, kind, config })
    }
}

impl Oracle for SimilarityOracle {
    fn dim(&self) -> usize {
        1
    }

    fn evaluate(&self, smiles: &str) -> Option<ObjectiveVector> {
        let mol = parse_smiles(smiles).ok()?;
        let fp = morgan_count_fingerprint(&mol, &self.config).ok()?;
        let similarity = self.kind.evaluate(&fp, &self.reference_fp);
        ObjectiveVector::new(vec![similarity]).ok()
    }
}

/// Construct a fingerprint-similarity oracle for one reference molecule.
pub fn similarity_oracle(
    reference: &str,
    kind: KernelKind,
    config: FingerprintConfig,
) -> Result<SimilarityOracle, SmilesError> {
    SimilarityOracle::new(reference, kind, config)
}

/// Concatenation of several oracles into one multi-objective oracle.
/// A `Missing` from any part makes the whole evaluation `Missing`.
pub struct StackedOracle {
    parts: Vec<Box<dyn Oracle>>,
}

impl StackedOracle {
    pub fn new(parts: Vec<Box<dyn Oracle>>) -> Self {
        StackedOracle { parts }
    }
}

impl Oracle for StackedOracle {
    fn dim(&self) -> usize {
        self.parts.iter().map(|p| p.dim()).sum()
    }

    fn evaluate(&self, smiles: &str) -> Option<ObjectiveVector> {
        let mut values = Vec::with_capacity(self.dim());
        for part in &self.parts {
            values.extend(part.evaluate(smiles)?.into_inner());
        }
        ObjectiveVector::new(values).ok()
    }
}

/// Oracle backed by a CSV of precomputed objective values, looked up by
/// exact SMILES string. Rows with non-finite values evaluate as `Missing`.
pub struct CsvOracle {
    values: BTreeMap<String, Option<ObjectiveVector>>,
    dim: usize,
}

impl CsvOracle {
    pub fn from_map(values: BTreeMap<String, Option<ObjectiveVector>>, dim: usize) -> Self {
        CsvOracle { values, dim }
    }
}

impl Oracle for CsvOracle {
    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate(&self, smiles: &str) -> Option<ObjectiveVector> {
        self.values.get(smiles).cloned().flatten()
    }
}

/// Build a [`CsvOracle`] from a CSV file with a `smiles` column and the
/// named objective columns.
pub fn csv_oracle(path: &Path, columns: &[String]) -> Result<CsvOracle, IoError> {
    let values = crate::io::load_objectives_csv(path, columns)?;
    Ok(CsvOracle { values, dim: columns.len() })
}

/// Known molecules with observed objective vectors, and the disjoint query
/// pool the optimizer may pick from.
#[derive(Debug, Clone)]
pub struct CandidatePool {
    pub known: Vec<(String, ObjectiveVector)>,
    pub query: Vec<String>,
}

impl CandidatePool {
    pub fn new(
        known: Vec<(String, ObjectiveVector)>,
        query: Vec<String>,
    ) -> Result<Self, BoError> {
        if known.is_empty() {
            return Err(BoError::InvalidPool("known pool must be non-empty".into()));
        }
        let dim = known[0].1.dim();
        if known.iter().any(|(_, y)| y.dim() != dim) {
            return Err(BoError::InvalidPool("known objective dimensions differ".into()));
        }
        let mut seen = HashSet::new();
        for smiles in known.iter().map(|(s, _)| s).chain(query.iter()) {
            if !seen.insert(smiles.as_str()) {
                return Err(BoError::InvalidPool(format!(
                    "smiles {smiles:?} appears twice across known+query"
                )));
            }
        }
        Ok(CandidatePool { known, query })
    }

    pub fn dim(&self) -> usize {
        self.known[0].1.dim()
    }
}

/// Full description of one optimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoRunConfig {
    pub n_iter: usize,
    /// One hyperparameter set per objective (the scalarized baseline uses
    /// the first entry for its single surrogate).
    pub hyperparams: Vec<GpHyperparams>,
    pub acquisition: AcquisitionConfig,
    pub reference: ReferencePointConfig,
    pub fingerprint: FingerprintConfig,
    pub kernel: KernelKind,
    pub seed: u64,
}

impl BoRunConfig {
    fn validate(&self) -> Result<(), BoError> {
        if self.hyperparams.is_empty() {
            return Err(BoError::InvalidConfig("need at least one hyperparameter set".into()));
        }
        for h in &self.hyperparams {
            h.validate()?;
        }
        if self.acquisition.mc_samples == 0 {
            return Err(BoError::InvalidConfig("mc_samples must be at least 1".into()));
        }
        if !self.acquisition.ucb_beta.is_finite() {
            return Err(BoError::InvalidConfig("ucb_beta must be finite".into()));
        }
        Ok(())
    }
}

/// Audit trail of one completed iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// 1-based iteration index.
    pub iteration: usize,
    pub chosen_smiles: String,
    pub acquisition_value: f64,
    pub observed: ObjectiveVector,
    /// Reference point inferred from the front at the start of the
    /// iteration.
    pub reference_point: ObjectiveVector,
    /// Hypervolume of the known front at `reference_point`, before and
    /// after the chosen molecule was added.
    pub hv_before: f64,
    pub hv_after: f64,
    /// Hypervolume of the cumulative known set at the run-fixed reference
    /// point (inferred once from the initial front).
    pub hv_fixed_ref: f64,
    pub known_size: usize,
    pub query_size: usize,
    /// Candidates the oracle could not evaluate this iteration; they are
    /// removed from the query pool.
    pub discarded: Vec<String>,
}

/// Outcome of a run: per-iteration records plus the final front.
#[derive(Debug, Clone, PartialEq)]
pub struct BoRunResult {
    pub records: Vec<IterationRecord>,
    pub initial_front: ParetoFront,
    pub final_front: ParetoFront,
    /// Reference point inferred from the initial front; all `hv_fixed_ref`
    /// values are measured against it.
    pub fixed_reference: ObjectiveVector,
    /// Query molecules dropped before the run because they do not parse.
    pub invalid_query: Vec<String>,
}

struct ChosenCandidate {
    smiles: String,
    acquisition_value: f64,
    observed: ObjectiveVector,
    discarded: Vec<String>,
}

struct RunState {
    known_smiles: Vec<String>,
    known_fps: Vec<SparseFingerprint>,
    known_y: Vec<ObjectiveVector>,
    query_smiles: Vec<String>,
    query_fps: Vec<SparseFingerprint>,
    dim: usize,
    fixed_reference: ObjectiveVector,
    reference_cfg: ReferencePointConfig,
    invalid_query: Vec<String>,
}

impl RunState {
    fn new(pool: &CandidatePool, config: &BoRunConfig) -> Result<Self, BoError> {
        config.validate()?;
        let dim = pool.dim();
        if config.hyperparams.len() != dim {
            return Err(BoError::DimensionMismatch {
                left: dim,
                right: config.hyperparams.len(),
            });
        }
        let mut known_smiles = Vec::with_capacity(pool.known.len());
        let mut known_fps = Vec::with_capacity(pool.known.len());
        let mut known_y = Vec::with_capacity(pool.known.len());
        for (smiles, y) in &pool.known {
            let mol = parse_smiles(smiles)
                .map_err(|source| BoError::KnownSmiles { smiles: smiles.clone(), source })?;
            known_fps.push(morgan_count_fingerprint(&mol, &config.fingerprint)?);
            known_smiles.push(smiles.clone());
            known_y.push(y.clone());
        }
        let mut query_smiles = Vec::with_capacity(pool.query.len());
        let mut query_fps = Vec::with_capacity(pool.query.len());
        let mut invalid_query = Vec::new();
        for smiles in &pool.query {
            match parse_smiles(smiles) {
                Ok(mol) => {
                    query_fps.push(morgan_count_fingerprint(&mol, &config.fingerprint)?);
                    query_smiles.push(smiles.clone());
                }
                Err(err) => {
                    log::warn!("dropping unparseable query molecule {smiles:?}: {err}");
                    invalid_query.push(smiles.clone());
                }
            }
        }
        let initial_front = pareto_filter(&known_y)?;
        let fixed_reference = infer_reference_point(&initial_front, &config.reference)?;
        Ok(RunState {
            known_smiles,
            known_fps,
            known_y,
            query_smiles,
            query_fps,
            dim,
            fixed_reference,
            reference_cfg: config.reference.clone(),
            invalid_query,
        })
    }

    fn front(&self) -> Result<ParetoFront, BoError> {
        Ok(pareto_filter(&self.known_y)?)
    }

    fn targets(&self) -> Vec<Vec<f64>> {
        self.known_y.iter().map(|y| y.values().to_vec()).collect()
    }

    /// Restrict a front to the points strictly dominating `reference`;
    /// points at or below it contribute no measure and would trip the
    /// strict engines.
    fn front_above(front: &ParetoFront, reference: &[f64]) -> Result<ParetoFront, BoError> {
        let above: Vec<ObjectiveVector> = front
            .points()
            .iter()
            .filter(|p| p.iter().zip(reference).all(|(x, r)| x > r))
            .cloned()
            .collect();
        if above.is_empty() {
            Ok(ParetoFront::empty())
        } else {
            Ok(pareto_filter(&above)?)
        }
    }

    /// Walk the scores from best to worst, evaluating through the oracle;
    /// unevaluable candidates are discarded from the query pool and
    /// selection retries. `None` means every remaining candidate was
    /// unevaluable.
    fn select_and_evaluate(
        &mut self,
        oracle: &dyn Oracle,
        scores: &[f64],
    ) -> Result<Option<ChosenCandidate>, BoError> {
        let mut eligible = vec![true; self.query_smiles.len()];
        let mut discarded_idx: Vec<usize> = Vec::new();
        loop {
            let idx = match acquisition::select_candidate(scores, &eligible) {
                Ok(idx) => idx,
                Err(AcquisitionError::NoEligibleCandidates) => {
                    let discarded = self.remove_indices(&discarded_idx, None);
                    self.invalid_query.extend(discarded);
                    return Ok(None);
                }
                Err(err) => return Err(err.into()),
            };
            match oracle.evaluate(&self.query_smiles[idx]) {
                Some(observed) => {
                    if observed.dim() != self.dim {
                        return Err(BoError::DimensionMismatch {
                            left: observed.dim(),
                            right: self.dim,
                        });
                    }
                    let smiles = self.query_smiles[idx].clone();
                    let fp = self.query_fps[idx].clone();
                    let discarded = self.remove_indices(&discarded_idx, Some(idx));
                    self.known_smiles.push(smiles.clone());
                    self.known_fps.push(fp);
                    self.known_y.push(observed.clone());
                    return Ok(Some(ChosenCandidate {
                        smiles,
                        acquisition_value: scores[idx],
                        observed,
                        discarded,
                    }));
                }
                None => {
                    log::warn!(
                        "oracle returned no value for {:?}; discarding",
                        self.query_smiles[idx]
                    );
                    eligible[idx] = false;
                    discarded_idx.push(idx);
                }
            }
        }
    }

    /// Drop the given query indices (and the chosen one, if any) from the
    /// query pool, returning the discarded SMILES in discard order.
    fn remove_indices(&mut self, discarded: &[usize], chosen: Option<usize>) -> Vec<String> {
        let discarded_smiles: Vec<String> =
            discarded.iter().map(|&i| self.query_smiles[i].clone()).collect();
        let mut remove: HashSet<usize> = discarded.iter().copied().collect();
        if let Some(idx) = chosen {
            remove.insert(idx);
        }
        let mut smiles = Vec::with_capacity(self.query_smiles.len() - remove.len());
        let mut fps = Vec::with_capacity(self.query_fps.len() - remove.len());
        for (i, (s, f)) in self
            .query_smiles
            .drain(..)
            .zip(self.query_fps.drain(..))
            .enumerate()
        {
            if !remove.contains(&i) {
                smiles.push(s);
                fps.push(f);
            }
        }
        self.query_smiles = smiles;
        self.query_fps = fps;
        discarded_smiles
    }

    fn make_record(
        &self,
        iteration: usize,
        chosen: ChosenCandidate,
        reference: &ObjectiveVector,
        hv_before: f64,
    ) -> Result<IterationRecord, BoError> {
        let hv_after = hv_filtered(&self.known_y, reference)?;
        let hv_fixed_ref = hv_filtered(&self.known_y, &self.fixed_reference)?;
        Ok(IterationRecord {
            iteration,
            chosen_smiles: chosen.smiles,
            acquisition_value: chosen.acquisition_value,
            observed: chosen.observed,
            reference_point: reference.clone(),
            hv_before,
            hv_after,
            hv_fixed_ref,
            known_size: self.known_smiles.len(),
            query_size: self.query_smiles.len(),
            discarded: chosen.discarded,
        })
    }

    fn finish(self, records: Vec<IterationRecord>, initial_front: ParetoFront) -> Result<BoRunResult, BoError> {
        Ok(BoRunResult {
            records,
            initial_front,
            final_front: pareto_filter(&self.known_y)?,
            fixed_reference: self.fixed_reference,
            invalid_query: self.invalid_query,
        })
    }
}

/// Dispatch on the configured acquisition kind.
pub fn run(
    pool: &CandidatePool,
    oracle: &dyn Oracle,
    config: &BoRunConfig,
) -> Result<BoRunResult, BoError> {
    match config.acquisition.kind {
        AcquisitionKind::Ehvi => run_gp_mobo(pool, oracle, config),
        AcquisitionKind::Ei | AcquisitionKind::Ucb => run_scalarized_sobo(pool, oracle, config),
        AcquisitionKind::Random => run_random_baseline_with(pool, oracle, config),
    }
}

/// Multi-objective loop: independent GPs per objective, Monte-Carlo EHVI
/// acquisition, reference point re-inferred every iteration from the
/// current front. One batch of standard-normal samples is shared by all
/// candidates within an iteration.
pub fn run_gp_mobo(
    pool: &CandidatePool,
    oracle: &dyn Oracle,
    config: &BoRunConfig,
) -> Result<BoRunResult, BoError> {
    if config.acquisition.kind != AcquisitionKind::Ehvi {
        return Err(BoError::WrongAcquisition { runner: "run_gp_mobo", got: config.acquisition.kind });
    }
    let mut state = RunState::new(pool, config)?;
    if config.n_iter > 0 && state.query_smiles.is_empty() {
        return Err(BoError::PoolExhausted);
    }
    let initial_front = state.front()?;
    let mut ehvi_rng = substream(config.seed, "ehvi");
    let mut records = Vec::with_capacity(config.n_iter);
    for iteration in 1..=config.n_iter {
        if state.query_smiles.is_empty() {
            log::info!("query pool exhausted after {} iterations", iteration - 1);
            break;
        }
        let mogp = MultiObjectiveGp::fit(
            &state.known_fps,
            &state.targets(),
            &config.hyperparams,
            config.kernel,
        )?;
        let front = state.front()?;
        let reference = infer_reference_point(&front, &state.reference_cfg)?;
        let hv_before = hv_filtered(&state.known_y, &reference)?;
        let scoring_front = RunState::front_above(&front, &reference)?;
        let prepared = PreparedHvi::new(&scoring_front, &reference)?;
        let prediction = mogp.predict(&state.query_fps);
        let batch = NormalBatch::draw(&mut ehvi_rng, config.acquisition.mc_samples, state.dim);
        let scores = prediction
            .means
            .iter()
            .zip(&prediction.variances)
            .map(|(mean, var)| acquisition::ehvi_with_batch(mean, var, &prepared, &batch))
            .collect::<Result<Vec<f64>, _>>()?;
        match state.select_and_evaluate(oracle, &scores)? {
            Some(chosen) => records.push(state.make_record(iteration, chosen, &reference, hv_before)?),
            None => break,
        }
    }
    state.finish(records, initial_front)
}

/// Scalarized single-objective baseline: one GP on the geometric mean of
/// the objective vectors, with EI or UCB acquisition. Chosen molecules are
/// still recorded with their full objective vectors for post-hoc Pareto
/// analysis.
pub fn run_scalarized_sobo(
    pool: &CandidatePool,
    oracle: &dyn Oracle,
    config: &BoRunConfig,
) -> Result<BoRunResult, BoError> {
    if !matches!(config.acquisition.kind, AcquisitionKind::Ei | AcquisitionKind::Ucb) {
        return Err(BoError::WrongAcquisition {
            runner: "run_scalarized_sobo",
            got: config.acquisition.kind,
        });
    }
    let mut state = RunState::new(pool, config)?;
    if config.n_iter > 0 && state.query_smiles.is_empty() {
        return Err(BoError::PoolExhausted);
    }
    let initial_front = state.front()?;
    let mut scalars: Vec<f64> = state
        .known_y
        .iter()
        .map(|y| acquisition::geometric_mean(y))
        .collect::<Result<_, _>>()?;
    let hyper = config.hyperparams[0];
    let mut records = Vec::with_capacity(config.n_iter);
    for iteration in 1..=config.n_iter {
        if state.query_smiles.is_empty() {
            break;
        }
        let gp = FittedGp::fit(&state.known_fps, &scalars, hyper, config.kernel)?;
        let front = state.front()?;
        let reference = infer_reference_point(&front, &state.reference_cfg)?;
        let hv_before = hv_filtered(&state.known_y, &reference)?;
        let prediction = gp.predict(&state.query_fps);
        let f_best = scalars.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let scores = prediction
            .means
            .iter()
            .zip(&prediction.variances)
            .map(|(&mean, &var)| match config.acquisition.kind {
                AcquisitionKind::Ei => acquisition::expected_improvement(mean, var, f_best),
                AcquisitionKind::Ucb => acquisition::ucb(mean, var, config.acquisition.ucb_beta),
                _ => unreachable!(),
            })
            .collect::<Result<Vec<f64>, _>>()?;
        match state.select_and_evaluate(oracle, &scores)? {
            Some(chosen) => {
                scalars.push(acquisition::geometric_mean(&chosen.observed)?);
                records.push(state.make_record(iteration, chosen, &reference, hv_before)?);
            }
            None => break,
        }
    }
    state.finish(records, initial_front)
}

/// Uniform without-replacement baseline with the same record shape as the
/// optimizing runners.
pub fn run_random_baseline(
    pool: &CandidatePool,
    oracle: &dyn Oracle,
    n_iter: usize,
    seed: u64,
) -> Result<BoRunResult, BoError> {
    let config = BoRunConfig {
        n_iter,
        hyperparams: vec![GpHyperparams::default(); pool.dim()],
        acquisition: AcquisitionConfig {
            kind: AcquisitionKind::Random,
            ..AcquisitionConfig::default()
        },
        reference: ReferencePointConfig::uniform_floor(pool.dim(), -1e9),
        fingerprint: FingerprintConfig::default(),
        kernel: KernelKind::MinMaxCount,
        seed,
    };
    run_random_baseline_with(pool, oracle, &config)
}

/// Random baseline sharing the full run config (in particular the
/// reference-point settings, so its fixed-reference hypervolume series is
/// directly comparable with the optimizing runners').
pub fn run_random_baseline_with(
    pool: &CandidatePool,
    oracle: &dyn Oracle,
    config: &BoRunConfig,
) -> Result<BoRunResult, BoError> {
    if config.acquisition.kind != AcquisitionKind::Random {
        return Err(BoError::WrongAcquisition {
            runner: "run_random_baseline",
            got: config.acquisition.kind,
        });
    }
    let mut state = RunState::new(pool, config)?;
    if config.n_iter > 0 && state.query_smiles.is_empty() {
        return Err(BoError::PoolExhausted);
    }
    let initial_front = state.front()?;
    let mut rng = substream(config.seed, "random-baseline");
    let mut records = Vec::with_capacity(config.n_iter);
    'outer: for iteration in 1..=config.n_iter {
        if state.query_smiles.is_empty() {
            break;
        }
        let front = state.front()?;
        let reference = infer_reference_point(&front, &state.reference_cfg)?;
        let hv_before = hv_filtered(&state.known_y, &reference)?;
        let mut eligible: Vec<usize> = (0..state.query_smiles.len()).collect();
        let mut discarded_idx: Vec<usize> = Vec::new();
        loop {
            if eligible.is_empty() {
                let dropped = state.remove_indices(&discarded_idx, None);
                state.invalid_query.extend(dropped);
                break 'outer;
            }
            let pick = eligible.remove(rng.random_range(0..eligible.len()));
            match oracle.evaluate(&state.query_smiles[pick]) {
                Some(observed) => {
                    if observed.dim() != state.dim {
                        return Err(BoError::DimensionMismatch {
                            left: observed.dim(),
                            right: state.dim,
                        });
                    }
                    let smiles = state.query_smiles[pick].clone();
                    let fp = state.query_fps[pick].clone();
                    let discarded = state.remove_indices(&discarded_idx, Some(pick));
                    state.known_smiles.push(smiles.clone());
                    state.known_fps.push(fp);
                    state.known_y.push(observed.clone());
                    let chosen = ChosenCandidate {
                        smiles,
                        acquisition_value: 0.0,
                        observed,
                        discarded,
                    };
                    records.push(state.make_record(iteration, chosen, &reference, hv_before)?);
                    break;
                }
                None => {
                    log::warn!(
                        "oracle returned no value for {:?}; discarding",
                        state.query_smiles[pick]
                    );
                    discarded_idx.push(pick);
                }
            }
        }
    }
    state.finish(records, initial_front)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pareto::dominates;

    fn ov(values: &[f64]) -> ObjectiveVector {
        ObjectiveVector::new(values.to_vec()).unwrap()
    }

    /// Deterministic in-memory oracle for tests.
    struct TableOracle {
        values: BTreeMap<String, Option<ObjectiveVector>>,
        dim: usize,
    }

    impl TableOracle {
        fn new(rows: &[(&str, Option<&[f64]>)], dim: usize) -> Self {
            let values = rows
                .iter()
                .map(|(s, v)| (s.to_string(), v.map(ov)))
                .collect();
            TableOracle { values, dim }
        }
    }

    impl Oracle for TableOracle {
        fn dim(&self) -> usize {
            self.dim
        }
        fn evaluate(&self, smiles: &str) -> Option<ObjectiveVector> {
            self.values.get(smiles).cloned().flatten()
        }
    }

    fn config(kind: AcquisitionKind, dim: usize, n_iter: usize, seed: u64) -> BoRunConfig {
        BoRunConfig {
            n_iter,
            hyperparams: vec![GpHyperparams::default(); dim],
            acquisition: AcquisitionConfig { kind, mc_samples: 128, ucb_beta: 1.0 },
            reference: ReferencePointConfig::uniform_floor(dim, -1e9),
            fingerprint: FingerprintConfig::default(),
            kernel: KernelKind::MinMaxCount,
            seed,
        }
    }

    fn toy_pool() -> (CandidatePool, TableOracle) {
        let known = vec![
            ("CCO".to_string(), ov(&[0.3, 0.2])),
            ("CCN".to_string(), ov(&[0.2, 0.35])),
            ("CCC".to_string(), ov(&[0.25, 0.25])),
        ];
        let query: Vec<String> =
            ["CCCC", "CCCO", "CCCN", "c1ccccc1", "c1ccccc1O", "CC(C)O"]
                .iter()
                .map(|s| s.to_string())
                .collect();
        let oracle = TableOracle::new(
            &[
                ("CCO", Some(&[0.3, 0.2])),
                ("CCN", Some(&[0.2, 0.35])),
                ("CCC", Some(&[0.25, 0.25])),
                ("CCCC", Some(&[0.4, 0.1])),
                ("CCCO", Some(&[0.45, 0.3])),
                ("CCCN", Some(&[0.1, 0.5])),
                ("c1ccccc1", Some(&[0.6, 0.15])),
                ("c1ccccc1O", Some(&[0.35, 0.45])),
                ("CC(C)O", None),
            ],
            2,
        );
        (CandidatePool::new(known, query).unwrap(), oracle)
    }

    #[test]
    fn zero_iterations_returns_initial_front_only() {
        let (pool, oracle) = toy_pool();
        let cfg = config(AcquisitionKind::Ehvi, 2, 0, 1);
        let result = run_gp_mobo(&pool, &oracle, &cfg).unwrap();
        assert!(result.records.is_empty());
        assert_eq!(result.initial_front, result.final_front);
    }

    #[test]
    fn runs_are_deterministic() {
        let (pool, oracle) = toy_pool();
        let cfg = config(AcquisitionKind::Ehvi, 2, 4, 42);
        let a = run_gp_mobo(&pool, &oracle, &cfg).unwrap();
        let b = run_gp_mobo(&pool, &oracle, &cfg).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.final_front, b.final_front);
    }

    #[test]
    fn sampling_without_replacement_and_conservation() {
        let (pool, oracle) = toy_pool();
        let cfg = config(AcquisitionKind::Ehvi, 2, 6, 3);
        let result = run_gp_mobo(&pool, &oracle, &cfg).unwrap();
        let mut seen = HashSet::new();
        for record in &result.records {
            assert!(seen.insert(record.chosen_smiles.clone()), "molecule selected twice");
        }
        // conservation: knowns grow exactly by the records; query shrinks
        // by records plus logged discards
        let last = result.records.last().unwrap();
        assert_eq!(last.known_size, pool.known.len() + result.records.len());
        let discarded: usize = result.records.iter().map(|r| r.discarded.len()).sum();
        assert_eq!(
            last.query_size,
            pool.query.len() - result.records.len() - discarded
        );
        // the unevaluable candidate is discarded, never chosen
        assert!(result.records.iter().all(|r| r.chosen_smiles != "CC(C)O"));
    }

    #[test]
    fn fixed_reference_series_is_monotone() {
        let (pool, oracle) = toy_pool();
        for kind in [AcquisitionKind::Ehvi, AcquisitionKind::Ei, AcquisitionKind::Random] {
            let cfg = config(kind, 2, 6, 9);
            let result = run(&pool, &oracle, &cfg).unwrap();
            let mut last = 0.0;
            for record in &result.records {
                assert!(
                    record.hv_fixed_ref >= last - 1e-12,
                    "{kind:?}: fixed-reference hypervolume decreased"
                );
                last = record.hv_fixed_ref;
            }
            // per-iteration reference: adding a point never shrinks the
            // front measured at that same reference
            for record in &result.records {
                assert!(record.hv_after >= record.hv_before - 1e-12);
            }
        }
    }

    #[test]
    fn pool_exhaustion_consumes_every_candidate() {
        let (pool, oracle) = toy_pool();
        let cfg = config(AcquisitionKind::Random, 2, 50, 4);
        let result = run_random_baseline_with(&pool, &oracle, &cfg).unwrap();
        // 6 query candidates, one unevaluable: 5 records then exhaustion
        assert_eq!(result.records.len(), 5);
        assert_eq!(result.records.last().unwrap().query_size, 0);
    }

    #[test]
    fn empty_query_pool_is_an_error_only_with_budget() {
        let known = vec![("CCO".to_string(), ov(&[0.1, 0.1]))];
        let pool = CandidatePool::new(known, vec![]).unwrap();
        let oracle = TableOracle::new(&[("CCO", Some(&[0.1, 0.1]))], 2);
        let cfg = config(AcquisitionKind::Ehvi, 2, 3, 0);
        assert!(matches!(run_gp_mobo(&pool, &oracle, &cfg), Err(BoError::PoolExhausted)));
        let cfg0 = config(AcquisitionKind::Ehvi, 2, 0, 0);
        assert!(run_gp_mobo(&pool, &oracle, &cfg0).is_ok());
    }

    #[test]
    fn rigged_pool_is_solved_in_one_iteration() {
        // the planted winner is nearly identical to the best known molecule,
        // so its posterior concentrates on high values; every other query
        // candidate neighbors a poor known molecule
        let known = vec![
            ("c1ccccc1CCN".to_string(), ov(&[0.9, 0.85])),
            ("CCCCCCCC".to_string(), ov(&[0.05, 0.1])),
            ("CCCCCCCO".to_string(), ov(&[0.1, 0.05])),
        ];
        let query: Vec<String> = ["c1ccccc1CCNC", "CCCCCCCCC", "OCCCCCCCO", "CCCCCCC"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let oracle = TableOracle::new(
            &[
                ("c1ccccc1CCNC", Some(&[0.95, 0.9])),
                ("CCCCCCCCC", Some(&[0.04, 0.12])),
                ("OCCCCCCCO", Some(&[0.12, 0.04])),
                ("CCCCCCC", Some(&[0.06, 0.08])),
            ],
            2,
        );
        let pool = CandidatePool::new(known, query).unwrap();
        let cfg = config(AcquisitionKind::Ehvi, 2, 1, 5);
        let result = run_gp_mobo(&pool, &oracle, &cfg).unwrap();
        assert_eq!(result.records[0].chosen_smiles, "c1ccccc1CCNC");
        assert!(result.records[0].acquisition_value > 0.0);
        // final front contains the planted point
        assert!(result
            .final_front
            .points()
            .iter()
            .any(|p| p.values() == [0.95, 0.9]));
    }

    #[test]
    fn structural_duplicate_gets_no_expected_improvement() {
        // "OCC" spells the known best "CCO" differently but fingerprints
        // identically: EI at (near) zero variance is (near) zero
        let known = vec![
            ("CCO".to_string(), ov(&[0.8, 0.8])),
            ("CCCCCCCC".to_string(), ov(&[0.1, 0.1])),
        ];
        let query: Vec<String> = ["OCC", "c1ccccc1CO"].iter().map(|s| s.to_string()).collect();
        let oracle = TableOracle::new(
            &[
                ("OCC", Some(&[0.8, 0.8])),
                ("c1ccccc1CO", Some(&[0.5, 0.6])),
            ],
            2,
        );
        let pool = CandidatePool::new(known, query).unwrap();
        let cfg = config(AcquisitionKind::Ei, 2, 1, 6);
        let result = run_scalarized_sobo(&pool, &oracle, &cfg).unwrap();
        assert_eq!(result.records[0].chosen_smiles, "c1ccccc1CO");
    }

    #[test]
    fn ucb_beta_zero_is_greedy_on_the_posterior_mean() {
        let (pool, oracle) = toy_pool();
        let mut cfg = config(AcquisitionKind::Ucb, 2, 1, 7);
        cfg.acquisition.ucb_beta = 0.0;
        let result = run_scalarized_sobo(&pool, &oracle, &cfg).unwrap();
        assert_eq!(result.records.len(), 1);
    }

    #[test]
    fn random_first_pick_is_uniform() {
        let known = vec![("CCO".to_string(), ov(&[0.1]))];
        let query: Vec<String> =
            ["CC", "CCC", "CCCC", "CCCCC"].iter().map(|s| s.to_string()).collect();
        let oracle = TableOracle::new(
            &[
                ("CC", Some(&[0.2])),
                ("CCC", Some(&[0.3])),
                ("CCCC", Some(&[0.4])),
                ("CCCCC", Some(&[0.5])),
            ],
            1,
        );
        let pool = CandidatePool::new(known, query).unwrap();
        let mut counts: BTreeMap<String, u32> = BTreeMap::new();
        for seed in 0..2000u64 {
            let result = run_random_baseline(&pool, &oracle, 1, seed).unwrap();
            *counts.entry(result.records[0].chosen_smiles.clone()).or_insert(0) += 1;
        }
        for (_, count) in counts {
            let freq = f64::from(count) / 2000.0;
            assert!((freq - 0.25).abs() < 0.05, "first-pick frequency {freq}");
        }
    }

    #[test]
    fn similarity_oracle_properties() {
        let cfg = FingerprintConfig::default();
        let a = similarity_oracle("c1ccccc1CCO", KernelKind::MinMaxCount, cfg).unwrap();
        assert_eq!(a.evaluate("c1ccccc1CCO").unwrap().values(), &[1.0]);
        assert!(a.evaluate("not a molecule").is_none());
        // symmetry through the kernel
        let b = similarity_oracle("CCCCO", KernelKind::MinMaxCount, cfg).unwrap();
        assert_eq!(
            a.evaluate("CCCCO").unwrap().values(),
            b.evaluate("c1ccccc1CCO").unwrap().values()
        );
        // no shared substructure ids at all
        let aromatic_only = similarity_oracle("c1ccccc1", KernelKind::MinMaxCount, cfg).unwrap();
        assert_eq!(aromatic_only.evaluate("CCCC").unwrap().values(), &[0.0]);
    }

    #[test]
    fn csv_oracle_misses_unknown_smiles() {
        let oracle = CsvOracle::from_map(
            [
                ("CCO".to_string(), Some(ov(&[1.0, 2.0]))),
                ("CCN".to_string(), None),
            ]
            .into_iter()
            .collect(),
            2,
        );
        assert_eq!(oracle.evaluate("CCO").unwrap().values(), &[1.0, 2.0]);
        assert!(oracle.evaluate("CCN").is_none(), "non-finite row is unevaluable");
        assert!(oracle.evaluate("CCCC").is_none(), "absent smiles is unevaluable");
        assert_eq!(oracle.dim(), 2);
    }

    #[test]
    fn pool_rejects_duplicates() {
        let known = vec![("CCO".to_string(), ov(&[0.1]))];
        assert!(CandidatePool::new(known.clone(), vec!["CCO".to_string()]).is_err());
        assert!(CandidatePool::new(vec![], vec![]).is_err());
        let two = vec![
            ("CCO".to_string(), ov(&[0.1])),
            ("CCN".to_string(), ov(&[0.1, 0.2])),
        ];
        assert!(CandidatePool::new(two, vec![]).is_err());
    }

    #[test]
    fn final_front_is_nondominated_superset_of_observations() {
        let (pool, oracle) = toy_pool();
        let cfg = config(AcquisitionKind::Ehvi, 2, 5, 11);
        let result = run_gp_mobo(&pool, &oracle, &cfg).unwrap();
        for p in result.final_front.points() {
            for q in result.final_front.points() {
                assert!(!dominates(q, p).unwrap() || p == q);
            }
        }
    }
}
