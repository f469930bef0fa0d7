//! Acquisition functions: Monte-Carlo expected hypervolume improvement for
//! the multi-objective path, closed-form expected improvement and upper
//! confidence bound for the scalarized baselines, plus geometric-mean
//! scalarization and deterministic argmax selection.

use crate::pareto::{ParetoError, ParetoFront, PreparedHvi};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AcquisitionError {
    #[error("variances must be non-negative and finite")]
    InvalidVariance,
    #[error("means and variances must have the reference point's dimension")]
    DimensionMismatch,
    #[error("geometric mean requires non-negative inputs, got {0}")]
    NegativeInput(f64),
    #[error("no eligible candidates")]
    NoEligibleCandidates,
    #[error("at least one Monte Carlo sample is required")]
    ZeroSamples,
    #[error(transparent)]
    Pareto(#[from] ParetoError),
}

/// Which acquisition function drives candidate selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AcquisitionKind {
    Ehvi,
    Ei,
    Ucb,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcquisitionConfig {
    pub kind: AcquisitionKind,
    /// Monte Carlo sample count for EHVI.
    #[serde(default = "default_mc_samples")]
    pub mc_samples: usize,
    /// Exploration weight for UCB.
    #[serde(default = "default_ucb_beta")]
    pub ucb_beta: f64,
}

fn default_mc_samples() -> usize {
    1000
}

fn default_ucb_beta() -> f64 {
    1.0
}

impl Default for AcquisitionConfig {
    fn default() -> Self {
        AcquisitionConfig { kind: AcquisitionKind::Ehvi, mc_samples: 1000, ucb_beta: 1.0 }
    }
}

/// A batch of standard-normal draws, one row per Monte Carlo sample. The
/// same batch is reused for every candidate scored in one iteration
/// (common random numbers), which cuts selection noise and makes the
/// estimate monotone under mean shifts.
#[derive(Debug, Clone)]
pub struct NormalBatch {
    samples: Vec<f64>,
    dim: usize,
}

impl NormalBatch {
    pub fn draw(rng: &mut impl Rng, n: usize, dim: usize) -> Self {
        let samples = (0..n * dim).map(|_| rng.sample(StandardNormal)).collect();
        NormalBatch { samples, dim }
    }

    pub fn len(&self) -> usize {
        self.samples.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.samples.chunks_exact(self.dim)
    }
}

/// Monte-Carlo EHVI against a prepared front: average hypervolume
/// improvement of `mean + sigma * z` over the batch.
pub fn ehvi_with_batch(
    means: &[f64],
    variances: &[f64],
    prepared: &PreparedHvi,
    batch: &NormalBatch,
) -> Result<f64, AcquisitionError> {
    let d = prepared.reference().len();
    if means.len() != d || variances.len() != d || batch.dim != d {
        return Err(AcquisitionError::DimensionMismatch);
    }
    if variances.iter().any(|&v| !(v.is_finite() && v >= 0.0)) {
        return Err(AcquisitionError::InvalidVariance);
    }
    if batch.is_empty() {
        return Err(AcquisitionError::ZeroSamples);
    }
    let sigmas: Vec<f64> = variances.iter().map(|&v| v.sqrt()).collect();
    let mut y = vec![0.0; d];
    let mut total = 0.0;
    for z in batch.rows() {
        for k in 0..d {
            y[k] = means[k] + sigmas[k] * z[k];
        }
        total += prepared.improvement(&y);
    }
    Ok(total / batch.len() as f64)
}

/// One-shot Monte-Carlo EHVI drawing its own sample batch from `rng`.
/// Deterministic given the RNG state and sample count.
pub fn ehvi_mc(
    means: &[f64],
    variances: &[f64],
    front: &ParetoFront,
    reference: &[f64],
    n_samples: usize,
    rng: &mut impl Rng,
) -> Result<f64, AcquisitionError> {
    if n_samples == 0 {
        return Err(AcquisitionError::ZeroSamples);
    }
    let prepared = PreparedHvi::new(front, reference)?;
    let batch = NormalBatch::draw(rng, n_samples, reference.len());
    ehvi_with_batch(means, variances, &prepared, &batch)
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2))
}

fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Closed-form expected improvement over `f_best` for a Gaussian
/// posterior: `sigma * (z Phi(z) + phi(z))` with `z = (mean - f_best) /
/// sigma`; collapses to `max(mean - f_best, 0)` at zero variance.
pub fn expected_improvement(mean: f64, variance: f64, f_best: f64) -> Result<f64, AcquisitionError> {
    if !(variance.is_finite() && variance >= 0.0) {
        return Err(AcquisitionError::InvalidVariance);
    }
    let sigma = variance.sqrt();
    if sigma == 0.0 {
        return Ok((mean - f_best).max(0.0));
    }
    let z = (mean - f_best) / sigma;
    Ok((sigma * (z * normal_cdf(z) + normal_pdf(z))).max(0.0))
}

/// Upper confidence bound: `mean + beta * sigma`.
pub fn ucb(mean: f64, variance: f64, beta: f64) -> Result<f64, AcquisitionError> {
    if !(variance.is_finite() && variance >= 0.0) {
        return Err(AcquisitionError::InvalidVariance);
    }
    Ok(mean + beta * variance.sqrt())
}

/// Geometric mean of non-negative values, computed in log space. Zero
/// inputs give zero; negative inputs are a configuration bug and error.
pub fn geometric_mean(values: &[f64]) -> Result<f64, AcquisitionError> {
    if values.is_empty() {
        return Err(AcquisitionError::NoEligibleCandidates);
    }
    for &v in values {
        if !(v.is_finite() && v >= 0.0) {
            return Err(AcquisitionError::NegativeInput(v));
        }
    }
    if values.contains(&0.0) {
        return Ok(0.0);
    }
    let mean_log = values.iter().map(|v| v.ln()).sum::<f64>() / values.len() as f64;
    Ok(mean_log.exp())
}

/// Index of the highest eligible score; ties break toward the lowest
/// index so selection is deterministic.
pub fn select_candidate(scores: &[f64], eligible: &[bool]) -> Result<usize, AcquisitionError> {
    if scores.len() != eligible.len() {
        return Err(AcquisitionError::DimensionMismatch);
    }
    let mut best: Option<(usize, f64)> = None;
    for (i, (&score, &ok)) in scores.iter().zip(eligible).enumerate() {
        if !ok {
            continue;
        }
        match best {
            None => best = Some((i, score)),
            Some((_, current)) if score > current => best = Some((i, score)),
            _ => {}
        }
    }
    best.map(|(i, _)| i).ok_or(AcquisitionError::NoEligibleCandidates)
}
