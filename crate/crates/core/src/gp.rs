//! Exact kernel-only Gaussian process regression over fingerprints.
//!
//! A fitted model stores the Cholesky factor of `K + (s/a) I`, where `K` is
//! the unit-amplitude kernel Gram matrix of the training fingerprints. The
//! prior covariance is `a K + s I` with constant mean `mu`; amplitude
//! cancels out of the predictive mean, which is why the factorization works
//! on the ratio `s / a`:
//!
//! * mean:     `mu + k_q' (K + (s/a) I)^-1 (y - mu)`
//! * variance: `a (k_qq - |L^-1 k_q|^2)`, clamped into `[0, a]`
//!
//! Hyperparameters are fixed inputs and never optimized here; the negative
//! log marginal likelihood is exposed for diagnostics only. Multi-objective
//! regression is a stack of independent single-output models sharing one
//! Gram matrix.

use crate::fingerprint::SparseFingerprint;
use crate::kernels::{self, KernelError, KernelKind};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GpError {
    #[error("training fingerprints and targets have different lengths ({fps} vs {targets})")]
    LengthMismatch { fps: usize, targets: usize },
    #[error("at least one training point is required")]
    EmptyTrainingSet,
    #[error("targets must be finite")]
    NonFiniteTarget,
    #[error("kernel matrix is not positive definite, even with jitter up to {max_jitter:e}")]
    NotPositiveDefinite { max_jitter: f64 },
    #[error("predictive variances must be positive for NLPD")]
    NonPositiveVariance,
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparams(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Constant mean, kernel amplitude and observation noise of one GP.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpHyperparams {
    pub mean: f64,
    pub amplitude: f64,
    pub noise: f64,
}

impl Default for GpHyperparams {
    fn default() -> Self {
        GpHyperparams { mean: 0.0, amplitude: 1.0, noise: 1e-4 }
    }
}

impl GpHyperparams {
    pub fn validate(&self) -> Result<(), GpError> {
        if !self.mean.is_finite() {
            return Err(GpError::InvalidHyperparams("mean must be finite".into()));
        }
        if !(self.amplitude.is_finite() && self.amplitude > 0.0) {
            return Err(GpError::InvalidHyperparams("amplitude must be positive".into()));
        }
        if !(self.noise.is_finite() && self.noise >= 0.0) {
            return Err(GpError::InvalidHyperparams("noise must be non-negative".into()));
        }
        Ok(())
    }
}

/// Posterior means and variances for a batch of query points.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorPrediction {
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
}

/// Per-objective posterior matrices, row per query point, column per
/// objective.
#[derive(Debug, Clone, PartialEq)]
pub struct MoPrediction {
    pub means: Vec<Vec<f64>>,
    pub variances: Vec<Vec<f64>>,
}

/// Jitter escalation schedule applied when the factorization fails:
/// starts at 1e-10, multiplies by 10 up to 1e-4.
const MAX_JITTER: f64 = 1e-4;

/// A fitted single-output GP.
#[derive(Debug, Clone)]
pub struct FittedGp {
    train_fps: Arc<Vec<SparseFingerprint>>,
    kind: KernelKind,
    hyper: GpHyperparams,
    /// Lower Cholesky factor of K + (s/a + jitter) I.
    chol_l: DMatrix<f64>,
    /// (K + (s/a + jitter) I)^-1 (y - mu)
    alpha: DVector<f64>,
    centered: DVector<f64>,
    jitter: f64,
}

impl FittedGp {
    /// Fit on training fingerprints and targets.
    pub fn fit(
        train_fps: &[SparseFingerprint],
        targets: &[f64],
        hyper: GpHyperparams,
        kind: KernelKind,
    ) -> Result<Self, GpError> {
        if train_fps.is_empty() {
            return Err(GpError::EmptyTrainingSet);
        }
        if train_fps.len() != targets.len() {
            return Err(GpError::LengthMismatch { fps: train_fps.len(), targets: targets.len() });
        }
        let gram = kernels::gram_matrix(train_fps, train_fps, kind)?;
        Self::fit_with_gram(Arc::new(train_fps.to_vec()), &gram, targets, hyper, kind)
    }

    /// Fit against a precomputed unit-amplitude Gram matrix of `train_fps`.
    fn fit_with_gram(
        train_fps: Arc<Vec<SparseFingerprint>>,
        gram: &[Vec<f64>],
        targets: &[f64],
        hyper: GpHyperparams,
        kind: KernelKind,
    ) -> Result<Self, GpError> {
        hyper.validate()?;
        if targets.iter().any(|y| !y.is_finite()) {
            return Err(GpError::NonFiniteTarget);
        }
        let n = targets.len();
        let ratio = hyper.noise / hyper.amplitude;
        let base = DMatrix::from_fn(n, n, |i, j| gram[i][j]);

        let mut jitter = 0.0f64;
        loop {
            let mut m = base.clone();
            for i in 0..n {
                m[(i, i)] += ratio + jitter;
            }
            if let Some(chol) = nalgebra::Cholesky::new(m) {
                if jitter > 0.0 {
                    log::warn!(
                        "kernel matrix needed jitter {jitter:e} on top of noise ratio {ratio:e}"
                    );
                }
                let centered = DVector::from_iterator(n, targets.iter().map(|y| y - hyper.mean));
                let alpha = chol.solve(&centered);
                return Ok(FittedGp {
                    train_fps,
                    kind,
                    hyper,
                    chol_l: chol.unpack(),
                    alpha,
                    centered,
                    jitter,
                });
            }
            jitter = if jitter == 0.0 { 1e-10 } else { jitter * 10.0 };
            if jitter > MAX_JITTER {
                return Err(GpError::NotPositiveDefinite { max_jitter: MAX_JITTER });
            }
        }
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn hyperparams(&self) -> GpHyperparams {
        self.hyper
    }

    pub fn kernel_kind(&self) -> KernelKind {
        self.kind
    }

    /// Jitter that had to be added for the factorization to succeed;
    /// 0.0 when the matrix was positive definite as given.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn train_fingerprints(&self) -> &[SparseFingerprint] {
        &self.train_fps
    }

    /// Posterior mean and variance for each query fingerprint.
    pub fn predict(&self, query: &[SparseFingerprint]) -> PosteriorPrediction {
        let mut means = Vec::with_capacity(query.len());
        let mut variances = Vec::with_capacity(query.len());
        let mut clamped = 0usize;
        let mut worst = 0.0f64;
        for q in query {
            let k = self.cross_vector(q);
            let k_qq = self.kind.evaluate(q, q);
            let (mean, raw_var) = self.predict_with_k(&k, k_qq);
            if raw_var < 0.0 {
                clamped += 1;
                worst = worst.min(raw_var);
            }
            means.push(mean);
            variances.push(raw_var.clamp(0.0, self.hyper.amplitude));
        }
        if clamped > 0 {
            log::warn!("clamped {clamped} negative predictive variances (most negative {worst:e})");
        }
        PosteriorPrediction { means, variances }
    }

    fn cross_vector(&self, q: &SparseFingerprint) -> DVector<f64> {
        DVector::from_iterator(
            self.train_fps.len(),
            self.train_fps.iter().map(|t| self.kind.evaluate(t, q)),
        )
    }

    /// Mean and *unclamped* variance from a precomputed kernel vector.
    fn predict_with_k(&self, k: &DVector<f64>, k_qq: f64) -> (f64, f64) {
        let mean = self.hyper.mean + k.dot(&self.alpha);
        let v = self
            .chol_l
            .solve_lower_triangular(k)
            .expect("Cholesky factor has a positive diagonal");
        let var = self.hyper.amplitude * (k_qq - v.norm_squared());
        (mean, var)
    }

    /// Negative log marginal likelihood of the training targets under the
    /// prior covariance `a K + s I`:
    ///
    /// `0.5 (y-mu)' C^-1 (y-mu) + 0.5 log det C + (n/2) log 2pi`
    ///
    /// with `log det C = n log a + 2 sum log diag L`.
    pub fn nlml(&self) -> f64 {
        let n = self.len() as f64;
        let data_fit = 0.5 * self.centered.dot(&self.alpha) / self.hyper.amplitude;
        let log_det = n * self.hyper.amplitude.ln()
            + 2.0 * (0..self.len()).map(|i| self.chol_l[(i, i)].ln()).sum::<f64>();
        data_fit + 0.5 * log_det + 0.5 * n * (2.0 * PI).ln()
    }
}

/// Average Gaussian negative log predictive density of held-out targets:
/// mean over points of `0.5 log(2 pi var) + (y - mean)^2 / (2 var)`.
pub fn nlpd(means: &[f64], variances: &[f64], y_true: &[f64]) -> Result<f64, GpError> {
    if means.len() != variances.len() || means.len() != y_true.len() {
        return Err(GpError::LengthMismatch { fps: means.len(), targets: y_true.len() });
    }
    if means.is_empty() {
        return Err(GpError::EmptyTrainingSet);
    }
    if variances.iter().any(|&v| v <= 0.0 || !v.is_finite()) {
        return Err(GpError::NonPositiveVariance);
    }
    let total: f64 = means
        .iter()
        .zip(variances)
        .zip(y_true)
        .map(|((&m, &v), &y)| 0.5 * (2.0 * PI * v).ln() + (y - m).powi(2) / (2.0 * v))
        .sum();
    Ok(total / means.len() as f64)
}

/// Independent per-objective GPs sharing one set of training fingerprints.
#[derive(Debug, Clone)]
pub struct MultiObjectiveGp {
    gps: Vec<FittedGp>,
}

impl MultiObjectiveGp {
    /// Fit one GP per objective. `targets` holds one row per training point
    /// with one entry per objective; rows with non-finite values must have
    /// been filtered out by the caller. The unit-amplitude Gram matrix is
    /// computed once and shared across objectives, which is exactly
    /// equivalent to independent fits.
    pub fn fit(
        train_fps: &[SparseFingerprint],
        targets: &[Vec<f64>],
        hypers: &[GpHyperparams],
        kind: KernelKind,
    ) -> Result<Self, GpError> {
        if train_fps.is_empty() {
            return Err(GpError::EmptyTrainingSet);
        }
        if train_fps.len() != targets.len() {
            return Err(GpError::LengthMismatch { fps: train_fps.len(), targets: targets.len() });
        }
        let dims = hypers.len();
        if dims == 0 || targets.iter().any(|row| row.len() != dims) {
            return Err(GpError::InvalidHyperparams(
                "need one hyperparameter set per objective column".into(),
            ));
        }
        let gram = kernels::gram_matrix(train_fps, train_fps, kind)?;
        let shared = Arc::new(train_fps.to_vec());
        let gps = hypers
            .iter()
            .enumerate()
            .map(|(j, &hyper)| {
                let column: Vec<f64> = targets.iter().map(|row| row[j]).collect();
                FittedGp::fit_with_gram(Arc::clone(&shared), &gram, &column, hyper, kind)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MultiObjectiveGp { gps })
    }

    pub fn num_objectives(&self) -> usize {
        self.gps.len()
    }

    pub fn objectives(&self) -> &[FittedGp] {
        &self.gps
    }

    /// Predict all objectives for each query point. Kernel evaluations
    /// against the training set are shared across objectives.
    pub fn predict(&self, query: &[SparseFingerprint]) -> MoPrediction {
        let first = &self.gps[0];
        let mut means = Vec::with_capacity(query.len());
        let mut variances = Vec::with_capacity(query.len());
        let mut clamped = 0usize;
        for q in query {
            let k = first.cross_vector(q);
            let k_qq = first.kind.evaluate(q, q);
            let mut row_mean = Vec::with_capacity(self.gps.len());
            let mut row_var = Vec::with_capacity(self.gps.len());
            for gp in &self.gps {
                let (mean, raw_var) = gp.predict_with_k(&k, k_qq);
                if raw_var < 0.0 {
                    clamped += 1;
                }
                row_mean.push(mean);
                row_var.push(raw_var.clamp(0.0, gp.hyper.amplitude));
            }
            means.push(row_mean);
            variances.push(row_var);
        }
        if clamped > 0 {
            log::warn!("clamped {clamped} negative predictive variances across objectives");
        }
        MoPrediction { means, variances }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fingerprint::SparseFingerprint;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;

    fn fp(pairs: &[(u64, u32)]) -> SparseFingerprint {
        SparseFingerprint::from_counts(pairs.iter().copied(), 0, 0)
    }

    fn random_fps(n: usize, rng: &mut ChaCha12Rng) -> Vec<SparseFingerprint> {
        let mut out = Vec::new();
        while out.len() < n {
            let keys = rng.random_range(3..10usize);
            let cand = fp(&(0..keys)
                .map(|_| (rng.random_range(0..40u64), rng.random_range(1..5u32)))
                .collect::<Vec<_>>());
            if !out.contains(&cand) {
                out.push(cand);
            }
        }
        out
    }

    #[test]
    fn single_point_closed_form() {
        let x = fp(&[(1, 2), (2, 1)]);
        let gp = FittedGp::fit(
            std::slice::from_ref(&x),
            &[2.0],
            GpHyperparams::default(),
            KernelKind::MinMaxCount,
        )
        .unwrap();
        assert_relative_eq!(gp.chol_l[(0, 0)], (1.0f64 + 1e-4).sqrt(), epsilon = 1e-14);
        let pred = gp.predict(&[x]);
        assert_relative_eq!(pred.means[0], 2.0 / 1.0001, epsilon = 1e-12);
        assert_relative_eq!(pred.variances[0], 1.0 - 1.0 / 1.0001, epsilon = 1e-12);
    }

    #[test]
    fn prior_recovery_for_unseen_disjoint_query() {
        let train = vec![fp(&[(1, 1)]), fp(&[(2, 1)])];
        let hyper = GpHyperparams { mean: 0.7, amplitude: 2.5, noise: 1e-4 };
        let gp = FittedGp::fit(&train, &[1.0, -1.0], hyper, KernelKind::MinMaxCount).unwrap();
        let pred = gp.predict(&[fp(&[(99, 1)])]);
        assert_relative_eq!(pred.means[0], 0.7, epsilon = 1e-12);
        assert_relative_eq!(pred.variances[0], 2.5, epsilon = 1e-12);
    }

    #[test]
    fn interpolation_as_noise_vanishes() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let train = random_fps(8, &mut rng);
        let targets: Vec<f64> = (0..8).map(|i| (i as f64).sin()).collect();
        let hyper = GpHyperparams { mean: 0.0, amplitude: 1.0, noise: 1e-8 };
        let gp = FittedGp::fit(&train, &targets, hyper, KernelKind::MinMaxCount).unwrap();
        let pred = gp.predict(&train);
        for (m, y) in pred.means.iter().zip(&targets) {
            assert!((m - y).abs() < 1e-4, "interpolation error {}", (m - y).abs());
        }
        for v in pred.variances {
            assert!(v <= 1e-6, "variance {v} too large at training point");
        }
    }

    #[test]
    fn factorization_residual_is_tiny() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let train = random_fps(3, &mut rng);
        let hyper = GpHyperparams::default();
        let gp = FittedGp::fit(&train, &[0.1, -0.4, 0.7], hyper, KernelKind::MinMaxCount)
            .unwrap();
        let gram = crate::kernels::gram_matrix(&train, &train, KernelKind::MinMaxCount).unwrap();
        let ratio = hyper.noise / hyper.amplitude;
        // L L' reconstructs K + (s/a) I entrywise
        for i in 0..3 {
            for j in 0..3 {
                let rebuilt: f64 =
                    (0..3).map(|k| gp.chol_l[(i, k)] * gp.chol_l[(j, k)]).sum();
                let expected = gram[i][j] + if i == j { ratio } else { 0.0 };
                assert!((rebuilt - expected).abs() < 1e-10, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn duplicate_training_points_rescued_by_jitter() {
        let x = fp(&[(1, 1)]);
        let hyper = GpHyperparams { mean: 0.0, amplitude: 1.0, noise: 0.0 };
        let gp = FittedGp::fit(
            &[x.clone(), x],
            &[1.0, 1.0],
            hyper,
            KernelKind::MinMaxCount,
        )
        .unwrap();
        assert!(gp.jitter() > 0.0);
    }

    #[test]
    fn nlml_scalar_reference_value() {
        let x = fp(&[(1, 1)]);
        let hyper = GpHyperparams { mean: 0.5, amplitude: 1.0, noise: 0.0 };
        let gp = FittedGp::fit(std::slice::from_ref(&x), &[0.5], hyper, KernelKind::MinMaxCount)
            .unwrap();
        // y = mu, a = 1, s = 0, k_xx = 1: only the constant term remains
        assert_relative_eq!(gp.nlml(), 0.5 * (2.0 * PI).ln(), epsilon = 1e-12);
    }

    #[test]
    fn nlml_data_fit_is_quadratic_in_residual() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let train = random_fps(5, &mut rng);
        let hyper = GpHyperparams { mean: 0.0, amplitude: 1.7, noise: 1e-3 };
        let base: Vec<f64> = vec![0.0; 5];
        let delta: Vec<f64> = (0..5).map(|i| 0.1 * (i as f64 + 1.0)).collect();
        let doubled: Vec<f64> = delta.iter().map(|d| 2.0 * d).collect();
        let nlml_at = |targets: &[f64]| {
            FittedGp::fit(&train, targets, hyper, KernelKind::MinMaxCount).unwrap().nlml()
        };
        let zero = nlml_at(&base);
        let one = nlml_at(&delta);
        let four = nlml_at(&doubled);
        // complexity and constant terms cancel; the data fit quadruples
        assert_relative_eq!(four - zero, 4.0 * (one - zero), epsilon = 1e-9);
    }

    #[test]
    fn nlml_finite_on_random_instances() {
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        for _ in 0..10 {
            let n = rng.random_range(1..12usize);
            let train = random_fps(n, &mut rng);
            let targets: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            let gp = FittedGp::fit(
                &train,
                &targets,
                GpHyperparams::default(),
                KernelKind::MinMaxCount,
            )
            .unwrap();
            assert!(gp.nlml().is_finite());
        }
    }

    #[test]
    fn nlpd_reference_values() {
        // standard normal at its mean
        let v = nlpd(&[0.0], &[1.0], &[0.0]).unwrap();
        assert_relative_eq!(v, 0.918938533204673, epsilon = 1e-12);
        // non-positive variances are rejected
        assert_eq!(
            nlpd(&[0.0], &[0.0], &[0.0]).unwrap_err(),
            GpError::NonPositiveVariance
        );
        assert!(matches!(
            nlpd(&[0.0, 1.0], &[1.0], &[0.0]).unwrap_err(),
            GpError::LengthMismatch { .. }
        ));
    }

    #[test]
    fn nlpd_grows_as_variance_shrinks_past_residual() {
        // once var < (y - mean)^2, shrinking it further increases NLPD
        let residual_sq = 0.25f64;
        let grid = [0.2, 0.1, 0.05, 0.01, 1e-3, 1e-4];
        for pair in grid.windows(2) {
            let larger = nlpd(&[0.5], &[pair[0]], &[0.0]).unwrap();
            let smaller = nlpd(&[0.5], &[pair[1]], &[0.0]).unwrap();
            assert!(pair[0] < residual_sq);
            assert!(smaller > larger, "NLPD must increase as variance shrinks");
        }
    }

    #[test]
    fn variance_never_negative_and_bounded_by_amplitude() {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for _ in 0..20 {
            let n = rng.random_range(2..15usize);
            let train = random_fps(n, &mut rng);
            let targets: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let hyper = GpHyperparams { mean: 0.0, amplitude: 1.3, noise: 1e-6 };
            let gp = FittedGp::fit(&train, &targets, hyper, KernelKind::MinMaxCount).unwrap();
            let query = random_fps(6, &mut rng);
            for q in train.iter().chain(&query) {
                let k = gp.cross_vector(q);
                let k_qq = gp.kind.evaluate(q, q);
                let (_, raw) = gp.predict_with_k(&k, k_qq);
                assert!(raw > -1e-8, "pre-clamp variance {raw} too negative");
            }
            let pred = gp.predict(&query);
            for v in pred.variances {
                assert!((0.0..=1.3 + 1e-12).contains(&v));
            }
        }
    }

    #[test]
    fn multi_objective_matches_independent_fits() {
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        let train = random_fps(7, &mut rng);
        let query = random_fps(4, &mut rng);
        let targets: Vec<Vec<f64>> = (0..7)
            .map(|_| (0..3).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let hypers = [
            GpHyperparams { mean: 0.1, amplitude: 1.0, noise: 1e-4 },
            GpHyperparams { mean: 0.0, amplitude: 2.0, noise: 1e-3 },
            GpHyperparams { mean: -0.5, amplitude: 0.7, noise: 1e-2 },
        ];
        let mogp =
            MultiObjectiveGp::fit(&train, &targets, &hypers, KernelKind::MinMaxCount).unwrap();
        let joint = mogp.predict(&query);
        for (j, hyper) in hypers.iter().enumerate() {
            let column: Vec<f64> = targets.iter().map(|row| row[j]).collect();
            let single =
                FittedGp::fit(&train, &column, *hyper, KernelKind::MinMaxCount).unwrap();
            let pred = single.predict(&query);
            for i in 0..query.len() {
                assert_relative_eq!(joint.means[i][j], pred.means[i], epsilon = 1e-12);
                assert_relative_eq!(joint.variances[i][j], pred.variances[i], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn multi_objective_single_column_reduces_to_fit() {
        let mut rng = ChaCha12Rng::seed_from_u64(29);
        let train = random_fps(5, &mut rng);
        let targets: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64 * 0.3]).collect();
        let flat: Vec<f64> = targets.iter().map(|r| r[0]).collect();
        let mogp = MultiObjectiveGp::fit(
            &train,
            &targets,
            &[GpHyperparams::default()],
            KernelKind::MinMaxCount,
        )
        .unwrap();
        let single =
            FittedGp::fit(&train, &flat, GpHyperparams::default(), KernelKind::MinMaxCount)
                .unwrap();
        let a = mogp.predict(&train);
        let b = single.predict(&train);
        for i in 0..train.len() {
            assert_eq!(a.means[i][0], b.means[i]);
            assert_eq!(a.variances[i][0], b.variances[i]);
        }
    }

    #[test]
    fn column_permutation_permutes_predictions() {
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        let train = random_fps(6, &mut rng);
        let query = random_fps(3, &mut rng);
        let targets: Vec<Vec<f64>> = (0..6)
            .map(|_| (0..2).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let swapped: Vec<Vec<f64>> = targets.iter().map(|r| vec![r[1], r[0]]).collect();
        let h = [GpHyperparams::default(), GpHyperparams::default()];
        let a = MultiObjectiveGp::fit(&train, &targets, &h, KernelKind::MinMaxCount)
            .unwrap()
            .predict(&query);
        let b = MultiObjectiveGp::fit(&train, &swapped, &h, KernelKind::MinMaxCount)
            .unwrap()
            .predict(&query);
        for i in 0..query.len() {
            assert_eq!(a.means[i][0], b.means[i][1]);
            assert_eq!(a.means[i][1], b.means[i][0]);
        }
    }

    #[test]
    fn input_validation() {
        let x = fp(&[(1, 1)]);
        assert!(matches!(
            FittedGp::fit(&[], &[], GpHyperparams::default(), KernelKind::MinMaxCount),
            Err(GpError::EmptyTrainingSet)
        ));
        assert!(matches!(
            FittedGp::fit(
                std::slice::from_ref(&x),
                &[1.0, 2.0],
                GpHyperparams::default(),
                KernelKind::MinMaxCount
            ),
            Err(GpError::LengthMismatch { .. })
        ));
        assert!(matches!(
            FittedGp::fit(
                std::slice::from_ref(&x),
                &[f64::NAN],
                GpHyperparams::default(),
                KernelKind::MinMaxCount
            ),
            Err(GpError::NonFiniteTarget)
        ));
        let bad = GpHyperparams { mean: 0.0, amplitude: 0.0, noise: 0.0 };
        assert!(matches!(
            FittedGp::fit(std::slice::from_ref(&x), &[1.0], bad, KernelKind::MinMaxCount),
            Err(GpError::InvalidHyperparams(_))
        ));
    }
}
