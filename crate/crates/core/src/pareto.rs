//! Pareto dominance, non-dominated filtering, hypervolume computation,
//! hypervolume improvement and reference-point inference.
//!
//! Everything here uses the maximization convention: larger objective
//! values are better, the reference point sits strictly below the front,
//! and the hypervolume is the Lebesgue measure of the union of boxes
//! `[r, y]` spanned by the reference point and the front points.
//!
//! Two exact engines are provided. [`hv_hso`] slices objectives starting
//! from the first coordinate; [`hv_sweep`] recurses on the highest
//! coordinate down to a sorted two-dimensional base case and skips
//! recursive work for points whose remaining coordinates are already
//! dominated. They implement the same contract and must agree to within
//! floating-point noise; [`hv_ie_oracle`] (inclusion-exclusion) and
//! [`hv_mc_oracle`] (uniform sampling) exist to cross-check both in tests.
//!
//! The exact engines reject inputs that do not strictly dominate the
//! reference point. [`hvi`] instead clips the candidate to the reference
//! point, because Monte-Carlo-sampled candidates routinely fall below it.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::ops::Deref;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParetoError {
    #[error("objective vectors must share one dimension (expected {expected}, got {got})")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("objective vectors must be non-empty and finite")]
    InvalidObjectiveVector,
    #[error("no points given")]
    EmptyInput,
    #[error("front is empty")]
    EmptyFront,
    #[error("front point {index} does not strictly dominate the reference point")]
    ReferenceNotDominated { index: usize },
    #[error("inclusion-exclusion oracle is limited to {limit} points, got {got}")]
    TooManyPoints { limit: usize, got: usize },
    #[error("invalid reference-point config: {0}")]
    InvalidConfig(String),
    #[error("front points must be mutually non-dominated and deduplicated")]
    NotAFront,
}

/// A point in objective space, maximization convention. Always finite and
/// at least one-dimensional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ObjectiveVector(Vec<f64>);

impl ObjectiveVector {
    pub fn new(values: Vec<f64>) -> Result<Self, ParetoError> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(ParetoError::InvalidObjectiveVector);
        }
        Ok(ObjectiveVector(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ObjectiveVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for ObjectiveVector {
    type Error = ParetoError;
    fn try_from(values: Vec<f64>) -> Result<Self, ParetoError> {
        ObjectiveVector::new(values)
    }
}

impl From<ObjectiveVector> for Vec<f64> {
    fn from(v: ObjectiveVector) -> Vec<f64> {
        v.0
    }
}

/// `a` dominates `b`: componentwise >= with at least one strict >.
pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> Result<bool, ParetoError> {
    if a.dim() != b.dim() {
        return Err(ParetoError::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    Ok(dominates_slices(a, b))
}

fn dominates_slices(a: &[f64], b: &[f64]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            strict = true;
        }
    }
    strict
}

/// Componentwise >=. Equal points weakly dominate each other.
fn weakly_dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y)
}

/// Mutually non-dominated, deduplicated points.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ParetoFront {
    points: Vec<ObjectiveVector>,
}

impl ParetoFront {
    /// Wrap points that are already mutually non-dominated and free of
    /// exact duplicates; rejects anything else.
    pub fn new(points: Vec<ObjectiveVector>) -> Result<Self, ParetoError> {
        check_dims(&points)?;
        for (i, p) in points.iter().enumerate() {
            for (j, q) in points.iter().enumerate() {
                if i != j && (weakly_dominates(q, p)) {
                    return Err(ParetoError::NotAFront);
                }
            }
        }
        Ok(ParetoFront { points })
    }

    pub fn empty() -> Self {
        ParetoFront { points: Vec::new() }
    }

    pub fn points(&self) -> &[ObjectiveVector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.points.first().map(ObjectiveVector::dim)
    }
}

fn check_dims(points: &[ObjectiveVector]) -> Result<usize, ParetoError> {
    let Some(first) = points.first() else { return Ok(0) };
    let d = first.dim();
    for p in points {
        if p.dim() != d {
            return Err(ParetoError::DimensionMismatch { expected: d, got: p.dim() });
        }
    }
    Ok(d)
}

/// Keep exactly the maximal elements: exact duplicates collapse to their
/// first occurrence, then every point dominated by another point is
/// dropped. Input order of the survivors is preserved.
pub fn pareto_filter(points: &[ObjectiveVector]) -> Result<ParetoFront, ParetoError> {
    if points.is_empty() {
        return Err(ParetoError::EmptyInput);
    }
    check_dims(points)?;
    let mut deduped: Vec<&ObjectiveVector> = Vec::new();
    for p in points {
        if !deduped.iter().any(|q| q.values() == p.values()) {
            deduped.push(p);
        }
    }
    let survivors = deduped
        .iter()
        .filter(|p| !deduped.iter().any(|q| dominates_slices(q, p)))
        .map(|p| (*p).clone())
        .collect();
    Ok(ParetoFront { points: survivors })
}

fn validate_front_against_reference(
    front: &ParetoFront,
    r: &[f64],
) -> Result<(), ParetoError> {
    if let Some(d) = front.dim() {
        if r.len() != d {
            return Err(ParetoError::DimensionMismatch { expected: d, got: r.len() });
        }
    }
    for (index, p) in front.points.iter().enumerate() {
        if !p.iter().zip(r).all(|(x, y)| x > y) {
            return Err(ParetoError::ReferenceNotDominated { index });
        }
    }
    Ok(())
}

/// Insert `p` into a list kept free of weakly dominated members. Returns
/// false if `p` itself is weakly dominated and the list is unchanged.
fn insert_nondominated(list: &mut Vec<Vec<f64>>, p: Vec<f64>) -> bool {
    if list.iter().any(|q| weakly_dominates(q, &p)) {
        return false;
    }
    list.retain(|q| !weakly_dominates(&p, q));
    list.push(p);
    true
}

/// Hypervolume by slicing objectives: sort on the first coordinate
/// descending, slice, and recurse on the remaining coordinates.
pub fn hv_hso(front: &ParetoFront, r: &[f64]) -> Result<f64, ParetoError> {
    validate_front_against_reference(front, r)?;
    if front.is_empty() {
        return Ok(0.0);
    }
    let points: Vec<Vec<f64>> = front.points.iter().map(|p| p.values().to_vec()).collect();
    Ok(hso_recursive(points, r))
}

fn hso_recursive(mut points: Vec<Vec<f64>>, r: &[f64]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    if r.len() == 1 {
        return points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max) - r[0];
    }
    // stable sort: ties keep input order
    points.sort_by(|a, b| b[0].partial_cmp(&a[0]).unwrap());
    let mut slice_points: Vec<Vec<f64>> = Vec::new();
    let mut total = 0.0;
    for i in 0..points.len() {
        insert_nondominated(&mut slice_points, points[i][1..].to_vec());
        let next = if i + 1 < points.len() { points[i + 1][0] } else { r[0] };
        let width = points[i][0] - next;
        if width > 0.0 {
            total += width * hso_recursive(slice_points.clone(), &r[1..]);
        }
    }
    total
}

/// Dimension-sweep hypervolume: process the highest coordinate first,
/// recursing down to a two-dimensional base case solved by one descending
/// sort. A point whose remaining coordinates are weakly dominated by an
/// already-processed point cannot change the sliced sub-volume, so its
/// recursive call is skipped and the previous value reused.
pub fn hv_sweep(front: &ParetoFront, r: &[f64]) -> Result<f64, ParetoError> {
    validate_front_against_reference(front, r)?;
    if front.is_empty() {
        return Ok(0.0);
    }
    let points: Vec<Vec<f64>> = front.points.iter().map(|p| p.values().to_vec()).collect();
    Ok(sweep_recursive(points, r))
}

fn sweep_recursive(mut points: Vec<Vec<f64>>, r: &[f64]) -> f64 {
    let d = r.len();
    if points.is_empty() {
        return 0.0;
    }
    if d == 1 {
        return points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max) - r[0];
    }
    if d == 2 {
        return hv_2d(&mut points, r);
    }
    points.sort_by(|a, b| b[d - 1].partial_cmp(&a[d - 1]).unwrap());
    let mut acc: Vec<Vec<f64>> = Vec::new();
    let mut sub_hv = 0.0;
    let mut total = 0.0;
    for i in 0..points.len() {
        let proj = points[i][..d - 1].to_vec();
        if insert_nondominated(&mut acc, proj) {
            sub_hv = sweep_recursive(acc.clone(), &r[..d - 1]);
        }
        let next = if i + 1 < points.len() { points[i + 1][d - 1] } else { r[d - 1] };
        let width = points[i][d - 1] - next;
        if width > 0.0 {
            total += width * sub_hv;
        }
    }
    total
}

/// Two-dimensional base case: one descending sort on the first coordinate,
/// then a single pass tracking the best second coordinate seen so far.
fn hv_2d(points: &mut [Vec<f64>], r: &[f64]) -> f64 {
    points.sort_by(|a, b| b[0].partial_cmp(&a[0]).unwrap());
    let mut best_y = r[1];
    let mut total = 0.0;
    for i in 0..points.len() {
        best_y = best_y.max(points[i][1]);
        let next = if i + 1 < points.len() { points[i + 1][0] } else { r[0] };
        let width = points[i][0] - next;
        if width > 0.0 {
            total += width * (best_y - r[1]);
        }
    }
    total
}

/// Inclusion-exclusion cross-check engine, exponential in the number of
/// points and therefore capped at 12.
pub fn hv_ie_oracle(front: &ParetoFront, r: &[f64]) -> Result<f64, ParetoError> {
    const LIMIT: usize = 12;
    if front.len() > LIMIT {
        return Err(ParetoError::TooManyPoints { limit: LIMIT, got: front.len() });
    }
    validate_front_against_reference(front, r)?;
    let n = front.len();
    if n == 0 {
        return Ok(0.0);
    }
    let d = r.len();
    let mut total = 0.0;
    for mask in 1u32..(1 << n) {
        let mut volume = 1.0;
        for k in 0..d {
            let mut lo = f64::INFINITY;
            for (i, p) in front.points.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    lo = lo.min(p[k]);
                }
            }
            volume *= lo - r[k];
        }
        if mask.count_ones() % 2 == 1 {
            total += volume;
        } else {
            total -= volume;
        }
    }
    Ok(total)
}

/// Monte Carlo cross-check engine: fraction of uniform samples in the
/// bounding box `[r, max(front)]` dominated by the front, times the box
/// volume. Unlike the exact engines this accepts degenerate fronts; their
/// estimate is simply 0.
pub fn hv_mc_oracle(
    front: &ParetoFront,
    r: &[f64],
    samples: u32,
    rng: &mut impl Rng,
) -> Result<f64, ParetoError> {
    if let Some(d) = front.dim() {
        if r.len() != d {
            return Err(ParetoError::DimensionMismatch { expected: d, got: r.len() });
        }
    }
    if front.is_empty() || samples == 0 {
        return Ok(0.0);
    }
    let d = r.len();
    let mut widths = vec![0.0; d];
    for k in 0..d {
        let hi = front.points.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
        widths[k] = (hi - r[k]).max(0.0);
    }
    let box_volume: f64 = widths.iter().product();
    if box_volume <= 0.0 {
        return Ok(0.0);
    }
    let mut hits = 0u64;
    let mut z = vec![0.0; d];
    for _ in 0..samples {
        for k in 0..d {
            z[k] = r[k] + rng.random::<f64>() * widths[k];
        }
        if front.points.iter().any(|p| weakly_dominates(p, &z)) {
            hits += 1;
        }
    }
    Ok(box_volume * hits as f64 / f64::from(samples))
}

/// Reusable hypervolume-improvement evaluator for a fixed front and
/// reference point. Candidates are clipped to the reference point, so a
/// coordinate at or below the reference contributes zero measure. In two
/// dimensions the improvement is computed directly from one presorted
/// sweep instead of re-running a full hypervolume computation per
/// candidate.
#[derive(Debug, Clone)]
pub struct PreparedHvi {
    r: Vec<f64>,
    /// Front sorted descending on the first coordinate (d == 2 only).
    sorted_2d: Vec<(f64, f64)>,
    points: Vec<Vec<f64>>,
    base_hv: f64,
}

impl PreparedHvi {
    pub fn new(front: &ParetoFront, r: &[f64]) -> Result<Self, ParetoError> {
        validate_front_against_reference(front, r)?;
        let points: Vec<Vec<f64>> = front.points.iter().map(|p| p.values().to_vec()).collect();
        let sorted_2d = if r.len() == 2 {
            let mut s: Vec<(f64, f64)> = points.iter().map(|p| (p[0], p[1])).collect();
            s.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
            s
        } else {
            Vec::new()
        };
        let base_hv = if r.len() == 2 || front.is_empty() {
            0.0 // unused by the 2-D fast path
        } else {
            sweep_recursive(points.clone(), r)
        };
        Ok(PreparedHvi { r: r.to_vec(), sorted_2d, points, base_hv })
    }

    pub fn reference(&self) -> &[f64] {
        &self.r
    }

    /// Hypervolume gained by adding `y` to the front. Exactly 0 for
    /// candidates weakly dominated by a front point.
    pub fn improvement(&self, y: &[f64]) -> f64 {
        debug_assert_eq!(y.len(), self.r.len());
        // clipped coordinates contribute zero measure
        if y.iter().zip(&self.r).any(|(v, r)| v <= r) {
            return 0.0;
        }
        if self.r.len() == 2 {
            return self.improvement_2d(y[0], y[1]);
        }
        if self.points.iter().any(|p| weakly_dominates(p, y)) {
            return 0.0;
        }
        let mut extended = self.points.clone();
        let yv = y.to_vec();
        extended.retain(|p| !weakly_dominates(&yv, p));
        extended.push(yv);
        (sweep_recursive(extended, &self.r) - self.base_hv).max(0.0)
    }

    /// Box area of the candidate minus its overlap with the staircase of
    /// the existing front.
    fn improvement_2d(&self, qx: f64, qy: f64) -> f64 {
        let (rx, ry) = (self.r[0], self.r[1]);
        let box_area = (qx - rx) * (qy - ry);
        let mut overlap = 0.0;
        // front is sorted descending in x, ascending in y
        for (i, &(px, py)) in self.sorted_2d.iter().enumerate() {
            let left = if i + 1 < self.sorted_2d.len() {
                self.sorted_2d[i + 1].0.max(rx)
            } else {
                rx
            };
            let right = px.min(qx);
            if right > left {
                overlap += (right - left) * (py.min(qy) - ry);
            }
        }
        (box_area - overlap).max(0.0)
    }
}

/// Hypervolume improvement of a single candidate: `HV(P u {y}) - HV(P)`.
pub fn hvi(front: &ParetoFront, y: &[f64], r: &[f64]) -> Result<f64, ParetoError> {
    Ok(PreparedHvi::new(front, r)?.improvement(y))
}

/// Hypervolume of an arbitrary point set at a reference point that some
/// points may fail to dominate: such points are dropped (they contribute
/// zero measure), the rest is filtered and measured. Returns 0 when
/// nothing survives. This is the tolerant form used for run telemetry;
/// the exact engines stay strict.
pub fn hv_filtered(points: &[ObjectiveVector], r: &[f64]) -> Result<f64, ParetoError> {
    check_dims(points)?;
    if let Some(p) = points.first() {
        if p.dim() != r.len() {
            return Err(ParetoError::DimensionMismatch { expected: p.dim(), got: r.len() });
        }
    }
    let surviving: Vec<ObjectiveVector> = points
        .iter()
        .filter(|p| p.iter().zip(r).all(|(x, y)| x > y))
        .cloned()
        .collect();
    if surviving.is_empty() {
        return Ok(0.0);
    }
    hv_sweep(&pareto_filter(&surviving)?, r)
}

/// Controls reference-point inference: a componentwise floor, the scale of
/// the nadir offset, and the minimum range substituted for degenerate
/// (single-point) fronts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferencePointConfig {
    pub r_floor: Vec<f64>,
    pub scale: f64,
    pub epsilon: f64,
}

impl ReferencePointConfig {
    pub fn with_floor(r_floor: Vec<f64>) -> Self {
        ReferencePointConfig { r_floor, scale: 0.1, epsilon: 1e-6 }
    }

    pub fn uniform_floor(dim: usize, floor: f64) -> Self {
        Self::with_floor(vec![floor; dim])
    }

    fn validate(&self, dim: usize) -> Result<(), ParetoError> {
        if self.r_floor.len() != dim {
            return Err(ParetoError::DimensionMismatch { expected: dim, got: self.r_floor.len() });
        }
        if self.r_floor.iter().any(|v| !v.is_finite()) {
            return Err(ParetoError::InvalidConfig("floor entries must be finite".into()));
        }
        if !(self.scale.is_finite() && self.scale >= 0.0) {
            return Err(ParetoError::InvalidConfig("scale must be non-negative".into()));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(ParetoError::InvalidConfig("epsilon must be positive".into()));
        }
        Ok(())
    }
}

/// Infer a reference point below the current front: per coordinate,
/// `max(nadir - scale * max(ideal - nadir, epsilon), floor)`.
pub fn infer_reference_point(
    front: &ParetoFront,
    config: &ReferencePointConfig,
) -> Result<ObjectiveVector, ParetoError> {
    if front.is_empty() {
        return Err(ParetoError::EmptyFront);
    }
    let d = front.dim().unwrap();
    config.validate(d)?;
    let mut out = Vec::with_capacity(d);
    for k in 0..d {
        let nadir = front.points.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
        let ideal = front.points.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
        let candidate = nadir - config.scale * (ideal - nadir).max(config.epsilon);
        out.push(candidate.max(config.r_floor[k]));
    }
    ObjectiveVector::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn ov(values: &[f64]) -> ObjectiveVector {
        ObjectiveVector::new(values.to_vec()).unwrap()
    }

    fn front(points: &[&[f64]]) -> ParetoFront {
        pareto_filter(&points.iter().map(|p| ov(p)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn dominance_basics() {
        assert!(dominates(&ov(&[2.0, 2.0]), &ov(&[1.0, 1.0])).unwrap());
        assert!(!dominates(&ov(&[2.0, 1.0]), &ov(&[1.0, 2.0])).unwrap());
        assert!(!dominates(&ov(&[1.0, 2.0]), &ov(&[2.0, 1.0])).unwrap());
        assert!(!dominates(&ov(&[1.0, 1.0]), &ov(&[1.0, 1.0])).unwrap());
        assert!(dominates(&ov(&[1.0]), &ov(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn filter_keeps_maximal_elements_in_order() {
        let pts = [&[1.0, 3.0][..], &[2.0, 2.0], &[3.0, 1.0], &[1.0, 1.0]];
        let f = front(&pts);
        assert_eq!(f.len(), 3);
        assert_eq!(f.points()[0].values(), &[1.0, 3.0]);
        assert_eq!(f.points()[1].values(), &[2.0, 2.0]);
        assert_eq!(f.points()[2].values(), &[3.0, 1.0]);

        let single = front(&[&[0.5, 0.5]]);
        assert_eq!(single.len(), 1);

        let dup = front(&[&[1.0, 1.0], &[1.0, 1.0], &[1.0, 1.0]]);
        assert_eq!(dup.len(), 1);

        assert_eq!(pareto_filter(&[]).unwrap_err(), ParetoError::EmptyInput);
    }

    #[test]
    fn hand_computed_hypervolumes() {
        let r2 = [0.0, 0.0];
        assert_eq!(hv_hso(&front(&[&[1.0, 1.0]]), &r2).unwrap(), 1.0);
        assert_eq!(hv_sweep(&front(&[&[1.0, 1.0]]), &r2).unwrap(), 1.0);

        let f = front(&[&[1.0, 3.0], &[2.0, 2.0], &[3.0, 1.0]]);
        assert_eq!(hv_hso(&f, &r2).unwrap(), 6.0);
        assert_eq!(hv_sweep(&f, &r2).unwrap(), 6.0);
        assert_eq!(hv_ie_oracle(&f, &r2).unwrap(), 6.0);

        let r3 = [0.0, 0.0, 0.0];
        let g = front(&[&[2.0, 1.0, 1.0], &[1.0, 2.0, 1.0]]);
        assert_eq!(hv_hso(&g, &r3).unwrap(), 3.0);
        assert_eq!(hv_sweep(&g, &r3).unwrap(), 3.0);
        assert_eq!(hv_ie_oracle(&g, &r3).unwrap(), 3.0);
    }

    #[test]
    fn reference_must_be_strictly_dominated() {
        let f = front(&[&[1.0, 3.0], &[3.0, 1.0]]);
        let err = hv_hso(&f, &[1.0, 0.0]).unwrap_err();
        assert!(matches!(err, ParetoError::ReferenceNotDominated { .. }));
        assert!(hv_sweep(&f, &[1.0, 0.0]).is_err());
        assert!(hv_ie_oracle(&f, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn hvi_hand_instances() {
        let f = front(&[&[1.0, 3.0], &[2.0, 2.0], &[3.0, 1.0]]);
        let r = [0.0, 0.0];
        assert_eq!(hvi(&f, &[2.5, 2.5], &r).unwrap(), 1.25);
        // dominated candidates add exactly nothing
        assert_eq!(hvi(&f, &[1.5, 1.5], &r).unwrap(), 0.0);
        assert_eq!(hvi(&f, &[2.0, 2.0], &r).unwrap(), 0.0);
        // candidate below the reference point is clipped to zero measure
        assert_eq!(hvi(&f, &[-1.0, 5.0], &r).unwrap(), 0.0);
        // empty front: the candidate's own box
        let empty = ParetoFront::empty();
        assert_eq!(hvi(&empty, &[2.0, 3.0], &r).unwrap(), 6.0);
    }

    #[test]
    fn hvi_three_dimensional() {
        let f = front(&[&[2.0, 1.0, 1.0], &[1.0, 2.0, 1.0]]);
        let r = [0.0, 0.0, 0.0];
        // dominates nothing, adds the corner block: hv goes from 3 to
        // hv({(2,1,1),(1,2,1),(1.5,1.5,1.5)})
        let added = hvi(&f, &[1.5, 1.5, 1.5], &r).unwrap();
        let with = front(&[&[2.0, 1.0, 1.0], &[1.0, 2.0, 1.0], &[1.5, 1.5, 1.5]]);
        let expect = hv_sweep(&with, &r).unwrap() - 3.0;
        assert!((added - expect).abs() < 1e-12);
        assert_eq!(hvi(&f, &[1.0, 1.0, 1.0], &r).unwrap(), 0.0);
    }

    #[test]
    fn mc_oracle_degenerate_and_exact_cases() {
        let r = [0.0, 0.0];
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        // single point at the box corner: every sample is dominated
        let f = front(&[&[0.7, 0.4]]);
        let est = hv_mc_oracle(&f, &r, 10_000, &mut rng).unwrap();
        assert!((est - 0.28).abs() < 1e-12);
        // degenerate slab has zero volume
        let slab = front(&[&[0.0, 1.0]]);
        assert_eq!(hv_mc_oracle(&slab, &r, 1000, &mut rng).unwrap(), 0.0);
    }

    #[test]
    fn ie_oracle_rejects_large_fronts() {
        let points: Vec<ObjectiveVector> =
            (0..13).map(|i| ov(&[1.0 + i as f64, 13.0 - i as f64])).collect();
        let f = ParetoFront::new(points).unwrap();
        assert!(matches!(
            hv_ie_oracle(&f, &[0.0, 0.0]).unwrap_err(),
            ParetoError::TooManyPoints { limit: 12, got: 13 }
        ));
    }

    #[test]
    fn infer_reference_examples() {
        let f = front(&[&[1.0, 3.0], &[3.0, 1.0]]);
        let cfg = ReferencePointConfig::uniform_floor(2, -10.0);
        let r = infer_reference_point(&f, &cfg).unwrap();
        assert!((r[0] - 0.8).abs() < 1e-12);
        assert!((r[1] - 0.8).abs() < 1e-12);

        // degenerate single-point front: epsilon takes over the range
        let single = front(&[&[2.0, 2.0]]);
        let r = infer_reference_point(&single, &cfg).unwrap();
        assert!((r[0] - (2.0 - 0.1 * 1e-6)).abs() < 1e-12);

        // floor wins when it is higher than the candidate
        let cfg_high = ReferencePointConfig::uniform_floor(2, 1.9999999);
        let r = infer_reference_point(&single, &cfg_high).unwrap();
        assert_eq!(r[0], 1.9999999);

        // scale zero: componentwise max of nadir and floor
        let cfg_zero = ReferencePointConfig { r_floor: vec![-10.0, 2.0], scale: 0.0, epsilon: 1e-6 };
        let r = infer_reference_point(&f, &cfg_zero).unwrap();
        assert_eq!(r.values(), &[1.0, 2.0]);

        assert_eq!(
            infer_reference_point(&ParetoFront::empty(), &cfg).unwrap_err(),
            ParetoError::EmptyFront
        );
    }

    #[test]
    fn hv_filtered_drops_points_below_reference() {
        let pts = vec![ov(&[1.0, 3.0]), ov(&[3.0, 1.0]), ov(&[0.5, 5.0])];
        // (0.5, 5.0) fails to dominate r strictly in the first coordinate
        let hv = hv_filtered(&pts, &[0.75, 0.0]).unwrap();
        let expect = hv_sweep(&front(&[&[1.0, 3.0], &[3.0, 1.0]]), &[0.75, 0.0]).unwrap();
        assert_eq!(hv, expect);
        assert_eq!(hv_filtered(&pts, &[10.0, 10.0]).unwrap(), 0.0);
    }

    fn random_front(rng: &mut ChaCha12Rng, d: usize, max_n: usize) -> ParetoFront {
        let n = rng.random_range(1..=max_n);
        let points: Vec<ObjectiveVector> = (0..n)
            .map(|_| ov(&(0..d).map(|_| 1.0 - rng.random::<f64>()).collect::<Vec<_>>()))
            .collect();
        pareto_filter(&points).unwrap()
    }

    #[test]
    fn engines_agree_on_random_fronts() {
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        for trial in 0..200 {
            let d = 2 + (trial % 3);
            let f = random_front(&mut rng, d, 16);
            let r = vec![0.0; d];
            let hso = hv_hso(&f, &r).unwrap();
            let sweep = hv_sweep(&f, &r).unwrap();
            assert!((hso - sweep).abs() < 1e-9, "hso {hso} vs sweep {sweep}");
            if f.len() <= 10 {
                let ie = hv_ie_oracle(&f, &r).unwrap();
                assert!((hso - ie).abs() < 1e-9, "hso {hso} vs ie {ie}");
            }
        }
    }

    #[test]
    fn engines_agree_on_tied_coordinates() {
        // integer grids force duplicate coordinate values and zero-width
        // slabs in both engines
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        for trial in 0..200 {
            let d = 2 + (trial % 3);
            let n = rng.random_range(1..=10usize);
            let points: Vec<ObjectiveVector> = (0..n)
                .map(|_| {
                    ov(&(0..d)
                        .map(|_| f64::from(rng.random_range(1..=4u32)))
                        .collect::<Vec<_>>())
                })
                .collect();
            let f = pareto_filter(&points).unwrap();
            let r = vec![0.0; d];
            let hso = hv_hso(&f, &r).unwrap();
            let sweep = hv_sweep(&f, &r).unwrap();
            let ie = hv_ie_oracle(&f, &r).unwrap();
            assert!((hso - sweep).abs() < 1e-9, "grid front: {hso} vs {sweep}");
            assert!((hso - ie).abs() < 1e-9, "grid front: {hso} vs ie {ie}");
        }
    }

    #[test]
    fn hvi_matches_recomputed_difference() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for trial in 0..100 {
            let d = 2 + (trial % 3);
            let f = random_front(&mut rng, d, 10);
            let r = vec![0.0; d];
            let y: Vec<f64> = (0..d).map(|_| 1.2 * rng.random::<f64>()).collect();
            let fast = hvi(&f, &y, &r).unwrap();
            // independent recomputation through the slicing engine
            let clipped: Vec<f64> = y.iter().map(|v| v.max(1e-12)).collect();
            let mut extended: Vec<ObjectiveVector> = f.points().to_vec();
            extended.push(ov(&clipped));
            let slow = hv_hso(&pareto_filter(&extended).unwrap(), &r).unwrap()
                - hv_hso(&f, &r).unwrap();
            if y.iter().all(|&v| v > 1e-12) {
                assert!((fast - slow).abs() < 1e-9, "fast {fast} slow {slow} d={d}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn monotone_under_added_points(
            seed in 0u64..1000,
            d in 2usize..4,
        ) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let f = random_front(&mut rng, d, 8);
            let r = vec![0.0; d];
            let base = hv_sweep(&f, &r).unwrap();
            let y: Vec<f64> = (0..d).map(|_| 1.0 - rng.random::<f64>() * 0.999).collect();
            let mut pts = f.points().to_vec();
            pts.push(ObjectiveVector::new(y).unwrap());
            let bigger = hv_sweep(&pareto_filter(&pts).unwrap(), &r).unwrap();
            prop_assert!(bigger >= base - 1e-12);
        }

        #[test]
        fn translation_invariance(
            seed in 0u64..1000,
            d in 2usize..4,
            shift in -5.0f64..5.0,
        ) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let f = random_front(&mut rng, d, 8);
            let r = vec![0.0; d];
            let base = hv_sweep(&f, &r).unwrap();
            let moved: Vec<ObjectiveVector> = f.points().iter()
                .map(|p| ObjectiveVector::new(p.iter().map(|v| v + shift).collect()).unwrap())
                .collect();
            let r2 = vec![shift; d];
            let shifted = hv_sweep(&ParetoFront::new(moved).unwrap(), &r2).unwrap();
            prop_assert!((base - shifted).abs() < 1e-9);
        }

        #[test]
        fn dominated_point_changes_nothing(
            seed in 0u64..1000,
            d in 2usize..4,
        ) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let f = random_front(&mut rng, d, 8);
            let r = vec![0.0; d];
            let base = hv_sweep(&f, &r).unwrap();
            // shrink an existing point so it is dominated
            let donor = f.points()[0].values().to_vec();
            let dominated: Vec<f64> = donor.iter().map(|v| v * 0.5).collect();
            let mut pts = f.points().to_vec();
            pts.push(ObjectiveVector::new(dominated).unwrap());
            let same = hv_sweep(&pareto_filter(&pts).unwrap(), &r).unwrap();
            prop_assert_eq!(base, same);
        }
    }
}
