//! Range-aware recall and precision.
//!
//! Each real anomaly range earns recall credit from two sources: an
//! existence reward for being detected at all (weighted by `alpha`) and an
//! overlap reward for how much of it, where in it, and in how many pieces
//! it was detected (weighted by `1 - alpha`). The overall recall is the
//! mean over all real ranges. Precision mirrors the overlap reward with the
//! roles of real and predicted ranges swapped; no existence term applies on
//! the precision side.
//!
//! The overlap reward of one range against a set composes three pieces:
//!
//! * [`omega`] — the bias-weighted fraction of the range covered by one
//!   overlap, between 0 and 1;
//! * [`delta`] — the positional weight of each point inside a range
//!   ([`BiasKind::Flat`], [`BiasKind::FrontEnd`], [`BiasKind::TailEnd`] or
//!   a custom table), always at least 1;
//! * [`cardinality_factor`] — a penalty in `[0, 1]` applied when more than
//!   one counterpart range overlaps, scaling the summed coverage.
//!
//! With every range a single point, `alpha = 0`, flat bias and no
//! cardinality penalty, both metrics coincide exactly with classical
//! point-based recall and precision ([`ConfusionCounts`]).
//!
//! All scoring functions accept plain `&[Range]` slices so that degenerate
//! single-point lists (see
//! [`explode_to_single_points`](crate::ranges::explode_to_single_points))
//! can be scored as-is; slices must be sorted by start and pairwise
//! disjoint, which every [`RangeSet`](crate::ranges::RangeSet) guarantees.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::ranges::{cardinality, overlapping, PointLabels, Range};

/// Error raised by scoring configuration and evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoreError {
    #[error("position {position} is outside [1, {length}]")]
    PositionOutOfRange { position: u64, length: u64 },
    #[error("overlap {overlap} extends outside the anomaly range {anomaly}")]
    OverlapOutsideAnomaly { overlap: Range, anomaly: Range },
    #[error("alpha must lie in [0, 1], got {alpha}")]
    AlphaOutOfRange { alpha: f64 },
    #[error("f-score beta must be a positive finite number, got {beta}")]
    FBetaOutOfRange { beta: f64 },
    #[error(
        "custom bias weight {weight} at position {position} of length {length} \
         must be finite and at least 1"
    )]
    InvalidBiasWeight {
        position: u64,
        length: u64,
        weight: f64,
    },
    #[error("custom bias table lists {provided} weights for length {length}")]
    BiasTableLengthMismatch { length: u64, provided: usize },
    #[error("custom bias table has no weights for ranges of length {length}")]
    BiasLengthMissing { length: u64 },
    #[error("cardinality factor {factor} for overlap count {count} must be a finite value in [0, 1]")]
    InvalidCardinalityFactor { count: usize, factor: f64 },
    #[error("custom cardinality table has no factor for overlap count {count}")]
    CardinalityCountMissing { count: usize },
    #[error("label sequences differ in length: {real} real vs {predicted} predicted")]
    LabelLengthMismatch { real: usize, predicted: usize },
}

/// Positional bias: how much each point inside a range weighs.
///
/// Positions are 1-based within the range being scored and weights are
/// always at least 1; [`omega`] normalizes by the total weight, so only the
/// relative shape matters.
#[derive(Debug, Clone, PartialEq)]
pub enum BiasKind {
    /// Every position weighs 1: only the size of the overlap counts.
    Flat,
    /// Earlier positions weigh more: position `i` of `n` weighs `n - i + 1`.
    /// Suits domains where catching the onset matters most.
    FrontEnd,
    /// Later positions weigh more: position `i` weighs `i`.
    TailEnd,
    /// Per-position weights supplied as a validated table.
    Custom(BiasTable),
}

/// Validated positional-weight table, keyed by range length.
///
/// Weights are checked at construction: each must be finite and at
/// least 1.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasTable {
    by_length: BTreeMap<u64, Vec<f64>>,
}

impl BiasTable {
    /// Each length must map to exactly that many weights, every weight a
    /// finite value of at least 1.
    pub fn new(weights: impl IntoIterator<Item = (u64, Vec<f64>)>) -> Result<Self, ScoreError> {
        let by_length: BTreeMap<u64, Vec<f64>> = weights.into_iter().collect();
        for (&length, row) in &by_length {
            if row.len() as u64 != length {
                return Err(ScoreError::BiasTableLengthMismatch {
                    length,
                    provided: row.len(),
                });
            }
            for (idx, &weight) in row.iter().enumerate() {
                if !(weight.is_finite() && weight >= 1.0) {
                    return Err(ScoreError::InvalidBiasWeight {
                        position: idx as u64 + 1,
                        length,
                        weight,
                    });
                }
            }
        }
        Ok(Self { by_length })
    }

    fn row(&self, length: u64) -> Result<&[f64], ScoreError> {
        self.by_length
            .get(&length)
            .map(Vec::as_slice)
            .ok_or(ScoreError::BiasLengthMissing { length })
    }

    pub(crate) fn entries(&self) -> &BTreeMap<u64, Vec<f64>> {
        &self.by_length
    }
}

/// Penalty policy for ranges detected by several fragmented counterparts.
#[derive(Debug, Clone, PartialEq)]
pub enum CardinalityMode {
    /// No penalty: fragmentation costs nothing.
    One,
    /// Factor `1 / count` once more than one range overlaps.
    Reciprocal,
    /// Factor looked up from a validated table keyed by overlap count.
    Custom(CardinalityTable),
}

/// Validated overlap-count-to-factor table.
#[derive(Debug, Clone, PartialEq)]
pub struct CardinalityTable {
    factors: BTreeMap<usize, f64>,
}

impl CardinalityTable {
    /// Every factor must be a finite value in `[0, 1]`. Entries for counts
    /// of 0 or 1 are accepted but never consulted: at most one overlap
    /// always yields factor 1.
    pub fn new(factors: impl IntoIterator<Item = (usize, f64)>) -> Result<Self, ScoreError> {
        let factors: BTreeMap<usize, f64> = factors.into_iter().collect();
        for (&count, &factor) in &factors {
            if !(factor.is_finite() && (0.0..=1.0).contains(&factor)) {
                return Err(ScoreError::InvalidCardinalityFactor { count, factor });
            }
        }
        Ok(Self { factors })
    }

    fn factor(&self, count: usize) -> Result<f64, ScoreError> {
        self.factors
            .get(&count)
            .copied()
            .ok_or(ScoreError::CardinalityCountMissing { count })
    }

    pub(crate) fn entries(&self) -> &BTreeMap<usize, f64> {
        &self.factors
    }
}

/// Scoring knobs: existence weight, per-side positional bias, cardinality
/// penalty and f-score weighting.
///
/// The overlap weight is structurally `1 - alpha` (see
/// [`ScoreConfig::beta`]), never stored separately. The default
/// configuration — `alpha = 0`, flat bias on both sides, no cardinality
/// penalty, `f_beta = 1` — is the setting under which the range metrics
/// agree with classical point-based recall and precision on single-point
/// ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreConfig {
    alpha: f64,
    recall_bias: BiasKind,
    precision_bias: BiasKind,
    cardinality: CardinalityMode,
    f_beta: f64,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        Self {
            alpha: 0.0,
            recall_bias: BiasKind::Flat,
            precision_bias: BiasKind::Flat,
            cardinality: CardinalityMode::One,
            f_beta: 1.0,
        }
    }
}

impl ScoreConfig {
    pub fn new(
        alpha: f64,
        recall_bias: BiasKind,
        precision_bias: BiasKind,
        cardinality: CardinalityMode,
        f_beta: f64,
    ) -> Result<Self, ScoreError> {
        validate_alpha(alpha)?;
        validate_f_beta(f_beta)?;
        Ok(Self {
            alpha,
            recall_bias,
            precision_bias,
            cardinality,
            f_beta,
        })
    }

    /// Existence weight in `[0, 1]`.
    pub fn with_alpha(mut self, alpha: f64) -> Result<Self, ScoreError> {
        validate_alpha(alpha)?;
        self.alpha = alpha;
        Ok(self)
    }

    pub fn with_recall_bias(mut self, bias: BiasKind) -> Self {
        self.recall_bias = bias;
        self
    }

    pub fn with_precision_bias(mut self, bias: BiasKind) -> Self {
        self.precision_bias = bias;
        self
    }

    pub fn with_cardinality(mut self, mode: CardinalityMode) -> Self {
        self.cardinality = mode;
        self
    }

    pub fn with_f_beta(mut self, f_beta: f64) -> Result<Self, ScoreError> {
        validate_f_beta(f_beta)?;
        self.f_beta = f_beta;
        Ok(self)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Overlap weight, always `1 - alpha`.
    pub fn beta(&self) -> f64 {
        1.0 - self.alpha
    }

    pub fn recall_bias(&self) -> &BiasKind {
        &self.recall_bias
    }

    pub fn precision_bias(&self) -> &BiasKind {
        &self.precision_bias
    }

    pub fn cardinality(&self) -> &CardinalityMode {
        &self.cardinality
    }

    pub fn f_beta(&self) -> f64 {
        self.f_beta
    }
}

fn validate_alpha(alpha: f64) -> Result<(), ScoreError> {
    if !(alpha.is_finite() && (0.0..=1.0).contains(&alpha)) {
        return Err(ScoreError::AlphaOutOfRange { alpha });
    }
    Ok(())
}

fn validate_f_beta(f_beta: f64) -> Result<(), ScoreError> {
    if !(f_beta.is_finite() && f_beta > 0.0) {
        return Err(ScoreError::FBetaOutOfRange { beta: f_beta });
    }
    Ok(())
}

/// Weight of the 1-based `position` within a range of `length` points.
pub fn delta(position: u64, length: u64, kind: &BiasKind) -> Result<f64, ScoreError> {
    if position < 1 || position > length {
        return Err(ScoreError::PositionOutOfRange { position, length });
    }
    Ok(match kind {
        BiasKind::Flat => 1.0,
        BiasKind::FrontEnd => (length - position + 1) as f64,
        BiasKind::TailEnd => position as f64,
        BiasKind::Custom(table) => table.row(length)?[(position - 1) as usize],
    })
}

/// Bias-weighted fraction of `anomaly` covered by `overlaps`.
///
/// Sums the positional weight of every covered point and normalizes by the
/// total weight of the range, so the result lies in `[0, 1]`: 0 for no
/// overlap, 1 for full coverage. `overlaps` must be pairwise-disjoint
/// pieces of `anomaly`; a piece reaching outside it is a contract
/// violation and is rejected.
pub fn omega(anomaly: Range, overlaps: &[Range], kind: &BiasKind) -> Result<f64, ScoreError> {
    for &overlap in overlaps {
        if overlap.start() < anomaly.start() || overlap.end() > anomaly.end() {
            return Err(ScoreError::OverlapOutsideAnomaly { overlap, anomaly });
        }
    }
    debug_assert!(pairwise_disjoint(overlaps));
    let length = anomaly.len();
    match kind {
        // The built-in biases have integer prefix sums, so the per-point
        // walk collapses to closed forms; exact below 2^53, same values as
        // the walk.
        BiasKind::Flat => {
            let covered: u128 = overlaps.iter().map(|o| o.len() as u128).sum();
            Ok(covered as f64 / length as f64)
        }
        BiasKind::FrontEnd => {
            let covered: u128 = overlaps
                .iter()
                .map(|o| {
                    let (p, q) = positions_within(anomaly, *o);
                    triangular(length - p + 1) - triangular(length - q)
                })
                .sum();
            Ok(covered as f64 / triangular(length) as f64)
        }
        BiasKind::TailEnd => {
            let covered: u128 = overlaps
                .iter()
                .map(|o| {
                    let (p, q) = positions_within(anomaly, *o);
                    triangular(q) - triangular(p - 1)
                })
                .sum();
            Ok(covered as f64 / triangular(length) as f64)
        }
        BiasKind::Custom(table) => {
            let row = table.row(length)?;
            let mut covered_weight = 0.0;
            let mut total_weight = 0.0;
            for (idx, &weight) in row.iter().enumerate() {
                let t = anomaly.start() + idx as u64;
                total_weight += weight;
                if overlaps.iter().any(|o| o.contains(t)) {
                    covered_weight += weight;
                }
            }
            Ok(covered_weight / total_weight)
        }
    }
}

/// 1-based first and last positions of `overlap` within `anomaly`.
fn positions_within(anomaly: Range, overlap: Range) -> (u64, u64) {
    (
        overlap.start() - anomaly.start() + 1,
        overlap.end() - anomaly.start() + 1,
    )
}

/// Sum of `1..=n`.
fn triangular(n: u64) -> u128 {
    n as u128 * (n as u128 + 1) / 2
}

fn pairwise_disjoint(ranges: &[Range]) -> bool {
    ranges
        .iter()
        .enumerate()
        .all(|(i, &a)| ranges[i + 1..].iter().all(|&b| a.intersect(b).is_none()))
}

/// 1 when any range of `predicted` shares at least one point with `real`,
/// otherwise 0.
pub fn existence_reward(real: Range, predicted: &[Range]) -> f64 {
    if cardinality(real, predicted) >= 1 {
        1.0
    } else {
        0.0
    }
}

/// Fragmentation penalty for `target` given how many ranges of `others`
/// touch it. At most one overlap always yields 1; beyond that the mode
/// decides.
pub fn cardinality_factor(
    target: Range,
    others: &[Range],
    mode: &CardinalityMode,
) -> Result<f64, ScoreError> {
    let count = cardinality(target, others);
    if count <= 1 {
        return Ok(1.0);
    }
    match mode {
        CardinalityMode::One => Ok(1.0),
        CardinalityMode::Reciprocal => Ok(1.0 / count as f64),
        CardinalityMode::Custom(table) => table.factor(count),
    }
}

/// Size-and-position credit for `target` against `others`, scaled by the
/// fragmentation penalty.
///
/// Each overlapping range contributes the coverage fraction of its own
/// intersection with `target`, summed in ascending order; ranges with no
/// overlap contribute nothing.
pub fn overlap_reward(
    target: Range,
    others: &[Range],
    bias: &BiasKind,
    mode: &CardinalityMode,
) -> Result<f64, ScoreError> {
    let factor = cardinality_factor(target, others, mode)?;
    let mut sum = 0.0;
    for other in overlapping(target, others) {
        let piece = target
            .intersect(other)
            .expect("overlapping() yields only intersecting ranges");
        sum += omega(target, &[piece], bias)?;
    }
    Ok(factor * sum)
}

/// Recall credit for one real range: existence weighted by `alpha` plus
/// overlap weighted by `1 - alpha`.
pub fn recall_single(
    real: Range,
    predicted: &[Range],
    cfg: &ScoreConfig,
) -> Result<f64, ScoreError> {
    let existence = existence_reward(real, predicted);
    let overlap = overlap_reward(real, predicted, cfg.recall_bias(), cfg.cardinality())?;
    Ok(cfg.alpha() * existence + cfg.beta() * overlap)
}

/// Mean recall over all real ranges, in ascending order; `None` when there
/// are no real ranges to score.
pub fn recall_total(
    real: &[Range],
    predicted: &[Range],
    cfg: &ScoreConfig,
) -> Result<Option<f64>, ScoreError> {
    if real.is_empty() {
        return Ok(None);
    }
    let mut sum = 0.0;
    for &r in real {
        sum += recall_single(r, predicted, cfg)?;
    }
    Ok(Some(sum / real.len() as f64))
}

/// Precision credit for one predicted range: its overlap reward against
/// the real ranges. No existence term applies on the precision side.
pub fn precision_single(
    real: &[Range],
    predicted: Range,
    cfg: &ScoreConfig,
) -> Result<f64, ScoreError> {
    overlap_reward(predicted, real, cfg.precision_bias(), cfg.cardinality())
}

/// Mean precision over all predicted ranges, in ascending order; `None`
/// when nothing was predicted.
pub fn precision_total(
    real: &[Range],
    predicted: &[Range],
    cfg: &ScoreConfig,
) -> Result<Option<f64>, ScoreError> {
    if predicted.is_empty() {
        return Ok(None);
    }
    let mut sum = 0.0;
    for &p in predicted {
        sum += precision_single(real, p, cfg)?;
    }
    Ok(Some(sum / predicted.len() as f64))
}

/// Point-based confusion tallies for the classical metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
}

impl ConfusionCounts {
    /// Tallies two equal-length label sequences index by index.
    pub fn from_labels(real: &PointLabels, predicted: &PointLabels) -> Result<Self, ScoreError> {
        if real.len() != predicted.len() {
            return Err(ScoreError::LabelLengthMismatch {
                real: real.len(),
                predicted: predicted.len(),
            });
        }
        let mut counts = Self::default();
        for (&r, &p) in real.as_slice().iter().zip(predicted.as_slice()) {
            match (r, p) {
                (true, true) => counts.true_positives += 1,
                (false, true) => counts.false_positives += 1,
                (true, false) => counts.false_negatives += 1,
                (false, false) => {}
            }
        }
        Ok(counts)
    }

    /// Fraction of real anomalous points predicted; `None` when no point
    /// is anomalous.
    pub fn recall(&self) -> Option<f64> {
        let denominator = self.true_positives + self.false_negatives;
        (denominator > 0).then(|| self.true_positives as f64 / denominator as f64)
    }

    /// Fraction of predicted points that are real; `None` when nothing was
    /// predicted.
    pub fn precision(&self) -> Option<f64> {
        let denominator = self.true_positives + self.false_positives;
        (denominator > 0).then(|| self.true_positives as f64 / denominator as f64)
    }
}

/// Weighted harmonic mean of recall and precision; `beta > 1` favours
/// recall, `beta < 1` favours precision.
///
/// An undefined input propagates. Both inputs zero gives 0, the limit
/// value of the formula.
pub fn f_score(recall: Option<f64>, precision: Option<f64>, beta: f64) -> Option<f64> {
    let (r, p) = (recall?, precision?);
    debug_assert!(beta > 0.0);
    let beta_sq = beta * beta;
    let denominator = beta_sq * p + r;
    if denominator == 0.0 {
        return Some(0.0);
    }
    Some((1.0 + beta_sq) * p * r / denominator)
}

/// Score attributed to one range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeScore {
    pub range: Range,
    pub score: f64,
}

/// Full evaluation output: overall metrics, per-range breakdowns and the
/// configuration that produced them.
///
/// `recall` is the mean of the `per_real_range` scores and `precision` the
/// mean of the `per_predicted_range` scores; either is `None` when the
/// corresponding side is empty and the average would be vacuous.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub recall: Option<f64>,
    pub precision: Option<f64>,
    pub f_score: Option<f64>,
    pub per_real_range: Vec<RangeScore>,
    pub per_predicted_range: Vec<RangeScore>,
    pub config: ScoreConfig,
}

/// Scores `predicted` against `real` and assembles the full report.
///
/// Pure and deterministic: summation runs sequentially in ascending range
/// order, so identical inputs produce bit-identical reports.
pub fn evaluate(
    real: &[Range],
    predicted: &[Range],
    cfg: &ScoreConfig,
) -> Result<EvalReport, ScoreError> {
    let per_real_range: Vec<RangeScore> = real
        .iter()
        .map(|&range| {
            Ok(RangeScore {
                range,
                score: recall_single(range, predicted, cfg)?,
            })
        })
        .collect::<Result<_, ScoreError>>()?;
    let per_predicted_range: Vec<RangeScore> = predicted
        .iter()
        .map(|&range| {
            Ok(RangeScore {
                range,
                score: precision_single(real, range, cfg)?,
            })
        })
        .collect::<Result<_, ScoreError>>()?;
    let recall = mean(&per_real_range);
    let precision = mean(&per_predicted_range);
    let f = f_score(recall, precision, cfg.f_beta());
    Ok(EvalReport {
        recall,
        precision,
        f_score: f,
        per_real_range,
        per_predicted_range,
        config: cfg.clone(),
    })
}

fn mean(scores: &[RangeScore]) -> Option<f64> {
    if scores.is_empty() {
        return None;
    }
    let mut sum = 0.0;
    for s in scores {
        sum += s.score;
    }
    Some(sum / scores.len() as f64)
}
