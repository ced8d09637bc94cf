//! Range-aware accuracy metrics for time-series anomaly detection.
//!
//! Classical recall and precision treat every time point independently,
//! which misrepresents detectors whose anomalies span windows of time: a
//! prediction can partially overlap a real anomaly, hit only its tail, or
//! chop one anomaly into many fragments. This crate scores sets of closed
//! integer ranges instead, with a tunable existence weight (`alpha`), a
//! positional bias inside each range (flat, front-end, tail-end or custom)
//! and a cardinality penalty for fragmented detections.
//!
//! In the degenerate setting — every range a single point, `alpha = 0`,
//! flat bias, no cardinality penalty — both metrics coincide exactly with
//! their classical point-based counterparts, so scores stay comparable
//! with the point-based literature.
//!
//! ```
//! use rangescore::{evaluate, RangeSet, ScoreConfig};
//!
//! let real = RangeSet::from_pairs([(1, 5)])?;
//! let predicted = RangeSet::from_pairs([(3, 7)])?;
//! let report = evaluate(&real, &predicted, &ScoreConfig::default())?;
//! assert!((report.recall.unwrap() - 0.6).abs() < 1e-12);
//! assert!((report.precision.unwrap() - 0.6).abs() < 1e-12);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod io;
pub mod ranges;
pub mod scoring;

pub use ranges::{
    cardinality, explode_to_single_points, overlap_set, points_to_ranges, ranges_to_points,
    PointLabels, Range, RangeError, RangeSet,
};
pub use scoring::{
    cardinality_factor, delta, evaluate, existence_reward, f_score, omega, overlap_reward,
    precision_single, precision_total, recall_single, recall_total, BiasKind, BiasTable,
    CardinalityMode, CardinalityTable, ConfusionCounts, EvalReport, RangeScore, ScoreConfig,
    ScoreError,
};
