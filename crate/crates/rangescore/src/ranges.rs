//! Interval algebra for anomaly ranges.
//!
//! Anomalies live on a discrete time axis and are represented as closed
//! integer intervals: [`Range`] covers every index from `start` to `end`
//! inclusive. The canonical container is [`RangeSet`], which keeps ranges
//! sorted and merges overlapping or adjacent inputs at construction, so a
//! set never contains two ranges that could be expressed as one.
//!
//! Per-point binary labels ([`PointLabels`]) convert to range form with
//! [`points_to_ranges`] and back with [`ranges_to_points`].

use std::fmt;
use std::ops::Deref;

use thiserror::Error;

/// Error raised by range construction and point/range conversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum RangeError {
    /// A range was given with `start > end`.
    #[error("invalid range [{start}, {end}]: start exceeds end")]
    Inverted { start: u64, end: u64 },
    /// A range does not fit in the declared series length.
    #[error("range [{start}, {end}] does not fit in a series of length {series_length}")]
    OutOfBounds {
        start: u64,
        end: u64,
        series_length: u64,
    },
}

/// A closed interval of time indices: both endpoints are covered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Range {
    start: u64,
    end: u64,
}

impl Range {
    /// Builds a range covering `start..=end`; fails when `start > end`.
    pub fn new(start: u64, end: u64) -> Result<Self, RangeError> {
        if start > end {
            return Err(RangeError::Inverted { start, end });
        }
        Ok(Self { start, end })
    }

    /// The single-point range `[t, t]`.
    pub fn point(t: u64) -> Self {
        Self { start: t, end: t }
    }

    pub fn start(self) -> u64 {
        self.start
    }

    pub fn end(self) -> u64 {
        self.end
    }

    /// Number of time points covered: `end - start + 1`, always at least 1.
    #[allow(clippy::len_without_is_empty)] // a range is never empty
    pub fn len(self) -> u64 {
        self.end - self.start + 1
    }

    pub fn contains(self, t: u64) -> bool {
        self.start <= t && t <= self.end
    }

    /// Closed-interval intersection; `None` when no point is shared.
    pub fn intersect(self, other: Range) -> Option<Range> {
        let start = self.start.max(other.start);
        let end = self.end.min(other.end);
        (start <= end).then_some(Range { start, end })
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.start, self.end)
    }
}

/// An ordered set of pairwise disjoint, non-adjacent ranges.
///
/// Construction canonicalizes the input: ranges are sorted and any
/// overlapping or adjacent ones are merged into maximal ranges, so
/// `[1,2]` and `[3,5]` become `[1,5]`. The set's length then counts
/// distinct anomalies, not fragments of the input encoding.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RangeSet {
    ranges: Vec<Range>,
}

impl RangeSet {
    /// Builds a canonical set from any collection of ranges.
    pub fn new(ranges: impl IntoIterator<Item = Range>) -> Self {
        Self::with_merge_count(ranges).0
    }

    /// Like [`RangeSet::new`], also reporting how many input ranges were
    /// absorbed into another during canonicalization.
    pub fn with_merge_count(ranges: impl IntoIterator<Item = Range>) -> (Self, usize) {
        let mut input: Vec<Range> = ranges.into_iter().collect();
        input.sort_unstable();
        let total = input.len();
        let mut merged: Vec<Range> = Vec::with_capacity(total);
        for r in input {
            match merged.last_mut() {
                // `<= end + 1` folds adjacent ranges in with overlapping ones
                Some(last) if r.start <= last.end.saturating_add(1) => {
                    last.end = last.end.max(r.end);
                }
                _ => merged.push(r),
            }
        }
        let merges = total - merged.len();
        (Self { ranges: merged }, merges)
    }

    /// Builds a canonical set from raw `(start, end)` pairs, rejecting any
    /// inverted pair.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, u64)>) -> Result<Self, RangeError> {
        let ranges: Vec<Range> = pairs
            .into_iter()
            .map(|(start, end)| Range::new(start, end))
            .collect::<Result<_, _>>()?;
        Ok(Self::new(ranges))
    }

    pub fn ranges(&self) -> &[Range] {
        &self.ranges
    }

    pub(crate) fn from_canonical(ranges: Vec<Range>) -> Self {
        debug_assert!(ranges.windows(2).all(|w| w[0].end + 1 < w[1].start));
        Self { ranges }
    }
}

impl Deref for RangeSet {
    type Target = [Range];

    fn deref(&self) -> &[Range] {
        &self.ranges
    }
}

impl FromIterator<Range> for RangeSet {
    fn from_iter<I: IntoIterator<Item = Range>>(iter: I) -> Self {
        Self::new(iter)
    }
}

impl<'a> IntoIterator for &'a RangeSet {
    type Item = &'a Range;
    type IntoIter = std::slice::Iter<'a, Range>;

    fn into_iter(self) -> Self::IntoIter {
        self.ranges.iter()
    }
}

/// Ranges of a sorted, pairwise-disjoint slice that intersect `target`.
///
/// Binary-searches for the window of candidates, so a scan over one target
/// costs `O(log n + k)` for `k` hits.
pub(crate) fn overlapping(target: Range, others: &[Range]) -> impl Iterator<Item = Range> + '_ {
    debug_assert!(is_sorted_disjoint(others));
    let first = others.partition_point(|r| r.end < target.start);
    others[first..]
        .iter()
        .copied()
        .take_while(move |r| r.start <= target.end)
}

pub(crate) fn is_sorted_disjoint(ranges: &[Range]) -> bool {
    ranges.windows(2).all(|w| w[0].end < w[1].start)
}

/// All nonempty intersections of `target` with the ranges of `others`, in
/// ascending order.
///
/// `others` must be sorted by start and pairwise disjoint — a [`RangeSet`]
/// always qualifies, as does the output of [`explode_to_single_points`].
/// Because `others` is disjoint, the results are disjoint too.
pub fn overlap_set(target: Range, others: &[Range]) -> Vec<Range> {
    overlapping(target, others)
        .filter_map(|r| target.intersect(r))
        .collect()
}

/// Number of ranges in `others` sharing at least one point with `target`.
///
/// Same contract on `others` as [`overlap_set`].
pub fn cardinality(target: Range, others: &[Range]) -> usize {
    overlapping(target, others).count()
}

/// Binary per-point labels; `true` marks an anomalous time point.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PointLabels {
    labels: Vec<bool>,
}

impl PointLabels {
    pub fn new(labels: Vec<bool>) -> Self {
        Self { labels }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.labels
    }
}

impl From<Vec<bool>> for PointLabels {
    fn from(labels: Vec<bool>) -> Self {
        Self::new(labels)
    }
}

/// Groups maximal runs of consecutive anomalous labels into ranges.
///
/// All-normal or empty input yields the empty set.
pub fn points_to_ranges(labels: &PointLabels) -> RangeSet {
    let mut ranges = Vec::new();
    let mut run_start: Option<u64> = None;
    for (t, &anomalous) in labels.as_slice().iter().enumerate() {
        match (anomalous, run_start) {
            (true, None) => run_start = Some(t as u64),
            (false, Some(start)) => {
                ranges.push(Range {
                    start,
                    end: t as u64 - 1,
                });
                run_start = None;
            }
            _ => {}
        }
    }
    if let Some(start) = run_start {
        ranges.push(Range {
            start,
            end: labels.len() as u64 - 1,
        });
    }
    // runs are separated by at least one normal point, so this is canonical
    RangeSet::from_canonical(ranges)
}

/// Expands a range set into per-point labels over `0..series_length`.
///
/// Exact inverse of [`points_to_ranges`] for sets that fit the series:
/// converting back reproduces the input set.
pub fn ranges_to_points(set: &RangeSet, series_length: usize) -> Result<PointLabels, RangeError> {
    let mut labels = vec![false; series_length];
    for r in set {
        if r.end >= series_length as u64 {
            return Err(RangeError::OutOfBounds {
                start: r.start,
                end: r.end,
                series_length: series_length as u64,
            });
        }
        labels[r.start as usize..=r.end as usize].fill(true);
    }
    Ok(PointLabels::new(labels))
}

/// Replaces every range by its individual points as separate single-point
/// ranges, in ascending order.
///
/// The result is deliberately a raw list rather than a [`RangeSet`]:
/// canonicalization would merge the adjacent points straight back into the
/// original ranges. Scoring functions accept such a list directly.
pub fn explode_to_single_points(set: &RangeSet) -> Vec<Range> {
    set.ranges()
        .iter()
        .flat_map(|r| (r.start..=r.end).map(Range::point))
        .collect()
}
