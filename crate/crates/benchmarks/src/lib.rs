//! Deterministic workload generators shared by the benchmarks.

use rangescore::{Range, RangeSet};

/// Real/predicted pair with `count` ranges per side spread over
/// `count * spacing` time points. Predicted ranges straddle two real ones
/// and carry a pseudo-random jitter so the overlap search sees irregular
/// input.
pub fn synthetic_pair(count: u64, spacing: u64) -> (RangeSet, RangeSet) {
    let real = RangeSet::new(
        (0..count).map(|i| Range::new(i * spacing, i * spacing + spacing * 6 / 10).unwrap()),
    );
    let predicted = RangeSet::new((0..count).map(|i| {
        let jitter = (i * 7919) % (spacing / 5 + 1);
        let start = i * spacing + spacing / 2 + jitter;
        Range::new(start, start + spacing * 6 / 10).unwrap()
    }));
    (real, predicted)
}

/// `pieces` disjoint fragments inside `0..length`, every other slot
/// covered.
pub fn fragmented_cover(length: u64, pieces: u64) -> (Range, Vec<Range>) {
    let anomaly = Range::new(0, length - 1).unwrap();
    let slot = (length / (pieces * 2)).max(1);
    let overlaps = (0..pieces)
        .map(|i| {
            let start = (i * 2 * slot).min(length - 1);
            Range::new(start, (start + slot - 1).min(length - 1)).unwrap()
        })
        .collect();
    (anomaly, overlaps)
}

/// A ranges CSV document with `lines` records.
pub fn ranges_csv(lines: u64) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    for i in 0..lines {
        let _ = writeln!(out, "{},{}", i * 10, i * 10 + 4);
    }
    out
}

/// A single-column points CSV document with `lines` records.
pub fn points_csv(lines: u64) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    for i in 0..lines {
        let _ = writeln!(out, "{}", u8::from(i % 7 < 2));
    }
    out
}
