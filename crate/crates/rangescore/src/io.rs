//! Label-file parsing and report serialization.
//!
//! Two input grammars are accepted, plain CSV-style lines and a small JSON
//! object:
//!
//! * points, one record per line — either a bare binary `label`, or
//!   `index,label` with a gap-free 0-based index column. An optional
//!   `index,label` header line is skipped.
//! * ranges, one `start,end` record per line, inclusive integer endpoints.
//!   An optional `start,end` header line is skipped.
//! * JSON, an object holding exactly one of `"points": [0,1,...]` or
//!   `"ranges": [[start,end],...]`.
//!
//! Auto-detection picks JSON for input starting with `{`, points for
//! uniformly two-column input whose second column is all binary and whose
//! first column counts gap-free from 0, and ranges otherwise. Two-column
//! all-binary input with a gapped index column is ambiguous and rejected
//! with a request for an explicit format.
//!
//! Input accepts LF or CRLF line endings; all output uses LF.

use std::fmt::Write as _;

use serde::ser::{Serialize, SerializeMap, SerializeStruct, Serializer};
use thiserror::Error;

use crate::ranges::{points_to_ranges, PointLabels, Range, RangeError, RangeSet};
use crate::scoring::{BiasKind, CardinalityMode, EvalReport, RangeScore, ScoreConfig};

/// How to interpret label input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelFormat {
    Points,
    Ranges,
    Auto,
}

/// Parsed label data, before any canonicalization.
#[derive(Debug, Clone, PartialEq)]
pub enum LabelPayload {
    /// Per-point binary labels.
    Points(PointLabels),
    /// Raw ranges exactly as listed in the input.
    Ranges(Vec<Range>),
}

/// A parsed label document plus where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelDocument {
    pub payload: LabelPayload,
    /// Origin descriptor for diagnostics; [`parse_labels`] sets
    /// `"<memory>"`, callers reading files overwrite it with the path.
    pub origin: String,
}

impl LabelDocument {
    /// Canonical range set plus the number of input ranges merged away
    /// during canonicalization (always 0 for point input).
    pub fn to_range_set(&self) -> (RangeSet, usize) {
        match &self.payload {
            LabelPayload::Points(labels) => (points_to_ranges(labels), 0),
            LabelPayload::Ranges(raw) => RangeSet::with_merge_count(raw.iter().copied()),
        }
    }
}

/// Error raised while parsing label input. Every rejection of CSV input
/// carries its 1-based line number.
#[derive(Debug, Error)]
pub enum ParseError {
    #[error("input is not valid UTF-8: {0}")]
    NotUtf8(#[from] std::str::Utf8Error),
    #[error("line {line}: expected a binary label (0 or 1), got {found:?}")]
    NonBinaryLabel { line: usize, found: String },
    #[error("line {line}: expected {expected}, got {found} columns")]
    ColumnCount {
        line: usize,
        expected: &'static str,
        found: usize,
    },
    #[error("line {line}: {found:?} is not a valid non-negative integer")]
    InvalidInteger { line: usize, found: String },
    #[error("line {line}: point index {found} breaks the gap-free order (expected {expected})")]
    IndexGap {
        line: usize,
        expected: u64,
        found: u64,
    },
    #[error("line {line}: {source}")]
    InvalidRange { line: usize, source: RangeError },
    #[error("cannot auto-detect the input format: {reason}; specify --input-format")]
    AmbiguousFormat { reason: String },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("JSON document: {reason}")]
    JsonShape { reason: String },
}

/// Parses a label document from raw bytes.
pub fn parse_labels(bytes: &[u8], format: LabelFormat) -> Result<LabelDocument, ParseError> {
    let text = std::str::from_utf8(bytes)?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let payload = match format {
        LabelFormat::Points => parse_points(text)?,
        LabelFormat::Ranges => parse_ranges(text)?,
        LabelFormat::Auto => parse_auto(text)?,
    };
    Ok(LabelDocument {
        payload,
        origin: "<memory>".to_owned(),
    })
}

fn parse_points(text: &str) -> Result<LabelPayload, ParseError> {
    let mut labels: Vec<bool> = Vec::new();
    // column arity is fixed by the first record
    let mut arity: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if idx == 0 && raw.trim() == "index,label" {
            arity = Some(2);
            continue;
        }
        let columns: Vec<&str> = raw.split(',').map(str::trim).collect();
        match arity {
            None => arity = Some(columns.len()),
            Some(expected) if expected != columns.len() => {
                return Err(ParseError::ColumnCount {
                    line,
                    expected: if expected == 1 {
                        "1 column (label)"
                    } else {
                        "2 columns (index,label)"
                    },
                    found: columns.len(),
                });
            }
            Some(_) => {}
        }
        match columns.as_slice() {
            [label] => labels.push(parse_label(label, line)?),
            [index, label] => {
                let index = parse_u64(index, line)?;
                let expected = labels.len() as u64;
                if index != expected {
                    return Err(ParseError::IndexGap {
                        line,
                        expected,
                        found: index,
                    });
                }
                labels.push(parse_label(label, line)?);
            }
            columns => {
                return Err(ParseError::ColumnCount {
                    line,
                    expected: "1 (label) or 2 (index,label)",
                    found: columns.len(),
                });
            }
        }
    }
    Ok(LabelPayload::Points(PointLabels::new(labels)))
}

fn parse_ranges(text: &str) -> Result<LabelPayload, ParseError> {
    let mut ranges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if idx == 0 && raw.trim() == "start,end" {
            continue;
        }
        let columns: Vec<&str> = raw.split(',').map(str::trim).collect();
        let [start, end] = columns.as_slice() else {
            return Err(ParseError::ColumnCount {
                line,
                expected: "2 columns (start,end)",
                found: columns.len(),
            });
        };
        let start = parse_u64(start, line)?;
        let end = parse_u64(end, line)?;
        let range =
            Range::new(start, end).map_err(|source| ParseError::InvalidRange { line, source })?;
        ranges.push(range);
    }
    Ok(LabelPayload::Ranges(ranges))
}

fn parse_auto(text: &str) -> Result<LabelPayload, ParseError> {
    if text.trim_start().starts_with('{') {
        return parse_json(text);
    }
    match text.lines().next().map(str::trim) {
        Some("index,label") => return parse_points(text),
        Some("start,end") => return parse_ranges(text),
        _ => {}
    }

    // Points need every line to be index,label with binary labels and a
    // gap-free index column; anything else reads as ranges.
    let mut two_binary_columns = true;
    let mut gap_free = true;
    let mut expected_index = 0u64;
    for raw in text.lines() {
        let columns: Vec<&str> = raw.split(',').map(str::trim).collect();
        let [index, label] = columns.as_slice() else {
            two_binary_columns = false;
            break;
        };
        if !matches!(*label, "0" | "1") {
            two_binary_columns = false;
            break;
        }
        if index.parse::<u64>() != Ok(expected_index) {
            gap_free = false;
        }
        expected_index += 1;
    }

    if two_binary_columns && expected_index > 0 {
        if gap_free {
            return parse_points(text);
        }
        return Err(ParseError::AmbiguousFormat {
            reason: "two binary-label columns but the first column is not a gap-free \
                     index from 0 (points?) and could equally be range endpoints"
                .to_owned(),
        });
    }
    parse_ranges(text)
}

fn parse_json(text: &str) -> Result<LabelPayload, ParseError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let object = value.as_object().ok_or_else(|| ParseError::JsonShape {
        reason: "top level must be an object".to_owned(),
    })?;
    for key in object.keys() {
        if key != "points" && key != "ranges" {
            return Err(ParseError::JsonShape {
                reason: format!("unknown key {key:?}"),
            });
        }
    }
    match (object.get("points"), object.get("ranges")) {
        (Some(points), None) => parse_json_points(points),
        (None, Some(ranges)) => parse_json_ranges(ranges),
        _ => Err(ParseError::JsonShape {
            reason: "need exactly one of \"points\" or \"ranges\"".to_owned(),
        }),
    }
}

fn parse_json_points(value: &serde_json::Value) -> Result<LabelPayload, ParseError> {
    let items = value.as_array().ok_or_else(|| ParseError::JsonShape {
        reason: "\"points\" must be an array".to_owned(),
    })?;
    let mut labels = Vec::with_capacity(items.len());
    for (idx, item) in items.iter().enumerate() {
        match item.as_u64() {
            Some(0) => labels.push(false),
            Some(1) => labels.push(true),
            _ => {
                return Err(ParseError::JsonShape {
                    reason: format!("points[{idx}] must be 0 or 1, got {item}"),
                });
            }
        }
    }
    Ok(LabelPayload::Points(PointLabels::new(labels)))
}

fn parse_json_ranges(value: &serde_json::Value) -> Result<LabelPayload, ParseError> {
    let items = value.as_array().ok_or_else(|| ParseError::JsonShape {
        reason: "\"ranges\" must be an array".to_owned(),
    })?;
    let mut ranges = Vec::with_capacity(items.len());
    for (idx, item) in items.iter().enumerate() {
        let pair = item
            .as_array()
            .filter(|pair| pair.len() == 2)
            .ok_or_else(|| ParseError::JsonShape {
                reason: format!("ranges[{idx}] must be a [start, end] pair"),
            })?;
        let endpoint = |v: &serde_json::Value| {
            v.as_u64().ok_or_else(|| ParseError::JsonShape {
                reason: format!("ranges[{idx}] endpoints must be non-negative integers, got {v}"),
            })
        };
        let (start, end) = (endpoint(&pair[0])?, endpoint(&pair[1])?);
        let range = Range::new(start, end).map_err(|source| ParseError::JsonShape {
            reason: format!("ranges[{idx}]: {source}"),
        })?;
        ranges.push(range);
    }
    Ok(LabelPayload::Ranges(ranges))
}

fn parse_label(token: &str, line: usize) -> Result<bool, ParseError> {
    match token {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(ParseError::NonBinaryLabel {
            line,
            found: other.to_owned(),
        }),
    }
}

fn parse_u64(token: &str, line: usize) -> Result<u64, ParseError> {
    token.parse().map_err(|_| ParseError::InvalidInteger {
        line,
        found: token.to_owned(),
    })
}

/// Output rendering for reports and converted documents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputStyle {
    Text,
    Json,
}

/// Renders an evaluation report.
///
/// JSON output is a single compact line with a fixed key order
/// (`recall`, `precision`, `f_score`, `per_real_range`,
/// `per_predicted_range`, `config`); undefined metrics render as `null`.
/// Text output is a two-column summary followed by per-range tables, with
/// `undef` marking undefined metrics.
pub fn write_report(report: &EvalReport, style: OutputStyle) -> String {
    match style {
        OutputStyle::Json => {
            let mut out =
                serde_json::to_string(report).expect("report serialization cannot fail");
            out.push('\n');
            out
        }
        OutputStyle::Text => render_text_report(report),
    }
}

fn render_text_report(report: &EvalReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<10} {}", "recall", format_metric(report.recall));
    let _ = writeln!(
        out,
        "{:<10} {}",
        "precision",
        format_metric(report.precision)
    );
    let _ = writeln!(out, "{:<10} {}", "f_score", format_metric(report.f_score));
    let _ = writeln!(out);
    let _ = writeln!(out, "real ranges:");
    for entry in &report.per_real_range {
        let _ = writeln!(out, "  {}  {:.6}", entry.range, entry.score);
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "predicted ranges:");
    for entry in &report.per_predicted_range {
        let _ = writeln!(out, "  {}  {:.6}", entry.range, entry.score);
    }
    out
}

/// `undef` in text output marks a metric whose averaging denominator was
/// zero; JSON renders the same as `null`.
pub fn format_metric(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v:.6}"),
        None => "undef".to_owned(),
    }
}

/// Renders a points document: one label per line (text) or
/// `{"points": [...]}` (JSON).
pub fn write_points(labels: &PointLabels, style: OutputStyle) -> String {
    match style {
        OutputStyle::Text => {
            let mut out = String::new();
            for &label in labels.as_slice() {
                let _ = writeln!(out, "{}", label as u8);
            }
            out
        }
        OutputStyle::Json => {
            let bits: Vec<u8> = labels.as_slice().iter().map(|&b| b as u8).collect();
            let mut out = serde_json::to_string(&serde_json::json!({ "points": bits }))
                .expect("points serialization cannot fail");
            out.push('\n');
            out
        }
    }
}

/// Renders a range document: `start,end` per line (text) or
/// `{"ranges": [...]}` (JSON).
pub fn write_ranges(ranges: &[Range], style: OutputStyle) -> String {
    match style {
        OutputStyle::Text => {
            let mut out = String::new();
            for r in ranges {
                let _ = writeln!(out, "{},{}", r.start(), r.end());
            }
            out
        }
        OutputStyle::Json => {
            let pairs: Vec<[u64; 2]> = ranges.iter().map(|r| [r.start(), r.end()]).collect();
            let mut out = serde_json::to_string(&serde_json::json!({ "ranges": pairs }))
                .expect("ranges serialization cannot fail");
            out.push('\n');
            out
        }
    }
}

impl Serialize for RangeScore {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut state = serializer.serialize_struct("RangeScore", 3)?;
        state.serialize_field("start", &self.range.start())?;
        state.serialize_field("end", &self.range.end())?;
        state.serialize_field("score", &self.score)?;
        state.end()
    }
}

impl Serialize for BiasKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            BiasKind::Flat => serializer.serialize_str("flat"),
            BiasKind::FrontEnd => serializer.serialize_str("front"),
            BiasKind::TailEnd => serializer.serialize_str("back"),
            BiasKind::Custom(table) => {
                let mut map = serializer.serialize_map(Some(1))?;
                map.serialize_entry("custom", table.entries())?;
                map.end()
            }
        }
    }
}

impl Serialize for CardinalityMode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            CardinalityMode::One => serializer.serialize_str("one"),
            CardinalityMode::Reciprocal => serializer.serialize_str("reciprocal"),
            CardinalityMode::Custom(table) => {
                let mut map = serializer.serialize_map(Some(1))?;
                map.serialize_entry("custom", table.entries())?;
                map.end()
            }
        }
    }
}

impl Serialize for ScoreConfig {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut state = serializer.serialize_struct("ScoreConfig", 6)?;
        state.serialize_field("alpha", &self.alpha())?;
        state.serialize_field("beta", &self.beta())?;
        state.serialize_field("recall_bias", self.recall_bias())?;
        state.serialize_field("precision_bias", self.precision_bias())?;
        state.serialize_field("cardinality", self.cardinality())?;
        state.serialize_field("f_beta", &self.f_beta())?;
        state.end()
    }
}

impl Serialize for EvalReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut state = serializer.serialize_struct("EvalReport", 6)?;
        state.serialize_field("recall", &self.recall)?;
        state.serialize_field("precision", &self.precision)?;
        state.serialize_field("f_score", &self.f_score)?;
        state.serialize_field("per_real_range", &self.per_real_range)?;
        state.serialize_field("per_predicted_range", &self.per_predicted_range)?;
        state.serialize_field("config", &self.config)?;
        state.end()
    }
}
