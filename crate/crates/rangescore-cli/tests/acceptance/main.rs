//! Acceptance suite. One test per criterion; each prints a `PASS` line
//! (run with `--nocapture` to see them).


use std::alloc::{GlobalAlloc, Layout, System};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use rangescore::{
    evaluate, explode_to_single_points, omega, points_to_ranges, precision_single,
    precision_total, recall_total, BiasKind, CardinalityMode, ConfusionCounts, PointLabels, Range,
    RangeSet, ScoreConfig,
};

const TOL: f64 = 1e-12;
const BUDGET: Duration = Duration::from_secs(5);

/// System allocator wrapper tracking live bytes and their high-water mark,
/// for the memory-proportionality check.
struct MeteredAllocator;

static LIVE: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

unsafe impl GlobalAlloc for MeteredAllocator {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let ptr = System.alloc(layout);
        if !ptr.is_null() {
            let live = LIVE.fetch_add(layout.size(), Ordering::Relaxed) + layout.size();
            PEAK.fetch_max(live, Ordering::Relaxed);
        }
        ptr
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        System.dealloc(ptr, layout);
        LIVE.fetch_sub(layout.size(), Ordering::Relaxed);
    }
}

#[global_allocator]
static ALLOCATOR: MeteredAllocator = MeteredAllocator;

fn spans(ranges: &[Range]) -> Vec<oracle::Span> {
    ranges.iter().map(|r| (r.start(), r.end())).collect()
}

fn random_labels(rng: &mut StdRng, length: usize, density: f64) -> Vec<bool> {
    (0..length).map(|_| rng.random_bool(density)).collect()
}

fn random_set(rng: &mut StdRng, max_ranges: usize, coord: u64) -> RangeSet {
    let count = rng.random_range(0..=max_ranges);
    RangeSet::new((0..count).map(|_| {
        let a = rng.random_range(0..coord);
        let b = rng.random_range(0..coord);
        Range::new(a.min(b), a.max(b)).unwrap()
    }))
}

fn assert_metric_close(label: &str, got: Option<f64>, want: Option<f64>) {
    match (got, want) {
        (None, None) => {}
        (Some(g), Some(w)) if (g - w).abs() <= TOL => {}
        _ => panic!("{label}: got {got:?}, want {want:?}"),
    }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rangescore"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    assert!(
        output.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout.clone()).expect("stdout is UTF-8")
}

fn data_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn data_file(name: &str) -> String {
    data_path(name).display().to_string()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(data_path(name))
        .unwrap_or_else(|e| panic!("golden file {name}: {e}"))
}

#[test]
fn criterion_1_classical_equivalence() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    let started = Instant::now();
    let cases = 1000;
    let cfg = ScoreConfig::default(); // alpha 0, flat, no cardinality penalty

    for case in 0..cases {
        let length = rng.random_range(1..=64);
        let real_density = rng.random::<f64>();
        let pred_density = rng.random::<f64>();
        let real_bits = random_labels(&mut rng, length, real_density);
        let pred_bits = random_labels(&mut rng, length, pred_density);

        let real_labels = PointLabels::new(real_bits);
        let pred_labels = PointLabels::new(pred_bits);
        let real = explode_to_single_points(&points_to_ranges(&real_labels));
        let predicted = explode_to_single_points(&points_to_ranges(&pred_labels));

        let counts = ConfusionCounts::from_labels(&real_labels, &pred_labels).unwrap();
        assert_metric_close(
            &format!("case {case}: recall"),
            recall_total(&real, &predicted, &cfg).unwrap(),
            counts.recall(),
        );
        assert_metric_close(
            &format!("case {case}: precision"),
            precision_total(&real, &predicted, &cfg).unwrap(),
            counts.precision(),
        );
    }

    let elapsed = started.elapsed();
    assert!(elapsed < BUDGET, "took {elapsed:?}");
    println!(
        "PASS criterion 1: range metrics equal classical metrics on {cases} random \
         single-point cases within {TOL:e} ({elapsed:?})"
    );
}

#[test]
fn criterion_2_duality() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    let cases = 1000;
    let biases = [BiasKind::Flat, BiasKind::FrontEnd, BiasKind::TailEnd];
    let modes = [CardinalityMode::One, CardinalityMode::Reciprocal];

    for case in 0..cases {
        let real = random_set(&mut rng, 8, 120);
        let predicted = random_set(&mut rng, 8, 120);
        let bias = biases[rng.random_range(0..biases.len())].clone();
        let mode = modes[rng.random_range(0..modes.len())].clone();

        let cfg = ScoreConfig::new(0.0, BiasKind::Flat, bias.clone(), mode.clone(), 1.0).unwrap();
        let swapped = ScoreConfig::new(0.0, bias, BiasKind::Flat, mode, 1.0).unwrap();
        assert_metric_close(
            &format!("case {case}"),
            precision_total(&real, &predicted, &cfg).unwrap(),
            recall_total(&predicted, &real, &swapped).unwrap(),
        );
    }
    println!(
        "PASS criterion 2: precision equals role-swapped recall on {cases} random \
         set pairs within {TOL:e}"
    );
}

#[test]
fn criterion_3_fixture_suite() {
    let anomaly = Range::new(1, 5).unwrap();
    let overlap = [Range::new(3, 5).unwrap()];
    for (kind, expected) in [
        (BiasKind::Flat, 0.6),
        (BiasKind::FrontEnd, 0.4),
        (BiasKind::TailEnd, 0.8),
    ] {
        let got = omega(anomaly, &overlap, &kind).unwrap();
        let reference = oracle::omega((1, 5), &[(3, 5)], &kind);
        assert!((got - expected).abs() <= TOL, "{kind:?}: got {got}");
        assert!((got - reference).abs() <= TOL, "{kind:?} vs oracle");
    }

    // fragmented detection: two predictions hit one real range
    let real = RangeSet::from_pairs([(1, 10)]).unwrap();
    let predicted = RangeSet::from_pairs([(1, 2), (5, 6)]).unwrap();
    let cfg = ScoreConfig::default().with_cardinality(CardinalityMode::Reciprocal);
    let recall = recall_total(&real, &predicted, &cfg).unwrap().unwrap();
    let reference = oracle::recall_total(
        &spans(&real),
        &spans(&predicted),
        0.0,
        &BiasKind::Flat,
        &CardinalityMode::Reciprocal,
    )
    .unwrap();
    assert!((recall - 0.2).abs() <= TOL, "got {recall}");
    assert!((recall - reference).abs() <= TOL);

    let real = RangeSet::from_pairs([(1, 2), (4, 6)]).unwrap();
    let target = Range::new(1, 4).unwrap();
    let precision = precision_single(&real, target, &cfg).unwrap();
    let reference = oracle::precision_single(
        &spans(&real),
        (1, 4),
        &BiasKind::Flat,
        &CardinalityMode::Reciprocal,
    );
    assert!((precision - 0.375).abs() <= TOL, "got {precision}");
    assert!((precision - reference).abs() <= TOL);

    // degenerate single-point sets reproduce classical counting
    let real_points = [(1, 1), (3, 3), (4, 4)];
    let pred_points = [(1, 1), (2, 2), (4, 4)];
    let as_ranges = |spans: &[(u64, u64)]| -> Vec<Range> {
        spans
            .iter()
            .map(|&(s, e)| Range::new(s, e).unwrap())
            .collect()
    };
    let (real, predicted) = (as_ranges(&real_points), as_ranges(&pred_points));
    let degenerate = ScoreConfig::default();
    let recall = recall_total(&real, &predicted, &degenerate).unwrap().unwrap();
    let precision = precision_total(&real, &predicted, &degenerate)
        .unwrap()
        .unwrap();
    assert!((recall - 2.0 / 3.0).abs() <= TOL, "got {recall}");
    assert!((precision - 2.0 / 3.0).abs() <= TOL, "got {precision}");
    let reference = oracle::recall_total(
        &real_points,
        &pred_points,
        0.0,
        &BiasKind::Flat,
        &CardinalityMode::One,
    )
    .unwrap();
    assert!((recall - reference).abs() <= TOL);
    let reference = oracle::precision_total(
        &real_points,
        &pred_points,
        &BiasKind::Flat,
        &CardinalityMode::One,
    )
    .unwrap();
    assert!((precision - reference).abs() <= TOL);

    let real_bits = [true, false, true, true, false];
    let pred_bits = [true, true, false, true, false];
    let counts = ConfusionCounts::from_labels(
        &PointLabels::new(real_bits.to_vec()),
        &PointLabels::new(pred_bits.to_vec()),
    )
    .unwrap();
    assert_eq!(
        (
            counts.true_positives,
            counts.false_positives,
            counts.false_negatives
        ),
        (2, 1, 1)
    );
    assert_eq!(oracle::confusion(&real_bits, &pred_bits), (2, 1, 1));
    assert!((counts.recall().unwrap() - 2.0 / 3.0).abs() <= TOL);
    assert!((counts.precision().unwrap() - 2.0 / 3.0).abs() <= TOL);

    println!("PASS criterion 3: hand-derived fixtures match the point-enumeration oracle within {TOL:e}");
}

#[test]
fn criterion_4_bounds_and_extremes() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0004);
    let biases = [BiasKind::Flat, BiasKind::FrontEnd, BiasKind::TailEnd];
    let modes = [CardinalityMode::One, CardinalityMode::Reciprocal];
    let alphas = [0.0, 0.25, 0.5, 1.0];

    let bound_cases = 10_000;
    for _ in 0..bound_cases {
        let real = random_set(&mut rng, 6, 100);
        let predicted = random_set(&mut rng, 6, 100);
        let cfg = ScoreConfig::new(
            alphas[rng.random_range(0..alphas.len())],
            biases[rng.random_range(0..biases.len())].clone(),
            biases[rng.random_range(0..biases.len())].clone(),
            modes[rng.random_range(0..modes.len())].clone(),
            1.0,
        )
        .unwrap();
        let report = evaluate(&real, &predicted, &cfg).unwrap();
        for metric in [report.recall, report.precision, report.f_score]
            .into_iter()
            .flatten()
        {
            assert!((0.0..=1.0).contains(&metric), "metric {metric} out of [0, 1]");
        }
        for entry in report
            .per_real_range
            .iter()
            .chain(&report.per_predicted_range)
        {
            assert!((0.0..=1.0).contains(&entry.score));
        }
    }

    let perfect_cases = 2000;
    for _ in 0..perfect_cases {
        let mut set = random_set(&mut rng, 6, 100);
        if set.is_empty() {
            set = RangeSet::from_pairs([(3, 9)]).unwrap();
        }
        let cfg = ScoreConfig::new(
            alphas[rng.random_range(0..alphas.len())],
            biases[rng.random_range(0..biases.len())].clone(),
            biases[rng.random_range(0..biases.len())].clone(),
            modes[rng.random_range(0..modes.len())].clone(),
            1.0,
        )
        .unwrap();
        let report = evaluate(&set, &set, &cfg).unwrap();
        assert_eq!(report.recall, Some(1.0), "perfect prediction must score exactly 1");
        assert_eq!(report.precision, Some(1.0));
    }

    let disjoint_cases = 2000;
    for _ in 0..disjoint_cases {
        let mut real = random_set(&mut rng, 6, 100);
        if real.is_empty() {
            real = RangeSet::from_pairs([(0, 4)]).unwrap();
        }
        let mut shifted = random_set(&mut rng, 6, 100);
        if shifted.is_empty() {
            shifted = RangeSet::from_pairs([(2, 3)]).unwrap();
        }
        let predicted: Vec<Range> = shifted
            .iter()
            .map(|r| Range::new(r.start() + 200, r.end() + 200).unwrap())
            .collect();
        let cfg = ScoreConfig::new(
            0.0,
            biases[rng.random_range(0..biases.len())].clone(),
            biases[rng.random_range(0..biases.len())].clone(),
            modes[rng.random_range(0..modes.len())].clone(),
            1.0,
        )
        .unwrap();
        assert_eq!(recall_total(&real, &predicted, &cfg).unwrap(), Some(0.0));
        assert_eq!(precision_total(&real, &predicted, &cfg).unwrap(), Some(0.0));
    }

    println!(
        "PASS criterion 4: {} randomized cases in bounds; {perfect_cases} perfect matches \
         scored exactly 1; {disjoint_cases} disjoint pairs scored exactly 0",
        bound_cases
    );
}

#[test]
fn criterion_5_determinism() {
    let real = data_file("real_ranges.csv");
    let pred = data_file("pred_ranges.csv");
    let args = ["eval", "--real", &real, "--pred", &pred, "--output", "json"];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout, "JSON output differs between runs");
    assert!(!first.stdout.is_empty());

    let text_args = ["eval", "--real", &real, "--pred", &pred];
    assert_eq!(run(&text_args).stdout, run(&text_args).stdout);
    println!("PASS criterion 5: repeated eval runs are byte-identical");
}

#[test]
fn criterion_6_scale() {
    // 1000 ranges per side across a million-point series; every predicted
    // range clips two real ones
    let real = RangeSet::new((0..1000u64).map(|i| {
        Range::new(i * 1000, i * 1000 + 599).unwrap()
    }));
    let predicted = RangeSet::new((0..1000u64).map(|i| {
        Range::new(i * 1000 + 500, (i * 1000 + 1099).min(999_999)).unwrap()
    }));
    assert_eq!(real.len(), 1000);
    assert_eq!(predicted.len(), 1000);

    let configs = [
        ScoreConfig::default(),
        ScoreConfig::new(
            0.5,
            BiasKind::FrontEnd,
            BiasKind::TailEnd,
            CardinalityMode::Reciprocal,
            1.0,
        )
        .unwrap(),
    ];

    let mut worst_elapsed = Duration::ZERO;
    let mut worst_peak = 0usize;
    for cfg in &configs {
        let baseline = LIVE.load(Ordering::Relaxed);
        PEAK.store(baseline, Ordering::Relaxed);
        let started = Instant::now();
        let report = evaluate(&real, &predicted, cfg).unwrap();
        let elapsed = started.elapsed();
        let peak_delta = PEAK.load(Ordering::Relaxed).saturating_sub(baseline);

        assert!(elapsed < BUDGET, "evaluation took {elapsed:?}");
        let recall = report.recall.unwrap();
        let precision = report.precision.unwrap();
        assert!(recall > 0.0 && recall < 1.0);
        assert!(precision > 0.0 && precision < 1.0);
        // far below the ~1 MB a per-point materialization would need:
        // memory stays proportional to range count plus the report
        assert!(
            peak_delta < 512 * 1024,
            "evaluation allocated {peak_delta} bytes at peak"
        );
        worst_elapsed = worst_elapsed.max(elapsed);
        worst_peak = worst_peak.max(peak_delta);
    }
    println!(
        "PASS criterion 6: 10^6-point series, 10^3 ranges per side in {worst_elapsed:?} \
         worst case, peak allocation {worst_peak} bytes"
    );
}

#[test]
fn criterion_7_cli_conformance() {
    let real = data_file("real_ranges.csv");
    let pred = data_file("pred_ranges.csv");
    let sweep_pred = data_file("sweep_pred.csv");

    // eval goldens
    let text = stdout_of(&run(&["eval", "--real", &real, "--pred", &pred]));
    assert_eq!(text, golden("golden_eval.txt"));
    let json = stdout_of(&run(&[
        "eval", "--real", &real, "--pred", &pred, "--output", "json",
    ]));
    assert_eq!(json, golden("golden_eval.json"));

    // sweep goldens
    let sweep_text = stdout_of(&run(&["sweep", "0:1:0.5", "--real", &real, "--pred", &sweep_pred]));
    assert_eq!(sweep_text, golden("golden_sweep.txt"));
    let sweep_json = stdout_of(&run(&[
        "sweep", "0:1:0.5", "--real", &real, "--pred", &sweep_pred, "--output", "json",
    ]));
    assert_eq!(sweep_json, golden("golden_sweep.json"));

    // every sweep row equals the matching eval run, byte for byte
    let mut composed = String::from("[");
    for (i, alpha) in ["0", "0.5", "1"].iter().enumerate() {
        let row = stdout_of(&run(&[
            "eval",
            "--real",
            &real,
            "--pred",
            &sweep_pred,
            "--alpha",
            alpha,
            "--output",
            "json",
        ]));
        if i > 0 {
            composed.push(',');
        }
        composed.push_str(row.trim_end_matches('\n'));
    }
    composed.push_str("]\n");
    assert_eq!(sweep_json, composed, "sweep rows must equal eval outputs bit-exactly");

    // degenerate sweep equals a single eval
    let single = stdout_of(&run(&[
        "sweep", "0:0:1", "--real", &real, "--pred", &pred, "--output", "json",
    ]));
    let eval_zero = stdout_of(&run(&[
        "eval", "--real", &real, "--pred", &pred, "--alpha", "0", "--output", "json",
    ]));
    assert_eq!(single, format!("[{}]\n", eval_zero.trim_end_matches('\n')));

    // convert goldens, both directions
    let points = data_file("points.csv");
    let converted = stdout_of(&run(&["convert", "--input", &points, "--input-format", "points"]));
    assert_eq!(converted, golden("golden_convert_ranges.txt"));
    let ranges_12 = data_file("ranges_12.csv");
    let converted = stdout_of(&run(&[
        "convert", "--input", &ranges_12, "--series-length", "4",
    ]));
    assert_eq!(converted, golden("golden_convert_points.txt"));

    // exit codes: 0 covered above; 1 for bad data, 2 for bad configuration
    let bad_label = data_file("bad_label.csv");
    let out = run(&["eval", "--real", &bad_label, "--pred", &pred, "--input-format", "points"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let ranges_19 = data_file("ranges_19.csv");
    let out = run(&["convert", "--input", &ranges_19, "--series-length", "4"]);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["eval", "--real", &real, "--pred", &pred, "--alpha", "1.5"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["sweep", "0:1:0", "--real", &real, "--pred", &pred]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["eval", "--real", data_file("missing.csv").as_str(), "--pred", &pred]);
    assert_eq!(out.status.code(), Some(1));

    println!("PASS criterion 7: CLI golden files, exit codes 0/1/2 and sweep/eval bit-equality");
}
