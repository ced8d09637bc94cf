//! Command-line front end: evaluate a real/predicted label pair, sweep the
//! existence weight, or convert between label formats.
//!
//! Reports go to stdout, diagnostics to stderr. Exit codes: 0 on success,
//! 1 for unreadable or invalid input data, 2 for invalid configuration.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rangescore::io::{self, LabelFormat, LabelPayload, OutputStyle};
use rangescore::{
    evaluate, points_to_ranges, ranges_to_points, BiasKind, CardinalityMode, EvalReport, RangeSet,
    ScoreConfig,
};

#[derive(Parser)]
#[command(
    name = "rangescore",
    version,
    about = "Score time-series anomaly detections with range-aware recall and precision"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score one prediction file against a ground-truth file
    Eval(EvalArgs),
    /// Score the same pair once per alpha in start:stop:step
    Sweep(SweepArgs),
    /// Convert between point-label and range files
    Convert(ConvertArgs),
}

#[derive(Args)]
struct ScoreOpts {
    /// Ground-truth label file
    #[arg(long, value_name = "FILE")]
    real: PathBuf,

    /// Predicted label file
    #[arg(long, value_name = "FILE")]
    pred: PathBuf,

    /// Cardinality penalty for fragmented overlaps
    #[arg(long, value_enum, default_value_t = GammaOpt::One)]
    gamma: GammaOpt,

    /// Positional bias on the recall side
    #[arg(long, value_enum, default_value_t = BiasOpt::Flat)]
    rbias: BiasOpt,

    /// Positional bias on the precision side
    #[arg(long, value_enum, default_value_t = BiasOpt::Flat)]
    pbias: BiasOpt,

    /// Recall-vs-precision weight of the f-score
    #[arg(long, value_name = "BETA", default_value_t = 1.0, value_parser = parse_f_beta)]
    fbeta: f64,

    /// How to read the label files
    #[arg(long, value_enum, default_value_t = FormatOpt::Auto)]
    input_format: FormatOpt,

    /// Report style written to stdout
    #[arg(long, value_enum, default_value_t = OutputOpt::Text)]
    output: OutputOpt,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    opts: ScoreOpts,

    /// Existence weight in [0, 1]; the overlap weight is 1 - alpha
    #[arg(long, default_value_t = 0.0, value_parser = parse_alpha)]
    alpha: f64,
}

#[derive(Args)]
struct SweepArgs {
    /// Alpha values to sweep, inclusive of stop when a step lands on it
    #[arg(value_name = "START:STOP:STEP", value_parser = SweepSpec::from_str)]
    sweep: SweepSpec,

    #[command(flatten)]
    opts: ScoreOpts,
}

#[derive(Args)]
struct ConvertArgs {
    /// Label file to convert
    #[arg(long, value_name = "FILE")]
    input: PathBuf,

    /// How to read the input file
    #[arg(long, value_enum, default_value_t = FormatOpt::Auto)]
    input_format: FormatOpt,

    /// Series length, required when converting ranges to points
    #[arg(long, value_name = "N")]
    series_length: Option<u64>,

    /// Output style
    #[arg(long, value_enum, default_value_t = OutputOpt::Text)]
    output: OutputOpt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GammaOpt {
    One,
    Reciprocal,
}

impl From<GammaOpt> for CardinalityMode {
    fn from(opt: GammaOpt) -> Self {
        match opt {
            GammaOpt::One => CardinalityMode::One,
            GammaOpt::Reciprocal => CardinalityMode::Reciprocal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BiasOpt {
    Flat,
    Front,
    Back,
}

impl From<BiasOpt> for BiasKind {
    fn from(opt: BiasOpt) -> Self {
        match opt {
            BiasOpt::Flat => BiasKind::Flat,
            BiasOpt::Front => BiasKind::FrontEnd,
            BiasOpt::Back => BiasKind::TailEnd,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatOpt {
    Points,
    Ranges,
    Auto,
}

impl From<FormatOpt> for LabelFormat {
    fn from(opt: FormatOpt) -> Self {
        match opt {
            FormatOpt::Points => LabelFormat::Points,
            FormatOpt::Ranges => LabelFormat::Ranges,
            FormatOpt::Auto => LabelFormat::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputOpt {
    Text,
    Json,
}

impl From<OutputOpt> for OutputStyle {
    fn from(opt: OutputOpt) -> Self {
        match opt {
            OutputOpt::Text => OutputStyle::Text,
            OutputOpt::Json => OutputStyle::Json,
        }
    }
}

fn parse_alpha(token: &str) -> Result<f64, String> {
    let value: f64 = token
        .parse()
        .map_err(|_| format!("{token:?} is not a number"))?;
    if !(value.is_finite() && (0.0..=1.0).contains(&value)) {
        return Err("alpha must lie in [0, 1]".to_owned());
    }
    Ok(value)
}

fn parse_f_beta(token: &str) -> Result<f64, String> {
    let value: f64 = token
        .parse()
        .map_err(|_| format!("{token:?} is not a number"))?;
    if !(value.is_finite() && value > 0.0) {
        return Err("fbeta must be a positive number".to_owned());
    }
    Ok(value)
}

/// Inclusive alpha sweep `start:stop:step`.
#[derive(Debug, Clone, Copy)]
struct SweepSpec {
    start: f64,
    stop: f64,
    step: f64,
}

impl FromStr for SweepSpec {
    type Err = String;

    fn from_str(token: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = token.split(':').collect();
        let [start, stop, step] = parts.as_slice() else {
            return Err("sweep must have the form start:stop:step".to_owned());
        };
        let number = |t: &str| {
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("{t:?} is not a finite number"))
        };
        let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
        if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&stop) {
            return Err("sweep bounds must lie in [0, 1]".to_owned());
        }
        if start > stop {
            return Err("sweep start must not exceed stop".to_owned());
        }
        if step <= 0.0 {
            return Err("sweep step must be positive".to_owned());
        }
        Ok(Self { start, stop, step })
    }
}

impl SweepSpec {
    /// `start, start + step, ...`; the stop value is included when a step
    /// lands within 1e-9 of it.
    fn alphas(&self) -> Vec<f64> {
        let mut values = Vec::new();
        for k in 0u64.. {
            let alpha = self.start + k as f64 * self.step;
            if alpha > self.stop + 1e-9 {
                break;
            }
            values.push(alpha.min(self.stop));
        }
        values
    }
}

enum Failure {
    /// Unreadable or invalid input data; exits 1.
    Data(String),
    /// Invalid configuration; exits 2.
    Config(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eval(args) => run_eval(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Convert(args) => run_convert(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Data(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(Failure::Config(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run_eval(args: &EvalArgs) -> Result<(), Failure> {
    let cfg = build_config(&args.opts, args.alpha)?;
    let (real, predicted) = load_pair(&args.opts)?;
    let report = score(&real, &predicted, &cfg)?;
    print!("{}", io::write_report(&report, args.opts.output.into()));
    Ok(())
}

fn run_sweep(args: &SweepArgs) -> Result<(), Failure> {
    let (real, predicted) = load_pair(&args.opts)?;
    let mut reports = Vec::new();
    for alpha in args.sweep.alphas() {
        let cfg = build_config(&args.opts, alpha)?;
        reports.push(score(&real, &predicted, &cfg)?);
    }
    match args.opts.output {
        OutputOpt::Json => {
            let mut line =
                serde_json::to_string(&reports).expect("report serialization cannot fail");
            line.push('\n');
            print!("{line}");
        }
        OutputOpt::Text => {
            println!("{:<10} {:<10} {:<10} f_score", "alpha", "recall", "precision");
            for report in &reports {
                println!(
                    "{:<10} {:<10} {:<10} {}",
                    format!("{:.6}", report.config.alpha()),
                    io::format_metric(report.recall),
                    io::format_metric(report.precision),
                    io::format_metric(report.f_score)
                );
            }
        }
    }
    Ok(())
}

fn run_convert(args: &ConvertArgs) -> Result<(), Failure> {
    let doc = load_document(&args.input, args.input_format.into())?;
    let style: OutputStyle = args.output.into();
    match doc.payload {
        LabelPayload::Points(labels) => {
            let set = points_to_ranges(&labels);
            print!("{}", io::write_ranges(&set, style));
        }
        LabelPayload::Ranges(raw) => {
            let Some(series_length) = args.series_length else {
                return Err(Failure::Config(
                    "--series-length is required when converting ranges to points".to_owned(),
                ));
            };
            let set = canonicalize(&args.input, raw);
            let series_length = usize::try_from(series_length)
                .map_err(|_| Failure::Config("--series-length is too large".to_owned()))?;
            let labels = ranges_to_points(&set, series_length)
                .map_err(|e| Failure::Data(format!("{}: {e}", args.input.display())))?;
            print!("{}", io::write_points(&labels, style));
        }
    }
    Ok(())
}

fn build_config(opts: &ScoreOpts, alpha: f64) -> Result<ScoreConfig, Failure> {
    ScoreConfig::new(
        alpha,
        opts.rbias.into(),
        opts.pbias.into(),
        opts.gamma.into(),
        opts.fbeta,
    )
    .map_err(|e| Failure::Config(e.to_string()))
}

fn load_pair(opts: &ScoreOpts) -> Result<(RangeSet, RangeSet), Failure> {
    let real = load_range_set(&opts.real, opts.input_format.into())?;
    let predicted = load_range_set(&opts.pred, opts.input_format.into())?;
    Ok((real, predicted))
}

fn load_range_set(path: &Path, format: LabelFormat) -> Result<RangeSet, Failure> {
    let doc = load_document(path, format)?;
    let (set, merges) = doc.to_range_set();
    warn_on_merges(path, merges);
    Ok(set)
}

fn load_document(path: &Path, format: LabelFormat) -> Result<io::LabelDocument, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    let mut doc = io::parse_labels(&bytes, format)
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    doc.origin = path.display().to_string();
    Ok(doc)
}

fn canonicalize(path: &Path, raw: Vec<rangescore::Range>) -> RangeSet {
    let (set, merges) = RangeSet::with_merge_count(raw);
    warn_on_merges(path, merges);
    set
}

fn warn_on_merges(path: &Path, merges: usize) {
    if merges > 0 {
        eprintln!(
            "warning: {}: merged {merges} overlapping or adjacent input ranges",
            path.display()
        );
    }
}

fn score(real: &RangeSet, predicted: &RangeSet, cfg: &ScoreConfig) -> Result<EvalReport, Failure> {
    evaluate(real, predicted, cfg).map_err(|e| Failure::Config(e.to_string()))
}
