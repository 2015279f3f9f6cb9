use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use galperin_core::backend::{BackendKind, ExactLimits};
use galperin_core::engine::{DEFAULT_MAX_EVENTS, TRACE_HEADER};
use galperin_core::{predict_count, rotation_angle, run, run_streaming, BackendChoice, Error, MassRatio, RunOptions};

mod report;

use report::{BenchRow, CountReport, PredictReport, TableRow, TraceSummary};

/// Counts elastic collisions between two blocks and a wall.
#[derive(Parser, Debug)]
#[command(name = "galperin", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate one mass ratio and report the collision count.
    Count(RunArgs),
    /// Predict the count from the rotation angle, without simulating.
    Predict {
        #[arg(long, value_parser = parse_ratio)]
        alpha: MassRatio,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Reproduce the reference table for alpha = 1, 1e-2, 1e-4, 1e-6, 1e-12.
    Table {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Write the per-event velocity trace as CSV.
    Trace {
        #[command(flatten)]
        run: RunArgs,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Time both backends over the reference grid.
    Bench {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Mass ratio m/M as `p/q`, a decimal or scientific notation.
    #[arg(long, value_parser = parse_ratio)]
    alpha: MassRatio,
    #[arg(long, value_enum, default_value_t = BackendArg::Auto)]
    backend: BackendArg,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, default_value_t = DEFAULT_MAX_EVENTS)]
    max_events: u64,
    /// Let the exact backend run below its cutoff, failing once a numerator
    /// exceeds this many decimal digits.
    #[arg(long)]
    digit_budget: Option<u64>,
}

impl RunArgs {
    fn options(&self) -> RunOptions {
        RunOptions {
            max_events: self.max_events,
            exact_limits: ExactLimits {
                digit_budget: self.digit_budget,
            },
            ..RunOptions::default()
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BackendArg {
    Exact,
    Float64,
    Auto,
}

impl From<BackendArg> for BackendChoice {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Exact => BackendChoice::Exact,
            BackendArg::Float64 => BackendChoice::Float64,
            BackendArg::Auto => BackendChoice::Auto,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

fn parse_ratio(s: &str) -> Result<MassRatio, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Io(String, io::Error),
    Mismatch(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Mismatch(_) => 1,
            Failure::Core(e) => core_exit_code(e),
            Failure::Io(..) => 4,
        }
    }
}

fn core_exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::NonPositiveRatio | Error::RatioAboveOne(_) => 2,
        Error::ExactCutoff { .. } | Error::DigitBudget { .. } => 3,
        Error::Backend { source, .. } => core_exit_code(source),
        _ => 5,
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(what, e) => write!(f, "{what}: {e}"),
            Failure::Mismatch(rows) => write!(f, "mismatched rows: {}", rows.join(", ")),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn stdout_err(e: io::Error) -> Failure {
    Failure::Io("writing to stdout".into(), e)
}

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Count(args) => cmd_count(&args),
        Command::Predict { alpha, format } => cmd_predict(alpha, format),
        Command::Table { format } => cmd_table(format),
        Command::Trace { run, output } => cmd_trace(&run, output),
        Command::Bench { format } => cmd_bench(format),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn cmd_count(args: &RunArgs) -> CmdResult {
    let t = Instant::now();
    let out = run(args.alpha, args.backend.into(), &args.options())?;
    let rep = CountReport::new(&out, rotation_angle(&args.alpha).ok().map(|m| m.theta), elapsed_ms(t));
    let mut stdout = io::stdout().lock();
    match args.format {
        Format::Text => rep.write_text(&mut stdout),
        Format::Json => report::write_json(&mut stdout, &rep),
        Format::Csv => report::write_csv(&mut stdout, [rep.csv_row()]),
    }
    .map_err(stdout_err)
}

fn cmd_predict(alpha: MassRatio, format: Format) -> CmdResult {
    let t = Instant::now();
    let model = rotation_angle(&alpha)?;
    let prediction = predict_count(&alpha)?;
    let rep = PredictReport::new(alpha, &model, &prediction, elapsed_ms(t));
    let mut stdout = io::stdout().lock();
    match format {
        Format::Text => rep.write_text(&mut stdout),
        Format::Json => report::write_json(&mut stdout, &rep),
        Format::Csv => report::write_csv(&mut stdout, [rep]),
    }
    .map_err(stdout_err)
}

const TABLE: [(&str, u64); 5] = [
    ("1", 3),
    ("1e-2", 31),
    ("1e-4", 314),
    ("1e-6", 3141),
    ("1e-12", 3141592),
];

fn table_row(alpha: MassRatio, expected: u64) -> Result<TableRow, Error> {
    let t = Instant::now();
    let out = run(alpha, BackendChoice::Auto, &RunOptions::default())?;
    let simulated_ms = elapsed_ms(t);
    let prediction = predict_count(&alpha)?;
    Ok(TableRow::new(alpha, expected, &out, &prediction, simulated_ms))
}

fn cmd_table(format: Format) -> CmdResult {
    let mut rows = std::thread::scope(|scope| {
        let handles: Vec<_> = TABLE
            .iter()
            .map(|&(s, n)| {
                let alpha: MassRatio = s.parse().expect("table ratios parse");
                scope.spawn(move || table_row(alpha, n))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("table worker panicked"))
            .collect::<Result<Vec<_>, _>>()
    })?;
    rows.sort_by_key(|r| std::cmp::Reverse(r.ratio));

    let mut stdout = io::stdout().lock();
    match format {
        Format::Text => report::write_table_markdown(&mut stdout, &rows),
        Format::Json => report::write_json(&mut stdout, &rows),
        Format::Csv => report::write_csv(&mut stdout, &rows),
    }
    .map_err(stdout_err)?;

    let bad: Vec<String> = rows.iter().filter(|r| !r.matches).map(|r| r.alpha.clone()).collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::Mismatch(bad))
    }
}

fn cmd_trace(args: &RunArgs, output: Option<PathBuf>) -> CmdResult {
    let (mut sink, target): (Box<dyn Write>, String) = match &output {
        Some(path) => {
            let file = File::create(path).map_err(|e| Failure::Io(format!("creating {}", path.display()), e))?;
            (Box::new(BufWriter::new(file)), path.display().to_string())
        }
        None => (Box::new(BufWriter::new(io::stdout().lock())), "stdout".into()),
    };
    let io_fail = |e| Failure::Io(format!("writing {target}"), e);

    writeln!(sink, "{TRACE_HEADER}").map_err(io_fail)?;
    let t = Instant::now();
    let mut write_error = None;
    let mut summary = TraceSummary::default();
    let out = run_streaming(args.alpha, args.backend.into(), &args.options(), |row| {
        summary.observe(&row);
        if write_error.is_none() {
            if let Err(e) = writeln!(sink, "{}", row.to_csv_line()) {
                write_error = Some(e);
            }
        }
    })?;
    if let Some(e) = write_error {
        return Err(io_fail(e));
    }
    sink.flush().map_err(io_fail)?;
    drop(sink);
    summary.finish(&out, elapsed_ms(t));

    // Keep stdout clean for the CSV when it goes there.
    let result = if output.is_some() {
        let mut stdout = io::stdout().lock();
        match args.format {
            Format::Json => report::write_json(&mut stdout, &summary),
            Format::Csv => report::write_csv(&mut stdout, [&summary]),
            Format::Text => summary.write_text(&mut stdout),
        }
    } else {
        summary.write_text(&mut io::stderr().lock())
    };
    result.map_err(stdout_err)
}

const BENCH_GRID: [&str; 5] = ["1", "1e-2", "1e-4", "1e-6", "1e-12"];

fn cmd_bench(format: Format) -> CmdResult {
    let mut rows = Vec::new();
    for s in BENCH_GRID {
        let alpha: MassRatio = s.parse().expect("grid ratios parse");
        for choice in [BackendChoice::Exact, BackendChoice::Float64] {
            let t = Instant::now();
            let row = match run(alpha, choice, &RunOptions::default()) {
                Ok(out) => BenchRow::completed(alpha, &out, elapsed_ms(t)),
                Err(Error::ExactCutoff { .. }) => BenchRow::skipped(alpha, BackendKind::Exact),
                Err(e) => return Err(e.into()),
            };
            rows.push(row);
        }
    }
    let mut stdout = io::stdout().lock();
    match format {
        Format::Text => report::write_bench_text(&mut stdout, &rows),
        Format::Json => report::write_json(&mut stdout, &rows),
        Format::Csv => report::write_csv(&mut stdout, &rows),
    }
    .map_err(stdout_err)
}
