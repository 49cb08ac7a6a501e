//! Command-line front end for `pccsens`: CSV ingestion, one-shot analysis,
//! streaming monitoring, grid cross-checks, synthetic data and the agreement
//! benchmark.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pccsens::datagen::{run_benchmark, sample, BenchConfig, DistributionKind, DistributionSpec};
use pccsens::oracle::grid_sensitivities;
use pccsens::{primary_sensitivities, stream_step, Moments, Point, Region};

pub mod input;
pub mod output;

use input::PointReader;
use output::{BenchOut, CellOut, OracleOut, ReportOut, StreamOut};

/// Exit status for malformed input or data the analysis cannot use.
pub const EXIT_INPUT: u8 = 1;
/// Exit status for a violated internal invariant.
pub const EXIT_INTERNAL: u8 = 2;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Input(String),
    Internal(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Internal(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl From<pccsens::Error> for CliError {
    fn from(e: pccsens::Error) -> Self {
        if e.is_internal() {
            CliError::Internal(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Input(format!("i/o: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Internal(format!("serialization: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Internal(format!("serialization: {e}"))
    }
}

#[derive(Debug, Parser)]
#[command(name = "pccsens", version, about = "Worst-case sensitivity of Pearson's r and its p-value to one added point")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sensitivity report for a dataset.
    Analyze(AnalyzeArgs),
    /// Replay a dataset row by row, predicting each row's effect before absorbing it.
    Stream(AnalyzeArgs),
    /// Compare the engine against a brute-force lattice search.
    Oracle(OracleArgs),
    /// Write a synthetic dataset as CSV.
    Synth(SynthArgs),
    /// Engine/grid agreement benchmark over synthetic datasets.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// `auto` or `lx,ux,ly,uy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bounds {
    Auto,
    Explicit([f64; 4]),
}

impl FromStr for Bounds {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.trim().eq_ignore_ascii_case("auto") {
            return Ok(Bounds::Auto);
        }
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(format!("expected 'auto' or lx,ux,ly,uy, got '{s}'"));
        }
        let mut v = [0.0; 4];
        for (slot, part) in v.iter_mut().zip(&parts) {
            *slot = part.parse().map_err(|_| format!("bad bound '{part}'"))?;
        }
        Region::new(v[0], v[1], v[2], v[3]).map_err(|e| e.to_string())?;
        Ok(Bounds::Explicit(v))
    }
}

impl Bounds {
    fn region(&self, points: &[Point]) -> Result<Region, CliError> {
        match *self {
            Bounds::Auto => Ok(Region::bounding(points)?),
            Bounds::Explicit([lx, ux, ly, uy]) => Ok(Region::new(lx, ux, ly, uy)?),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// CSV file with header `x,y`; `-` reads standard input.
    #[arg(long, short, default_value = "-")]
    pub input: PathBuf,
    /// Feasible region: `auto` (bounding box of the data) or `lx,ux,ly,uy`.
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    pub bounds: Bounds,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Lattice points per axis.
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, default_value = "uniform", value_parser = parse_kind)]
    pub kind: DistributionKind,
    #[arg(long, short)]
    pub n: usize,
    #[arg(long, env = "SENS_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Trials per (kind, size) cell.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, value_delimiter = ',', default_value = "10,50,100")]
    pub sizes: Vec<usize>,
    /// Restrict to these kinds; all four by default.
    #[arg(long, value_delimiter = ',', value_parser = parse_kind)]
    pub kind: Vec<DistributionKind>,
    #[arg(long, default_value_t = 10)]
    pub grid: usize,
    #[arg(long, default_value_t = 1e-5)]
    pub rel_tol: f64,
    #[arg(long, env = "SENS_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

fn parse_kind(s: &str) -> Result<DistributionKind, String> {
    s.parse().map_err(|e: pccsens::Error| e.to_string())
}

/// Runs one command. `stdin` is read only when `--input -`. Returns the exit
/// status; errors are reported on `stderr`.
pub fn run(cli: &Cli, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8 {
    let result = match &cli.command {
        Command::Analyze(a) => analyze(a, stdin, stdout, stderr),
        Command::Stream(a) => stream(a, stdin, stdout, stderr),
        Command::Oracle(a) => oracle(a, stdin, stdout),
        Command::Synth(a) => synth(a, stdout),
        Command::Bench(a) => bench(a, stdout),
    };
    let result = result.and_then(|()| stdout.flush().map_err(CliError::from));
    match result {
        Ok(()) => 0,
        Err(e) => {
            let kind = if e.exit_code() == EXIT_INTERNAL { "internal error" } else { "error" };
            let _ = writeln!(stderr, "{kind}: {e}");
            e.exit_code()
        }
    }
}

fn open<'a>(path: &PathBuf, stdin: &'a mut dyn BufRead) -> Result<Box<dyn BufRead + 'a>, CliError> {
    if path.as_os_str() == "-" {
        Ok(Box::new(stdin))
    } else {
        let f = File::open(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Ok(Box::new(BufReader::new(f)))
    }
}

fn read_points(args: &InputArgs, stdin: &mut dyn BufRead) -> Result<Vec<Point>, CliError> {
    PointReader::new(open(&args.input, stdin)?)?.read_all()
}

const PRECISION_NOTE_BELOW: usize = 5;

fn precision_note(n: usize, stderr: &mut dyn Write) {
    if n < PRECISION_NOTE_BELOW {
        let _ = writeln!(
            stderr,
            "note: only {n} points; p-value changes this small need high numerical precision to resolve"
        );
    }
}

#[derive(Serialize)]
struct ReportRow {
    r: f64,
    p: f64,
    delta_r: f64,
    delta_p: f64,
    straddle: bool,
    witness_r_label: &'static str,
    witness_r_x: f64,
    witness_r_y: f64,
    witness_r_aug: f64,
    witness_p_label: &'static str,
    witness_p_x: Option<f64>,
    witness_p_y: Option<f64>,
    witness_p_aug: f64,
}

impl From<&ReportOut> for ReportRow {
    fn from(r: &ReportOut) -> Self {
        ReportRow {
            r: r.r,
            p: r.p,
            delta_r: r.delta_r,
            delta_p: r.delta_p,
            straddle: r.straddle,
            witness_r_label: r.witness_r.label,
            witness_r_x: r.witness_r.x,
            witness_r_y: r.witness_r.y,
            witness_r_aug: r.witness_r.r_aug,
            witness_p_label: r.witness_p.label,
            witness_p_x: r.witness_p.x,
            witness_p_y: r.witness_p.y,
            witness_p_aug: r.witness_p.p_aug,
        }
    }
}

fn analyze(
    args: &AnalyzeArgs,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let points = read_points(&args.input, stdin)?;
    precision_note(points.len(), stderr);
    let summary = Moments::from_dataset(&points)?.summarize()?;
    let region = args.input.bounds.region(&points)?;
    let report = ReportOut::from(&primary_sensitivities(&summary, &region)?);
    match args.format {
        Format::Json => {
            serde_json::to_writer(&mut *stdout, &report)?;
            writeln!(stdout)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *stdout);
            w.serialize(ReportRow::from(&report))?;
            w.flush()?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct StreamRow {
    index: u64,
    x: f64,
    y: f64,
    status: &'static str,
    r: Option<f64>,
    p: Option<f64>,
    delta_r: Option<f64>,
    delta_p: Option<f64>,
    straddle: Option<bool>,
    observed_delta_r: Option<f64>,
    within_prediction: Option<bool>,
    point_in_region: bool,
}

impl From<&StreamOut> for StreamRow {
    fn from(s: &StreamOut) -> Self {
        let rep = s.report_before.as_ref();
        StreamRow {
            index: s.index,
            x: s.x,
            y: s.y,
            status: s.status,
            r: rep.map(|r| r.r),
            p: rep.map(|r| r.p),
            delta_r: rep.map(|r| r.delta_r),
            delta_p: rep.map(|r| r.delta_p),
            straddle: rep.map(|r| r.straddle),
            observed_delta_r: s.observed_delta_r,
            within_prediction: s.within_prediction,
            point_in_region: s.point_in_region,
        }
    }
}

/// Emits one record per input row as soon as the row is read. With
/// `--bounds auto` each prediction uses the bounding box of the rows seen so
/// far. Rows arriving while fewer than three points are held, or while the
/// held points have degenerate variance, get no report.
fn stream(
    args: &AnalyzeArgs,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let reader = PointReader::new(open(&args.input.input, stdin)?)?;
    let count = match args.format {
        Format::Json => stream_rows(reader, args.input.bounds, &mut |out| {
            serde_json::to_writer(&mut *stdout, out)?;
            writeln!(stdout)?;
            stdout.flush()?;
            Ok(())
        })?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *stdout);
            stream_rows(reader, args.input.bounds, &mut |out| {
                w.serialize(StreamRow::from(out))?;
                w.flush()?;
                Ok(())
            })?
        }
    };
    precision_note(count as usize, stderr);
    Ok(())
}

fn stream_rows<R: BufRead>(
    mut reader: PointReader<R>,
    bounds: Bounds,
    emit: &mut dyn FnMut(&StreamOut) -> Result<(), CliError>,
) -> Result<u64, CliError> {
    let mut state = Moments::new();
    // running bounding box for auto bounds
    let mut seen: Option<[f64; 4]> = None;
    while let Some(point) = reader.next_point()? {
        let region = match (bounds, seen) {
            (Bounds::Explicit(b), _) | (Bounds::Auto, Some(b)) => Some(Region::new(b[0], b[1], b[2], b[3])?),
            (Bounds::Auto, None) => None,
        };
        let index = state.count();
        let out = match region {
            Some(region) if state.count() >= 3 => match stream_step(&state, point, &region) {
                Ok((rec, next)) => {
                    state = next;
                    StreamOut::from(&rec)
                }
                Err(pccsens::Error::DegenerateVariance) => {
                    state = state.update(point)?;
                    skipped(index, point, "degenerate", region.contains(point))
                }
                Err(e) => return Err(e.into()),
            },
            _ => {
                state = state.update(point)?;
                skipped(index, point, "warmup", region.is_some_and(|f| f.contains(point)))
            }
        };
        seen = Some(match seen {
            None => [point.x, point.x, point.y, point.y],
            Some([lx, ux, ly, uy]) => [lx.min(point.x), ux.max(point.x), ly.min(point.y), uy.max(point.y)],
        });
        emit(&out)?;
    }
    Ok(state.count())
}

fn skipped(index: u64, p: Point, status: &'static str, in_region: bool) -> StreamOut {
    StreamOut {
        index,
        x: p.x,
        y: p.y,
        status,
        report_before: None,
        observed_delta_r: None,
        within_prediction: None,
        point_in_region: in_region,
    }
}

#[derive(Serialize)]
struct OracleRow {
    grid_resolution: usize,
    grid_delta_r: f64,
    grid_delta_p: f64,
    grid_witness_x: f64,
    grid_witness_y: f64,
    grid_min_abs_r: f64,
    grid_straddle: bool,
    engine_delta_r: f64,
    engine_delta_p: f64,
    agree_within: f64,
}

fn oracle(args: &OracleArgs, stdin: &mut dyn BufRead, stdout: &mut dyn Write) -> Result<(), CliError> {
    let points = read_points(&args.input, stdin)?;
    let region = args.input.bounds.region(&points)?;
    let out = OracleOut::from(&grid_sensitivities(&points, &region, args.grid)?);
    match args.format {
        Format::Json => {
            serde_json::to_writer(&mut *stdout, &out)?;
            writeln!(stdout)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *stdout);
            w.serialize(OracleRow {
                grid_resolution: out.grid_resolution,
                grid_delta_r: out.grid_delta_r,
                grid_delta_p: out.grid_delta_p,
                grid_witness_x: out.grid_witness.x,
                grid_witness_y: out.grid_witness.y,
                grid_min_abs_r: out.grid_min_abs_r,
                grid_straddle: out.grid_straddle,
                engine_delta_r: out.engine_delta_r,
                engine_delta_p: out.engine_delta_p,
                agree_within: out.agree_within,
            })?;
            w.flush()?;
        }
    }
    Ok(())
}

fn synth(args: &SynthArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let points = sample(&DistributionSpec {
        kind: args.kind,
        size: args.n,
        seed: args.seed,
    })?;
    let mut w = csv::Writer::from_writer(&mut *stdout);
    w.write_record(["x", "y"])?;
    for p in points {
        // `Display` for f64 round-trips exactly
        w.write_record([p.x.to_string(), p.y.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn bench(args: &BenchArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = BenchConfig {
        trials: args.trials,
        sizes: args.sizes.clone(),
        kinds: if args.kind.is_empty() {
            DistributionKind::ALL.to_vec()
        } else {
            args.kind.clone()
        },
        grid_resolution: args.grid,
        rel_tol: args.rel_tol,
        seed: args.seed,
    };
    let out = BenchOut::from(&run_benchmark(&cfg)?);
    match args.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *stdout, &out)?;
            writeln!(stdout)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *stdout);
            for cell in &out.cells {
                w.serialize(cell)?;
            }
            w.serialize(CellOut {
                kind: "all",
                size: 0,
                trials: out.trials,
                agree: out.agree,
                agreement_rate: out.agreement_rate,
                max_rel_gap: out.cells.iter().map(|c| c.max_rel_gap).fold(0.0, f64::max),
                resamples: out.resamples,
            })?;
            w.flush()?;
        }
    }
    Ok(())
}
