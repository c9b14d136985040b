//! Command-line front end.
//!
//! Exit codes: 0 when the correlation is compatible (or the inclusion holds),
//! 1 when it is not, 2 on any error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};

use crate::channels::{ChannelSpec, Family};
use crate::compat::{self, ThresholdModel, Verdict};
use crate::correlation::Correlation;
use crate::error::{Error, Result};
use crate::geometry::{boundary_csv, boundary_svg, points_svg, region_boundary};
use crate::oracle::{numeric_threshold, sample_correlations, SampleMode};
use crate::polytope::{fw_vertices, hull_membership, trace_class_vertices, Membership};
use crate::witness::{Sign, Strategy, Witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Decide whether a correlation is achievable through the channel.
    Check,
    /// Best witness score achievable through the channel.
    Threshold,
    /// Outline of the compatible region in the (x, y) square.
    Region,
    /// Sample achievable correlations numerically.
    Oracle,
    /// Hull membership against the deterministic-strategy polytope.
    Polytope,
    /// Whether the first channel's region contains the second's.
    Compare,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Random,
    Boundary,
}

impl From<Mode> for SampleMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Random => SampleMode::Random,
            Mode::Boundary => SampleMode::Boundary,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "channelscope", version, about = "Decide which input-output correlations a quantum channel can produce")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// Channel record as inline JSON or a path to a JSON file; give twice for `compare`.
    #[arg(long = "channel", required = true)]
    pub channels: Vec<String>,
    /// Row-major correlation `p(1|1),p(2|1),p(1|2),p(2|2)`, one row per input; separate rows with `;` for larger shapes.
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    /// Correlation as Cartesian coordinates `x,y`.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "p")]
    pub xy: Option<String>,
    /// Witness weight in [-1, 1].
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,
    /// Witness sign: `+` (diagonal) or `-` (anti-diagonal).
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    pub sign: String,
    /// Number of sampled correlations for `oracle`.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Seed for every random draw; equal seeds give identical output.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Boundary resolution, or grid size for `compare`.
    #[arg(long, default_value_t = 200)]
    pub resolution: usize,
    /// Output file for `region` and `oracle`; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format; inferred from the `--out` extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Sampler for `oracle`: random strategies or optimal ones along the boundary.
    #[arg(long, value_enum, default_value = "random")]
    pub mode: Mode,
}

/// Validated invocation.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub channels: Vec<ChannelSpec>,
    pub correlation: Option<Correlation>,
    pub omega: Option<f64>,
    pub sign: Sign,
    pub samples: usize,
    pub seed: u64,
    pub resolution: usize,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub mode: SampleMode,
}

pub const MAX_RESOLUTION: usize = 100_000;
pub const MAX_SAMPLES: usize = 100_000_000;

/// Reads a channel record given inline (starting with `{`) or as a file path.
pub fn parse_spec(text: &str) -> Result<ChannelSpec> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        return ChannelSpec::parse_json(trimmed);
    }
    let body = std::fs::read_to_string(text)
        .map_err(|e| Error::Parse(format!("cannot read channel file {text:?}: {e}")))?;
    ChannelSpec::parse_json(&body)
}

/// Parses `--p`: four row-major entries, or rows separated by `;`.
pub fn parse_correlation(text: &str) -> Result<Correlation> {
    if !text.contains(';') {
        return Correlation::parse_binary(text);
    }
    let rows = text
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("correlation entry {s:?}: {e}")))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Correlation::new(rows)
}

fn parse_xy(text: &str) -> Result<Correlation> {
    let vals = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("coordinate {s:?}: {e}"))))
        .collect::<Result<Vec<f64>>>()?;
    if vals.len() != 2 {
        return Err(Error::Parse(format!("--xy expects 2 values, got {}", vals.len())));
    }
    crate::geometry::from_cartesian(crate::geometry::CartesianPoint::new(vals[0], vals[1]))
}

impl RunConfig {
    pub fn from_args(args: Args) -> Result<Self> {
        let want = if args.command == Command::Compare { 2 } else { 1 };
        if args.channels.len() != want {
            return Err(Error::Parse(format!(
                "{:?} takes {want} --channel, got {}",
                args.command,
                args.channels.len()
            )));
        }
        let channels = args.channels.iter().map(|c| parse_spec(c)).collect::<Result<Vec<_>>>()?;
        let correlation = match (&args.p, &args.xy) {
            (Some(p), _) => Some(parse_correlation(p)?),
            (None, Some(xy)) => Some(parse_xy(xy)?),
            (None, None) => None,
        };
        let needs_p = matches!(args.command, Command::Check | Command::Polytope);
        if needs_p && correlation.is_none() {
            return Err(Error::Parse("--p or --xy is required".into()));
        }
        if args.command == Command::Threshold && args.omega.is_none() {
            return Err(Error::Parse("--omega is required".into()));
        }
        if let Some(w) = args.omega {
            if !(-1.0..=1.0).contains(&w) {
                return Err(Error::Parse(format!("--omega must lie in [-1, 1], got {w}")));
            }
        }
        if args.samples == 0 || args.samples > MAX_SAMPLES {
            return Err(Error::Parse(format!("--samples must lie in 1..={MAX_SAMPLES}")));
        }
        if args.resolution < 4 || args.resolution > MAX_RESOLUTION {
            return Err(Error::Parse(format!("--resolution must lie in 4..={MAX_RESOLUTION}")));
        }
        let format = args.format.unwrap_or_else(|| match &args.out {
            Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("svg")) => Format::Svg,
            _ => Format::Csv,
        });
        Ok(RunConfig {
            command: args.command,
            channels,
            correlation,
            omega: args.omega,
            sign: Sign::parse(&args.sign)?,
            samples: args.samples,
            seed: args.seed,
            resolution: args.resolution,
            output_path: args.out,
            format,
            mode: args.mode.into(),
        })
    }
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn signed(v: f64) -> String {
    format!("{v:+.16e}")
}

fn witness_label(w: &Witness) -> String {
    format!("w{}({})", w.sign.symbol(), num(w.omega))
}

fn emit(cfg: &RunConfig, body: &str, stdout: &mut dyn Write) -> Result<()> {
    match &cfg.output_path {
        Some(path) => write_file(path, body),
        None => Ok(stdout.write_all(body.as_bytes())?),
    }
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    std::fs::write(path, body).map_err(Error::from)
}

fn print_verdict(v: &Verdict, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "verdict: {}", if v.compatible { "compatible" } else { "incompatible" })?;
    writeln!(out, "margin: {}", signed(v.margin))?;
    if let Some(w) = &v.worst_witness {
        writeln!(out, "worst witness: {}", witness_label(w))?;
    }
    if let Some(cert) = &v.certificate {
        print_matrix("certificate", cert, out)?;
    }
    Ok(())
}

fn print_matrix(label: &str, rows: &[Vec<f64>], out: &mut dyn Write) -> Result<()> {
    let text: Vec<String> = rows
        .iter()
        .map(|r| r.iter().map(|&v| num(v)).collect::<Vec<_>>().join(","))
        .collect();
    writeln!(out, "{label}: {}", text.join(";"))?;
    Ok(())
}

fn exact_unavailable(e: &Error) -> bool {
    matches!(e, Error::Unsupported(_) | Error::NotD2Covariant { .. })
}

fn run_check(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let spec = &cfg.channels[0];
    let p = cfg.correlation.as_ref().expect("validated");
    let verdict = match compat::check(spec, p) {
        Ok(v) => {
            writeln!(out, "method: exact")?;
            v
        }
        Err(e) if exact_unavailable(&e) && p.is_binary() => {
            writeln!(out, "method: numerical")?;
            compat::max_violation(spec, p, cfg.resolution)?
        }
        Err(e) => return Err(e),
    };
    print_verdict(&verdict, out)?;
    Ok(if verdict.compatible { 0 } else { 1 })
}

fn run_threshold(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let spec = &cfg.channels[0];
    let w = Witness::new(cfg.sign, cfg.omega.expect("validated"))?;
    writeln!(out, "witness: {}", witness_label(&w))?;
    let model = match ThresholdModel::for_channel(spec) {
        Ok(m) => m,
        Err(e) if exact_unavailable(&e) => {
            let value = numeric_threshold(spec, &w, 20, cfg.seed)?;
            writeln!(out, "method: numerical")?;
            writeln!(out, "threshold: {}", num(value))?;
            return Ok(0);
        }
        Err(e) => return Err(e),
    };
    let t = model.threshold(&w)?;
    writeln!(out, "method: exact")?;
    writeln!(out, "threshold: {}", num(t.value))?;
    let encoding = match (t.strategy, &model, t.optimal_bloch) {
        (Strategy::TrivialGuess, _, _) => "none needed, always guess the favoured output".to_string(),
        (_, ThresholdModel::Qubit(_), Some(b)) => format!(
            "Bloch vectors ±({},{},{})",
            num(b[0]),
            num(b[1]),
            num(b[2])
        ),
        _ => "any pair of orthonormal pure states".to_string(),
    };
    writeln!(out, "optimal encoding: {encoding}")?;
    Ok(0)
}

fn run_region(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let lines = region_boundary(&cfg.channels[0], cfg.resolution)?;
    let body = match cfg.format {
        Format::Csv => boundary_csv(&lines),
        Format::Svg => boundary_svg(&lines),
    };
    emit(cfg, &body, out)?;
    Ok(0)
}

fn run_oracle(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let cloud = sample_correlations(&cfg.channels[0], cfg.samples, cfg.seed, cfg.mode)?;
    let body = match cfg.format {
        Format::Csv => cloud.to_csv(),
        Format::Svg => points_svg(&cloud.points),
    };
    emit(cfg, &body, out)?;
    if cfg.output_path.is_some() {
        writeln!(out, "points: {}", cloud.points.len())?;
        writeln!(out, "max |y|: {}", num(cloud.max_abs_y()))?;
    }
    Ok(0)
}

fn run_polytope(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let spec = &cfg.channels[0];
    let p = cfg.correlation.as_ref().expect("validated");
    let (m, n) = (p.inputs(), p.outputs());
    let vs = match spec.family() {
        _ if spec.input_dim() < 2 => trace_class_vertices(m, n)?,
        Family::TraceClass => trace_class_vertices(m, n)?,
        Family::Unitary | Family::Dephasing => fw_vertices(m, n, spec.input_dim())?,
        other => {
            return Err(Error::Unsupported(format!(
                "the compatible set of a {} channel is not a polytope of deterministic strategies",
                other.name()
            )))
        }
    };
    writeln!(out, "vertices: {}", vs.len())?;
    match hull_membership(&vs, p)? {
        Membership::Inside { weights } => {
            writeln!(out, "verdict: inside")?;
            let used: Vec<String> = weights
                .iter()
                .enumerate()
                .filter(|(_, &w)| w > 1e-12)
                .map(|(k, &w)| format!("{k}:{}", num(w)))
                .collect();
            writeln!(out, "weights: {}", used.join(","))?;
            Ok(0)
        }
        Membership::Outside { witness, violation } => {
            writeln!(out, "verdict: outside")?;
            writeln!(out, "violation: {}", signed(violation))?;
            print_matrix("certificate", &witness, out)?;
            Ok(1)
        }
    }
}

fn run_compare(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let (a, b) = (&cfg.channels[0], &cfg.channels[1]);
    let grid = cfg.resolution + 1;
    let forward = compat::inclusion_counterexample(a, b, grid)?;
    let backward = compat::inclusion_counterexample(b, a, grid)?;
    writeln!(out, "first contains second: {}", forward.is_none())?;
    if let Some((x, y)) = forward {
        writeln!(out, "  counterexample: x={} y={}", num(x), num(y))?;
    }
    writeln!(out, "second contains first: {}", backward.is_none())?;
    if let Some((x, y)) = backward {
        writeln!(out, "  counterexample: x={} y={}", num(x), num(y))?;
    }
    Ok(if forward.is_none() { 0 } else { 1 })
}

/// Executes a validated invocation; returns the exit code.
pub fn run(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    match cfg.command {
        Command::Check => run_check(cfg, out),
        Command::Threshold => run_threshold(cfg, out),
        Command::Region => run_region(cfg, out),
        Command::Oracle => run_oracle(cfg, out),
        Command::Polytope => run_polytope(cfg, out),
        Command::Compare => run_compare(cfg, out),
    }
}

/// Sizes the global thread pool from `CHANNELSCOPE_THREADS` (0 or unset = automatic).
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("CHANNELSCOPE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("CHANNELSCOPE_THREADS must be a non-negative integer, got {raw:?}")))?;
    if n > 0 {
        // a pool that already exists keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Parses arguments, runs, and reports errors; returns the process exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let parsed = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let result = configure_threads()
        .and_then(|_| RunConfig::from_args(parsed))
        .and_then(|cfg| run(&cfg, stdout));
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}
