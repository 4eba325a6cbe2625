//! The `fmm` command line: `generate`, `fit`, `peaks` and `plot`.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, Parser, Subcommand};

use crate::error::{FmmError, Result};
use crate::estimation::{fit, FitConfig, StopRule};
use crate::io::{csv_table, from_json, read_csv, write_result, CsvOptions, ResultFormat};
use crate::plot::{render_svg, PlotOptions};
use crate::simulation::{generate, GenSpec};

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  2  invalid arguments or configuration
  3  unreadable or malformed input
  4  the fit failed (degenerate data or design)";

#[derive(Debug, Parser)]
#[command(name = "fmm", version, about = "Fit, simulate and annotate Frequency Modulated Möbius models", after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate data from an FMM model and write it as a time,value CSV.
    #[command(allow_negative_numbers = true)]
    Generate(GenerateArgs),
    /// Fit an FMM model to a CSV time series.
    Fit(FitArgs),
    /// Print peak and trough times and values of a fitted model.
    Peaks(PeaksArgs),
    /// Render a fit as an SVG figure.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Number of periods in the input; values are averaged across periods.
    #[arg(long, default_value_t = 1)]
    n_periods: usize,
    /// Period of the time column; times are mapped to (t - t0)·2π/period.
    #[arg(long)]
    period: Option<f64>,
    /// Time origin used with --period.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t0: f64,
}

impl DataArgs {
    fn options(&self) -> CsvOptions {
        CsvOptions {
            has_time_column: None,
            n_periods: self.n_periods,
            period: self.period,
            t0: self.t0,
        }
    }
}

#[derive(Debug, Args)]
struct FitArgs {
    /// CSV with a header and one (value) or two (time,value) columns.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    data: DataArgs,
    /// Number of waves.
    #[arg(long, default_value_t = 1)]
    nback: usize,
    /// Block labels for shared β, e.g. 1,1,2.
    #[arg(long, value_delimiter = ',')]
    beta_restrictions: Option<Vec<u32>>,
    /// Block labels for shared ω, e.g. 1,1,2.
    #[arg(long, value_delimiter = ',')]
    omega_restrictions: Option<Vec<u32>>,
    /// Maximum backfitting passes (default: nback).
    #[arg(long)]
    maxiter: Option<usize>,
    /// Stopping rule: `maxiter`, or `r2:<difMax>` to stop once R² gains at most difMax.
    #[arg(long, default_value = "maxiter", value_parser = parse_stop)]
    stop: StopRule,
    #[arg(long, default_value_t = 48)]
    alpha_grid: usize,
    #[arg(long, default_value_t = 24)]
    omega_grid: usize,
    /// Grid search rounds (the first plus refinements).
    #[arg(long, default_value_t = 3)]
    num_reps: usize,
    /// Evaluate grids on all cores; results are identical to serial runs.
    #[arg(long)]
    parallel: bool,
    /// Result JSON path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV with fitted values.
    #[arg(long)]
    export_fitted: Option<PathBuf>,
    /// CSV with the centred contribution of each wave.
    #[arg(long)]
    export_components: Option<PathBuf>,
    /// Suppress progress lines on stderr.
    #[arg(long)]
    quiet: bool,
}

fn parse_stop(s: &str) -> std::result::Result<StopRule, String> {
    if s == "maxiter" {
        return Ok(StopRule::AlwaysFalse);
    }
    match s.strip_prefix("r2:").map(str::parse::<f64>) {
        Some(Ok(d)) if d > 0.0 && d.is_finite() => Ok(StopRule::R2Delta(d)),
        Some(_) => Err(format!(
            "invalid difMax in {s:?}; expected a positive number"
        )),
        None => Err(format!("expected `maxiter` or `r2:<difMax>`, got {s:?}")),
    }
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Intercept.
    #[arg(long)]
    m: f64,
    /// Amplitudes (comma list; shorter lists are recycled).
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_hyphen_values = true
    )]
    a: Vec<f64>,
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_hyphen_values = true
    )]
    alpha: Vec<f64>,
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_hyphen_values = true
    )]
    beta: Vec<f64>,
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_hyphen_values = true
    )]
    omega: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    from: f64,
    #[arg(long, default_value_t = std::f64::consts::TAU)]
    to: f64,
    #[arg(long, default_value_t = 100)]
    length_out: usize,
    /// Explicit time points (comma list); replaces --from/--to/--length-out.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with_all = ["from", "to", "length_out"])]
    time_points: Option<Vec<f64>>,
    /// Standard deviation of the gaussian noise.
    #[arg(long, default_value_t = 0.0)]
    sigma_noise: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PeaksArgs {
    /// Fit result JSON.
    #[arg(long = "in")]
    input: PathBuf,
    /// Wrap times into [0, 2π).
    #[arg(long = "wrap-2pi", default_value_t = true, action = ArgAction::Set)]
    wrap: bool,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// Fit result JSON.
    #[arg(long)]
    fit: PathBuf,
    /// The CSV the model was fitted to.
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    read: DataArgs,
    /// Add a panel with each wave's centred contribution.
    #[arg(long)]
    components: bool,
    /// Output SVG (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Exit status for an error.
pub fn exit_code(err: &FmmError) -> i32 {
    match err {
        FmmError::Config(_) => 2,
        FmmError::Format { .. } | FmmError::Io { .. } | FmmError::Json(_) => 3,
        FmmError::DegenerateDesign(_)
        | FmmError::DegenerateWave(_)
        | FmmError::UndefinedMean(_)
        | FmmError::UndefinedVariance
        | FmmError::FitFailed(_) => 4,
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Generate(a) => cmd_generate(a, stdout),
        Command::Fit(a) => cmd_fit(a, stdout, stderr),
        Command::Peaks(a) => cmd_peaks(a, stdout),
        Command::Plot(a) => cmd_plot(a, stdout),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| FmmError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => write_file(p, bytes),
        None => stdout.write_all(bytes).map_err(|source| FmmError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| FmmError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn cmd_generate(a: GenerateArgs, stdout: &mut dyn Write) -> Result<()> {
    let mut spec = GenSpec::new(a.m, a.a, a.alpha, a.beta, a.omega)
        .with_range(a.from, a.to, a.length_out)
        .with_noise(a.sigma_noise, a.seed);
    if let Some(t) = a.time_points {
        spec = spec.with_time_points(t);
    }
    let g = generate(&spec)?;
    let rows = g.t.iter().zip(&g.y).map(|(t, y)| vec![*t, *y]);
    emit(
        a.out.as_deref(),
        &csv_table(&["time", "value"], rows),
        stdout,
    )
}

fn cmd_fit(a: FitArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let mut cfg = FitConfig::new(a.nback)
        .with_grid(a.alpha_grid, a.omega_grid)
        .with_num_reps(a.num_reps)
        .with_maxiter(a.maxiter.unwrap_or(a.nback))
        .with_stop_rule(a.stop)
        .parallel(a.parallel);
    if let Some(b) = a.beta_restrictions {
        cfg = cfg.with_beta_blocks(b);
    }
    if let Some(o) = a.omega_restrictions {
        cfg = cfg.with_omega_blocks(o);
    }
    cfg.validate()?;
    let data = read_csv(&a.input, &a.data.options())?;
    if !a.quiet {
        let _ = writeln!(
            stderr,
            "Fitting {} wave(s) to {} observations ({} period(s))",
            cfg.nback,
            data.len(),
            data.n_periods()
        );
    }
    let result = fit(&data, &cfg)?;
    if !a.quiet {
        let _ = writeln!(stderr, "{}", result.stop_message());
        let _ = writeln!(stderr, "R2_total = {:.4}", result.r2_total);
    }
    emit(
        a.out.as_deref(),
        &write_result(&result, ResultFormat::Json)?,
        stdout,
    )?;
    if let Some(p) = &a.export_fitted {
        write_file(p, &write_result(&result, ResultFormat::CsvFitted)?)?;
    }
    if let Some(p) = &a.export_components {
        write_file(p, &write_result(&result, ResultFormat::CsvComponents)?)?;
    }
    Ok(())
}

fn cmd_peaks(a: PeaksArgs, stdout: &mut dyn Write) -> Result<()> {
    let result = from_json(&read_file(&a.input)?)?;
    let peaks = result.model.peaks(a.wrap)?;
    let rows = peaks
        .waves
        .iter()
        .map(|p| vec![p.t_upper, p.z_upper, p.t_lower, p.z_lower]);
    emit(None, &csv_table(&["tU", "ZU", "tL", "ZL"], rows), stdout)
}

fn cmd_plot(a: PlotArgs, stdout: &mut dyn Write) -> Result<()> {
    let result = from_json(&read_file(&a.fit)?)?;
    let data = read_csv(&a.data, &a.read.options())?;
    let svg = render_svg(
        &result,
        &data,
        PlotOptions {
            components: a.components,
        },
    )?;
    emit(a.out.as_deref(), svg.as_bytes(), stdout)
}
