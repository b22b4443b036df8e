//! `linkscan`: batch analysis of oil-price / stock-market return linkage.
//!
//! Subcommands: `describe` (moment table with normality tests), `linear`
//! (per-country regression results), `kernel` (local polynomial curve
//! plot data) and `analyze` (the full report). Exit codes: 0 success,
//! 1 usage error, 2 data error, 3 numerical degeneracy.

mod ingest;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use linkscan_core::pipeline::{CountryEntry, SeriesStats};
use linkscan_core::{
    describe, estimate_linkage, filter_world_returns, fit_curve, run_pipeline, AlignedBundle,
    HcVariant, KernelCurve, KernelKind, ReturnMode, RunConfig,
};

use ingest::{ingest, DatasetManifest, IngestError};

#[derive(Parser)]
#[command(
    name = "linkscan",
    version,
    about = "Oil-price to stock-market linkage analysis over weekly return series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Descriptive statistics with Jarque-Bera normality tests
    Describe(RunArgs),
    /// Per-country linear model estimates with diagnostics
    Linear(RunArgs),
    /// Kernel regression curves as CSV plot data
    Kernel(RunArgs),
    /// Full report: descriptives, linear models and kernel curves
    Analyze(RunArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReturnsArg {
    Log,
    Simple,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KernelArg {
    Gaussian,
    Epanechnikov,
    Uniform,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum HcArg {
    Hc0,
    Hc1,
}

#[derive(Args)]
struct RunArgs {
    /// Input CSV: `date` first column (ISO-8601), one price column per series
    #[arg(long)]
    input: PathBuf,

    /// Column with oil prices
    #[arg(long)]
    oil: String,

    /// Column with world market prices
    #[arg(long)]
    world: String,

    /// Comma-separated country price columns
    #[arg(long, value_delimiter = ',', required = true)]
    countries: Vec<String>,

    /// Return definition applied to all price columns
    #[arg(long, value_enum, default_value_t = ReturnsArg::Log)]
    returns: ReturnsArg,

    /// Kernel bandwidth as a share of the oil-return range
    #[arg(long, default_value_t = 0.15)]
    bandwidth_factor: f64,

    /// Evaluation grid points per kernel curve
    #[arg(long, default_value_t = 100)]
    grid_points: usize,

    /// Kernel shape
    #[arg(long, value_enum, default_value_t = KernelArg::Gaussian)]
    kernel: KernelArg,

    /// White covariance variant used when heteroskedasticity is detected
    #[arg(long, value_enum, default_value_t = HcArg::Hc0)]
    hc: HcArg,

    /// p-value threshold for AR(1) augmentation and robust covariance
    #[arg(long, default_value_t = 0.05)]
    threshold: f64,

    /// Drop the oil-filtered world factor from the country equation
    #[arg(long)]
    no_filter: bool,

    /// Write output to this path instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn manifest(&self) -> DatasetManifest {
        DatasetManifest {
            oil_column: self.oil.clone(),
            world_column: self.world.clone(),
            country_columns: self.countries.clone(),
            returns_mode: match self.returns {
                ReturnsArg::Log => ReturnMode::Log,
                ReturnsArg::Simple => ReturnMode::Simple,
            },
        }
    }

    fn config(&self) -> RunConfig {
        RunConfig {
            bandwidth_factor: self.bandwidth_factor,
            grid_points: self.grid_points,
            kernel: match self.kernel {
                KernelArg::Gaussian => KernelKind::Gaussian,
                KernelArg::Epanechnikov => KernelKind::Epanechnikov,
                KernelArg::Uniform => KernelKind::Uniform,
            },
            hc: match self.hc {
                HcArg::Hc0 => HcVariant::Hc0,
                HcArg::Hc1 => HcVariant::Hc1,
            },
            threshold: self.threshold,
            filtered_factor: !self.no_filter,
            seed: 0,
        }
    }
}

/// Failures sorted by exit code: usage 1, data 2, degeneracy 3.
#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
    Degenerate(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Degenerate(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Degenerate(m) => m,
        }
    }
}

impl From<IngestError> for CliError {
    fn from(err: IngestError) -> Self {
        match &err {
            IngestError::OverlappingColumns { .. } => CliError::Usage(err.to_string()),
            IngestError::Core(core) if core.is_degenerate() => {
                CliError::Degenerate(err.to_string())
            }
            _ => CliError::Data(err.to_string()),
        }
    }
}

impl From<linkscan_core::Error> for CliError {
    fn from(err: linkscan_core::Error) -> Self {
        if err.is_degenerate() {
            CliError::Degenerate(err.to_string())
        } else {
            CliError::Data(err.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Data(format!("i/o error: {err}"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (args, command): (&RunArgs, _) = match &cli.command {
        Command::Describe(args) => (args, Cmd::Describe),
        Command::Linear(args) => (args, Cmd::Linear),
        Command::Kernel(args) => (args, Cmd::Kernel),
        Command::Analyze(args) => (args, Cmd::Analyze),
    };

    let config = args.config();
    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let bundle = ingest(&args.input, &args.manifest())?;
    let out = args.out.as_deref();

    match command {
        Cmd::Describe => {
            let report = output::DescribeReport::new(
                config,
                bundle.provenance(),
                describe_all(&bundle)?,
            );
            output::emit(&output::to_json(&report)?, out)?;
        }
        Cmd::Linear => {
            let report = output::LinearReport::new(
                config.clone(),
                bundle.provenance(),
                linear_entries(&bundle, &config),
            );
            output::emit(&output::to_json(&report)?, out)?;
        }
        Cmd::Kernel => {
            let curves = kernel_curves(&bundle, &config)?;
            output::emit(&output::curves_to_csv(&curves)?, out)?;
        }
        Cmd::Analyze => {
            let report = run_pipeline(&bundle, &config)?;
            output::emit(&output::report_to_json(&report)?, out)?;
        }
    }
    Ok(())
}

enum Cmd {
    Describe,
    Linear,
    Kernel,
    Analyze,
}

/// Statistics for every requested series; any degenerate series fails the
/// whole table.
fn describe_all(bundle: &AlignedBundle) -> Result<Vec<SeriesStats>, CliError> {
    let mut rows = Vec::new();
    for series in std::iter::once(&bundle.oil)
        .chain(std::iter::once(&bundle.world))
        .chain(bundle.countries.iter())
    {
        let stats = describe(series)?;
        rows.push(SeriesStats {
            series: series.name.clone(),
            stats: Some(stats),
            error: None,
        });
    }
    Ok(rows)
}

/// Per-country estimation with skip markers, as in the full report.
fn linear_entries(bundle: &AlignedBundle, config: &RunConfig) -> Vec<CountryEntry> {
    let policy = config.policy();
    let filter = filter_world_returns(&bundle.world, &bundle.oil);
    bundle
        .countries
        .iter()
        .map(|country| match &filter {
            Ok(filter) => match estimate_linkage(country, filter, &bundle.oil, &policy) {
                Ok(result) => CountryEntry {
                    country: country.name.clone(),
                    result: Some(result),
                    skipped: None,
                },
                Err(e) => CountryEntry {
                    country: country.name.clone(),
                    result: None,
                    skipped: Some(e.to_string()),
                },
            },
            Err(e) => CountryEntry {
                country: country.name.clone(),
                result: None,
                skipped: Some(format!("world-factor filter failed: {e}")),
            },
        })
        .collect()
}

/// Kernel curves for every country; a curve failure is a degeneracy.
fn kernel_curves(
    bundle: &AlignedBundle,
    config: &RunConfig,
) -> Result<Vec<(String, KernelCurve)>, CliError> {
    let spec = config.kernel_spec();
    let mut curves = Vec::with_capacity(bundle.countries.len());
    for country in &bundle.countries {
        let curve = fit_curve(
            &bundle.oil.values,
            &country.values,
            &spec,
            config.grid_points,
        )
        .map_err(CliError::from)?;
        curves.push((country.name.clone(), curve));
    }
    Ok(curves)
}
