//! Command-line wiring for the auditing pipeline.
//!
//! Four subcommands: `report` (fairness schema from a predictions CSV),
//! `derive-gcs3` (join the documentation-bias bucket feature onto
//! predictions), `simulate` (seeded synthetic cohort) and `drift`
//! (column-wise PSI between two CSVs).
//!
//! Exit codes: 0 on success, 2 on usage errors, 1 on data or validation
//! errors with a message naming the offending file, line and field. The CLI
//! adds no arithmetic of its own; every number comes from the library.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::drift::{column_drift, DriftReport, DEFAULT_PSI_BINS, DEFAULT_PSI_THRESHOLD};
use crate::error::{Error, Result};
use crate::gcs::{bucket_icus, icu_gcs3_rates, Gcs3Bucket, GCS3_FEATURE};
use crate::group::SensitiveFeatureSpec;
use crate::io::{
    cohort_to_csv, file_digest, read_predictions, read_stays, read_table, write_bytes_atomic,
    write_table,
};
use crate::schema::{build_schema, serialize_schema, ReportFormat};
use crate::sim::{simulate_cohort, CohortConfig};

#[derive(Debug, Parser)]
#[command(
    name = "fairmon",
    version,
    about = "Group-fairness auditing for binary-risk clinical models"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the fairness-metric schema for a predictions file.
    Report(ReportArgs),
    /// Derive the GCS3 documentation bucket per ICU and join it onto a
    /// predictions file as a new feature column.
    DeriveGcs3(DeriveArgs),
    /// Generate a seeded synthetic cohort CSV.
    Simulate(SimulateArgs),
    /// Compare two CSV files column-by-column with PSI.
    Drift(DriftArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

fn parse_unit_interval(raw: &str) -> std::result::Result<f64, String> {
    let value: f64 = raw.parse().map_err(|_| format!("{raw:?} is not a number"))?;
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(format!("{value} is outside [0, 1]"))
    }
}

fn parse_feature_name(raw: &str) -> std::result::Result<String, String> {
    if raw.is_empty() {
        Err("feature names must be non-empty".to_owned())
    } else {
        Ok(raw.to_owned())
    }
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Predictions CSV with header stay_id,score,outcome,<features...>.
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated sensitive feature columns (may be empty).
    #[arg(long, value_delimiter = ',', num_args = 0.., value_parser = parse_feature_name)]
    features: Vec<String>,
    /// Decision threshold for the thresholded metrics.
    #[arg(long, default_value_t = 0.05, value_parser = parse_unit_interval)]
    threshold: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Column carrying the risk score.
    #[arg(long, default_value = "score")]
    score_column: String,
    /// Column carrying the binary outcome (default: outcome, then died).
    #[arg(long)]
    outcome_column: Option<String>,
    /// Omit the generation timestamp so repeated runs are byte-identical.
    #[arg(long)]
    reproducible: bool,
}

#[derive(Debug, Args)]
struct DeriveArgs {
    /// Stays CSV with header stay_id,icu_id,gcs_total (gcs_recorded works
    /// too, so simulator output can be used directly).
    #[arg(long)]
    stays: PathBuf,
    /// Predictions CSV to copy with a GCS3 column appended.
    #[arg(long)]
    preds: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 100)]
    n_icus: usize,
    #[arg(long, default_value_t = 200)]
    stays_per_icu: usize,
    #[arg(long, default_value_t = 0.15, value_parser = parse_unit_interval)]
    sedation_rate: f64,
}

#[derive(Debug, Args)]
struct DriftArgs {
    #[arg(long)]
    baseline: PathBuf,
    #[arg(long)]
    current: PathBuf,
    /// Output path for the JSON report; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_PSI_BINS)]
    bins: usize,
    /// PSI level above which a feature is flagged.
    #[arg(long, default_value_t = DEFAULT_PSI_THRESHOLD)]
    threshold: f64,
}

/// Parse `argv` and run. Returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            // Usage problems exit 2; --help and --version exit 0.
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(err) => {
            report_error(&err);
            1
        }
    }
}

fn report_error(err: &Error) {
    eprintln!("error: {err}");
    let mut source = std::error::Error::source(err);
    while let Some(cause) = source {
        eprintln!("  caused by: {cause}");
        source = cause.source();
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Report(args) => cmd_report(args),
        Command::DeriveGcs3(args) => cmd_derive_gcs3(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Drift(args) => cmd_drift(args),
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => write_bytes_atomic(path, bytes),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes).map_err(|e| Error::Io {
                path: PathBuf::from("<stdout>"),
                source: e,
            })
        }
    }
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let records = read_predictions(
        &args.input,
        &args.score_column,
        args.outcome_column.as_deref(),
        &args.features,
    )?;
    let specs: Vec<SensitiveFeatureSpec> = args
        .features
        .iter()
        .map(|name| SensitiveFeatureSpec::from_records(name, &records))
        .collect::<Result<_>>()?;
    let mut report = build_schema(&records, &specs, args.threshold)?;
    report.input_digest = file_digest(&args.input)?;
    if args.reproducible {
        report = report.without_timestamp();
    }
    let format = match args.format {
        OutputFormat::Csv => ReportFormat::Csv,
        OutputFormat::Json => ReportFormat::Json,
    };
    emit(args.out.as_deref(), &serialize_schema(&report, format)?)
}

fn cmd_derive_gcs3(args: DeriveArgs) -> Result<()> {
    let stays = read_stays(&args.stays)?;
    let profiles = bucket_icus(icu_gcs3_rates(&stays)?)?;

    let mut icu_bucket: std::collections::HashMap<&str, Gcs3Bucket> = std::collections::HashMap::new();
    for profile in &profiles {
        icu_bucket.insert(
            profile.icu_id.as_str(),
            profile.bucket.expect("bucket_icus assigns every bucket"),
        );
    }
    let mut stay_bucket: std::collections::HashMap<&str, Gcs3Bucket> =
        std::collections::HashMap::with_capacity(stays.len());
    for stay in &stays {
        if stay_bucket
            .insert(stay.stay_id.as_str(), icu_bucket[stay.icu_id.as_str()])
            .is_some()
        {
            return Err(Error::JoinMismatch {
                identifier: stay.stay_id.clone(),
                message: "duplicate stay id in stay records".to_owned(),
            });
        }
    }

    // Copy the predictions file verbatim, appending the GCS3 column.
    let mut table = read_table(&args.preds)?;
    let stay_col = table
        .column("stay_id")
        .ok_or_else(|| {
            Error::Config(format!(
                "column \"stay_id\" not found in {}",
                args.preds.display()
            ))
        })?
        .to_vec();
    let mut gcs3_column = Vec::with_capacity(stay_col.len());
    for stay_id in &stay_col {
        let bucket = stay_bucket
            .get(stay_id.as_str())
            .ok_or_else(|| Error::JoinMismatch {
                identifier: stay_id.clone(),
                message: "stay id not present in stay records".to_owned(),
            })?;
        gcs3_column.push(bucket.as_str().to_owned());
    }
    table.headers.push(GCS3_FEATURE.to_owned());
    table.columns.push(gcs3_column);
    write_table(&table, &args.out)
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let config = CohortConfig {
        seed: args.seed,
        n_icus: args.n_icus,
        stays_per_icu: args.stays_per_icu,
        sedation_rate: args.sedation_rate,
        ..CohortConfig::default()
    };
    let stays = simulate_cohort(&config)?;
    write_bytes_atomic(&args.out, &cohort_to_csv(&stays, &config.scorer_coeffs))
}

fn cmd_drift(args: DriftArgs) -> Result<()> {
    let baseline = read_table(&args.baseline)?;
    let current = read_table(&args.current)?;
    if baseline.n_rows() == 0 || current.n_rows() == 0 {
        return Err(Error::EmptyInput {
            what: "drift needs data rows in both files",
        });
    }
    let mut features = Vec::with_capacity(baseline.headers.len());
    for (name, column) in baseline.headers.iter().zip(&baseline.columns) {
        let current_column = current.column(name).ok_or_else(|| {
            Error::Config(format!(
                "column {name:?} present in {} but missing from {}",
                args.baseline.display(),
                args.current.display()
            ))
        })?;
        features.push(column_drift(name, column, current_column, args.bins)?);
    }
    let report = DriftReport::new(args.threshold, features);
    emit(args.out.as_deref(), &report.to_json()?)
}

/// Shared by the one binary target. Kept here so the bin stays a stub.
pub fn main_entry() -> i32 {
    run(std::env::args_os())
}
