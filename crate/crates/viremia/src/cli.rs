//! Command-line surface. Six subcommands tie the library together:
//! `simulate`, `summary`, `estimate`, `subsample`, `experiment`, `bins`.
//!
//! Exit codes: 0 success, 2 usage, 3 I/O, 4 validation.

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::analytics::{bias_experiment, cohort_summary, reference_estimates, trajectory_bins};
use crate::error::Error;
use crate::io::{
    ingest_cohort, render_bias_table, render_bins, render_cohort_csv, render_estimates,
    render_summary, write_atomic, OutputFormat, RunConfig, TimeMode,
};
use crate::model::DEFAULT_DETECTION_LIMIT;
use crate::sampling::{SubsampleMode, SubsampleOutcome, SubsampleSpec};
use crate::simulator::{simulate_cohort, SimParams};

#[derive(Debug, Parser)]
#[command(
    name = "viremia",
    version,
    about = "Cumulative viremia from longitudinal viral loads, with sampling-bias experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic cohort and write it as a longitudinal CSV.
    Simulate(SimulateArgs),
    /// Summarize a cohort: band proportions, follow-up, gaps, person-years.
    Summary(ReportArgs),
    /// Per-individual cumulative viremia from complete series.
    Estimate(ReportArgs),
    /// Thin a cohort once and write the thinned cohort CSV.
    Subsample(SubsampleArgs),
    /// Compare thinned estimates against the full-series reference.
    Experiment(ExperimentArgs),
    /// Mean log10 value per fixed-width time bin, plot-ready.
    Bins(BinsArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Input cohort CSV with header individual_id,t,vl.
    #[arg(long)]
    input: PathBuf,
    /// Detection limit in copies/mL; values below it censor to zero.
    #[arg(long, default_value_t = DEFAULT_DETECTION_LIMIT)]
    detection_limit: f64,
    /// Drop individuals with fewer measurements than this.
    #[arg(long, default_value_t = 2)]
    min_measures: usize,
    /// Interpretation of the t column: iso-dates, numeric-days or
    /// numeric-weeks.
    #[arg(long, default_value_t = TimeMode::NumericDays)]
    time_mode: TimeMode,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Report format: csv, json or markdown-table.
    #[arg(long, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// JSON file of generator parameters; omitted fields use defaults.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Cohort size; overrides the params file.
    #[arg(long)]
    n: Option<usize>,
    /// Grid horizon in weeks; overrides the params file.
    #[arg(long)]
    horizon_weeks: Option<u32>,
    /// Detection limit in copies/mL; overrides the params file.
    #[arg(long)]
    detection_limit: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct SubsampleArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Thinning strategy: count or interval.
    #[arg(long)]
    mode: ModeArg,
    /// Points to keep per individual (count mode).
    #[arg(long)]
    n: Option<usize>,
    /// Minimum gap in weeks (interval mode).
    #[arg(long)]
    gap_weeks: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Thinning strategy: count or interval.
    #[arg(long)]
    mode: ModeArg,
    /// Comma-separated point counts (count mode), e.g. 2,3,4,5.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Comma-separated minimum gaps in weeks (interval mode), e.g. 4,8,12,24.
    #[arg(long, value_delimiter = ',')]
    gap_weeks: Vec<f64>,
    /// Random draws per individual in count mode.
    #[arg(long, default_value_t = 1)]
    replicates: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct BinsArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Bin width in weeks.
    #[arg(long, default_value_t = 4.0)]
    bin_width_weeks: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ModeArg {
    Count,
    Interval,
}

impl FromStr for ModeArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "count" => Ok(ModeArg::Count),
            "interval" => Ok(ModeArg::Interval),
            other => Err(format!(
                "unknown mode '{other}' (expected count or interval)"
            )),
        }
    }
}

impl fmt::Display for ModeArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModeArg::Count => "count",
            ModeArg::Interval => "interval",
        })
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    App(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::App(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::App(Error::Io(_)) => 3,
            Failure::App(_) => 4,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::App(e) => e.to_string(),
        }
    }
}

/// Parses `argv` and runs the selected command, returning the process exit
/// code. Never panics on user error.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests print to stdout and succeed.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.exit_code()
        }
    }
}

fn emit(output: Option<&PathBuf>, body: &str) -> Result<(), Error> {
    match output {
        Some(path) => write_atomic(path, body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn report_config(input: &InputArgs, out: &OutputArgs, seed: u64, replicates: u32) -> RunConfig {
    RunConfig {
        detection_limit: input.detection_limit,
        min_measures: input.min_measures,
        time_mode: input.time_mode,
        seed,
        replicates,
        format: out.format,
    }
}

fn load_cohort(
    input: &InputArgs,
    config: &RunConfig,
) -> Result<Vec<crate::model::IndividualSeries>, Failure> {
    let (cohort, report) = ingest_cohort(&input.input, config)?;
    if report.individuals_dropped > 0 {
        eprintln!(
            "note: dropped {} individual(s) under the minimum-measures rule",
            report.individuals_dropped
        );
    }
    Ok(cohort)
}

fn single_mode(
    mode: ModeArg,
    n: Option<usize>,
    gap_weeks: Option<f64>,
) -> Result<SubsampleMode, Failure> {
    match (mode, n, gap_weeks) {
        (ModeArg::Count, Some(n), None) => Ok(SubsampleMode::Count { n }),
        (ModeArg::Interval, None, Some(g)) => Ok(SubsampleMode::Interval { min_gap_weeks: g }),
        (ModeArg::Count, _, _) => Err(Failure::Usage(
            "--mode count requires --n and forbids --gap-weeks".to_string(),
        )),
        (ModeArg::Interval, _, _) => Err(Failure::Usage(
            "--mode interval requires --gap-weeks and forbids --n".to_string(),
        )),
    }
}

fn mode_list(mode: ModeArg, n: &[usize], gap_weeks: &[f64]) -> Result<Vec<SubsampleMode>, Failure> {
    match mode {
        ModeArg::Count if !n.is_empty() && gap_weeks.is_empty() => {
            Ok(n.iter().map(|&n| SubsampleMode::Count { n }).collect())
        }
        ModeArg::Interval if !gap_weeks.is_empty() && n.is_empty() => Ok(gap_weeks
            .iter()
            .map(|&g| SubsampleMode::Interval { min_gap_weeks: g })
            .collect()),
        ModeArg::Count => Err(Failure::Usage(
            "--mode count requires --n 2,3,... and forbids --gap-weeks".to_string(),
        )),
        ModeArg::Interval => Err(Failure::Usage(
            "--mode interval requires --gap-weeks 4,8,... and forbids --n".to_string(),
        )),
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate(args) => {
            let mut params = match &args.params {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(Error::Io)?;
                    serde_json::from_str::<SimParams>(&text).map_err(|e| {
                        Failure::App(Error::InvalidParams(format!("{}: {e}", path.display())))
                    })?
                }
                None => SimParams::default(),
            };
            if let Some(n) = args.n {
                params.n_individuals = n;
            }
            if let Some(h) = args.horizon_weeks {
                params.horizon_weeks = h;
            }
            if let Some(d) = args.detection_limit {
                params.detection_limit = d;
            }
            let cohort = simulate_cohort(&params, args.seed)?;
            let config = RunConfig {
                detection_limit: params.detection_limit,
                seed: args.seed,
                ..RunConfig::default()
            };
            let sim_json = serde_json::to_string(&params).expect("params serialize");
            let body = render_cohort_csv(&cohort, &config, &[("sim_params", sim_json)]);
            emit(args.output.as_ref(), &body)?;
            Ok(())
        }
        Command::Summary(args) => {
            let config = report_config(&args.input, &args.out, 0, 1);
            let cohort = load_cohort(&args.input, &config)?;
            let summary = cohort_summary(&cohort, config.detection_limit)?;
            emit(
                args.out.output.as_ref(),
                &render_summary(&summary, &config, args.out.format),
            )?;
            Ok(())
        }
        Command::Estimate(args) => {
            let config = report_config(&args.input, &args.out, 0, 1);
            let cohort = load_cohort(&args.input, &config)?;
            let estimates = reference_estimates(&cohort)?;
            emit(
                args.out.output.as_ref(),
                &render_estimates(&estimates, &config, args.out.format),
            )?;
            Ok(())
        }
        Command::Subsample(args) => {
            let mode = single_mode(args.mode, args.n, args.gap_weeks)?;
            let config = RunConfig {
                detection_limit: args.input.detection_limit,
                min_measures: args.input.min_measures,
                time_mode: args.input.time_mode,
                seed: args.seed,
                ..RunConfig::default()
            };
            let cohort = load_cohort(&args.input, &config)?;
            let spec = SubsampleSpec {
                mode,
                seed: args.seed,
                replicate_index: 0,
            };
            let mut thinned = Vec::new();
            let mut left_out = 0usize;
            for series in &cohort {
                if let SubsampleMode::Count { n } = mode {
                    if series.len() < n {
                        left_out += 1;
                        continue;
                    }
                }
                match spec.apply(series)? {
                    SubsampleOutcome::Retained(s) => thinned.push(s),
                    SubsampleOutcome::Excluded => left_out += 1,
                }
            }
            if thinned.is_empty() {
                return Err(Failure::App(Error::InfeasibleSpec {
                    spec: format!("{mode:?}"),
                }));
            }
            let mode_json = serde_json::to_string(&mode).expect("mode serializes");
            let body = render_cohort_csv(
                &thinned,
                &config,
                &[
                    ("subsample_mode", mode_json),
                    ("individuals_left_out", left_out.to_string()),
                ],
            );
            emit(args.output.as_ref(), &body)?;
            Ok(())
        }
        Command::Experiment(args) => {
            let modes = mode_list(args.mode, &args.n, &args.gap_weeks)?;
            let config = report_config(&args.input, &args.out, args.seed, args.replicates);
            let cohort = load_cohort(&args.input, &config)?;
            let table = bias_experiment(&cohort, &modes, args.replicates, args.seed)?;
            emit(
                args.out.output.as_ref(),
                &render_bias_table(&table, &config, args.out.format),
            )?;
            Ok(())
        }
        Command::Bins(args) => {
            let config = report_config(&args.input, &args.out, 0, 1);
            let cohort = load_cohort(&args.input, &config)?;
            let bins = trajectory_bins(&cohort, args.bin_width_weeks)?;
            emit(
                args.out.output.as_ref(),
                &render_bins(&bins, &config, args.out.format),
            )?;
            Ok(())
        }
    }
}
