//! CSV ingestion, report rendering and atomic artifact writing.
//!
//! All artifacts embed a metadata block (tool version, seed, resolved
//! config) and contain nothing volatile, so a rerun with the same seed and
//! config produces byte-identical bytes. CSV metadata rides in `#` comment
//! lines that ingestion skips, which lets any exported cohort be re-ingested
//! unchanged.

use std::fmt;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::analytics::{BiasTable, CohortSummary, IndividualEstimate, TrajectoryBin};
use crate::error::{Error, Result};
use crate::model::{IndividualSeries, DEFAULT_DETECTION_LIMIT};

/// How the `t` column of input files is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeMode {
    /// ISO-8601 calendar dates (`2004-07-19`); offsets become day counts.
    IsoDates,
    #[default]
    NumericDays,
    NumericWeeks,
}

impl FromStr for TimeMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "iso-dates" => Ok(TimeMode::IsoDates),
            "numeric-days" => Ok(TimeMode::NumericDays),
            "numeric-weeks" => Ok(TimeMode::NumericWeeks),
            other => Err(format!(
                "unknown time mode '{other}' (expected iso-dates, numeric-days or numeric-weeks)"
            )),
        }
    }
}

impl fmt::Display for TimeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TimeMode::IsoDates => "iso-dates",
            TimeMode::NumericDays => "numeric-days",
            TimeMode::NumericWeeks => "numeric-weeks",
        })
    }
}

/// Report body format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
    MarkdownTable,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "markdown-table" | "markdown" => Ok(OutputFormat::MarkdownTable),
            other => Err(format!(
                "unknown format '{other}' (expected csv, json or markdown-table)"
            )),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
            OutputFormat::MarkdownTable => "markdown-table",
        })
    }
}

/// Fully resolved run configuration. Every emitted artifact embeds it, so
/// defaults are always explicit in the output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub detection_limit: f64,
    /// Individuals with fewer measurements are dropped at ingestion.
    pub min_measures: usize,
    pub time_mode: TimeMode,
    pub seed: u64,
    pub replicates: u32,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            detection_limit: DEFAULT_DETECTION_LIMIT,
            min_measures: 2,
            time_mode: TimeMode::NumericDays,
            seed: 0,
            replicates: 1,
            format: OutputFormat::Csv,
        }
    }
}

/// What ingestion kept and what it dropped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub rows_read: usize,
    pub individuals_kept: usize,
    pub individuals_dropped: usize,
    pub dropped_ids: Vec<String>,
}

const EXPECTED_HEADER: [&str; 3] = ["individual_id", "t", "vl"];

fn epoch() -> NaiveDate {
    NaiveDate::from_ymd_opt(1970, 1, 1).expect("fixed date is valid")
}

fn parse_time(raw: &str, mode: TimeMode, line: usize) -> Result<f64> {
    let days = match mode {
        TimeMode::IsoDates => {
            let date = NaiveDate::parse_from_str(raw, "%Y-%m-%d").map_err(|e| Error::Ingest {
                line,
                message: format!("unparseable date '{raw}': {e}"),
            })?;
            date.signed_duration_since(epoch()).num_days() as f64
        }
        TimeMode::NumericDays | TimeMode::NumericWeeks => {
            let t: f64 = raw.parse().map_err(|_| Error::Ingest {
                line,
                message: format!("unparseable time '{raw}'"),
            })?;
            if mode == TimeMode::NumericWeeks {
                t * 7.0
            } else {
                t
            }
        }
    };
    if !days.is_finite() {
        return Err(Error::Ingest {
            line,
            message: format!("non-finite time '{raw}'"),
        });
    }
    Ok(days)
}

/// Reads a longitudinal CSV (`individual_id,t,vl`), groups rows by id,
/// builds canonical series and drops individuals under the minimum-measures
/// rule. `#` lines are skipped, so exported artifacts feed straight back in.
pub fn ingest_cohort(
    path: &Path,
    config: &RunConfig,
) -> Result<(Vec<IndividualSeries>, IngestReport)> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Ingest {
                line: 1,
                message: format!("{other:?}"),
            },
        })?;

    let headers = reader.headers().map_err(|e| Error::Ingest {
        line: 1,
        message: e.to_string(),
    })?;
    if headers.iter().collect::<Vec<_>>() != EXPECTED_HEADER {
        return Err(Error::Ingest {
            line: 1,
            message: format!(
                "expected header 'individual_id,t,vl', got '{}'",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    // BTreeMap canonicalizes: output order depends on ids, not row order.
    let mut groups: std::collections::BTreeMap<String, Vec<(f64, f64)>> = Default::default();
    let mut rows_read = 0usize;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line()) as usize;
            Error::Ingest {
                line,
                message: e.to_string(),
            }
        })?;
        let line = record.position().map_or(0, |p| p.line()) as usize;
        if record.len() != 3 {
            return Err(Error::Ingest {
                line,
                message: format!("expected 3 fields, got {}", record.len()),
            });
        }
        let id = record[0].to_string();
        if id.is_empty() {
            return Err(Error::Ingest {
                line,
                message: "empty individual_id".to_string(),
            });
        }
        let t_days = parse_time(&record[1], config.time_mode, line)?;
        let vl: f64 = record[2].parse().map_err(|_| Error::Ingest {
            line,
            message: format!("unparseable viral load '{}'", &record[2]),
        })?;
        if !vl.is_finite() || vl < 0.0 {
            return Err(Error::Ingest {
                line,
                message: format!("viral load must be finite and non-negative, got {vl}"),
            });
        }
        groups.entry(id).or_default().push((t_days, vl));
        rows_read += 1;
    }
    if rows_read == 0 {
        return Err(Error::EmptyInput(format!(
            "no data rows in {}",
            path.display()
        )));
    }

    let min = config.min_measures.max(2);
    let mut cohort = Vec::with_capacity(groups.len());
    let mut dropped_ids = Vec::new();
    for (id, points) in groups {
        if points.len() < min {
            dropped_ids.push(id);
            continue;
        }
        let series = IndividualSeries::from_raw_points(&id, &points, config.detection_limit)
            .map_err(|e| Error::for_series(&id, e))?;
        cohort.push(series);
    }
    let report = IngestReport {
        rows_read,
        individuals_kept: cohort.len(),
        individuals_dropped: dropped_ids.len(),
        dropped_ids,
    };
    Ok((cohort, report))
}

fn metadata_pairs(config: &RunConfig, extra: &[(&str, String)]) -> Vec<(String, String)> {
    let mut pairs = vec![
        (
            "tool".to_string(),
            format!("viremia {}", env!("CARGO_PKG_VERSION")),
        ),
        ("seed".to_string(), config.seed.to_string()),
        (
            "config".to_string(),
            serde_json::to_string(config).expect("config serializes"),
        ),
    ];
    for (k, v) in extra {
        pairs.push((k.to_string(), v.clone()));
    }
    pairs
}

fn csv_comment_block(config: &RunConfig, extra: &[(&str, String)]) -> String {
    let mut out = String::new();
    for (k, v) in metadata_pairs(config, extra) {
        out.push_str(&format!("# {k}: {v}\n"));
    }
    out
}

fn markdown_preamble(config: &RunConfig, extra: &[(&str, String)]) -> String {
    let mut out = String::new();
    for (k, v) in metadata_pairs(config, extra) {
        out.push_str(&format!("- {k}: `{v}`\n"));
    }
    out.push('\n');
    out
}

fn json_document(
    config: &RunConfig,
    extra: &[(&str, String)],
    body_key: &str,
    body: serde_json::Value,
) -> String {
    let mut metadata = serde_json::Map::new();
    metadata.insert(
        "tool".to_string(),
        serde_json::json!(format!("viremia {}", env!("CARGO_PKG_VERSION"))),
    );
    metadata.insert("seed".to_string(), serde_json::json!(config.seed));
    metadata.insert(
        "config".to_string(),
        serde_json::to_value(config).expect("config serializes"),
    );
    for (k, v) in extra {
        metadata.insert((*k).to_string(), serde_json::json!(v));
    }
    let doc = serde_json::json!({ "metadata": metadata, body_key: body });
    let mut s = serde_json::to_string_pretty(&doc).expect("document serializes");
    s.push('\n');
    s
}

/// Renders a cohort as the longitudinal CSV (`t` in days, full precision).
pub fn render_cohort_csv(
    cohort: &[IndividualSeries],
    config: &RunConfig,
    extra: &[(&str, String)],
) -> String {
    let mut out = csv_comment_block(config, extra);
    out.push_str("individual_id,t,vl\n");
    for series in cohort {
        for m in series.measurements() {
            out.push_str(&format!("{},{},{}\n", series.id(), m.t_days, m.vl_copies));
        }
    }
    out
}

fn pct(v: i64) -> String {
    format!("{v:+}%")
}

/// Renders per-individual estimate rows.
pub fn render_estimates(
    rows: &[IndividualEstimate],
    config: &RunConfig,
    format: OutputFormat,
) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = csv_comment_block(config, &[]);
            out.push_str("individual_id,n_points,followup_years,cvl,cvl_fu,method\n");
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.individual_id, r.n_points, r.followup_years, r.cvl, r.cvl_fu, r.method
                ));
            }
            out
        }
        OutputFormat::Json => json_document(
            config,
            &[],
            "rows",
            serde_json::to_value(rows).expect("rows serialize"),
        ),
        OutputFormat::MarkdownTable => {
            let mut out = markdown_preamble(config, &[]);
            out.push_str("| individual | points | follow-up (yr) | cVL | cVL_FU | method |\n");
            out.push_str("|---|---|---|---|---|---|\n");
            for r in rows {
                out.push_str(&format!(
                    "| {} | {} | {:.3} | {:.3} | {:.3} | {} |\n",
                    r.individual_id, r.n_points, r.followup_years, r.cvl, r.cvl_fu, r.method
                ));
            }
            out
        }
    }
}

/// Renders a bias table. The CSV layout is
/// `strategy,param,effective_n,cvl_median,cvl_q1,cvl_q3,pct_change,cvl_fu_median,cvl_fu_q1,cvl_fu_q3,pct_change_fu`.
pub fn render_bias_table(table: &BiasTable, config: &RunConfig, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = csv_comment_block(config, &[]);
            out.push_str(
                "strategy,param,effective_n,cvl_median,cvl_q1,cvl_q3,pct_change,\
                 cvl_fu_median,cvl_fu_q1,cvl_fu_q3,pct_change_fu\n",
            );
            for r in &table.rows {
                let param = r.param.map(|p| p.to_string()).unwrap_or_default();
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{}\n",
                    r.strategy,
                    param,
                    r.effective_n,
                    r.cvl.median,
                    r.cvl.q1,
                    r.cvl.q3,
                    r.pct_change,
                    r.cvl_fu.median,
                    r.cvl_fu.q1,
                    r.cvl_fu.q3,
                    r.pct_change_fu
                ));
            }
            out
        }
        OutputFormat::Json => json_document(
            config,
            &[],
            "rows",
            serde_json::to_value(&table.rows).expect("rows serialize"),
        ),
        OutputFormat::MarkdownTable => {
            let mut out = markdown_preamble(config, &[]);
            out.push_str(
                "| strategy | param | n | cVL median (Q1, Q3) | change | cVL_FU median (Q1, Q3) | change |\n",
            );
            out.push_str("|---|---|---|---|---|---|---|\n");
            for r in &table.rows {
                let param = r.param.map(|p| p.to_string()).unwrap_or_default();
                out.push_str(&format!(
                    "| {} | {} | {} | {:.2} ({:.2}, {:.2}) | {} | {:.2} ({:.2}, {:.2}) | {} |\n",
                    r.strategy,
                    param,
                    r.effective_n,
                    r.cvl.median,
                    r.cvl.q1,
                    r.cvl.q3,
                    pct(r.pct_change),
                    r.cvl_fu.median,
                    r.cvl_fu.q1,
                    r.cvl_fu.q3,
                    pct(r.pct_change_fu)
                ));
            }
            out
        }
    }
}

/// Renders a cohort summary as `statistic,value` rows (CSV), a JSON object,
/// or a two-column table.
pub fn render_summary(summary: &CohortSummary, config: &RunConfig, format: OutputFormat) -> String {
    let fields: Vec<(&str, String)> = vec![
        ("n_individuals", summary.n_individuals.to_string()),
        ("n_measurements", summary.n_measurements.to_string()),
        (
            "proportion_below_limit",
            summary.proportion_below_limit.to_string(),
        ),
        (
            "proportion_mid_band",
            summary.proportion_mid_band.to_string(),
        ),
        (
            "proportion_high_band",
            summary.proportion_high_band.to_string(),
        ),
        (
            "measures_median",
            summary.measures_per_individual.median.to_string(),
        ),
        (
            "measures_q1",
            summary.measures_per_individual.q1.to_string(),
        ),
        (
            "measures_q3",
            summary.measures_per_individual.q3.to_string(),
        ),
        (
            "followup_years_median",
            summary.followup_years.median.to_string(),
        ),
        ("followup_years_q1", summary.followup_years.q1.to_string()),
        ("followup_years_q3", summary.followup_years.q3.to_string()),
        (
            "followup_weeks_median",
            summary.followup_weeks.median.to_string(),
        ),
        ("followup_weeks_q1", summary.followup_weeks.q1.to_string()),
        ("followup_weeks_q3", summary.followup_weeks.q3.to_string()),
        (
            "median_gap_weeks_median",
            summary.median_interobservation_weeks.median.to_string(),
        ),
        (
            "median_gap_weeks_q1",
            summary.median_interobservation_weeks.q1.to_string(),
        ),
        (
            "median_gap_weeks_q3",
            summary.median_interobservation_weeks.q3.to_string(),
        ),
        ("total_person_years", summary.total_person_years.to_string()),
    ];
    match format {
        OutputFormat::Csv => {
            let mut out = csv_comment_block(config, &[]);
            out.push_str("statistic,value\n");
            for (k, v) in fields {
                out.push_str(&format!("{k},{v}\n"));
            }
            out
        }
        OutputFormat::Json => json_document(
            config,
            &[],
            "summary",
            serde_json::to_value(summary).expect("summary serializes"),
        ),
        OutputFormat::MarkdownTable => {
            let mut out = markdown_preamble(config, &[]);
            out.push_str("| statistic | value |\n|---|---|\n");
            for (k, v) in fields {
                out.push_str(&format!("| {k} | {v} |\n"));
            }
            out
        }
    }
}

/// Renders trajectory bins.
pub fn render_bins(bins: &[TrajectoryBin], config: &RunConfig, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = csv_comment_block(config, &[]);
            out.push_str("midpoint_weeks,mean_log_value,count\n");
            for b in bins {
                out.push_str(&format!(
                    "{},{},{}\n",
                    b.midpoint_weeks, b.mean_log_value, b.count
                ));
            }
            out
        }
        OutputFormat::Json => json_document(
            config,
            &[],
            "rows",
            serde_json::to_value(bins).expect("bins serialize"),
        ),
        OutputFormat::MarkdownTable => {
            let mut out = markdown_preamble(config, &[]);
            out.push_str("| midpoint (weeks) | mean log10 VL | count |\n|---|---|---|\n");
            for b in bins {
                out.push_str(&format!(
                    "| {} | {:.3} | {} |\n",
                    b.midpoint_weeks, b.mean_log_value, b.count
                ));
            }
            out
        }
    }
}

/// Writes `content` to `path` atomically: the bytes land in a temporary file
/// in the same directory, then rename into place, so an interrupted run
/// never leaves a truncated artifact.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(content.as_bytes())?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
