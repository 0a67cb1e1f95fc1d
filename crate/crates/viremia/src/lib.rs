//! Cumulative viremia from longitudinal HIV viral-load series.
//!
//! Cumulative viremia is the area under an individual's log10 viral-load
//! curve, a copy-years-style exposure measure. This crate computes it by
//! trapezoidal quadrature over irregularly spaced, detection-limit-censored
//! measurements, and ships the machinery to study how sparse sampling
//! distorts it:
//!
//! * [`model`]: canonical series construction (sorting, origin shift,
//!   censoring) and time-unit conventions;
//! * [`estimators`]: trapezoid, uniform-grid trapezoid and composite
//!   Simpson quadrature with follow-up standardization;
//! * [`sampling`]: deterministic count- and interval-based thinning;
//! * [`simulator`]: a seeded synthetic cohort generator on a weekly grid;
//! * [`analytics`]: cohort summaries, the reference-vs-subsample bias
//!   experiment, and plot-ready trajectory bins;
//! * [`io`]: longitudinal CSV ingestion, report rendering, atomic writes;
//! * [`cli`]: the `viremia` command-line tool built from the above.
//!
//! ```
//! use viremia::{cvl_trapezoid, IndividualSeries};
//!
//! let series = IndividualSeries::from_raw_points(
//!     "p1",
//!     &[(0.0, 100_000.0), (182.0, 40.0), (364.0, 10_000.0)],
//!     50.0,
//! )?;
//! let estimate = cvl_trapezoid(&series)?;
//! assert!(estimate.cvl > 0.0 && estimate.cvl_fu > estimate.cvl);
//! # Ok::<(), viremia::Error>(())
//! ```

pub mod analytics;
pub mod cli;
pub mod error;
pub mod estimators;
pub mod io;
pub mod model;
pub mod sampling;
pub mod simulator;

pub use analytics::{
    bias_experiment, cohort_summary, median_iqr, percent_change, reference_estimates,
    trajectory_bins, BiasRow, BiasTable, CohortSummary, IndividualEstimate, Quartiles,
    TrajectoryBin,
};
pub use error::{Error, Result};
pub use estimators::{cvl_simpson, cvl_trapezoid, cvl_uniform_trapezoid, CvlEstimate, Method};
pub use io::{ingest_cohort, IngestReport, OutputFormat, RunConfig, TimeMode};
pub use model::{
    censored_log10, IndividualSeries, TimeUnitPolicy, VLMeasurement, DEFAULT_DETECTION_LIMIT,
};
pub use sampling::{
    derive_stream, mean_interval_weeks, subsample_count, subsample_interval, ShortFollowupPolicy,
    SubsampleMode, SubsampleOutcome, SubsampleSpec,
};
pub use simulator::{simulate_cohort, simulate_individual, synthetic_id, SimParams};
