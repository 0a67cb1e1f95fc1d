//! Cohort-level summaries, the subsampling bias experiment, and plot-ready
//! trajectory bins.
//!
//! The bias experiment compares cumulative viremia computed from full series
//! against the same quantity computed from thinned series, pooling estimates
//! across all individuals and replicates before summarizing, so each
//! individual contributes one value per replicate draw.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{cvl_trapezoid, Method};
use crate::model::{IndividualSeries, TimeUnitPolicy};
use crate::sampling::{SubsampleMode, SubsampleOutcome, SubsampleSpec};

/// Upper bound of the mid viral-load band, copies/mL. Values above it count
/// as high viremia; the boundary itself belongs to the mid band.
pub const MID_BAND_UPPER: f64 = 1000.0;

/// Median with interquartile range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quartiles {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

/// Quantiles by linear interpolation between order statistics: quantile `p`
/// sits at position `p * (N - 1)` of the sorted values.
pub fn median_iqr(values: &[f64]) -> Result<Quartiles> {
    if values.is_empty() {
        return Err(Error::EmptyInput("no values to summarize".to_string()));
    }
    if let Some(&bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidValue {
            what: "quantile input",
            value: bad,
        });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let at = |p: f64| {
        let pos = p * (sorted.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
    };
    Ok(Quartiles {
        q1: at(0.25),
        median: at(0.5),
        q3: at(0.75),
    })
}

/// Signed percent change of `subsample` against `reference`, rounded half
/// away from zero. The reference must be strictly positive.
pub fn percent_change(reference: f64, subsample: f64) -> Result<i64> {
    if !(reference.is_finite() && reference > 0.0) {
        return Err(Error::UndefinedReference { reference });
    }
    if !subsample.is_finite() {
        return Err(Error::InvalidValue {
            what: "subsample median",
            value: subsample,
        });
    }
    Ok((100.0 * (subsample - reference) / reference).round() as i64)
}

/// Descriptive statistics for one cohort.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortSummary {
    pub n_individuals: usize,
    pub n_measurements: usize,
    /// Share of raw values strictly below the detection limit.
    pub proportion_below_limit: f64,
    /// Share of raw values in `[limit, 1000]`, both boundaries included.
    pub proportion_mid_band: f64,
    /// Share of raw values strictly above 1000.
    pub proportion_high_band: f64,
    pub measures_per_individual: Quartiles,
    pub followup_years: Quartiles,
    pub followup_weeks: Quartiles,
    /// Cohort quartiles of each individual's median gap between
    /// observations, in weeks.
    pub median_interobservation_weeks: Quartiles,
    pub total_person_years: f64,
}

pub fn cohort_summary(cohort: &[IndividualSeries], detection_limit: f64) -> Result<CohortSummary> {
    if cohort.is_empty() {
        return Err(Error::EmptyInput("cohort has no individuals".to_string()));
    }
    if !(detection_limit.is_finite() && detection_limit >= 1.0) {
        return Err(Error::DetectionLimit {
            limit: detection_limit,
        });
    }

    let mut n_measurements = 0usize;
    let (mut below, mut mid) = (0usize, 0usize);
    let mut measures: Vec<f64> = Vec::with_capacity(cohort.len());
    let mut fu_years: Vec<f64> = Vec::with_capacity(cohort.len());
    let mut median_gaps: Vec<f64> = Vec::with_capacity(cohort.len());

    for series in cohort {
        n_measurements += series.len();
        for m in series.measurements() {
            if m.vl_copies < detection_limit {
                below += 1;
            } else if m.vl_copies <= MID_BAND_UPPER {
                mid += 1;
            }
        }
        measures.push(series.len() as f64);
        fu_years.push(series.followup_years());
        let gaps: Vec<f64> = series
            .gaps_days()
            .map(TimeUnitPolicy::days_to_weeks)
            .collect();
        median_gaps.push(median_iqr(&gaps)?.median);
    }

    let total = n_measurements as f64;
    let fu_weeks: Vec<f64> = fu_years
        .iter()
        .map(|&y| TimeUnitPolicy::days_to_weeks(TimeUnitPolicy::years_to_days(y)))
        .collect();
    Ok(CohortSummary {
        n_individuals: cohort.len(),
        n_measurements,
        proportion_below_limit: below as f64 / total,
        proportion_mid_band: mid as f64 / total,
        proportion_high_band: (n_measurements - below - mid) as f64 / total,
        measures_per_individual: median_iqr(&measures)?,
        followup_years: median_iqr(&fu_years)?,
        followup_weeks: median_iqr(&fu_weeks)?,
        median_interobservation_weeks: median_iqr(&median_gaps)?,
        total_person_years: fu_years.iter().sum(),
    })
}

/// One per-individual estimate row, flat so reports can emit it directly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndividualEstimate {
    pub individual_id: String,
    pub n_points: usize,
    pub followup_years: f64,
    pub cvl: f64,
    pub cvl_fu: f64,
    pub method: Method,
}

/// Trapezoid estimates for every individual, using every measurement.
pub fn reference_estimates(cohort: &[IndividualSeries]) -> Result<Vec<IndividualEstimate>> {
    if cohort.is_empty() {
        return Err(Error::EmptyInput("cohort has no individuals".to_string()));
    }
    cohort
        .par_iter()
        .map(|series| {
            let est = cvl_trapezoid(series).map_err(|e| Error::for_series(series.id(), e))?;
            Ok(IndividualEstimate {
                individual_id: series.id().to_string(),
                n_points: est.n_points,
                followup_years: series.followup_years(),
                cvl: est.cvl,
                cvl_fu: est.cvl_fu,
                method: est.method,
            })
        })
        .collect()
}

/// One row of a bias table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasRow {
    /// `reference`, `count` or `interval`.
    pub strategy: String,
    /// Points kept (count mode) or minimum gap in weeks (interval mode);
    /// absent on the reference row.
    pub param: Option<f64>,
    /// Individuals that actually contributed estimates.
    pub effective_n: usize,
    pub cvl: Quartiles,
    pub cvl_fu: Quartiles,
    /// Percent change of the raw cVL median against the reference row,
    /// computed from unrounded medians.
    pub pct_change: i64,
    /// Same, for the follow-up-standardized median.
    pub pct_change_fu: i64,
}

/// Reference row plus one row per thinning spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasTable {
    pub rows: Vec<BiasRow>,
}

fn pooled_row(
    strategy: &str,
    param: Option<f64>,
    effective_n: usize,
    pooled: &[(f64, f64)],
    reference: Option<(f64, f64)>,
) -> Result<BiasRow> {
    let cvl_values: Vec<f64> = pooled.iter().map(|p| p.0).collect();
    let fu_values: Vec<f64> = pooled.iter().map(|p| p.1).collect();
    let cvl = median_iqr(&cvl_values)?;
    let cvl_fu = median_iqr(&fu_values)?;
    let (pct_change, pct_change_fu) = match reference {
        Some((ref_cvl, ref_fu)) => (
            percent_change(ref_cvl, cvl.median)?,
            percent_change(ref_fu, cvl_fu.median)?,
        ),
        None => (0, 0),
    };
    Ok(BiasRow {
        strategy: strategy.to_string(),
        param,
        effective_n,
        cvl,
        cvl_fu,
        pct_change,
        pct_change_fu,
    })
}

/// Runs the full bias experiment: a reference row from complete series, then
/// one row per mode.
///
/// Count-mode rows skip individuals with fewer points than requested and
/// draw fresh interior points per replicate; estimates are pooled across
/// individuals and replicates before summarizing. Interval thinning is
/// deterministic, so replicates do not apply; individuals whose follow-up is
/// shorter than the gap are dropped. `effective_n` records the individuals
/// that contributed. Percent changes are computed from unrounded medians.
pub fn bias_experiment(
    cohort: &[IndividualSeries],
    modes: &[SubsampleMode],
    replicates: u32,
    master_seed: u64,
) -> Result<BiasTable> {
    if cohort.is_empty() {
        return Err(Error::EmptyInput("cohort has no individuals".to_string()));
    }
    if modes.is_empty() {
        return Err(Error::EmptyInput("no subsample specs given".to_string()));
    }
    if replicates < 1 {
        return Err(Error::InvalidParams(
            "replicates must be at least 1".to_string(),
        ));
    }
    for mode in modes {
        mode.validate()?;
    }

    let estimate = |series: &IndividualSeries| -> Result<(f64, f64)> {
        let est = cvl_trapezoid(series).map_err(|e| Error::for_series(series.id(), e))?;
        Ok((est.cvl, est.cvl_fu))
    };

    let reference_pool: Vec<(f64, f64)> = cohort
        .par_iter()
        .map(estimate)
        .collect::<Result<Vec<_>>>()?;
    let reference_row = pooled_row("reference", None, cohort.len(), &reference_pool, None)?;
    let ref_medians = (reference_row.cvl.median, reference_row.cvl_fu.median);

    let mut rows = vec![reference_row];
    for mode in modes {
        // Interval thinning has no randomness; one pass covers every
        // replicate.
        let effective_replicates = match mode {
            SubsampleMode::Count { .. } => replicates,
            SubsampleMode::Interval { .. } => 1,
        };
        let per_individual: Vec<Vec<(f64, f64)>> = cohort
            .par_iter()
            .map(|series| -> Result<Vec<(f64, f64)>> {
                if let SubsampleMode::Count { n } = mode {
                    if series.len() < *n {
                        return Ok(Vec::new());
                    }
                }
                let mut draws = Vec::with_capacity(effective_replicates as usize);
                for r in 0..effective_replicates {
                    let spec = SubsampleSpec {
                        mode: *mode,
                        seed: master_seed,
                        replicate_index: r,
                    };
                    match spec.apply(series)? {
                        SubsampleOutcome::Retained(sub) => draws.push(estimate(&sub)?),
                        SubsampleOutcome::Excluded => return Ok(Vec::new()),
                    }
                }
                Ok(draws)
            })
            .collect::<Result<Vec<_>>>()?;

        let effective_n = per_individual.iter().filter(|d| !d.is_empty()).count();
        if effective_n == 0 {
            return Err(Error::InfeasibleSpec {
                spec: format!("{mode:?}"),
            });
        }
        let pooled: Vec<(f64, f64)> = per_individual.into_iter().flatten().collect();
        rows.push(pooled_row(
            mode.strategy_label(),
            Some(mode.param()),
            effective_n,
            &pooled,
            Some(ref_medians),
        )?);
    }
    Ok(BiasTable { rows })
}

/// One time bin of pooled log values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryBin {
    pub midpoint_weeks: f64,
    pub mean_log_value: f64,
    pub count: usize,
}

/// Pools every measurement of every individual into fixed-width time bins
/// and averages the censored log values per bin. Bins that receive no
/// measurements are omitted.
pub fn trajectory_bins(
    cohort: &[IndividualSeries],
    bin_width_weeks: f64,
) -> Result<Vec<TrajectoryBin>> {
    if !(bin_width_weeks.is_finite() && bin_width_weeks > 0.0) {
        return Err(Error::InvalidParams(format!(
            "bin width must be positive, got {bin_width_weeks}"
        )));
    }
    let mut bins: std::collections::BTreeMap<u64, (f64, usize)> = std::collections::BTreeMap::new();
    for series in cohort {
        for m in series.measurements() {
            let k = (m.t_weeks() / bin_width_weeks).floor() as u64;
            let slot = bins.entry(k).or_insert((0.0, 0));
            slot.0 += m.log_value;
            slot.1 += 1;
        }
    }
    Ok(bins
        .into_iter()
        .map(|(k, (sum, count))| TrajectoryBin {
            midpoint_weeks: (k as f64 + 0.5) * bin_width_weeks,
            mean_log_value: sum / count as f64,
            count,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn q(q1: f64, median: f64, q3: f64) -> Quartiles {
        Quartiles { q1, median, q3 }
    }

    #[test]
    fn quartiles_of_small_sequences() {
        assert_eq!(median_iqr(&[5.0]).unwrap(), q(5.0, 5.0, 5.0));
        assert_eq!(median_iqr(&[1.0, 2.0, 3.0]).unwrap(), q(1.5, 2.0, 2.5));
        assert_eq!(
            median_iqr(&[1.0, 2.0, 3.0, 4.0]).unwrap(),
            q(1.75, 2.5, 3.25)
        );
    }

    #[test]
    fn quartiles_reject_empty_and_non_finite() {
        assert!(matches!(median_iqr(&[]), Err(Error::EmptyInput(_))));
        assert!(matches!(
            median_iqr(&[1.0, f64::NAN]),
            Err(Error::InvalidValue { .. })
        ));
    }

    proptest! {
        #[test]
        fn quartiles_ignore_order_and_track_shifts(
            mut values in proptest::collection::vec(-1e6..1e6f64, 1..40),
            shift in -1e3..1e3f64,
        ) {
            let base = median_iqr(&values).unwrap();
            values.reverse();
            prop_assert_eq!(median_iqr(&values).unwrap(), base);
            let shifted: Vec<f64> = values.iter().map(|v| v + shift).collect();
            let moved = median_iqr(&shifted).unwrap();
            prop_assert!((moved.median - (base.median + shift)).abs() < 1e-6);
            prop_assert!((moved.q1 - (base.q1 + shift)).abs() < 1e-6);
            prop_assert!((moved.q3 - (base.q3 + shift)).abs() < 1e-6);
        }
    }

    #[test]
    fn percent_change_rounds_half_away_from_zero() {
        assert_eq!(percent_change(2.08, 2.99).unwrap(), 44);
        assert_eq!(percent_change(0.49, 2.17).unwrap(), 343);
        assert_eq!(percent_change(7.39, 7.52).unwrap(), 2);
        assert_eq!(percent_change(3.7, 3.7).unwrap(), 0);
        // 1/200 puts the change exactly on the half point.
        assert_eq!(percent_change(200.0, 201.0).unwrap(), 1);
        assert_eq!(percent_change(200.0, 199.0).unwrap(), -1);
    }

    #[test]
    fn percent_change_requires_positive_reference() {
        assert!(matches!(
            percent_change(0.0, 1.0),
            Err(Error::UndefinedReference { .. })
        ));
        assert!(matches!(
            percent_change(-2.0, 1.0),
            Err(Error::UndefinedReference { .. })
        ));
    }

    fn series(id: &str, points: &[(f64, f64)]) -> IndividualSeries {
        IndividualSeries::from_raw_points(id, points, 50.0).unwrap()
    }

    #[test]
    fn person_years_add_up() {
        let cohort = vec![
            series("a", &[(0.0, 100.0), (365.25, 100.0)]),
            series("b", &[(0.0, 100.0), (913.125, 100.0)]),
        ];
        let s = cohort_summary(&cohort, 50.0).unwrap();
        assert_relative_eq!(s.total_person_years, 3.5, max_relative = 1e-12);
        assert_eq!(s.n_individuals, 2);
        assert_eq!(s.n_measurements, 4);
    }

    #[test]
    fn band_boundaries_follow_the_stated_rule() {
        let cohort = vec![series(
            "a",
            &[(0.0, 49.0), (7.0, 50.0), (14.0, 1000.0), (21.0, 1001.0)],
        )];
        let s = cohort_summary(&cohort, 50.0).unwrap();
        assert_eq!(s.proportion_below_limit, 0.25);
        assert_eq!(s.proportion_mid_band, 0.50);
        assert_eq!(s.proportion_high_band, 0.25);
        let total = s.proportion_below_limit + s.proportion_mid_band + s.proportion_high_band;
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn summary_tracks_gaps_and_followup() {
        // Weekly grid for 10 weeks: median gap 1 week, follow-up 10 weeks.
        let points: Vec<(f64, f64)> = (0..=10).map(|w| (w as f64 * 7.0, 200.0)).collect();
        let cohort = vec![IndividualSeries::from_raw_points("a", &points, 50.0).unwrap()];
        let s = cohort_summary(&cohort, 50.0).unwrap();
        assert_eq!(s.median_interobservation_weeks.median, 1.0);
        assert_relative_eq!(s.followup_weeks.median, 10.0, max_relative = 1e-12);
        assert_eq!(s.measures_per_individual.median, 11.0);
    }

    #[test]
    fn reference_estimates_on_constant_and_suppressed_series() {
        let cohort = vec![
            series("flat", &[(0.0, 10_000.0), (365.25, 10_000.0)]),
            series("suppressed", &[(0.0, 10.0), (365.25, 20.0)]),
        ];
        let ests = reference_estimates(&cohort).unwrap();
        assert_eq!(ests[0].individual_id, "flat");
        assert_relative_eq!(ests[0].cvl, 4.0, max_relative = 1e-12);
        assert_relative_eq!(ests[0].cvl_fu, 4.0, max_relative = 1e-12);
        assert_eq!(ests[1].cvl, 0.0);
        assert_eq!(ests[1].cvl_fu, 0.0);
        assert_eq!(ests[0].method, Method::Trapezoid);
    }

    /// Three equal-length series on a weekly grid with varying levels.
    fn uniform_cohort() -> Vec<IndividualSeries> {
        (0..3)
            .map(|i| {
                let points: Vec<(f64, f64)> = (0..5)
                    .map(|w| {
                        (
                            w as f64 * 7.0,
                            10f64.powf(3.0 + i as f64 * 0.3 + w as f64 * 0.1),
                        )
                    })
                    .collect();
                IndividualSeries::from_raw_points(format!("u{i}"), &points, 50.0).unwrap()
            })
            .collect()
    }

    #[test]
    fn full_length_count_subsample_reproduces_the_reference_row() {
        let cohort = uniform_cohort();
        let table = bias_experiment(&cohort, &[SubsampleMode::Count { n: 5 }], 1, 42).unwrap();
        assert_eq!(table.rows.len(), 2);
        let (reference, sub) = (&table.rows[0], &table.rows[1]);
        assert_eq!(reference.pct_change, 0);
        assert_eq!(reference.pct_change_fu, 0);
        assert_eq!(sub.cvl, reference.cvl);
        assert_eq!(sub.cvl_fu, reference.cvl_fu);
        assert_eq!(sub.pct_change, 0);
        assert_eq!(sub.effective_n, 3);
        assert_eq!(sub.param, Some(5.0));
    }

    #[test]
    fn convex_series_bias_is_positive_at_n_two() {
        // Interior point censored to zero sits strictly below the chord.
        let cohort = vec![
            series(
                "v1",
                &[(0.0, 10_000.0), (182.625, 10.0), (365.25, 10_000.0)],
            ),
            series(
                "v2",
                &[(0.0, 31_623.0), (182.625, 20.0), (365.25, 31_623.0)],
            ),
        ];
        let table = bias_experiment(&cohort, &[SubsampleMode::Count { n: 2 }], 1, 1).unwrap();
        let (reference, sub) = (&table.rows[0], &table.rows[1]);
        assert!(sub.cvl.median > reference.cvl.median);
        assert!(sub.pct_change > 0);
        assert!(sub.pct_change_fu > 0);
    }

    #[test]
    fn count_mode_pools_across_replicates() {
        // One series, two distinct interior choices: with many replicates
        // both outcomes enter the pool, so the IQR is non-degenerate.
        let cohort = vec![series(
            "p",
            &[
                (0.0, 10_000.0),
                (7.0, 100.0),
                (14.0, 31_623.0),
                (21.0, 10_000.0),
            ],
        )];
        let table = bias_experiment(&cohort, &[SubsampleMode::Count { n: 3 }], 64, 5).unwrap();
        let sub = &table.rows[1];
        assert!(sub.cvl.q1 < sub.cvl.q3);
        let again = bias_experiment(&cohort, &[SubsampleMode::Count { n: 3 }], 64, 5).unwrap();
        assert_eq!(table, again);
    }

    #[test]
    fn count_mode_skips_short_series() {
        let mut cohort = uniform_cohort(); // lengths 5
        cohort.push(series(
            "short",
            &[(0.0, 100.0), (7.0, 100.0), (14.0, 100.0)],
        ));
        let table = bias_experiment(&cohort, &[SubsampleMode::Count { n: 4 }], 2, 3).unwrap();
        assert_eq!(table.rows[1].effective_n, 3);
    }

    #[test]
    fn interval_mode_drops_short_followups_and_ignores_replicates() {
        let mut cohort = uniform_cohort(); // 4-week span each
        cohort.push(series("tiny", &[(0.0, 100.0), (7.0, 100.0)]));
        let gap = SubsampleMode::Interval { min_gap_weeks: 2.0 };
        let a = bias_experiment(&cohort, &[gap], 1, 3).unwrap();
        let b = bias_experiment(&cohort, &[gap], 10, 3).unwrap();
        assert_eq!(a.rows[1].effective_n, 3);
        assert_eq!(a, b);
    }

    #[test]
    fn experiment_rejects_degenerate_inputs() {
        let cohort = uniform_cohort();
        assert!(matches!(
            bias_experiment(&cohort, &[], 1, 0),
            Err(Error::EmptyInput(_))
        ));
        assert!(matches!(
            bias_experiment(&cohort, &[SubsampleMode::Count { n: 3 }], 0, 0),
            Err(Error::InvalidParams(_))
        ));
        assert!(matches!(
            bias_experiment(&cohort, &[SubsampleMode::Count { n: 9 }], 1, 0),
            Err(Error::InfeasibleSpec { .. })
        ));
        assert!(matches!(
            bias_experiment(&[], &[SubsampleMode::Count { n: 2 }], 1, 0),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn bins_keep_isolated_points_as_is() {
        // One point per 4-week bin at weeks 1, 5, 9.
        let cohort = vec![series(
            "a",
            &[(7.0, 1000.0), (35.0, 10_000.0), (63.0, 100.0)],
        )];
        let bins = trajectory_bins(&cohort, 4.0).unwrap();
        assert_eq!(bins.len(), 3);
        assert_eq!(bins[0].midpoint_weeks, 2.0);
        assert_eq!(bins[1].midpoint_weeks, 6.0);
        assert_eq!(bins[2].midpoint_weeks, 10.0);
        assert_relative_eq!(bins[0].mean_log_value, 3.0, max_relative = 1e-12);
        assert!(bins.iter().all(|b| b.count == 1));
    }

    #[test]
    fn bins_average_across_individuals_pointwise() {
        let cohort = vec![
            series("a", &[(0.0, 100.0), (28.0, 10_000.0)]),
            series("b", &[(0.0, 10_000.0), (28.0, 1_000_000.0)]),
        ];
        let bins = trajectory_bins(&cohort, 1.0).unwrap();
        assert_eq!(bins.len(), 2);
        assert_relative_eq!(bins[0].mean_log_value, 3.0, max_relative = 1e-12);
        assert_relative_eq!(bins[1].mean_log_value, 5.0, max_relative = 1e-12);
        assert_eq!(bins[0].count, 2);
    }

    #[test]
    fn bins_match_an_independent_group_by() {
        let params = crate::simulator::SimParams {
            n_individuals: 12,
            horizon_weeks: 30,
            ..Default::default()
        };
        let cohort = crate::simulator::simulate_cohort(&params, 17).unwrap();
        let width = 4.0;
        let bins = trajectory_bins(&cohort, width).unwrap();

        // Linear-scan oracle: filter every measurement per candidate bin.
        let mut expected = Vec::new();
        for k in 0..20u64 {
            let (lo, hi) = (k as f64 * width, (k + 1) as f64 * width);
            let mut sum = 0.0;
            let mut count = 0usize;
            for s in &cohort {
                for m in s.measurements() {
                    let w = m.t_weeks();
                    if w >= lo && w < hi {
                        sum += m.log_value;
                        count += 1;
                    }
                }
            }
            if count > 0 {
                expected.push(((k as f64 + 0.5) * width, sum / count as f64, count));
            }
        }
        assert_eq!(bins.len(), expected.len());
        for (b, (mid, mean, count)) in bins.iter().zip(expected) {
            assert_eq!(b.midpoint_weeks, mid);
            assert_eq!(b.count, count);
            assert_relative_eq!(b.mean_log_value, mean, max_relative = 1e-12);
        }
    }

    #[test]
    fn bins_reject_non_positive_width() {
        assert!(matches!(
            trajectory_bins(&[], 0.0),
            Err(Error::InvalidParams(_))
        ));
    }
}
