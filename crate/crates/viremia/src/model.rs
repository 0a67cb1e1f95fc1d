//! Core domain types: timestamped viral-load measurements, per-individual
//! series, detection-limit censoring and time-unit conversions.
//!
//! Times are carried internally in days from each individual's first
//! observation. Viral loads are carried both as raw copies/mL and as the
//! censored log10 value actually used for integration: values below the
//! detection limit are set to zero in the log domain, values at or above it
//! are `log10(copies)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fixed conversion factors between the supported time units.
///
/// The canonical internal unit is days; weeks and years are derived by exact
/// multiplication or division with these constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeUnitPolicy;

impl TimeUnitPolicy {
    pub const DAYS_PER_WEEK: f64 = 7.0;
    pub const DAYS_PER_YEAR: f64 = 365.25;

    pub fn days_to_weeks(days: f64) -> f64 {
        days / Self::DAYS_PER_WEEK
    }

    pub fn weeks_to_days(weeks: f64) -> f64 {
        weeks * Self::DAYS_PER_WEEK
    }

    pub fn days_to_years(days: f64) -> f64 {
        days / Self::DAYS_PER_YEAR
    }

    pub fn years_to_days(years: f64) -> f64 {
        years * Self::DAYS_PER_YEAR
    }
}

/// Default assay detection limit in copies/mL.
pub const DEFAULT_DETECTION_LIMIT: f64 = 50.0;

/// Censors a raw viral load at the detection limit and transforms it to the
/// log10 scale.
///
/// Values strictly below the limit map to 0.0; values at or above it map to
/// `log10(vl_copies)`. The limit must be at least 1 copy/mL so that every
/// retained value has a nonnegative log.
pub fn censored_log10(vl_copies: f64, detection_limit: f64) -> Result<f64> {
    if !detection_limit.is_finite() || detection_limit < 1.0 {
        return Err(Error::DetectionLimit {
            limit: detection_limit,
        });
    }
    if !vl_copies.is_finite() || vl_copies < 0.0 {
        return Err(Error::InvalidValue {
            what: "viral load (copies/mL)",
            value: vl_copies,
        });
    }
    if vl_copies < detection_limit {
        Ok(0.0)
    } else {
        Ok(vl_copies.log10())
    }
}

/// One timestamped viral-load observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VLMeasurement {
    /// Days since the individual's first observation.
    pub t_days: f64,
    /// Raw viral load in copies/mL.
    pub vl_copies: f64,
    /// Censored log10 value used for integration.
    pub log_value: f64,
}

impl VLMeasurement {
    pub fn t_weeks(&self) -> f64 {
        TimeUnitPolicy::days_to_weeks(self.t_days)
    }

    pub fn t_years(&self) -> f64 {
        TimeUnitPolicy::days_to_years(self.t_days)
    }
}

/// An ordered viral-load series for one individual.
///
/// Construction sorts the raw points, rejects duplicate timestamps, shifts
/// times so the first observation is day zero and applies detection-limit
/// censoring. Instances are immutable afterwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndividualSeries {
    id: String,
    measurements: Vec<VLMeasurement>,
    detection_limit: f64,
}

impl IndividualSeries {
    /// Builds a series from raw `(days, copies/mL)` points.
    ///
    /// Unordered input is sorted; duplicate timestamps are an error rather
    /// than being averaged, since silent averaging would change the
    /// integral invisibly. At least two points are required.
    pub fn from_raw_points(
        id: impl Into<String>,
        points: &[(f64, f64)],
        detection_limit: f64,
    ) -> Result<Self> {
        let id = id.into();
        if points.len() < 2 {
            return Err(Error::TooShort {
                id,
                len: points.len(),
                min: 2,
            });
        }
        for &(t, _) in points {
            if !t.is_finite() {
                return Err(Error::InvalidValue {
                    what: "time offset (days)",
                    value: t,
                });
            }
        }
        let mut sorted: Vec<(f64, f64)> = points.to_vec();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        for pair in sorted.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::DuplicateTimestamp {
                    id,
                    t_days: pair[0].0,
                });
            }
        }
        let t0 = sorted[0].0;
        let mut measurements = Vec::with_capacity(sorted.len());
        for (t, copies) in sorted {
            measurements.push(VLMeasurement {
                t_days: t - t0,
                vl_copies: copies,
                log_value: censored_log10(copies, detection_limit)?,
            });
        }
        Ok(Self {
            id,
            measurements,
            detection_limit,
        })
    }

    /// Assembles a series from measurements that are already normalized,
    /// sorted and censored (a subsequence of an existing series).
    pub(crate) fn from_parts(
        id: String,
        measurements: Vec<VLMeasurement>,
        detection_limit: f64,
    ) -> Self {
        debug_assert!(measurements.len() >= 2);
        debug_assert!(measurements[0].t_days == 0.0);
        debug_assert!(measurements.windows(2).all(|w| w[0].t_days < w[1].t_days));
        Self {
            id,
            measurements,
            detection_limit,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn measurements(&self) -> &[VLMeasurement] {
        &self.measurements
    }

    pub fn detection_limit(&self) -> f64 {
        self.detection_limit
    }

    pub fn len(&self) -> usize {
        self.measurements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measurements.is_empty()
    }

    pub fn first(&self) -> &VLMeasurement {
        &self.measurements[0]
    }

    pub fn last(&self) -> &VLMeasurement {
        &self.measurements[self.measurements.len() - 1]
    }

    /// Total follow-up (last minus first observation) in days.
    pub fn followup_days(&self) -> f64 {
        self.last().t_days - self.first().t_days
    }

    pub fn followup_weeks(&self) -> f64 {
        TimeUnitPolicy::days_to_weeks(self.followup_days())
    }

    pub fn followup_years(&self) -> f64 {
        TimeUnitPolicy::days_to_years(self.followup_days())
    }

    /// Successive gaps between observations, in days.
    pub fn gaps_days(&self) -> impl Iterator<Item = f64> + '_ {
        self.measurements
            .windows(2)
            .map(|w| w[1].t_days - w[0].t_days)
    }

    /// The raw `(days, copies/mL)` points, e.g. for export.
    pub fn raw_points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.measurements.iter().map(|m| (m.t_days, m.vl_copies))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn censoring_below_limit_is_zero() {
        assert_eq!(censored_log10(49.0, 50.0).unwrap(), 0.0);
        assert_eq!(censored_log10(0.0, 50.0).unwrap(), 0.0);
    }

    #[test]
    fn censoring_retains_values_at_the_limit() {
        let v = censored_log10(50.0, 50.0).unwrap();
        assert!((v - 50f64.log10()).abs() < 1e-15);
    }

    #[test]
    fn censoring_transforms_above_limit() {
        assert_eq!(censored_log10(10_000.0, 50.0).unwrap(), 4.0);
    }

    #[test]
    fn censoring_rejects_negative_input() {
        assert!(matches!(
            censored_log10(-1.0, 50.0),
            Err(Error::InvalidValue { .. })
        ));
    }

    #[test]
    fn censoring_rejects_sub_unit_detection_limit() {
        assert!(matches!(
            censored_log10(10.0, 0.5),
            Err(Error::DetectionLimit { .. })
        ));
    }

    #[test]
    fn build_rejects_empty_and_single_point_input() {
        assert!(matches!(
            IndividualSeries::from_raw_points("a", &[], 50.0),
            Err(Error::TooShort { len: 0, .. })
        ));
        assert!(matches!(
            IndividualSeries::from_raw_points("a", &[(0.0, 100.0)], 50.0),
            Err(Error::TooShort { len: 1, .. })
        ));
    }

    #[test]
    fn build_rejects_duplicate_timestamps() {
        let err = IndividualSeries::from_raw_points("a", &[(10.0, 100.0), (10.0, 200.0)], 50.0);
        assert!(matches!(err, Err(Error::DuplicateTimestamp { .. })));
    }

    #[test]
    fn build_sorts_shifts_and_censors() {
        let s = IndividualSeries::from_raw_points("a", &[(30.0, 1_000.0), (0.0, 100_000.0)], 50.0)
            .unwrap();
        let t: Vec<f64> = s.measurements().iter().map(|m| m.t_days).collect();
        let v: Vec<f64> = s.measurements().iter().map(|m| m.log_value).collect();
        assert_eq!(t, vec![0.0, 30.0]);
        assert_eq!(v, vec![5.0, 3.0]);
    }

    #[test]
    fn build_shifts_nonzero_start() {
        let s =
            IndividualSeries::from_raw_points("a", &[(100.0, 50.0), (114.0, 500.0)], 50.0).unwrap();
        assert_eq!(s.first().t_days, 0.0);
        assert_eq!(s.last().t_days, 14.0);
        assert_eq!(s.followup_weeks(), 2.0);
    }

    #[test]
    fn time_conversions_round_trip() {
        assert_eq!(TimeUnitPolicy::weeks_to_days(3.0), 21.0);
        assert_eq!(TimeUnitPolicy::days_to_years(365.25), 1.0);
        assert_eq!(
            TimeUnitPolicy::days_to_weeks(TimeUnitPolicy::weeks_to_days(5.5)),
            5.5
        );
    }
}
