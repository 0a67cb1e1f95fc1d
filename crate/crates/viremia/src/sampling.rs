//! Deterministic, seedable thinning of viral-load series.
//!
//! Two strategies are supported:
//!
//! * **count**: keep the original first and last measurements and draw a
//!   fixed number of interior points uniformly without replacement;
//! * **interval**: greedy forward thinning that enforces a minimum time gap
//!   between retained points, again always keeping the first and last
//!   measurements.
//!
//! Keeping the endpoints means total follow-up duration is invariant under
//! subsampling, so follow-up standardization commutes with thinning in the
//! denominator.
//!
//! Randomness is derived per `(seed, replicate index, individual id)` so
//! outcomes do not depend on evaluation order or thread count: the triple is
//! hashed into a 256-bit ChaCha8 key via FNV-1a over the id plus a SplitMix64
//! chain (see [`derive_stream`]).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{IndividualSeries, TimeUnitPolicy};

/// Thinning strategy plus the parameters that make it reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsampleSpec {
    pub mode: SubsampleMode,
    pub seed: u64,
    pub replicate_index: u32,
}

/// The two thinning strategies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubsampleMode {
    /// Random retention of exactly `n` points, endpoints always included.
    Count { n: usize },
    /// Greedy minimum-gap thinning, endpoints always included.
    Interval { min_gap_weeks: f64 },
}

impl SubsampleMode {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SubsampleMode::Count { n } if n < 2 => Err(Error::InvalidSpec(format!(
                "count mode requires n >= 2, got {n}"
            ))),
            SubsampleMode::Interval { min_gap_weeks }
                if !(min_gap_weeks.is_finite() && min_gap_weeks > 0.0) =>
            {
                Err(Error::InvalidSpec(format!(
                    "interval mode requires a positive gap, got {min_gap_weeks}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Short label for reports: `count` or `interval`.
    pub fn strategy_label(&self) -> &'static str {
        match self {
            SubsampleMode::Count { .. } => "count",
            SubsampleMode::Interval { .. } => "interval",
        }
    }

    /// The strategy parameter (n or gap in weeks) as a number.
    pub fn param(&self) -> f64 {
        match *self {
            SubsampleMode::Count { n } => n as f64,
            SubsampleMode::Interval { min_gap_weeks } => min_gap_weeks,
        }
    }
}

/// What to do with individuals whose follow-up is shorter than the requested
/// minimum gap in interval mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShortFollowupPolicy {
    /// Drop the individual from the thinned cohort (the effective sample
    /// size shrinks as the gap grows).
    #[default]
    Exclude,
    /// Keep an endpoints-only series.
    KeepEndpoints,
}

/// Outcome of applying a spec to one series.
#[derive(Debug, Clone, PartialEq)]
pub enum SubsampleOutcome {
    Retained(IndividualSeries),
    /// Interval mode only: follow-up shorter than the minimum gap.
    Excluded,
}

impl SubsampleSpec {
    /// Applies this spec to one series with a stream derived from
    /// `(seed, replicate_index, series id)`.
    pub fn apply(&self, series: &IndividualSeries) -> Result<SubsampleOutcome> {
        self.mode.validate()?;
        match self.mode {
            SubsampleMode::Count { n } => {
                let mut rng = derive_stream(self.seed, self.replicate_index, series.id());
                subsample_count(series, n, &mut rng).map(SubsampleOutcome::Retained)
            }
            SubsampleMode::Interval { min_gap_weeks } => Ok(
                match subsample_interval(series, min_gap_weeks, ShortFollowupPolicy::Exclude)? {
                    Some(s) => SubsampleOutcome::Retained(s),
                    None => SubsampleOutcome::Excluded,
                },
            ),
        }
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent ChaCha8 stream for one `(seed, replicate,
/// individual)` triple.
///
/// Key derivation: a SplitMix64 chain is seeded with the master seed, then
/// perturbed by the replicate index and by the FNV-1a hash of the individual
/// id; four successive outputs fill the 256-bit ChaCha key. Identical
/// triples always yield identical streams, which keeps parallel runs
/// reproducible.
pub fn derive_stream(master_seed: u64, replicate_index: u32, individual_id: &str) -> ChaCha8Rng {
    let mut state = master_seed;
    let mut words = [0u64; 4];
    words[0] = splitmix64(&mut state);
    state ^= u64::from(replicate_index);
    words[1] = splitmix64(&mut state);
    state ^= fnv1a64(individual_id.as_bytes());
    words[2] = splitmix64(&mut state);
    words[3] = splitmix64(&mut state);
    let mut key = [0u8; 32];
    for (chunk, word) in key.chunks_exact_mut(8).zip(words) {
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Randomly thins a series to exactly `n` points, always retaining the
/// original first and last measurements.
///
/// The `n - 2` interior points are drawn uniformly without replacement via a
/// partial Fisher-Yates shuffle of the interior indices; original order is
/// preserved in the output.
pub fn subsample_count(
    series: &IndividualSeries,
    n: usize,
    rng: &mut impl Rng,
) -> Result<IndividualSeries> {
    if n < 2 {
        return Err(Error::InvalidSpec(format!(
            "count mode requires n >= 2, got {n}"
        )));
    }
    let len = series.len();
    if n > len {
        return Err(Error::InsufficientPoints {
            id: series.id().to_string(),
            requested: n,
            available: len,
        });
    }
    let mut interior: Vec<usize> = (1..len - 1).collect();
    let take = n - 2;
    for i in 0..take {
        let j = rng.random_range(i..interior.len());
        interior.swap(i, j);
    }
    let mut keep: Vec<usize> = Vec::with_capacity(n);
    keep.push(0);
    keep.extend_from_slice(&interior[..take]);
    keep.push(len - 1);
    keep.sort_unstable();

    let ms = series.measurements();
    let picked: Vec<_> = keep.into_iter().map(|k| ms[k]).collect();
    Ok(IndividualSeries::from_parts(
        series.id().to_string(),
        picked,
        series.detection_limit(),
    ))
}

/// Greedy forward thinning with a minimum gap in weeks.
///
/// The first point is retained; thereafter the next point whose gap from the
/// last retained point is at least `min_gap_weeks` is kept. The original
/// last point is always appended even when it violates the gap. Individuals
/// whose total follow-up is shorter than the gap are excluded (`None`) under
/// the default policy, or reduced to endpoints under
/// [`ShortFollowupPolicy::KeepEndpoints`].
pub fn subsample_interval(
    series: &IndividualSeries,
    min_gap_weeks: f64,
    policy: ShortFollowupPolicy,
) -> Result<Option<IndividualSeries>> {
    if !(min_gap_weeks.is_finite() && min_gap_weeks > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "interval mode requires a positive gap, got {min_gap_weeks}"
        )));
    }
    if series.followup_weeks() < min_gap_weeks {
        match policy {
            ShortFollowupPolicy::Exclude => return Ok(None),
            ShortFollowupPolicy::KeepEndpoints => {
                let ms = series.measurements();
                let picked = vec![ms[0], ms[ms.len() - 1]];
                return Ok(Some(IndividualSeries::from_parts(
                    series.id().to_string(),
                    picked,
                    series.detection_limit(),
                )));
            }
        }
    }
    let min_gap_days = TimeUnitPolicy::weeks_to_days(min_gap_weeks);
    let ms = series.measurements();
    let mut picked: Vec<_> = vec![ms[0]];
    let mut last_t = ms[0].t_days;
    for m in &ms[1..] {
        if m.t_days - last_t >= min_gap_days {
            picked.push(*m);
            last_t = m.t_days;
        }
    }
    if picked.last().unwrap().t_days < ms[ms.len() - 1].t_days {
        picked.push(ms[ms.len() - 1]);
    }
    Ok(Some(IndividualSeries::from_parts(
        series.id().to_string(),
        picked,
        series.detection_limit(),
    )))
}

/// Arithmetic mean of successive observation gaps, in weeks.
pub fn mean_interval_weeks(series: &IndividualSeries) -> Result<f64> {
    if series.len() < 2 {
        return Err(Error::TooShort {
            id: series.id().to_string(),
            len: series.len(),
            min: 2,
        });
    }
    let n_gaps = (series.len() - 1) as f64;
    let total: f64 = series.gaps_days().sum();
    Ok(TimeUnitPolicy::days_to_weeks(total) / n_gaps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn weekly_series(id: &str, n_weeks: usize) -> IndividualSeries {
        let points: Vec<(f64, f64)> = (0..n_weeks)
            .map(|w| (w as f64 * 7.0, 100.0 + w as f64))
            .collect();
        IndividualSeries::from_raw_points(id, &points, 50.0).unwrap()
    }

    fn series_at_weeks(id: &str, weeks: &[f64]) -> IndividualSeries {
        let points: Vec<(f64, f64)> = weeks.iter().map(|&w| (w * 7.0, 1000.0 + w)).collect();
        IndividualSeries::from_raw_points(id, &points, 50.0).unwrap()
    }

    #[test]
    fn count_identity_when_n_equals_length() {
        let s = weekly_series("a", 5);
        let mut rng = derive_stream(1, 0, "a");
        let out = subsample_count(&s, 5, &mut rng).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn count_two_keeps_exactly_the_endpoints() {
        let s = weekly_series("a", 8);
        let mut rng = derive_stream(1, 0, "a");
        let out = subsample_count(&s, 2, &mut rng).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out.first(), s.first());
        assert_eq!(out.last(), s.last());
    }

    #[test]
    fn count_rejects_infeasible_and_degenerate_n() {
        let s = weekly_series("a", 4);
        let mut rng = derive_stream(1, 0, "a");
        assert!(matches!(
            subsample_count(&s, 5, &mut rng),
            Err(Error::InsufficientPoints { .. })
        ));
        assert!(matches!(
            subsample_count(&s, 1, &mut rng),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn count_interior_selection_is_uniform() {
        // Length-5 series, n = 3: one of three interior points is chosen.
        // Chi-square over 1e5 replicates, 2 degrees of freedom; the 1%
        // critical value is 9.21.
        let s = weekly_series("a", 5);
        let mut counts = [0u32; 3];
        let draws = 100_000;
        for r in 0..draws {
            let spec = SubsampleSpec {
                mode: SubsampleMode::Count { n: 3 },
                seed: 99,
                replicate_index: r,
            };
            match spec.apply(&s).unwrap() {
                SubsampleOutcome::Retained(out) => {
                    let kept_week = out.measurements()[1].t_days / 7.0;
                    counts[kept_week as usize - 1] += 1;
                }
                SubsampleOutcome::Excluded => unreachable!(),
            }
        }
        let expected = draws as f64 / 3.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        assert!(chi2 < 9.21, "chi-square {chi2} too large: {counts:?}");
    }

    #[test]
    fn count_is_deterministic_per_triple() {
        let s = weekly_series("a", 20);
        let spec = SubsampleSpec {
            mode: SubsampleMode::Count { n: 6 },
            seed: 7,
            replicate_index: 3,
        };
        assert_eq!(spec.apply(&s).unwrap(), spec.apply(&s).unwrap());
        let other = SubsampleSpec {
            replicate_index: 4,
            ..spec.clone()
        };
        assert_ne!(spec.apply(&s).unwrap(), other.apply(&s).unwrap());
    }

    #[test]
    fn interval_with_tiny_gap_is_identity() {
        let s = weekly_series("a", 10);
        let out = subsample_interval(&s, 0.001, ShortFollowupPolicy::Exclude)
            .unwrap()
            .unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn interval_gap_beyond_span_excludes_or_keeps_endpoints() {
        let s = weekly_series("a", 10); // span 9 weeks
        assert_eq!(
            subsample_interval(&s, 50.0, ShortFollowupPolicy::Exclude).unwrap(),
            None
        );
        let out = subsample_interval(&s, 50.0, ShortFollowupPolicy::KeepEndpoints)
            .unwrap()
            .unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out.followup_weeks(), s.followup_weeks());
    }

    #[test]
    fn interval_greedy_hand_trace() {
        let s = series_at_weeks("a", &[0.0, 3.0, 5.0, 9.0, 10.0]);
        let out = subsample_interval(&s, 4.0, ShortFollowupPolicy::Exclude)
            .unwrap()
            .unwrap();
        let weeks: Vec<f64> = out.measurements().iter().map(|m| m.t_days / 7.0).collect();
        assert_eq!(weeks, vec![0.0, 5.0, 9.0, 10.0]);
    }

    #[test]
    fn interval_keeps_mandatory_last_without_duplication() {
        // Last point qualifies by gap on its own: must not be appended twice.
        let s = series_at_weeks("a", &[0.0, 4.0, 8.0]);
        let out = subsample_interval(&s, 4.0, ShortFollowupPolicy::Exclude)
            .unwrap()
            .unwrap();
        assert_eq!(out.len(), 3);
    }

    #[test]
    fn mean_interval_on_weekly_grid_is_one() {
        let s = weekly_series("a", 61);
        assert_relative_eq!(mean_interval_weeks(&s).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn mean_interval_hand_example() {
        let s = series_at_weeks("a", &[0.0, 2.0, 6.0]);
        assert_relative_eq!(mean_interval_weeks(&s).unwrap(), 3.0, max_relative = 1e-12);
    }

    #[test]
    fn derive_stream_separates_ids_replicates_and_seeds() {
        let a: Vec<u64> = {
            let mut r = derive_stream(1, 0, "x");
            (0..4).map(|_| r.random()).collect()
        };
        for (seed, rep, id) in [(1u64, 0u32, "y"), (1, 1, "x"), (2, 0, "x")] {
            let b: Vec<u64> = {
                let mut r = derive_stream(seed, rep, id);
                (0..4).map(|_| r.random()).collect()
            };
            assert_ne!(a, b);
        }
    }
}
