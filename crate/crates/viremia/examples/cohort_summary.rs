//! Summarizes a simulated cohort: visit counts, follow-up, censoring
//! bands and total person-time.

use viremia::{cohort_summary, simulate_cohort, SimParams};

fn main() -> Result<(), viremia::Error> {
    let params = SimParams {
        n_individuals: 1_000,
        ..SimParams::default()
    };
    let cohort = simulate_cohort(&params, 2024)?;
    let s = cohort_summary(&cohort, params.detection_limit)?;

    println!("individuals          {}", s.n_individuals);
    println!("measurements         {}", s.n_measurements);
    println!(
        "visits / individual  median {} (Q1 {}, Q3 {})",
        s.measures_per_individual.median,
        s.measures_per_individual.q1,
        s.measures_per_individual.q3
    );
    println!(
        "follow-up            median {:.2} yr ({:.0} wk)",
        s.followup_years.median, s.followup_weeks.median
    );
    println!(
        "typical visit gap    median {:.1} wk (Q1 {:.1}, Q3 {:.1})",
        s.median_interobservation_weeks.median,
        s.median_interobservation_weeks.q1,
        s.median_interobservation_weeks.q3
    );
    println!("person-years         {:.0}", s.total_person_years);
    println!(
        "value bands          below limit {:.1}%  |  limit..1000 {:.1}%  |  >1000 {:.1}%",
        100.0 * s.proportion_below_limit,
        100.0 * s.proportion_mid_band,
        100.0 * s.proportion_high_band
    );
    Ok(())
}
