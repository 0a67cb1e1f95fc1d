//! Quantifies how sampling frequency biases cumulative viremia upward.
//!
//! A cohort is simulated on a weekly grid and then re-estimated after
//! thinning. Sparse schedules stretch trapezoids across suppressed
//! stretches of the curve, so the estimate grows as visits get rarer.

use viremia::{bias_experiment, simulate_cohort, SimParams, SubsampleMode};

fn main() -> Result<(), viremia::Error> {
    let params = SimParams {
        n_individuals: 2_000,
        ..SimParams::default()
    };
    let cohort = simulate_cohort(&params, 42)?;

    let counts: Vec<SubsampleMode> = (2..=5).map(|n| SubsampleMode::Count { n }).collect();
    let table = bias_experiment(&cohort, &counts, 25, 42)?;
    println!("visits kept per individual (25 random draws each):");
    println!(
        "{:>10}  {:>6}  {:>11}  {:>10}",
        "strategy", "param", "cvl median", "bias"
    );
    for row in &table.rows {
        println!(
            "{:>10}  {:>6}  {:>11.3}  {:>9}%",
            row.strategy,
            row.param.map_or("-".into(), |p| format!("{p}")),
            row.cvl.median,
            format!("{:+}", row.pct_change),
        );
    }

    let gaps: Vec<SubsampleMode> = [4.0, 8.0, 12.0, 24.0]
        .into_iter()
        .map(|g| SubsampleMode::Interval { min_gap_weeks: g })
        .collect();
    let table = bias_experiment(&cohort, &gaps, 1, 42)?;
    println!("\nminimum weeks between visits (deterministic thinning):");
    println!(
        "{:>10}  {:>6}  {:>11}  {:>10}",
        "strategy", "param", "cvl median", "bias"
    );
    for row in &table.rows {
        println!(
            "{:>10}  {:>6}  {:>11.3}  {:>9}%",
            row.strategy,
            row.param.map_or("-".into(), |p| format!("{p}")),
            row.cvl.median,
            format!("{:+}", row.pct_change),
        );
    }
    Ok(())
}
