//! Pools a cohort into time bins and sketches the mean viral-load decay
//! profile as a text chart.

use viremia::{simulate_cohort, trajectory_bins, SimParams};

fn main() -> Result<(), viremia::Error> {
    let params = SimParams {
        n_individuals: 500,
        ..SimParams::default()
    };
    let cohort = simulate_cohort(&params, 11)?;
    let bins = trajectory_bins(&cohort, 4.0)?;

    println!(
        "mean log10 viral load by 4-week bin ({} individuals):\n",
        cohort.len()
    );
    for b in &bins {
        let bar = "*".repeat((b.mean_log_value * 12.0).round() as usize);
        println!(
            "  {:>5.0} wk  {:.2}  ({:>5} obs)  {bar}",
            b.midpoint_weeks, b.mean_log_value, b.count
        );
    }
    Ok(())
}
