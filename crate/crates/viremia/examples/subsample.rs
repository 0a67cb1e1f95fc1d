//! Thins one densely sampled series two ways: keep a fixed number of
//! points, or enforce a minimum gap between visits.

use viremia::{
    mean_interval_weeks, simulate_cohort, SimParams, SubsampleMode, SubsampleOutcome, SubsampleSpec,
};

fn show(label: &str, series: &viremia::IndividualSeries) {
    let weeks: Vec<String> = series
        .measurements()
        .iter()
        .map(|m| format!("{:.0}", m.t_days / 7.0))
        .collect();
    println!(
        "{label}: {} visits, mean gap {:.1} wk, weeks [{}]",
        series.len(),
        mean_interval_weeks(series).unwrap_or(f64::NAN),
        weeks.join(", ")
    );
}

fn main() -> Result<(), viremia::Error> {
    let params = SimParams {
        n_individuals: 1,
        ..SimParams::default()
    };
    let cohort = simulate_cohort(&params, 3)?;
    let full = &cohort[0];
    show("full series", full);

    // Count mode answers "what if only n visits had happened?" with the
    // first and last retained and the interior drawn without replacement.
    for n in [2usize, 4, 8] {
        let spec = SubsampleSpec {
            mode: SubsampleMode::Count { n },
            seed: 99,
            replicate_index: 0,
        };
        if let SubsampleOutcome::Retained(thinned) = spec.apply(full)? {
            show(&format!("count n={n}   "), &thinned);
        }
    }

    // Interval mode is deterministic: greedily keep the next visit at
    // least this many weeks after the last kept one, then the endpoint.
    for gap in [4.0, 12.0, 24.0] {
        let spec = SubsampleSpec {
            mode: SubsampleMode::Interval { min_gap_weeks: gap },
            seed: 99,
            replicate_index: 0,
        };
        match spec.apply(full)? {
            SubsampleOutcome::Retained(thinned) => show(&format!("gap >= {gap:>2}wk  "), &thinned),
            SubsampleOutcome::Excluded => println!("gap >= {gap}wk: follow-up too short, excluded"),
        }
    }
    Ok(())
}
