//! Round-trips a cohort through the CSV exchange format: export with
//! embedded run metadata, re-ingest, and confirm estimates are unchanged.

use viremia::{ingest_cohort, reference_estimates, simulate_cohort, RunConfig, SimParams};

fn main() -> Result<(), viremia::Error> {
    let params = SimParams {
        n_individuals: 50,
        ..SimParams::default()
    };
    let seed = 5;
    let cohort = simulate_cohort(&params, seed)?;
    let config = RunConfig {
        seed,
        detection_limit: params.detection_limit,
        ..RunConfig::default()
    };

    let body = viremia::io::render_cohort_csv(&cohort, &config, &[]);
    let dir = std::env::temp_dir();
    let path = dir.join("viremia-example-cohort.csv");
    viremia::io::write_atomic(&path, &body)?;
    println!("wrote {} ({} bytes)", path.display(), body.len());
    for line in body.lines().take(6) {
        println!("  {line}");
    }
    println!("  ...");

    // `#` metadata lines are comments to the reader, so the exported file
    // feeds straight back in.
    let (reloaded, report) = ingest_cohort(&path, &config)?;
    println!(
        "\nre-ingested {} rows into {} individuals ({} dropped)",
        report.rows_read, report.individuals_kept, report.individuals_dropped
    );

    let before = reference_estimates(&cohort)?;
    let after = reference_estimates(&reloaded)?;
    println!("estimates identical after round trip: {}", before == after);

    std::fs::remove_file(&path).ok();
    Ok(())
}
