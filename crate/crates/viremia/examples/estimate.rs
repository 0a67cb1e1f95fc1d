//! Computes cumulative viremia for one hand-entered series with each
//! available quadrature method.
//!
//! The series is a typical post-treatment course: high baseline, rapid
//! suppression, one low-level blip. Times are days from the first visit,
//! values are raw copies/mL; censoring happens inside the constructor.

use viremia::{cvl_simpson, cvl_trapezoid, cvl_uniform_trapezoid, IndividualSeries};

fn main() -> Result<(), viremia::Error> {
    let visits = [
        (0.0, 87_000.0),
        (28.0, 3_400.0),
        (56.0, 210.0),
        (84.0, 40.0), // below the 50 copies/mL limit, contributes zero
        (112.0, 160.0),
        (140.0, 35.0),
        (168.0, 30.0),
    ];
    let series = IndividualSeries::from_raw_points("patient-a", &visits, 50.0)?;

    println!(
        "series: {} visits over {:.2} years",
        series.len(),
        series.followup_years()
    );
    for m in series.measurements() {
        println!(
            "  day {:>5.0}  {:>8.0} copies/mL  -> log10 {:.3}",
            m.t_days, m.vl_copies, m.log_value
        );
    }

    let trap = cvl_trapezoid(&series)?;
    println!(
        "\ntrapezoid:          cvl {:.4} log10 copies/mL x yr, per-year {:.4}",
        trap.cvl, trap.cvl_fu
    );

    // The visits happen to sit on a uniform 28-day grid, so the closed-form
    // uniform-grid estimator and Simpson's rule both apply.
    let values: Vec<f64> = series.measurements().iter().map(|m| m.log_value).collect();
    let uniform = cvl_uniform_trapezoid(&values, 0.0, series.followup_years())?;
    println!(
        "uniform closed form: cvl {:.4} (matches trapezoid to {:.1e})",
        uniform.cvl,
        (uniform.cvl - trap.cvl).abs()
    );

    let simpson = cvl_simpson(&series)?;
    println!(
        "simpson:            cvl {:.4} (higher-order view of the same curve)",
        simpson.cvl
    );
    Ok(())
}
