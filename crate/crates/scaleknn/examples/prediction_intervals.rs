//! Prediction intervals under both calibrations, checked for empirical
//! coverage on fresh data from the same model.
//!
//!     cargo run --release --example prediction_intervals

use scaleknn::sim::{generate, ScenarioSpec};
use scaleknn::{
    fit_pipeline, interval, ErrorMode, IntervalMode, IntervalSpec, PipelineConfig,
};

fn main() -> scaleknn::Result<()> {
    let spec = ScenarioSpec::new(3, 3)?;
    let train = generate(&spec, 18_000, 21)?;
    let config = PipelineConfig {
        standardize: false,
        error_mode: ErrorMode::Empirical,
        seed: 8,
        ..Default::default()
    };
    let fit = fit_pipeline(&train, &config)?;
    let alpha = 0.1;

    let gaussian = IntervalSpec::new(alpha, IntervalMode::Gaussian)?;
    let empirical = IntervalSpec::new(alpha, IntervalMode::Empirical)?;
    println!(
        "multipliers at alpha = {alpha}: gaussian {:.4}, empirical {:.4}",
        interval::interval_multiplier(&fit.model, &gaussian)?,
        interval::interval_multiplier(&fit.model, &empirical)?,
    );

    let x = [0.5, 0.5, 0.5];
    let (lo_g, hi_g) = interval::predict_interval(&fit.model, &x, &gaussian)?;
    let (lo_e, hi_e) = interval::predict_interval(&fit.model, &x, &empirical)?;
    println!("at x = {x:?}: gaussian [{lo_g:.3}, {hi_g:.3}], empirical [{lo_e:.3}, {hi_e:.3}]");

    // Coverage on fresh draws.
    let test = generate(&spec, 20_000, 9001)?;
    for (name, spec_iv) in [("gaussian", gaussian), ("empirical", empirical)] {
        let c = interval::interval_multiplier(&fit.model, &spec_iv)?;
        let mut hits = 0usize;
        for (i, (m, s)) in fit.model.predict_batch(&test)?.into_iter().enumerate() {
            let y = test.response()[i];
            if y >= m - c * s && y <= m + c * s {
                hits += 1;
            }
        }
        println!(
            "{name:>9} coverage on {} fresh rows: {:.4} (target {})",
            test.n(),
            hits as f64 / test.n() as f64,
            1.0 - alpha
        );
    }
    Ok(())
}
