//! Split-based variable selection on data where the mean and the scale
//! depend on different covariates.
//!
//!     cargo run --release --example variable_selection

use scaleknn::sim::{generate, ScenarioSpec};
use scaleknn::{fit_pipeline, PipelineConfig};

fn main() -> scaleknn::Result<()> {
    // mean = 5 (x1 + x2 + x3), sd = 5 (x4 + x5), plus five noise features.
    let spec = ScenarioSpec::new(6, 10)?;
    let data = generate(&spec, 24_000, 11)?;

    let config = PipelineConfig {
        standardize: false,
        seed: 3,
        ..Default::default()
    };
    let fit = fit_pipeline(&data, &config)?;

    let mean_report = fit.mean_selection.as_ref().expect("selection enabled");
    let var_report = fit.variance_selection.as_ref().expect("selection enabled");
    println!("{}", mean_report.render_table());
    println!("{}", var_report.render_table());

    let fmt = |v: Vec<usize>| -> Vec<usize> { v.into_iter().map(|f| f + 1).collect() };
    println!(
        "true mean support:     {:?}",
        fmt(spec.mean_support())
    );
    println!(
        "selected mean support: {:?}",
        fmt(mean_report.selected_features())
    );
    println!(
        "true scale support:     {:?}",
        fmt(spec.sd_support())
    );
    println!(
        "selected scale support: {:?}",
        fmt(var_report.selected_features())
    );
    Ok(())
}
