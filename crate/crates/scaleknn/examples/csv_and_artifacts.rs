//! The file-based workflow: CSV in, JSON model artifact out, reload, and
//! predict identically in a fresh process.
//!
//!     cargo run --release --example csv_and_artifacts

use std::io::Write;

use scaleknn::rng;
use scaleknn::{fit_pipeline, load_csv, PipelineConfig, ScaleLocModel};

fn main() -> scaleknn::Result<()> {
    let dir = std::env::temp_dir().join("scaleknn_example");
    std::fs::create_dir_all(&dir)?;

    // Write a small heteroscedastic dataset to CSV.
    let csv_path = dir.join("demo.csv");
    {
        let mut f = std::io::BufWriter::new(std::fs::File::create(&csv_path)?);
        writeln!(f, "age,dose,response")?;
        let mut r = rng::rng_from_seed(77);
        for _ in 0..4000 {
            let age = 20.0 + 60.0 * rng::uniform01(&mut r);
            let dose = 10.0 * rng::uniform01(&mut r);
            let y = 0.8 * dose + (0.05 * age) * rng::standard_normal_pair(&mut r).0;
            writeln!(f, "{age},{dose},{y}")?;
        }
    }

    let data = load_csv(&csv_path, "response", b',')?;
    println!("loaded {} rows with features {:?}", data.n(), data.feature_names());

    // Real-data path: standardization stays on (the defaults).
    let fit = fit_pipeline(&data, &PipelineConfig { seed: 12, ..Default::default() })?;
    println!(
        "mean support {:?}, scale support {:?}",
        fit.model.mean.support(),
        fit.model.variance.support()
    );

    let model_path = dir.join("model.json");
    fit.model.save(&model_path)?;
    println!("saved {}", model_path.display());

    let reloaded = ScaleLocModel::load(&model_path)?;
    let x = [45.0, 5.0];
    let before = fit.model.predict(&x)?;
    let after = reloaded.predict(&x)?;
    assert_eq!(before, after);
    println!(
        "reloaded model predicts identically at {x:?}: mean {:.4}, sd {:.4}",
        after.0, after.1
    );
    Ok(())
}
