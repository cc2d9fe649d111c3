//! Covariate-conditional ROC analysis: the discriminative power of a
//! biomarker as a function of a covariate, compared against the analytic
//! truth for Gaussian populations.
//!
//!     cargo run --release --example conditional_roc

use scaleknn::rng;
use scaleknn::roc::RocModel;
use scaleknn::stats::normal_cdf;
use scaleknn::{fit_pipeline, Dataset, PipelineConfig};

/// Biomarker: diseased y = x1 + eps, healthy y = eps. The separation
/// Delta(x) = x1 grows along the covariate, so AUC(x) = Phi(x1 / sqrt(2)).
fn group(n: usize, diseased: bool, seed: u64) -> scaleknn::Result<Dataset> {
    let mut r = rng::rng_from_seed(seed);
    let mut feats = Vec::with_capacity(n * 2);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let x1 = rng::uniform01(&mut r);
        let x2 = rng::uniform01(&mut r);
        let shift = if diseased { x1 } else { 0.0 };
        feats.extend_from_slice(&[x1, x2]);
        ys.push(shift + rng::standard_normal_pair(&mut r).0);
    }
    Dataset::new(feats, 2, ys, vec!["x1".into(), "x2".into()])
}

fn main() -> scaleknn::Result<()> {
    let n = 30_000;
    let diseased = group(n, true, 101)?;
    let healthy = group(n, false, 202)?;

    let config = PipelineConfig {
        standardize: false,
        seed: 5,
        ..Default::default()
    };
    let roc = RocModel::new(
        fit_pipeline(&diseased, &config)?.model,
        fit_pipeline(&healthy, &config)?.model,
    )?;

    println!("{:>6} | {:>9} {:>9} | {:>12}", "x1", "auc_hat", "auc", "quadrature");
    for i in 0..10 {
        let x1 = 0.05 + 0.1 * i as f64;
        let x = [x1, 0.5];
        let auc = roc.auc(&x)?;
        let truth = normal_cdf(x1 / std::f64::consts::SQRT_2);
        let quad = roc.auc_quadrature(&x, 4000)?;
        println!("{x1:>6.2} | {auc:>9.4} {truth:>9.4} | {quad:>12.6}");
    }

    let rates = roc.tpr_fpr(0.5, &[0.9, 0.5])?;
    println!(
        "\noperating point at threshold 0.5, x1 = 0.9: TPR = {:.3}, FPR = {:.3}",
        rates.tpr, rates.fpr
    );
    Ok(())
}
