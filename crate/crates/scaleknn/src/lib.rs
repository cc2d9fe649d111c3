//! Semi-parametric k-nearest-neighbor estimation of conditional mean and
//! variance under the scale-location model y = m(x) + eps * sigma(x).
//!
//! The crate fits both regression functions with plain kNN local averages,
//! picks the covariates that matter with split-based leave-one-covariate-out
//! tests, tunes the neighborhood sizes by leave-one-out cross-validation,
//! and builds on the fitted pair to deliver prediction intervals,
//! covariate-conditional ROC/AUC analysis, and a seeded Monte Carlo study
//! harness.
//!
//! Start with the runnable examples:
//!
//! ```text
//! cargo run --release --example fit_and_predict
//! cargo run --release --example variable_selection
//! cargo run --release --example k_selection
//! cargo run --release --example prediction_intervals
//! cargo run --release --example conditional_roc
//! cargo run --release --example simulation_study
//! cargo run --release --example csv_and_artifacts
//! ```
//!
//! or with the `scaleknn` binary, which exposes the same functionality as
//! `fit` / `predict` / `select` / `interval` / `roc` / `simulate`
//! subcommands.
//!
//! # A minimal fit
//!
//! ```
//! use scaleknn::{fit_pipeline, sim, PipelineConfig};
//!
//! let spec = sim::ScenarioSpec::new(3, 3).unwrap();
//! let data = sim::generate(&spec, 1200, 7).unwrap();
//! let config = PipelineConfig { standardize: false, ..Default::default() };
//! let fit = fit_pipeline(&data, &config).unwrap();
//! let (mean, sd) = fit.model.predict(&[0.5, 0.5, 0.5]).unwrap();
//! assert!(sd >= 0.0);
//! assert!(mean.is_finite());
//! ```

pub mod cli;
pub mod data;
pub mod error;
pub mod estim;
pub mod interval;
pub mod knn;
pub mod model;
pub mod pipeline;
pub mod roc;
pub mod rng;
pub mod select;
pub mod sim;
pub mod stats;

pub use data::{load_csv, make_splits, Dataset, SplitPlan, Standardizer};
pub use error::{Error, Result};
pub use estim::{
    compute_residuals, default_k_grid, select_k, KSelectionTrace, MeanModel, VarianceModel,
};
pub use interval::{
    calibrate_empirical, gaussian_multiplier, predict_interval, CalibrationSet, IntervalMode,
    IntervalSpec,
};
pub use knn::{query_brute, KnnIndex, NeighborList, NeighborQuery};
pub use model::{ErrorMode, ScaleLocModel};
pub use pipeline::{fit_pipeline, select_variables, PipelineConfig, PipelineFit};
pub use roc::{conditional_cdf, RocModel};
pub use select::{t_test_one_sided, SelectionReport, SelectionTarget};
