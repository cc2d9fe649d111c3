//! Monte Carlo study harness: the nine generative scenarios, the mean and
//! scale squared-error metrics, and a seeded grid runner.
//!
//! Covariates are drawn i.i.d. uniform on [0,1]^p and responses follow
//! y = m(x) + sigma(x) * eps with standard normal eps (Box-Muller draws).
//! Superscripts in the scenario definitions are covariate indices, not
//! powers. Every run derives its own ChaCha substreams from the master seed
//! and the cell coordinates, so the feature-selection and all-features arms
//! of a cell see identical data and split plans.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::ScaleLocModel;
use crate::pipeline::{fit_pipeline, PipelineConfig};
use crate::rng;

/// One generative setting from the scenario table.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub id: u8,
    pub p: usize,
}

impl ScenarioSpec {
    pub fn new(id: u8, p: usize) -> Result<Self> {
        let min_p = Self::min_p_for(id)?;
        if p < min_p {
            return Err(Error::Invalid(format!(
                "scenario {id} needs p >= {min_p}, got {p}"
            )));
        }
        Ok(Self { id, p })
    }

    /// Largest covariate index (1-based) used by the mean or sd function.
    pub fn min_p_for(id: u8) -> Result<usize> {
        match id {
            1 | 3 => Ok(3),
            2 => Ok(1),
            4 | 5 => Ok(4),
            6 | 7 => Ok(5),
            8 => Ok(8),
            9 => Ok(10),
            _ => Err(Error::Invalid(format!("scenario id {id} not in 1..=9"))),
        }
    }

    pub fn min_p(&self) -> usize {
        Self::min_p_for(self.id).expect("validated at construction")
    }

    /// Dimensions tabulated for this scenario's regime.
    pub fn table_p_values_for(id: u8) -> Result<&'static [usize]> {
        Self::min_p_for(id)?;
        Ok(match id {
            1..=3 => &[3, 10, 20, 25],
            4..=7 => &[5, 10, 20, 50],
            _ => &[10, 25, 50, 100],
        })
    }

    pub fn table_p_values(&self) -> &'static [usize] {
        Self::table_p_values_for(self.id).expect("validated at construction")
    }

    /// Desk-scale default: only the largest tabulated dimension.
    pub fn desk_p_for(id: u8) -> Result<usize> {
        Ok(*Self::table_p_values_for(id)?.last().unwrap())
    }

    pub fn mean_at(&self, x: &[f64]) -> f64 {
        match self.id {
            1 | 3 => 5.0 * (x[1] + x[2]),
            2 | 5 => 0.0,
            4 | 7 => 5.0 * (x[0] + x[1] + x[2] + x[3]),
            6 => 5.0 * (x[0] + x[1] + x[2]),
            8 => 5.0 * x[..8].iter().sum::<f64>(),
            9 => 5.0 * x[..6].iter().sum::<f64>(),
            _ => unreachable!(),
        }
    }

    pub fn sd_at(&self, x: &[f64]) -> f64 {
        match self.id {
            1 | 4 | 8 => 1.0,
            2 | 3 => 5.0 * x[0],
            5 => 5.0 * (x[0] + x[1] + x[2] + x[3]),
            6 => 5.0 * (x[3] + x[4]),
            7 => 5.0 * (x[1] + x[2] + x[3] + x[4]),
            9 => 5.0 * (x[7] + x[8] + x[9]),
            _ => unreachable!(),
        }
    }

    /// True mean support, 0-based.
    pub fn mean_support(&self) -> Vec<usize> {
        match self.id {
            1 | 3 => vec![1, 2],
            2 | 5 => vec![],
            4 | 7 => vec![0, 1, 2, 3],
            6 => vec![0, 1, 2],
            8 => (0..8).collect(),
            9 => (0..6).collect(),
            _ => unreachable!(),
        }
    }

    /// True scale support, 0-based; empty means homoscedastic.
    pub fn sd_support(&self) -> Vec<usize> {
        match self.id {
            1 | 4 | 8 => vec![],
            2 | 3 => vec![0],
            5 => vec![0, 1, 2, 3],
            6 => vec![3, 4],
            7 => vec![1, 2, 3, 4],
            9 => vec![7, 8, 9],
            _ => unreachable!(),
        }
    }
}

/// Draw an n-row sample from the scenario. The stream is consumed in a
/// fixed documented order: all n*p covariates row-major, then n errors.
pub fn generate(spec: &ScenarioSpec, n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::Invalid("cannot generate an empty sample".into()));
    }
    let p = spec.p;
    let mut r = rng::rng_from_seed(seed);
    let features: Vec<f64> = (0..n * p).map(|_| rng::uniform01(&mut r)).collect();
    let mut errors = vec![0.0; n];
    rng::fill_standard_normal(&mut r, &mut errors);
    let response: Vec<f64> = (0..n)
        .map(|i| {
            let row = &features[i * p..(i + 1) * p];
            spec.mean_at(row) + spec.sd_at(row) * errors[i]
        })
        .collect();
    let names = (0..p).map(|c| format!("x{}", c + 1)).collect();
    Dataset::new(features, p, response, names)
}

/// Squared-error contributions of arbitrary mean/sd predictors against the
/// scenario truth, averaged over the test rows by Monte Carlo integration.
pub fn mss_with(
    predict: impl Fn(&[f64]) -> (f64, f64),
    spec: &ScenarioSpec,
    test: &Dataset,
) -> (f64, f64) {
    let mut acc_m = 0.0;
    let mut acc_s = 0.0;
    for i in 0..test.n() {
        let x = test.row(i);
        let (m_hat, s_hat) = predict(x);
        let dm = m_hat - spec.mean_at(x);
        let ds = s_hat - spec.sd_at(x);
        acc_m += dm * dm;
        acc_s += ds * ds;
    }
    (acc_m / test.n() as f64, acc_s / test.n() as f64)
}

/// MSS contributions of a fitted model on a fresh test set.
pub fn mss(model: &ScaleLocModel, spec: &ScenarioSpec, test: &Dataset) -> Result<(f64, f64)> {
    let preds = model.predict_batch(test)?;
    let mut acc_m = 0.0;
    let mut acc_s = 0.0;
    for (i, (m_hat, s_hat)) in preds.into_iter().enumerate() {
        let x = test.row(i);
        let dm = m_hat - spec.mean_at(x);
        let ds = s_hat - spec.sd_at(x);
        acc_m += dm * dm;
        acc_s += ds * ds;
    }
    Ok((acc_m / test.n() as f64, acc_s / test.n() as f64))
}

/// Which pipeline arms to run per cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FsMode {
    On,
    Off,
    Both,
}

impl FsMode {
    fn arms(&self) -> &'static [bool] {
        match self {
            FsMode::On => &[true],
            FsMode::Off => &[false],
            FsMode::Both => &[true, false],
        }
    }
}

/// Monte Carlo grid description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridConfig {
    pub scenarios: Vec<u8>,
    /// Dimensions per scenario; `None` uses the desk-scale default (the
    /// largest tabulated p).
    pub p_values: Option<Vec<usize>>,
    pub n_values: Vec<usize>,
    pub runs: usize,
    pub n_test: usize,
    pub fs: FsMode,
    pub seed: u64,
    /// Base pipeline settings shared by every run (selection flag and seed
    /// are overridden per arm/run).
    pub pipeline: PipelineConfig,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            scenarios: vec![1],
            p_values: None,
            n_values: vec![2500, 5000, 10_000],
            runs: 30,
            n_test: 2000,
            fs: FsMode::Both,
            seed: 0,
            pipeline: PipelineConfig {
                // Scenario covariates are already on a common [0,1] scale.
                standardize: false,
                ..PipelineConfig::default()
            },
        }
    }
}

/// Sample sizes and replication count of the full published grid.
pub fn full_grid_n_values() -> Vec<usize> {
    vec![5000, 10_000, 20_000, 50_000, 100_000]
}

pub const FULL_GRID_RUNS: usize = 300;

/// One run's metric pair.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RunMetrics {
    pub mss_mean: f64,
    pub mss_sd: f64,
}

/// Aggregated cell of the results table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellResult {
    pub scenario: u8,
    pub p: usize,
    pub n: usize,
    pub fs: bool,
    pub runs: usize,
    pub mss_mean: f64,
    pub mss_sd: f64,
    pub per_run: Vec<RunMetrics>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimResult {
    pub cells: Vec<CellResult>,
}

// Tags for the per-purpose seed substreams.
const TAG_TRAIN: u64 = 1;
const TAG_TEST: u64 = 2;
const TAG_SPLIT: u64 = 3;

/// Run the grid. Cells execute sequentially in deterministic order (runs
/// within a cell are parallel) and `on_cell` fires as each cell completes,
/// so partial results can be flushed incrementally.
pub fn run_grid(cfg: &GridConfig, mut on_cell: impl FnMut(&CellResult)) -> Result<SimResult> {
    use rayon::prelude::*;

    if cfg.runs == 0 {
        return Err(Error::Invalid("runs must be positive".into()));
    }
    if cfg.n_test == 0 {
        return Err(Error::Invalid("n_test must be positive".into()));
    }
    let mut cells = Vec::new();
    for &scenario in &cfg.scenarios {
        let p_list: Vec<usize> = match &cfg.p_values {
            Some(ps) => ps.clone(),
            None => vec![ScenarioSpec::desk_p_for(scenario)?],
        };
        for &p in &p_list {
            let spec = ScenarioSpec::new(scenario, p)?;
            for &n in &cfg.n_values {
                for &fs in cfg.fs.arms() {
                    let per_run: Vec<RunMetrics> = (0..cfg.runs)
                        .into_par_iter()
                        .map(|run| -> Result<RunMetrics> {
                            let coords = [
                                scenario as u64,
                                p as u64,
                                n as u64,
                                run as u64,
                            ];
                            let train = generate(
                                &spec,
                                n,
                                rng::mix_seed(cfg.seed, &with_tag(TAG_TRAIN, &coords)),
                            )?;
                            let test = generate(
                                &spec,
                                cfg.n_test,
                                rng::mix_seed(cfg.seed, &with_tag(TAG_TEST, &coords)),
                            )?;
                            let pipeline = PipelineConfig {
                                selection: fs,
                                seed: rng::mix_seed(cfg.seed, &with_tag(TAG_SPLIT, &coords)),
                                ..cfg.pipeline.clone()
                            };
                            let fit = fit_pipeline(&train, &pipeline)?;
                            let (mss_mean, mss_sd) = mss(&fit.model, &spec, &test)?;
                            Ok(RunMetrics { mss_mean, mss_sd })
                        })
                        .collect::<Result<_>>()?;
                    let mss_mean =
                        per_run.iter().map(|r| r.mss_mean).sum::<f64>() / cfg.runs as f64;
                    let mss_sd =
                        per_run.iter().map(|r| r.mss_sd).sum::<f64>() / cfg.runs as f64;
                    let cell = CellResult {
                        scenario,
                        p,
                        n,
                        fs,
                        runs: cfg.runs,
                        mss_mean,
                        mss_sd,
                        per_run,
                    };
                    on_cell(&cell);
                    cells.push(cell);
                }
            }
        }
    }
    Ok(SimResult { cells })
}

fn with_tag(tag: u64, coords: &[u64; 4]) -> Vec<u64> {
    let mut v = Vec::with_capacity(5);
    v.push(tag);
    v.extend_from_slice(coords);
    v
}
