//! Command-line interface: fit / predict / select / interval / roc /
//! simulate subcommands with seeded reproducibility and JSON/CSV artifacts.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::{load_csv, Dataset};
use crate::error::{Error, Result};
use crate::interval::{interval_multiplier, IntervalMode, IntervalSpec};
use crate::model::{ErrorMode, ScaleLocModel};
use crate::pipeline::{fit_pipeline, PipelineConfig};
use crate::roc::RocModel;
use crate::sim::{self, FsMode, GridConfig, ScenarioSpec};

#[derive(Debug, Parser)]
#[command(
    name = "scaleknn",
    version,
    about = "kNN scale-location modeling: conditional mean and variance, variable selection, \
             prediction intervals, conditional ROC, and simulation studies"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (default: all cores; RAYON_NUM_THREADS also honored).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a scale-location model on a CSV dataset.
    Fit(FitArgs),
    /// Predict conditional mean and sd for every row of a CSV file.
    Predict(PredictArgs),
    /// Run variable selection only and print the reports.
    Select(SelectArgs),
    /// Emit per-row prediction intervals.
    Interval(IntervalArgs),
    /// Covariate-conditional ROC/AUC over a grid, from two-group data.
    Roc(RocArgs),
    /// Monte Carlo study over the built-in scenarios.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
struct CommonFitArgs {
    /// Training data CSV (header row required).
    #[arg(long)]
    data: PathBuf,
    /// Name of the response column.
    #[arg(long)]
    target: String,
    /// Field delimiter.
    #[arg(long, default_value = ",")]
    delimiter: char,
    /// JSON config file overriding pipeline defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed for splitting.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Disable variable selection (use every feature).
    #[arg(long)]
    no_selection: bool,
    /// Disable feature standardization.
    #[arg(long)]
    no_standardize: bool,
    /// Error calibration mode.
    #[arg(long, value_enum, default_value_t = ErrorModeArg::Gaussian)]
    error_mode: ErrorModeArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ErrorModeArg {
    Gaussian,
    Empirical,
}

impl From<ErrorModeArg> for ErrorMode {
    fn from(v: ErrorModeArg) -> Self {
        match v {
            ErrorModeArg::Gaussian => ErrorMode::Gaussian,
            ErrorModeArg::Empirical => ErrorMode::Empirical,
        }
    }
}

#[derive(Debug, Args)]
struct FitArgs {
    #[command(flatten)]
    common: CommonFitArgs,
    /// Output directory for model.json, reports, and the manifest.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct PredictArgs {
    /// Fitted model artifact (model.json).
    #[arg(long)]
    model: PathBuf,
    /// CSV with the model's feature columns (extra columns are ignored).
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = ",")]
    delimiter: char,
    /// Output CSV of mean,sd rows.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct SelectArgs {
    #[command(flatten)]
    common: CommonFitArgs,
    /// Family significance level.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Output directory for the two reports and the manifest.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct IntervalArgs {
    /// Fitted model artifact (model.json).
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = ",")]
    delimiter: char,
    /// Miscoverage level.
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    /// Interval calibration mode.
    #[arg(long = "interval-mode", value_enum, default_value_t = IntervalModeArg::Gaussian)]
    interval_mode: IntervalModeArg,
    /// Output CSV of prediction,lower,upper rows.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum IntervalModeArg {
    Gaussian,
    Empirical,
}

#[derive(Debug, Args)]
struct RocArgs {
    /// Diseased-group CSV (with --data-healthy), sharing feature columns.
    #[arg(long, requires = "data_healthy", conflicts_with = "data")]
    data_diseased: Option<PathBuf>,
    /// Healthy-group CSV.
    #[arg(long)]
    data_healthy: Option<PathBuf>,
    /// Single CSV holding both groups, split by --group-col.
    #[arg(long, requires = "group_col")]
    data: Option<PathBuf>,
    /// Binary column: 1 = diseased, 0 = healthy.
    #[arg(long)]
    group_col: Option<String>,
    /// Name of the biomarker (response) column.
    #[arg(long)]
    target: String,
    /// CSV of covariate points at which to evaluate AUC(x).
    #[arg(long)]
    grid: PathBuf,
    #[arg(long, default_value = ",")]
    delimiter: char,
    /// JSON config file overriding pipeline defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Nodes for the quadrature cross-check column (0 disables it).
    #[arg(long, default_value_t = 0)]
    n_quad: usize,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Scenario ids (1..=9), comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    scenario: Vec<u8>,
    /// Covariate dimensions; default is the largest tabulated p per
    /// scenario.
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<usize>>,
    /// Sample sizes; default 2500,5000,10000.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Monte Carlo runs per cell.
    #[arg(long, default_value_t = 30)]
    runs: usize,
    /// Fresh test rows per run for the error integrals.
    #[arg(long, default_value_t = 2000)]
    n_test: usize,
    /// Which arms to run.
    #[arg(long, value_enum, default_value_t = FsArg::Both)]
    fs: FsArg,
    /// Use the full published grid (n up to 100000, 300 runs, all
    /// tabulated p). Heavy; hours of compute.
    #[arg(long)]
    full_grid: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON config file overriding pipeline defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for results.csv, results.json, and the manifest.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FsArg {
    On,
    Off,
    Both,
}

impl From<FsArg> for FsMode {
    fn from(v: FsArg) -> Self {
        match v {
            FsArg::On => FsMode::On,
            FsArg::Off => FsMode::Off,
            FsArg::Both => FsMode::Both,
        }
    }
}

/// Run manifest dropped next to every artifact set.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config: serde_json::Value,
    pub seed: u64,
    /// SHA-256 of every emitted artifact, keyed by file name.
    pub artifact_hashes: BTreeMap<String, String>,
    pub wall_clock_ms: u128,
    pub version: String,
}

/// Parse argv and run; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version on stdout with success; usage errors
            // exit with code 2.
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let started = Instant::now();
    match dispatch(cli.command, started) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, started: Instant) -> Result<()> {
    match command {
        Command::Fit(args) => cmd_fit(args, started),
        Command::Predict(args) => cmd_predict(args, started),
        Command::Select(args) => cmd_select(args, started),
        Command::Interval(args) => cmd_interval(args, started),
        Command::Roc(args) => cmd_roc(args, started),
        Command::Simulate(args) => cmd_simulate(args, started),
    }
}

fn load_config_file(path: &Option<PathBuf>) -> Result<PipelineConfig> {
    match path {
        None => Ok(PipelineConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            Ok(serde_json::from_str(&text)?)
        }
    }
}

fn resolve_pipeline_config(common: &CommonFitArgs) -> Result<PipelineConfig> {
    let mut config = load_config_file(&common.config)?;
    config.seed = common.seed;
    if common.no_selection {
        config.selection = false;
    }
    if common.no_standardize {
        config.standardize = false;
    }
    config.error_mode = common.error_mode.into();
    Ok(config)
}

fn ensure_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path)?;
    Ok(())
}

fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("{:x}", hasher.finalize()))
}

fn write_manifest(
    dir: &Path,
    subcommand: &str,
    config: serde_json::Value,
    seed: u64,
    artifacts: &[PathBuf],
    started: Instant,
) -> Result<()> {
    let mut artifact_hashes = BTreeMap::new();
    for artifact in artifacts {
        let name = artifact
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| artifact.display().to_string());
        artifact_hashes.insert(name, sha256_file(artifact)?);
    }
    let manifest = RunManifest {
        subcommand: subcommand.to_string(),
        config,
        seed,
        artifact_hashes,
        wall_clock_ms: started.elapsed().as_millis(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    std::fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(())
}

/// Manifest path for single-file outputs: `<out>.manifest.json`.
fn file_manifest_path(out: &Path) -> PathBuf {
    let mut name = out
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    name.push_str(".manifest.json");
    out.with_file_name(name)
}

fn write_file_manifest(
    out: &Path,
    subcommand: &str,
    config: serde_json::Value,
    seed: u64,
    started: Instant,
) -> Result<()> {
    let mut artifact_hashes = BTreeMap::new();
    let name = out
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| out.display().to_string());
    artifact_hashes.insert(name, sha256_file(out)?);
    let manifest = RunManifest {
        subcommand: subcommand.to_string(),
        config,
        seed,
        artifact_hashes,
        wall_clock_ms: started.elapsed().as_millis(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    std::fs::write(
        file_manifest_path(out),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(())
}

fn cmd_fit(args: FitArgs, started: Instant) -> Result<()> {
    let config = resolve_pipeline_config(&args.common)?;
    let data = load_csv(
        &args.common.data,
        &args.common.target,
        args.common.delimiter as u8,
    )?;
    let fit = fit_pipeline(&data, &config)?;
    ensure_dir(&args.out)?;
    let mut artifacts = Vec::new();

    let model_path = args.out.join("model.json");
    fit.model.save(&model_path)?;
    artifacts.push(model_path);

    let plan_path = args.out.join("split_plan.json");
    std::fs::write(&plan_path, serde_json::to_string_pretty(&fit.plan)?)?;
    artifacts.push(plan_path);

    if let Some(report) = &fit.mean_selection {
        let p = args.out.join("mean_selection.json");
        std::fs::write(&p, serde_json::to_string_pretty(report)?)?;
        println!("{}", report.render_table());
        artifacts.push(p);
    }
    if let Some(report) = &fit.variance_selection {
        let p = args.out.join("variance_selection.json");
        std::fs::write(&p, serde_json::to_string_pretty(report)?)?;
        println!("{}", report.render_table());
        artifacts.push(p);
    }
    let traces = serde_json::json!({
        "mean": fit.mean_k_trace,
        "variance": fit.variance_k_trace,
    });
    let traces_path = args.out.join("k_traces.json");
    std::fs::write(&traces_path, serde_json::to_string_pretty(&traces)?)?;
    artifacts.push(traces_path);

    println!(
        "fitted: mean support {:?} (k = {:?}), variance support {:?} (k = {:?})",
        fit.model.mean.support(),
        fit.model.mean.k(),
        fit.model.variance.support(),
        fit.model.variance.k(),
    );
    write_manifest(
        &args.out,
        "fit",
        serde_json::to_value(&config)?,
        config.seed,
        &artifacts,
        started,
    )
}

/// Reorder a prediction CSV's columns to the model's features by header
/// name; extra columns (e.g. the original response) are dropped.
fn feature_matrix_for(model: &ScaleLocModel, path: &Path, delimiter: char) -> Result<Dataset> {
    // The response column is irrelevant for prediction; reuse the loader by
    // treating the first model feature found as a probe, then reorder.
    let display = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter as u8)
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::CsvStructure {
            path: display.clone(),
            msg: e.to_string(),
        })?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::CsvStructure {
            path: display.clone(),
            msg: e.to_string(),
        })?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let mut cols = Vec::with_capacity(model.feature_names.len());
    for name in &model.feature_names {
        let idx = headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::CsvStructure {
                path: display.clone(),
                msg: format!("missing model feature column `{name}`"),
            }
        })?;
        cols.push(idx);
    }
    let mut features = Vec::new();
    let mut n = 0usize;
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::CsvStructure {
            path: display.clone(),
            msg: e.to_string(),
        })?;
        for &c in &cols {
            let cell = record.get(c).unwrap_or("");
            let value: f64 = cell.trim().parse().unwrap_or(f64::NAN);
            if !value.is_finite() {
                return Err(Error::CsvCell {
                    path: display,
                    row: row_idx + 1,
                    column: headers[c].clone(),
                    value: cell.to_string(),
                });
            }
            features.push(value);
        }
        n += 1;
    }
    if n == 0 {
        return Err(Error::CsvStructure {
            path: display,
            msg: "no data rows".into(),
        });
    }
    Dataset::new(
        features,
        model.feature_names.len(),
        vec![0.0; n],
        model.feature_names.clone(),
    )
}

fn cmd_predict(args: PredictArgs, started: Instant) -> Result<()> {
    let model = ScaleLocModel::load(&args.model)?;
    let data = feature_matrix_for(&model, &args.data, args.delimiter)?;
    let preds = model.predict_batch(&data)?;
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut w = std::io::BufWriter::new(std::fs::File::create(&args.out)?);
    writeln!(w, "mean,sd")?;
    for (m, s) in &preds {
        writeln!(w, "{m},{s}")?;
    }
    w.flush()?;
    drop(w);
    let config = serde_json::json!({
        "model": args.model.display().to_string(),
        "data": args.data.display().to_string(),
    });
    write_file_manifest(&args.out, "predict", config, args.seed, started)
}

fn cmd_select(args: SelectArgs, started: Instant) -> Result<()> {
    let mut config = resolve_pipeline_config(&args.common)?;
    config.selection_alpha = args.alpha;
    config.selection = true;
    let data = load_csv(
        &args.common.data,
        &args.common.target,
        args.common.delimiter as u8,
    )?;
    let fit = fit_pipeline(&data, &config)?;
    ensure_dir(&args.out)?;
    let mut artifacts = Vec::new();
    for (name, report) in [
        ("mean_selection.json", fit.mean_selection.as_ref()),
        ("variance_selection.json", fit.variance_selection.as_ref()),
    ] {
        let report = report.expect("selection enabled");
        println!("{}", report.render_table());
        let p = args.out.join(name);
        std::fs::write(&p, serde_json::to_string_pretty(report)?)?;
        artifacts.push(p);
    }
    write_manifest(
        &args.out,
        "select",
        serde_json::to_value(&config)?,
        config.seed,
        &artifacts,
        started,
    )
}

fn cmd_interval(args: IntervalArgs, started: Instant) -> Result<()> {
    let model = ScaleLocModel::load(&args.model)?;
    let mode = match args.interval_mode {
        IntervalModeArg::Gaussian => IntervalMode::Gaussian,
        IntervalModeArg::Empirical => IntervalMode::Empirical,
    };
    let spec = IntervalSpec::new(args.alpha, mode)?;
    let c = interval_multiplier(&model, &spec)?;
    let data = feature_matrix_for(&model, &args.data, args.delimiter)?;
    let preds = model.predict_batch(&data)?;
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut w = std::io::BufWriter::new(std::fs::File::create(&args.out)?);
    writeln!(w, "prediction,lower,upper")?;
    for (m, s) in &preds {
        writeln!(w, "{},{},{}", m, m - c * s, m + c * s)?;
    }
    w.flush()?;
    drop(w);
    let config = serde_json::json!({
        "model": args.model.display().to_string(),
        "data": args.data.display().to_string(),
        "alpha": args.alpha,
        "interval_mode": match mode {
            IntervalMode::Gaussian => "gaussian",
            IntervalMode::Empirical => "empirical",
        },
        "multiplier": c,
    });
    write_file_manifest(&args.out, "interval", config, args.seed, started)
}

fn cmd_roc(args: RocArgs, started: Instant) -> Result<()> {
    let mut config = load_config_file(&args.config)?;
    config.seed = args.seed;
    config.error_mode = ErrorMode::Gaussian;
    let delim = args.delimiter as u8;

    let (diseased, healthy) = match (&args.data_diseased, &args.data) {
        (Some(d_path), None) => {
            let h_path = args.data_healthy.as_ref().ok_or_else(|| {
                Error::Invalid("--data-diseased requires --data-healthy".into())
            })?;
            (
                load_csv(d_path, &args.target, delim)?,
                load_csv(h_path, &args.target, delim)?,
            )
        }
        (None, Some(path)) => {
            let group_col = args.group_col.as_ref().ok_or_else(|| {
                Error::Invalid("--data requires --group-col".into())
            })?;
            split_by_group(path, &args.target, group_col, delim)?
        }
        _ => {
            return Err(Error::Invalid(
                "give either --data-diseased/--data-healthy or --data/--group-col".into(),
            ))
        }
    };
    if diseased.feature_names() != healthy.feature_names() {
        return Err(Error::Invalid(
            "diseased and healthy groups must share the same feature columns".into(),
        ));
    }

    let fit_d = fit_pipeline(&diseased, &config)?;
    let fit_h = fit_pipeline(&healthy, &config)?;
    let roc = RocModel::new(fit_d.model, fit_h.model)?;

    let grid = feature_matrix_for(&roc.diseased, &args.grid, args.delimiter)?;
    let aucs = roc.auc_over_rows(&grid)?;

    ensure_dir(&args.out)?;
    let mut artifacts = Vec::new();
    let out_csv = args.out.join("roc_auc.csv");
    {
        let mut w = std::io::BufWriter::new(std::fs::File::create(&out_csv)?);
        let quad = args.n_quad >= 2;
        let mut header = grid.feature_names().join(",");
        header.push_str(",auc");
        if quad {
            header.push_str(",auc_quadrature");
        }
        writeln!(w, "{header}")?;
        for (i, auc) in aucs.iter().enumerate() {
            let coords: Vec<String> = grid.row(i).iter().map(|v| v.to_string()).collect();
            if quad {
                let q = roc.auc_quadrature(grid.row(i), args.n_quad)?;
                writeln!(w, "{},{},{}", coords.join(","), auc, q)?;
            } else {
                writeln!(w, "{},{}", coords.join(","), auc)?;
            }
        }
        w.flush()?;
    }
    artifacts.push(out_csv);

    for (name, model) in [
        ("model_diseased.json", &roc.diseased),
        ("model_healthy.json", &roc.healthy),
    ] {
        let p = args.out.join(name);
        model.save(&p)?;
        artifacts.push(p);
    }
    println!(
        "AUC over {} grid points written to {}",
        grid.n(),
        args.out.join("roc_auc.csv").display()
    );
    write_manifest(
        &args.out,
        "roc",
        serde_json::to_value(&config)?,
        args.seed,
        &artifacts,
        started,
    )
}

/// Split one CSV into (diseased, healthy) by a binary 0/1 group column.
fn split_by_group(
    path: &Path,
    target: &str,
    group_col: &str,
    delimiter: u8,
) -> Result<(Dataset, Dataset)> {
    // Load with the group column as an ordinary feature first, then filter.
    let full = load_csv(path, target, delimiter)?;
    let gidx = full
        .feature_names()
        .iter()
        .position(|n| n == group_col)
        .ok_or_else(|| Error::CsvStructure {
            path: path.display().to_string(),
            msg: format!("missing group column `{group_col}`"),
        })?;
    let feature_cols: Vec<usize> =
        (0..full.p()).filter(|&c| c != gidx).collect();
    let names: Vec<String> = feature_cols
        .iter()
        .map(|&c| full.feature_names()[c].clone())
        .collect();
    let mut rows_d = Vec::new();
    let mut rows_h = Vec::new();
    for i in 0..full.n() {
        match full.row(i)[gidx] {
            v if v == 1.0 => rows_d.push(i),
            v if v == 0.0 => rows_h.push(i),
            v => {
                return Err(Error::Invalid(format!(
                    "group column `{group_col}` must be 0 or 1, found {v} in data row {}",
                    i + 1
                )))
            }
        }
    }
    if rows_d.is_empty() || rows_h.is_empty() {
        return Err(Error::Invalid(format!(
            "group column `{group_col}` must contain both 0 and 1 rows"
        )));
    }
    let build = |rows: &[usize]| -> Result<Dataset> {
        Dataset::new(
            full.gather(rows, &feature_cols),
            feature_cols.len(),
            full.gather_response(rows),
            names.clone(),
        )
    };
    Ok((build(&rows_d)?, build(&rows_h)?))
}

fn cmd_simulate(args: SimulateArgs, started: Instant) -> Result<()> {
    let base = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str(&text)?
        }
        None => {
            PipelineConfig {
                standardize: false,
                ..PipelineConfig::default()
            }
        }
    };
    let mut grid = GridConfig {
        scenarios: args.scenario.clone(),
        p_values: args.p.clone(),
        n_values: args.n.clone().unwrap_or_else(|| vec![2500, 5000, 10_000]),
        runs: args.runs,
        n_test: args.n_test,
        fs: args.fs.into(),
        seed: args.seed,
        pipeline: base,
    };
    if args.full_grid {
        grid.n_values = sim::full_grid_n_values();
        grid.runs = sim::FULL_GRID_RUNS;
        grid.n_test = 5000;
        if grid.p_values.is_none() {
            // All tabulated dimensions (scenarios may differ; use the union
            // of each scenario's table when running it).
            grid.p_values = None;
        }
    }
    // Validate scenario/p compatibility early.
    for &s in &grid.scenarios {
        ScenarioSpec::desk_p_for(s)?;
        if let Some(ps) = &grid.p_values {
            for &p in ps {
                ScenarioSpec::new(s, p)?;
            }
        }
    }

    ensure_dir(&args.out)?;
    let csv_path = args.out.join("results.csv");
    let mut csv_file = std::io::BufWriter::new(std::fs::File::create(&csv_path)?);
    writeln!(csv_file, "scenario,p,n,fs,runs,mss_mean,mss_sd")?;

    let result = sim::run_grid(&grid, |cell| {
        let _ = writeln!(
            csv_file,
            "{},{},{},{},{},{},{}",
            cell.scenario,
            cell.p,
            cell.n,
            if cell.fs { "on" } else { "off" },
            cell.runs,
            cell.mss_mean,
            cell.mss_sd
        );
        let _ = csv_file.flush();
    })?;
    csv_file.flush()?;
    drop(csv_file);

    let json_path = args.out.join("results.json");
    std::fs::write(&json_path, serde_json::to_string_pretty(&result)?)?;

    print_sim_tables(&result);
    write_manifest(
        &args.out,
        "simulate",
        serde_json::to_value(&grid)?,
        args.seed,
        &[csv_path, json_path],
        started,
    )
}

/// Terminal tables shaped like the study layout: one block per scenario and
/// arm, rows by n, column pairs by p.
fn print_sim_tables(result: &sim::SimResult) {
    use std::collections::BTreeSet;
    let scenarios: BTreeSet<u8> = result.cells.iter().map(|c| c.scenario).collect();
    for scenario in scenarios {
        let cells: Vec<_> = result
            .cells
            .iter()
            .filter(|c| c.scenario == scenario)
            .collect();
        let ps: BTreeSet<usize> = cells.iter().map(|c| c.p).collect();
        let ns: BTreeSet<usize> = cells.iter().map(|c| c.n).collect();
        for fs in [true, false] {
            let arm: Vec<_> = cells.iter().filter(|c| c.fs == fs).collect();
            if arm.is_empty() {
                continue;
            }
            println!(
                "scenario {scenario} [{}]",
                if fs { "FS" } else { "No FS" }
            );
            let mut header = format!("{:>8}", "n");
            for &p in &ps {
                header.push_str(&format!(" | {:>10} {:>10}", format!("m(p={p})"), "sd"));
            }
            println!("{header}");
            for &n in &ns {
                let mut line = format!("{n:>8}");
                for &p in &ps {
                    match arm.iter().find(|c| c.n == n && c.p == p) {
                        Some(c) => line.push_str(&format!(
                            " | {:>10.4} {:>10.4}",
                            c.mss_mean, c.mss_sd
                        )),
                        None => line.push_str(&format!(" | {:>10} {:>10}", "-", "-")),
                    }
                }
                println!("{line}");
            }
            println!();
        }
    }
}
