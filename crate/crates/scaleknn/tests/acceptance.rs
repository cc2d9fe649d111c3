//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the measured quantities (visible with --nocapture).
//!
//! Oracles used here are implemented locally and independently of the
//! library's computation paths: brute-force neighbor scans, hand
//! enumeration, compensated Simpson quadrature of the normal density,
//! bisection inversion, and closed-form distribution tails.

use std::io::Write;
use std::sync::Mutex;
use std::time::Instant;

use scaleknn::knn::{query_brute, KnnIndex, NeighborQuery};
use scaleknn::rng;
use scaleknn::sim::{self, generate, FsMode, GridConfig, ScenarioSpec};
use scaleknn::{
    fit_pipeline, interval, stats, Dataset, ErrorMode, IntervalMode, IntervalSpec,
    PipelineConfig,
};

// The criteria are compute-heavy and internally parallel; run them one at
// a time so each gets the whole machine and the timed ones are stable.
static GATE: Mutex<()> = Mutex::new(());

fn gate() -> std::sync::MutexGuard<'static, ()> {
    GATE.lock().unwrap_or_else(|e| e.into_inner())
}

#[test]
fn c01_index_matches_brute_force_oracle() {
    let _g = gate();
    let started = Instant::now();
    let instances = 200;
    for trial in 0..instances {
        let mut r = rng::rng_from_seed(7_000 + trial);
        let m = 1 + (rng::uniform01(&mut r) * 200.0) as usize;
        let d = 1 + (rng::uniform01(&mut r) * 8.0) as usize;
        let k = 1 + (rng::uniform01(&mut r) * 20.0) as usize;
        let k = k.min(m);
        // Half the instances quantize coordinates so exact distance ties
        // occur and exercise the (distance, index) ordering.
        let quantize = trial % 2 == 0;
        let coord = |r: &mut rand_chacha::ChaCha12Rng| {
            let u = rng::uniform01(r);
            if quantize {
                (u * 4.0).floor() / 4.0
            } else {
                u
            }
        };
        let points: Vec<f64> = (0..m * d).map(|_| coord(&mut r)).collect();
        let query: Vec<f64> = (0..d).map(|_| coord(&mut r)).collect();
        let index = KnnIndex::with_leaf_size(points.clone(), d, 1 + trial as usize % 48).unwrap();
        let exclude = if trial % 3 == 0 && m > k {
            Some((trial as usize * 13) % m)
        } else {
            None
        };
        let q = NeighborQuery {
            point: &query,
            k,
            exclude,
        };
        let tree = index.query(&q).unwrap();
        let brute = query_brute(&points, d, &q).unwrap();
        assert_eq!(tree.indices, brute.indices, "instance {trial}");
        assert_eq!(tree.distances, brute.distances, "instance {trial}");
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "equivalence sweep took {elapsed:?}"
    );
    println!(
        "criterion 1 PASS: kd-tree == brute force on {instances} random instances in {:.2?}",
        elapsed
    );
}

#[test]
fn c02_loocv_micro_oracle() {
    let _g = gate();
    // Hand enumeration for X = [0,1,2], Y = [0,1,2]: leave-one-out 1-NN
    // predictions are [1,0,1] under the low-index tie rule, so
    // f(1) = (1 + 1 + 1)/3 = 1; 2-NN predictions are [1.5, 1, 0.5], so
    // f(2) = (2.25 + 0 + 2.25)/3 = 1.5.
    let d = Dataset::new(
        vec![0.0, 1.0, 2.0],
        1,
        vec![0.0, 1.0, 2.0],
        vec!["x".into()],
    )
    .unwrap();
    let trace =
        scaleknn::select_k(&d, &[0, 1, 2], &[0], &[0.0, 1.0, 2.0], &[1, 2]).unwrap();
    assert_eq!(trace.scores, vec![1.0, 1.5]);
    assert_eq!(trace.chosen, 1);

    // Constant responses: zero risk everywhere, ties resolve to the
    // largest candidate.
    let n = 40;
    let mut r = rng::rng_from_seed(2);
    let feats: Vec<f64> = (0..n).map(|_| rng::uniform01(&mut r)).collect();
    let flat = Dataset::new(feats, 1, vec![3.0; n], vec!["x".into()]).unwrap();
    let rows: Vec<usize> = (0..n).collect();
    let grid: Vec<usize> = (1..n).collect();
    let trace = scaleknn::select_k(&flat, &rows, &[0], &vec![3.0; n], &grid).unwrap();
    assert_eq!(trace.chosen, n - 1);
    println!("criterion 2 PASS: f(1) = 1, f(2) = 1.5, chosen k = 1; constant y chooses max k");
}

#[test]
fn c03_scenario1_desk_scale_bracket() {
    let _g = gate();
    let started = Instant::now();
    let cfg = GridConfig {
        scenarios: vec![1],
        p_values: Some(vec![3]),
        n_values: vec![5000],
        runs: 30,
        n_test: 2000,
        fs: FsMode::On,
        seed: 20_250_001,
        ..Default::default()
    };
    let result = sim::run_grid(&cfg, |_| {}).unwrap();
    let cell = &result.cells[0];
    let elapsed = started.elapsed();
    assert!(
        cell.mss_mean >= 0.02 && cell.mss_mean <= 0.09,
        "MSS^m = {} outside [0.02, 0.09]",
        cell.mss_mean
    );
    assert!(
        elapsed.as_secs_f64() < 600.0,
        "runtime {elapsed:?} exceeded 10 minutes"
    );
    println!(
        "criterion 3 PASS: scenario 1 (p=3, n=5000, B=30) MSS^m = {:.4} in [0.02, 0.09] ({:.1?})",
        cell.mss_mean, elapsed
    );
}

#[test]
fn c04_selection_dominates_in_high_dimension() {
    let _g = gate();
    let cfg = GridConfig {
        scenarios: vec![1],
        p_values: Some(vec![25]),
        n_values: vec![5000],
        runs: 30,
        n_test: 2000,
        fs: FsMode::Both,
        seed: 20_250_002,
        ..Default::default()
    };
    let result = sim::run_grid(&cfg, |_| {}).unwrap();
    let fs = result.cells.iter().find(|c| c.fs).unwrap();
    let nofs = result.cells.iter().find(|c| !c.fs).unwrap();
    let ratio = nofs.mss_mean / fs.mss_mean;
    assert!(
        ratio >= 5.0,
        "MSS^m ratio NoFS/FS = {ratio:.2} ({} / {})",
        nofs.mss_mean,
        fs.mss_mean
    );
    println!(
        "criterion 4 PASS: scenario 1 (p=25, n=5000) MSS^m NoFS/FS = {:.4}/{:.4}, ratio {:.1} >= 5",
        nofs.mss_mean, fs.mss_mean, ratio
    );
}

#[test]
fn c05_scenario6_support_recovery() {
    let _g = gate();
    let spec = ScenarioSpec::new(6, 10).unwrap();
    let truth_mean = spec.mean_support();
    let truth_var = spec.sd_support();
    let seeds = 20u64;
    let mut full_recoveries = 0;
    let mut any_false_positive = 0;
    for seed in 0..seeds {
        let data = generate(&spec, 50_000, 31_000 + seed).unwrap();
        let fit = fit_pipeline(
            &data,
            &PipelineConfig {
                standardize: false,
                seed: 32_000 + seed,
                ..Default::default()
            },
        )
        .unwrap();
        let mean_sel = fit.mean_selection.as_ref().unwrap().selected_features();
        let var_sel = fit.variance_selection.as_ref().unwrap().selected_features();
        let recovered = truth_mean.iter().all(|f| mean_sel.contains(f))
            && truth_var.iter().all(|f| var_sel.contains(f));
        let fp = mean_sel.iter().any(|f| !truth_mean.contains(f))
            || var_sel.iter().any(|f| !truth_var.contains(f));
        if recovered && !fp {
            full_recoveries += 1;
        }
        if fp {
            any_false_positive += 1;
        }
    }
    assert!(
        full_recoveries * 100 >= seeds * 80,
        "full recovery in {full_recoveries}/{seeds} seeds"
    );
    assert!(
        any_false_positive * 100 <= seeds * 20,
        "false positives in {any_false_positive}/{seeds} seeds"
    );
    println!(
        "criterion 5 PASS: scenario 6 (p=10, n=50000) exact recovery {full_recoveries}/{seeds}, \
         false positives {any_false_positive}/{seeds}"
    );
}

#[test]
fn c06_interval_coverage() {
    let _g = gate();
    let spec = ScenarioSpec::new(3, 3).unwrap();
    let alpha = 0.1;
    let seeds = 20u64;
    let mut gaussian_cov = Vec::new();
    let mut empirical_cov = Vec::new();
    let mut q95 = Vec::new();
    for seed in 0..seeds {
        let train = generate(&spec, 20_000, 51_000 + seed).unwrap();
        let fit = fit_pipeline(
            &train,
            &PipelineConfig {
                standardize: false,
                error_mode: ErrorMode::Empirical,
                seed: 52_000 + seed,
                ..Default::default()
            },
        )
        .unwrap();
        let test = generate(&spec, 5000, 53_000 + seed).unwrap();
        let preds = fit.model.predict_batch(&test).unwrap();
        let c_g = interval::interval_multiplier(
            &fit.model,
            &IntervalSpec::new(alpha, IntervalMode::Gaussian).unwrap(),
        )
        .unwrap();
        let c_e = interval::interval_multiplier(
            &fit.model,
            &IntervalSpec::new(alpha, IntervalMode::Empirical).unwrap(),
        )
        .unwrap();
        let mut hits_g = 0usize;
        let mut hits_e = 0usize;
        for (i, (m, s)) in preds.iter().enumerate() {
            let y = test.response()[i];
            if (y - m).abs() <= c_g * s {
                hits_g += 1;
            }
            if (y - m).abs() <= c_e * s {
                hits_e += 1;
            }
        }
        gaussian_cov.push(hits_g as f64 / test.n() as f64);
        empirical_cov.push(hits_e as f64 / test.n() as f64);
        // The 95% multiplier from the same calibration set, for the
        // Gaussian-convergence check below.
        q95.push(
            fit.model
                .calibration
                .as_ref()
                .unwrap()
                .quantile_multiplier(0.05)
                .unwrap(),
        );
    }
    let mean_g = gaussian_cov.iter().sum::<f64>() / seeds as f64;
    let mean_e = empirical_cov.iter().sum::<f64>() / seeds as f64;
    assert!(
        (0.88..=0.92).contains(&mean_g),
        "gaussian coverage {mean_g}"
    );
    assert!(mean_e >= 0.89, "empirical coverage {mean_e}");
    // Errors really are Gaussian here, so the empirical 95% multiplier
    // approaches the normal quantile.
    let mean_q95 = q95.iter().sum::<f64>() / seeds as f64;
    assert!(
        (mean_q95 - 1.9599639845400543).abs() < 0.1,
        "q_0.95 = {mean_q95}"
    );
    println!(
        "criterion 6 PASS: scenario 3 coverage gaussian {mean_g:.4} in [0.88, 0.92], \
         empirical {mean_e:.4} >= 0.89; q95 = {mean_q95:.3}"
    );
}

/// Two-group biomarker data with separation Delta(x) = x1.
fn roc_group(n: usize, diseased: bool, seed: u64) -> Dataset {
    let mut r = rng::rng_from_seed(seed);
    let mut feats = Vec::with_capacity(n * 2);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let x1 = rng::uniform01(&mut r);
        let x2 = rng::uniform01(&mut r);
        feats.extend_from_slice(&[x1, x2]);
        let shift = if diseased { x1 } else { 0.0 };
        ys.push(shift + rng::standard_normal_pair(&mut r).0);
    }
    Dataset::new(feats, 2, ys, vec!["x1".into(), "x2".into()]).unwrap()
}

#[test]
fn c07_conditional_roc_auc() {
    let _g = gate();
    let n = 50_000;
    let config = PipelineConfig {
        standardize: false,
        seed: 61,
        ..Default::default()
    };
    let roc = scaleknn::roc::RocModel::new(
        fit_pipeline(&roc_group(n, true, 62), &config).unwrap().model,
        fit_pipeline(&roc_group(n, false, 63), &config).unwrap().model,
    )
    .unwrap();
    let mut worst = 0.0f64;
    for i in 0..10 {
        let x1 = 0.05 + 0.1 * i as f64;
        let x = [x1, 0.5];
        let auc = roc.auc(&x).unwrap();
        let truth = stats::normal_cdf(x1 / std::f64::consts::SQRT_2);
        worst = worst.max((auc - truth).abs());
        // Quadrature route agrees with the closed form.
        let quad = roc.auc_quadrature(&x, 10_000).unwrap();
        assert!(
            (quad - auc).abs() < 1e-6,
            "quadrature {quad} vs closed form {auc}"
        );
    }
    assert!(worst <= 0.03, "max AUC error {worst}");

    // Identical populations: no diagnostic power anywhere.
    let same = scaleknn::roc::RocModel::new(
        fit_pipeline(&roc_group(n, false, 64), &config).unwrap().model,
        fit_pipeline(&roc_group(n, false, 65), &config).unwrap().model,
    )
    .unwrap();
    let mut worst_id = 0.0f64;
    for i in 0..10 {
        let x = [0.05 + 0.1 * i as f64, 0.5];
        worst_id = worst_id.max((same.auc(&x).unwrap() - 0.5).abs());
    }
    assert!(worst_id <= 0.02, "identical populations drift {worst_id}");
    println!(
        "criterion 7 PASS: AUC(x) within {worst:.4} of the truth; identical populations \
         within {worst_id:.4} of 0.5; quadrature == closed form to 1e-6"
    );
}

/// Oracle normal cdf: compensated composite-Simpson integral of the
/// density, fully independent of the library's series/continued-fraction
/// evaluation.
fn phi_oracle(x: f64) -> f64 {
    let a = x.abs().min(10.0);
    let panels = 40_000usize; // even
    let h = a / panels as f64;
    let density = |t: f64| (-0.5 * t * t).exp();
    let mut sum = density(0.0) + density(a);
    let mut comp = 0.0;
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        // Kahan summation keeps the 40k-term accumulation at machine
        // precision.
        let y = w * density(h * i as f64) - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let integral = sum * h / 3.0 / (2.0 * std::f64::consts::PI).sqrt();
    if x >= 0.0 {
        0.5 + integral
    } else {
        0.5 - integral
    }
}

#[test]
fn c08_numerics_match_independent_oracles() {
    let _g = gate();
    // Normal cdf against the quadrature oracle.
    let mut worst_phi = 0.0f64;
    let mut x = -8.0;
    while x <= 8.0 {
        worst_phi = worst_phi.max((stats::normal_cdf(x) - phi_oracle(x)).abs());
        x += 0.23;
    }
    assert!(worst_phi <= 1e-12, "max Phi error {worst_phi:e}");

    // Normal quantile against bisection on the quadrature oracle.
    let mut worst_q = 0.0f64;
    for q in [
        0.001, 0.01, 0.025, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.975, 0.99, 0.999,
    ] {
        let (mut lo, mut hi) = (-10.0f64, 10.0f64);
        while hi - lo > 1e-13 {
            let mid = 0.5 * (lo + hi);
            if phi_oracle(mid) < q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let bisected = 0.5 * (lo + hi);
        worst_q = worst_q.max((stats::normal_quantile(q).unwrap() - bisected).abs());
    }
    assert!(worst_q <= 1e-12, "max quantile error {worst_q:e}");

    // Student-t upper tail at two degrees of freedom against the closed
    // form F(x) = 1/2 + x / (2 sqrt(2 + x^2)).
    let mut worst_t = 0.0f64;
    let mut t: f64 = -40.0;
    while t <= 40.0 {
        let closed = 0.5 - t / (2.0 * (2.0 + t * t).sqrt());
        worst_t = worst_t.max((stats::student_t_sf(t, 2.0) - closed).abs());
        t += 0.37;
    }
    assert!(worst_t <= 1e-10, "max t-tail error {worst_t:e}");
    println!(
        "criterion 8 PASS: |Phi err| <= {worst_phi:.2e} (<=1e-12), |quantile err| <= {worst_q:.2e} \
         (<=1e-12), |t-tail err| <= {worst_t:.2e} (<=1e-10)"
    );
}

#[test]
fn c09_errors_shrink_with_sample_size() {
    let _g = gate();
    let cfg = GridConfig {
        scenarios: vec![3],
        p_values: Some(vec![3]),
        n_values: vec![2500, 5000, 10_000],
        runs: 10,
        n_test: 2000,
        fs: FsMode::On,
        seed: 20_250_009,
        ..Default::default()
    };
    let result = sim::run_grid(&cfg, |_| {}).unwrap();
    let by_n: Vec<(usize, f64, f64)> = result
        .cells
        .iter()
        .map(|c| (c.n, c.mss_mean, c.mss_sd))
        .collect();
    for w in by_n.windows(2) {
        assert!(
            w[1].1 < w[0].1,
            "MSS^m did not decrease: {:?} -> {:?}",
            w[0],
            w[1]
        );
        assert!(
            w[1].2 < w[0].2,
            "MSS^sigma did not decrease: {:?} -> {:?}",
            w[0],
            w[1]
        );
    }
    println!(
        "criterion 9 PASS: scenario 3 MSS^m {:.4} > {:.4} > {:.4}, MSS^sigma {:.4} > {:.4} > {:.4}",
        by_n[0].1, by_n[1].1, by_n[2].1, by_n[0].2, by_n[1].2, by_n[2].2
    );
}

fn run_cli(args: &[&str]) {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_scaleknn"))
        .args(args)
        .output()
        .expect("spawn scaleknn");
    assert!(
        out.status.success(),
        "cli {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn c10_cli_byte_reproducibility() {
    let _g = gate();
    let dir = tempfile::tempdir().unwrap();

    // Simulate: identical bytes across repeated runs and thread counts.
    let sim_args = |out: &str, threads: &str| {
        vec![
            "simulate".to_string(),
            "--scenario".into(),
            "3".into(),
            "--p".into(),
            "3".into(),
            "--n".into(),
            "800".into(),
            "--runs".into(),
            "4".into(),
            "--n-test".into(),
            "400".into(),
            "--fs".into(),
            "both".into(),
            "--seed".into(),
            "99".into(),
            "--threads".into(),
            threads.into(),
            "--out".into(),
            out.into(),
        ]
    };
    for (name, threads) in [("s1", "1"), ("s2", "4"), ("s3", "4")] {
        let out = dir.path().join(name);
        let args = sim_args(out.to_str().unwrap(), threads);
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        run_cli(&args);
    }
    for file in ["results.csv", "results.json"] {
        let a = std::fs::read(dir.path().join("s1").join(file)).unwrap();
        let b = std::fs::read(dir.path().join("s2").join(file)).unwrap();
        let c = std::fs::read(dir.path().join("s3").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs across thread counts");
        assert_eq!(b, c, "{file} differs across runs");
    }

    // Fit + predict: identical artifacts across repeated invocations.
    let spec = ScenarioSpec::new(3, 3).unwrap();
    let train = generate(&spec, 900, 5).unwrap();
    let csv = dir.path().join("train.csv");
    {
        let mut f = std::io::BufWriter::new(std::fs::File::create(&csv).unwrap());
        writeln!(f, "x1,x2,x3,y").unwrap();
        for i in 0..train.n() {
            let row = train.row(i);
            writeln!(f, "{},{},{},{}", row[0], row[1], row[2], train.response()[i]).unwrap();
        }
    }
    for name in ["m1", "m2"] {
        let out = dir.path().join(name);
        run_cli(&[
            "fit",
            "--data",
            csv.to_str().unwrap(),
            "--target",
            "y",
            "--seed",
            "17",
            "--out",
            out.to_str().unwrap(),
        ]);
        let preds = dir.path().join(format!("{name}.csv"));
        run_cli(&[
            "predict",
            "--model",
            out.join("model.json").to_str().unwrap(),
            "--data",
            csv.to_str().unwrap(),
            "--out",
            preds.to_str().unwrap(),
        ]);
    }
    for file in ["model.json", "split_plan.json", "k_traces.json"] {
        let a = std::fs::read(dir.path().join("m1").join(file)).unwrap();
        let b = std::fs::read(dir.path().join("m2").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs across runs");
    }
    let p1 = std::fs::read(dir.path().join("m1.csv")).unwrap();
    let p2 = std::fs::read(dir.path().join("m2.csv")).unwrap();
    assert_eq!(p1, p2, "predictions differ across runs");

    // The manifests hash identical artifacts identically (wall-clock is
    // the only varying field).
    let load = |p: &std::path::Path| -> serde_json::Value {
        serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
    };
    let m1 = load(&dir.path().join("m1").join("manifest.json"));
    let m2 = load(&dir.path().join("m2").join("manifest.json"));
    assert_eq!(m1["artifact_hashes"], m2["artifact_hashes"]);
    println!(
        "criterion 10 PASS: simulate/fit/predict artifacts byte-identical across runs and \
         thread counts"
    );
}
