//! Split-based variable selection via leave-one-covariate-out risk
//! differences.
//!
//! For every candidate feature j, a full model and a model refitted without
//! j (each with its own leave-one-out-selected k) are compared on a held-out
//! split through W_j(x, y) = (y - m_minus_j(x))^2 - (y - m(x))^2. A positive
//! mean signals that dropping j hurts, tested one-sided per feature and
//! Bonferroni-corrected across the whole family (mean and variance
//! candidates together).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::estim::{default_k_grid, select_k, MeanModel};
use crate::stats;

/// Which regression function a report concerns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionTarget {
    Mean,
    Variance,
}

impl std::fmt::Display for SelectionTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SelectionTarget::Mean => write!(f, "mean"),
            SelectionTarget::Variance => write!(f, "variance"),
        }
    }
}

/// One-sided t-test result.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TTest {
    pub t: f64,
    pub p: f64,
    pub df: f64,
}

/// One-sample t-test of H0: mean <= 0 against Ha: mean > 0.
///
/// Uses the sample standard deviation (denominator n-1). With zero sample
/// spread the decision is forced by the common sign: all-positive values
/// give p = 0, otherwise p = 1.
pub fn t_test_one_sided(values: &[f64]) -> Result<TTest> {
    let n = values.len();
    if n < 2 {
        return Err(Error::Invalid(format!(
            "t-test needs at least 2 values, got {n}"
        )));
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let sd = (ss / (nf - 1.0)).sqrt();
    let df = nf - 1.0;
    if sd == 0.0 {
        let (t, p) = if mean > 0.0 {
            (f64::INFINITY, 0.0)
        } else if mean < 0.0 {
            (f64::NEG_INFINITY, 1.0)
        } else {
            (0.0, 1.0)
        };
        return Ok(TTest { t, p, df });
    }
    let t = mean / (sd / nf.sqrt());
    Ok(TTest {
        t,
        p: stats::student_t_sf(t, df),
        df,
    })
}

/// Per-feature outcome of the selection test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureDecision {
    pub feature: usize,
    pub name: String,
    /// Sample mean of the leave-one-covariate-out statistic.
    pub w_mean: f64,
    pub sd: f64,
    pub t: f64,
    pub p: f64,
    pub selected: bool,
}

/// Selection outcome for one target function.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionReport {
    pub target: SelectionTarget,
    /// Family significance level before correction.
    pub alpha: f64,
    /// Total simultaneous comparisons (2p across both targets).
    pub n_tests: usize,
    pub n_eval: usize,
    pub decisions: Vec<FeatureDecision>,
}

impl SelectionReport {
    pub fn threshold(&self) -> f64 {
        self.alpha / self.n_tests as f64
    }

    /// Selected feature ids, ascending.
    pub fn selected_features(&self) -> Vec<usize> {
        self.decisions
            .iter()
            .filter(|d| d.selected)
            .map(|d| d.feature)
            .collect()
    }

    /// Plain-text table for terminal output.
    pub fn render_table(&self) -> String {
        let mut out = format!(
            "target: {}   alpha = {}   tests = {}   threshold = {:.6e}\n",
            self.target,
            self.alpha,
            self.n_tests,
            self.threshold()
        );
        out.push_str(&format!(
            "{:<16} {:>12} {:>12} {:>10} {:>12} {:>9}\n",
            "feature", "w_mean", "sd", "t", "p", "selected"
        ));
        for d in &self.decisions {
            out.push_str(&format!(
                "{:<16} {:>12.5e} {:>12.5e} {:>10.3} {:>12.5e} {:>9}\n",
                d.name,
                d.w_mean,
                d.sd,
                d.t,
                d.p,
                if d.selected { "yes" } else { "no" }
            ));
        }
        out
    }
}

fn check_disjoint(fit_rows: &[usize], eval_rows: &[usize]) -> Result<()> {
    let fit: std::collections::HashSet<usize> = fit_rows.iter().copied().collect();
    if let Some(&r) = eval_rows.iter().find(|r| fit.contains(r)) {
        return Err(Error::OverlappingSplits {
            context: format!("row {r} appears in both the fit and evaluation splits"),
        });
    }
    Ok(())
}

/// Fit a local-average model over `support` with its own leave-one-out k.
fn fit_with_own_k(
    data: &Dataset,
    rows: &[usize],
    support: &[usize],
    values: &[f64],
) -> Result<MeanModel> {
    if support.is_empty() {
        return MeanModel::fit_values(data, rows, &[], 1, values.to_vec());
    }
    let grid = default_k_grid(rows.len());
    let trace = select_k(data, rows, support, values, &grid)?;
    MeanModel::fit_values(data, rows, support, trace.chosen, values.to_vec())
}

/// Leave-one-covariate-out statistics for feature `j`.
///
/// Fits the full model over `candidates` and the model without `j`, each
/// with its own leave-one-out k on the fit split, and returns
/// W_j(x_i, y_i) over the evaluation split. `fit_values` / `eval_values`
/// are the regression target on the respective splits (responses for the
/// mean, squared residuals for the variance).
pub fn loco_statistics(
    data: &Dataset,
    fit_rows: &[usize],
    eval_rows: &[usize],
    fit_values: &[f64],
    eval_values: &[f64],
    candidates: &[usize],
    j: usize,
) -> Result<Vec<f64>> {
    check_disjoint(fit_rows, eval_rows)?;
    if !candidates.contains(&j) {
        return Err(Error::Invalid(format!(
            "feature {j} is not among the candidates"
        )));
    }
    let base = fit_with_own_k(data, fit_rows, candidates, fit_values)?;
    let base_sq: Vec<f64> = eval_rows
        .iter()
        .zip(eval_values)
        .map(|(&r, &y)| {
            let e = y - base.predict(data.row(r));
            e * e
        })
        .collect();
    loco_for_feature(
        data, fit_rows, eval_rows, fit_values, eval_values, candidates, j, &base_sq,
    )
}

#[allow(clippy::too_many_arguments)]
fn loco_for_feature(
    data: &Dataset,
    fit_rows: &[usize],
    eval_rows: &[usize],
    fit_values: &[f64],
    eval_values: &[f64],
    candidates: &[usize],
    j: usize,
    base_sq: &[f64],
) -> Result<Vec<f64>> {
    let minus_j: Vec<usize> = candidates.iter().copied().filter(|&c| c != j).collect();
    let reduced = fit_with_own_k(data, fit_rows, &minus_j, fit_values)?;
    Ok(eval_rows
        .iter()
        .zip(eval_values)
        .zip(base_sq)
        .map(|((&r, &y), &b)| {
            let e = y - reduced.predict(data.row(r));
            e * e - b
        })
        .collect())
}

/// Run the full leave-one-covariate-out test battery for one target.
///
/// `n_tests` is the family-wide comparison count used by the Bonferroni
/// threshold (2p when both mean and variance families are tested).
#[allow(clippy::too_many_arguments)]
pub fn selection_report(
    data: &Dataset,
    fit_rows: &[usize],
    eval_rows: &[usize],
    fit_values: &[f64],
    eval_values: &[f64],
    candidates: &[usize],
    target: SelectionTarget,
    alpha: f64,
    n_tests: usize,
) -> Result<SelectionReport> {
    check_disjoint(fit_rows, eval_rows)?;
    if fit_rows.len() < 2 || eval_rows.len() < 2 {
        return Err(Error::Invalid(format!(
            "selection needs at least 2 fit and 2 evaluation rows, got {} and {}",
            fit_rows.len(),
            eval_rows.len()
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Invalid(format!(
            "alpha = {alpha} outside the open interval (0, 1)"
        )));
    }
    if candidates.is_empty() {
        return Err(Error::Invalid("no candidate features".into()));
    }
    let base = fit_with_own_k(data, fit_rows, candidates, fit_values)?;
    let base_sq: Vec<f64> = eval_rows
        .iter()
        .zip(eval_values)
        .map(|(&r, &y)| {
            let e = y - base.predict(data.row(r));
            e * e
        })
        .collect();

    let threshold = alpha / n_tests as f64;
    let decisions: Vec<FeatureDecision> = candidates
        .par_iter()
        .map(|&j| {
            let w = loco_for_feature(
                data, fit_rows, eval_rows, fit_values, eval_values, candidates, j, &base_sq,
            )?;
            let test = t_test_one_sided(&w)?;
            let mean = w.iter().sum::<f64>() / w.len() as f64;
            let sd = (w.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
                / (w.len() as f64 - 1.0))
                .sqrt();
            Ok(FeatureDecision {
                feature: j,
                name: data.feature_names()[j].clone(),
                w_mean: mean,
                sd,
                t: test.t,
                p: test.p,
                selected: test.p < threshold,
            })
        })
        .collect::<Result<_>>()?;

    Ok(SelectionReport {
        target,
        alpha,
        n_tests,
        n_eval: eval_rows.len(),
        decisions,
    })
}
