//! End-to-end fitting flow over six named data roles: mean variable
//! selection, mean k-selection, mean fit, variance selection + k-selection
//! on residuals, variance fit, and calibration. Every stage consumes only
//! its own role's rows, so no observation is reused across stages.

use serde::{Deserialize, Serialize};

use crate::data::{apportion_raw, make_splits, Dataset, SplitPlan, Standardizer};
use crate::error::{Error, Result};
use crate::estim::{
    compute_residuals, default_k_grid, select_k, KSelectionTrace, MeanModel, VarianceModel,
};
use crate::interval::calibrate_empirical;
use crate::model::{ErrorMode, ScaleLocModel};
use crate::select::{selection_report, SelectionReport, SelectionTarget};

/// Role names of the default six-way split.
pub mod roles {
    pub const MEAN_SELECT: &str = "mean_select";
    pub const MEAN_K: &str = "mean_k";
    pub const MEAN_FIT: &str = "mean_fit";
    pub const VAR_SELECT: &str = "var_select";
    pub const VAR_FIT: &str = "var_fit";
    pub const CALIBRATE: &str = "calibrate";

    pub const ALL: [&str; 6] = [
        MEAN_SELECT,
        MEAN_K,
        MEAN_FIT,
        VAR_SELECT,
        VAR_FIT,
        CALIBRATE,
    ];
}

/// Weight of one named role in the split plan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoleFraction {
    pub role: String,
    pub weight: f64,
}

/// Pipeline settings; every field has a sensible default, so a config file
/// only needs to name what it overrides.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// Split weights per role; must cover all six roles.
    pub fractions: Vec<RoleFraction>,
    /// Family significance level for variable selection.
    pub selection_alpha: f64,
    /// Run variable selection (true) or use every candidate (false, the
    /// all-features baseline).
    pub selection: bool,
    /// Candidate feature ids; `None` means all columns.
    pub candidates: Option<Vec<usize>>,
    /// Explicit k grid; `None` uses the built-in policy (full grid for
    /// slices of up to 1000 rows, geometric ladder beyond).
    pub k_grid: Option<Vec<usize>>,
    /// Standardize features (fit on the plan's rows) before any distance
    /// computation. On by default for real data; the simulation harness
    /// turns it off because its covariates are already on a common scale.
    pub standardize: bool,
    pub error_mode: ErrorMode,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            fractions: roles::ALL
                .iter()
                .map(|r| RoleFraction {
                    role: (*r).to_string(),
                    weight: 1.0,
                })
                .collect(),
            selection_alpha: 0.05,
            selection: true,
            candidates: None,
            k_grid: None,
            standardize: true,
            error_mode: ErrorMode::Gaussian,
            seed: 0,
        }
    }
}

impl PipelineConfig {
    fn validate(&self, p: usize) -> Result<Vec<usize>> {
        if !(self.selection_alpha > 0.0 && self.selection_alpha < 1.0) {
            return Err(Error::Invalid(format!(
                "selection alpha = {} outside (0, 1)",
                self.selection_alpha
            )));
        }
        for required in roles::ALL {
            if !self.fractions.iter().any(|f| f.role == required) {
                return Err(Error::Invalid(format!(
                    "split fractions must cover role `{required}`"
                )));
            }
        }
        if self.fractions.len() != roles::ALL.len() {
            return Err(Error::Invalid(format!(
                "expected exactly {} roles, got {}",
                roles::ALL.len(),
                self.fractions.len()
            )));
        }
        let mut candidates: Vec<usize> = match &self.candidates {
            Some(c) => c.clone(),
            None => (0..p).collect(),
        };
        candidates.sort_unstable();
        candidates.dedup();
        if candidates.is_empty() {
            return Err(Error::Invalid("no candidate features".into()));
        }
        if let Some(&c) = candidates.iter().find(|&&c| c >= p) {
            return Err(Error::Invalid(format!(
                "candidate feature {c} out of range for p = {p}"
            )));
        }
        if let Some(grid) = &self.k_grid {
            if grid.is_empty() {
                return Err(Error::EmptyGrid);
            }
        }
        Ok(candidates)
    }

    /// Minimum rows each role needs under this configuration.
    fn role_minimum(&self, role: &str) -> usize {
        let grid_need = self
            .k_grid
            .as_ref()
            .and_then(|g| g.iter().max().map(|&k| k + 1))
            .unwrap_or(2);
        match role {
            roles::MEAN_SELECT if self.selection => 4,
            roles::VAR_SELECT if self.selection => 4.max(grid_need),
            roles::VAR_SELECT => grid_need,
            roles::MEAN_K => grid_need,
            _ => 1,
        }
    }
}

/// Everything produced by one fitting run.
#[derive(Debug, Clone)]
pub struct PipelineFit {
    pub model: ScaleLocModel,
    /// Selection reports; absent when selection is disabled.
    pub mean_selection: Option<SelectionReport>,
    pub variance_selection: Option<SelectionReport>,
    /// k-selection traces; absent when the corresponding support came up
    /// empty and the estimator fell back to its constant form.
    pub mean_k_trace: Option<KSelectionTrace>,
    pub variance_k_trace: Option<KSelectionTrace>,
    pub plan: SplitPlan,
}

fn halves(rows: &[usize]) -> (&[usize], &[usize]) {
    rows.split_at(rows.len() / 2)
}

fn grid_for(config: &PipelineConfig, n_slice: usize) -> Vec<usize> {
    match &config.k_grid {
        Some(g) => g.clone(),
        None => default_k_grid(n_slice),
    }
}

/// Fit the full scale-location model on `data` under `config`.
pub fn fit_pipeline(data: &Dataset, config: &PipelineConfig) -> Result<PipelineFit> {
    let candidates = config.validate(data.p())?;
    let weights: Vec<f64> = config.fractions.iter().map(|f| f.weight).collect();
    let sizes = apportion_raw(data.n(), &weights)?;
    for (fraction, &size) in config.fractions.iter().zip(&sizes) {
        let needed = config.role_minimum(&fraction.role);
        if size < needed {
            return Err(Error::InsufficientRows {
                role: fraction.role.clone(),
                got: size,
                needed,
            });
        }
    }
    let fractions: Vec<(String, f64)> = config
        .fractions
        .iter()
        .map(|f| (f.role.clone(), f.weight))
        .collect();
    let plan = make_splits(data.n(), &fractions, config.seed)?;
    debug_assert!(plan.is_disjoint());

    let standardizer = if config.standardize {
        Some(Standardizer::fit(data, &plan.all_rows())?)
    } else {
        None
    };
    let owned;
    let work: &Dataset = match &standardizer {
        Some(s) => {
            owned = s.transform(data)?;
            &owned
        }
        None => data,
    };

    let r_mean_select = plan.role(roles::MEAN_SELECT).unwrap();
    let r_mean_k = plan.role(roles::MEAN_K).unwrap();
    let r_mean_fit = plan.role(roles::MEAN_FIT).unwrap();
    let r_var_select = plan.role(roles::VAR_SELECT).unwrap();
    let r_var_fit = plan.role(roles::VAR_FIT).unwrap();
    let r_calibrate = plan.role(roles::CALIBRATE).unwrap();

    let n_tests = 2 * candidates.len();

    // Mean variable selection on the first role's own fit/evaluate halves.
    let mean_selection = if config.selection {
        let (fit_half, eval_half) = halves(r_mean_select);
        Some(selection_report(
            work,
            fit_half,
            eval_half,
            &work.gather_response(fit_half),
            &work.gather_response(eval_half),
            &candidates,
            SelectionTarget::Mean,
            config.selection_alpha,
            n_tests,
        )?)
    } else {
        None
    };
    let mean_support: Vec<usize> = match &mean_selection {
        Some(report) => report.selected_features(),
        None => candidates.clone(),
    };

    // Mean k-selection and fit.
    let mean_k_trace = if mean_support.is_empty() {
        None
    } else {
        let grid = grid_for(config, r_mean_k.len());
        Some(select_k(
            work,
            r_mean_k,
            &mean_support,
            &work.gather_response(r_mean_k),
            &grid,
        )?)
    };
    let k1 = mean_k_trace
        .as_ref()
        .map(|t| t.chosen.min(r_mean_fit.len()))
        .unwrap_or(1);
    let mean = MeanModel::fit(work, r_mean_fit, &mean_support, k1)?;

    // Residuals on the variance-selection role, then variance selection and
    // k-selection with squared residuals as the target.
    let eps_select: Vec<f64> = compute_residuals(&mean, work, r_var_select)?;
    let eps2_select: Vec<f64> = eps_select.iter().map(|e| e * e).collect();
    let variance_selection = if config.selection {
        let (fit_half, eval_half) = halves(r_var_select);
        let split = fit_half.len();
        Some(selection_report(
            work,
            fit_half,
            eval_half,
            &eps2_select[..split],
            &eps2_select[split..],
            &candidates,
            SelectionTarget::Variance,
            config.selection_alpha,
            n_tests,
        )?)
    } else {
        None
    };
    let var_support: Vec<usize> = match &variance_selection {
        Some(report) => report.selected_features(),
        None => candidates.clone(),
    };

    let variance_k_trace = if var_support.is_empty() {
        None
    } else {
        let grid = grid_for(config, r_var_select.len());
        Some(select_k(
            work,
            r_var_select,
            &var_support,
            &eps2_select,
            &grid,
        )?)
    };
    let k2 = variance_k_trace
        .as_ref()
        .map(|t| t.chosen.min(r_var_fit.len()))
        .unwrap_or(1);
    let eps_fit: Vec<f64> = compute_residuals(&mean, work, r_var_fit)?;
    let eps2_fit: Vec<f64> = eps_fit.iter().map(|e| e * e).collect();
    let variance = VarianceModel::fit(
        work,
        r_var_fit,
        &eps2_fit,
        &var_support,
        k2,
        var_support.is_empty(),
    )?;

    // Assemble; in empirical mode, calibrate on the last role using the
    // full prediction path (standardizer included) against the raw data.
    let draft = ScaleLocModel::new(
        data.feature_names().to_vec(),
        mean,
        variance,
        ErrorMode::Gaussian,
        None,
        standardizer,
    )?;
    let model = match config.error_mode {
        ErrorMode::Gaussian => draft,
        ErrorMode::Empirical => {
            let calibration = calibrate_empirical(&draft, data, r_calibrate)?;
            ScaleLocModel::new(
                draft.feature_names,
                draft.mean,
                draft.variance,
                ErrorMode::Empirical,
                Some(calibration),
                draft.standardizer,
            )?
        }
    };

    Ok(PipelineFit {
        model,
        mean_selection,
        variance_selection,
        mean_k_trace,
        variance_k_trace,
        plan,
    })
}

/// Run only the variable-selection stages of the pipeline against an
/// existing split plan: the mean report from the mean-selection role's
/// halves, then a mean refit on the selected support whose residuals feed
/// the variance report.
pub fn select_variables(
    data: &Dataset,
    plan: &SplitPlan,
    candidates: &[usize],
    alpha: f64,
) -> Result<(SelectionReport, SelectionReport)> {
    let mut candidates: Vec<usize> = candidates.to_vec();
    candidates.sort_unstable();
    candidates.dedup();
    if candidates.is_empty() {
        return Err(Error::Invalid("no candidate features".into()));
    }
    let need = |name: &str| -> Result<&[usize]> {
        plan.role(name).ok_or_else(|| Error::Invalid(format!(
            "split plan is missing role `{name}`"
        )))
    };
    let r_mean_select = need(roles::MEAN_SELECT)?;
    let r_mean_k = need(roles::MEAN_K)?;
    let r_mean_fit = need(roles::MEAN_FIT)?;
    let r_var_select = need(roles::VAR_SELECT)?;
    for (name, rows) in [
        (roles::MEAN_SELECT, r_mean_select),
        (roles::VAR_SELECT, r_var_select),
    ] {
        if rows.len() < 4 {
            return Err(Error::InsufficientRows {
                role: name.to_string(),
                got: rows.len(),
                needed: 4,
            });
        }
    }
    let n_tests = 2 * candidates.len();

    let (fit_half, eval_half) = halves(r_mean_select);
    let mean_report = selection_report(
        data,
        fit_half,
        eval_half,
        &data.gather_response(fit_half),
        &data.gather_response(eval_half),
        &candidates,
        SelectionTarget::Mean,
        alpha,
        n_tests,
    )?;

    let mean_support = mean_report.selected_features();
    let k1 = if mean_support.is_empty() {
        1
    } else {
        let grid = default_k_grid(r_mean_k.len());
        select_k(
            data,
            r_mean_k,
            &mean_support,
            &data.gather_response(r_mean_k),
            &grid,
        )?
        .chosen
        .min(r_mean_fit.len())
    };
    let mean = MeanModel::fit(data, r_mean_fit, &mean_support, k1)?;
    let eps: Vec<f64> = compute_residuals(&mean, data, r_var_select)?;
    let eps2: Vec<f64> = eps.iter().map(|e| e * e).collect();
    let (var_fit_half, var_eval_half) = halves(r_var_select);
    let split = var_fit_half.len();
    let variance_report = selection_report(
        data,
        var_fit_half,
        var_eval_half,
        &eps2[..split],
        &eps2[split..],
        &candidates,
        SelectionTarget::Variance,
        alpha,
        n_tests,
    )?;
    Ok((mean_report, variance_report))
}
