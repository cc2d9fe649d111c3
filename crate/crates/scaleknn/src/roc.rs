//! Conditional distribution and covariate-conditional ROC/AUC estimation
//! for two-population biomarker data.
//!
//! Under the Gaussian error mode the conditional law of the biomarker given
//! x is N(m(x), sigma^2(x)), so the conditional cdf, the ROC operating
//! points, and the AUC all have closed forms. The AUC is computed as
//! Phi((m_D(x) - m_H(x)) / sqrt(sigma_D^2(x) + sigma_H^2(x))), with a
//! midpoint-quadrature route over the ROC curve kept as a cross-check.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::{ErrorMode, ScaleLocModel};
use crate::stats;

/// Conditional cdf value; `degenerate` marks a zero predicted scale, where
/// the law collapses to a point mass at the conditional mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfValue {
    pub prob: f64,
    pub degenerate: bool,
}

/// F(t, x) = P(Y <= t | X = x) under the Gaussian scale-location model.
pub fn conditional_cdf(model: &ScaleLocModel, t: f64, x: &[f64]) -> Result<CdfValue> {
    if model.error_mode != ErrorMode::Gaussian {
        return Err(Error::Invalid(
            "conditional cdf requires a gaussian-mode model".into(),
        ));
    }
    let (m, s) = model.predict(x)?;
    if s == 0.0 {
        return Ok(CdfValue {
            prob: if t >= m { 1.0 } else { 0.0 },
            degenerate: true,
        });
    }
    Ok(CdfValue {
        prob: stats::normal_cdf((t - m) / s),
        degenerate: false,
    })
}

/// ROC operating point at threshold `c` and covariate `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePair {
    pub tpr: f64,
    pub fpr: f64,
    /// True when either population's scale degenerated at `x`.
    pub degenerate: bool,
}

/// One fitted scale-location model per population: diseased and healthy
/// groups over a shared covariate space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RocModel {
    pub diseased: ScaleLocModel,
    pub healthy: ScaleLocModel,
}

impl RocModel {
    pub fn new(diseased: ScaleLocModel, healthy: ScaleLocModel) -> Result<Self> {
        if diseased.error_mode != ErrorMode::Gaussian || healthy.error_mode != ErrorMode::Gaussian
        {
            return Err(Error::Invalid(
                "ROC analysis requires gaussian-mode models for both populations".into(),
            ));
        }
        if diseased.p != healthy.p {
            return Err(Error::DimensionMismatch {
                got: healthy.p,
                expected: diseased.p,
            });
        }
        Ok(Self { diseased, healthy })
    }

    /// True/false positive rates at threshold `c` given covariates `x`:
    /// TPR = 1 - F_D(c, x), FPR = 1 - F_H(c, x).
    pub fn tpr_fpr(&self, c: f64, x: &[f64]) -> Result<RatePair> {
        let d = conditional_cdf(&self.diseased, c, x)?;
        let h = conditional_cdf(&self.healthy, c, x)?;
        Ok(RatePair {
            tpr: 1.0 - d.prob,
            fpr: 1.0 - h.prob,
            degenerate: d.degenerate || h.degenerate,
        })
    }

    /// Area under the conditional ROC curve at covariate `x`.
    ///
    /// Closed form for Gaussian populations:
    /// Phi((m_D - m_H) / sqrt(s_D^2 + s_H^2)). When both scales vanish the
    /// curve degenerates to a point comparison (1, 0, or 1/2).
    pub fn auc(&self, x: &[f64]) -> Result<f64> {
        let (md, sd) = self.diseased.predict(x)?;
        let (mh, sh) = self.healthy.predict(x)?;
        let denom = (sd * sd + sh * sh).sqrt();
        if denom == 0.0 {
            return Ok(if md > mh {
                1.0
            } else if md < mh {
                0.0
            } else {
                0.5
            });
        }
        Ok(stats::normal_cdf((md - mh) / denom))
    }

    /// Quadrature cross-check of [`Self::auc`]: composite midpoint rule with
    /// `n_quad` nodes over AUC(x) = int_0^1 [1 - F_D(F_H^{-1}(1 - u, x), x)] du,
    /// i.e. the area under TPR as a function of FPR.
    pub fn auc_quadrature(&self, x: &[f64], n_quad: usize) -> Result<f64> {
        if n_quad < 2 {
            return Err(Error::Invalid(format!(
                "n_quad = {n_quad} must be at least 2"
            )));
        }
        let (md, sd) = self.diseased.predict(x)?;
        let (mh, sh) = self.healthy.predict(x)?;
        if sd == 0.0 || sh == 0.0 {
            // Degenerate population: fall back to the closed form.
            return self.auc(x);
        }
        let mut acc = 0.0;
        for i in 0..n_quad {
            let u = (i as f64 + 0.5) / n_quad as f64;
            // Threshold with FPR = u, i.e. the (1-u)-quantile of the
            // healthy population.
            let c = mh + sh * stats::normal_quantile(1.0 - u)?;
            acc += 1.0 - stats::normal_cdf((c - md) / sd);
        }
        Ok(acc / n_quad as f64)
    }

    /// AUC over a grid of covariate points, in grid order.
    pub fn auc_surface(&self, grid: &[Vec<f64>]) -> Result<Vec<(Vec<f64>, f64)>> {
        grid.par_iter()
            .map(|x| Ok((x.clone(), self.auc(x)?)))
            .collect()
    }

    /// AUC over the feature rows of a dataset, in row order.
    pub fn auc_over_rows(&self, data: &Dataset) -> Result<Vec<f64>> {
        (0..data.n())
            .into_par_iter()
            .map(|i| self.auc(data.row(i)))
            .collect()
    }
}
