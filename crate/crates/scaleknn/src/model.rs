//! The fitted scale-location model: mean and variance estimators, error
//! mode, optional calibration residuals, and optional standardizer, bundled
//! into one self-describing JSON artifact so that fitting and prediction can
//! run in separate processes.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Standardizer};
use crate::error::{Error, Result};
use crate::estim::{MeanModel, VarianceModel};
use crate::interval::CalibrationSet;

/// How the standardized error term is calibrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorMode {
    /// Standard normal errors; interval multipliers come from the normal
    /// quantile.
    Gaussian,
    /// Multipliers come from the empirical quantile of held-out
    /// standardized residuals.
    Empirical,
}

impl std::fmt::Display for ErrorMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ErrorMode::Gaussian => write!(f, "gaussian"),
            ErrorMode::Empirical => write!(f, "empirical"),
        }
    }
}

/// Fitted conditional mean + standard deviation model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScaleLocModel {
    pub feature_names: Vec<String>,
    pub p: usize,
    pub mean: MeanModel,
    pub variance: VarianceModel,
    pub error_mode: ErrorMode,
    pub calibration: Option<CalibrationSet>,
    pub standardizer: Option<Standardizer>,
}

impl ScaleLocModel {
    /// Assemble a model, enforcing that calibration residuals are present
    /// exactly when the error mode is empirical.
    pub fn new(
        feature_names: Vec<String>,
        mean: MeanModel,
        variance: VarianceModel,
        error_mode: ErrorMode,
        calibration: Option<CalibrationSet>,
        standardizer: Option<Standardizer>,
    ) -> Result<Self> {
        match (error_mode, calibration.is_some()) {
            (ErrorMode::Empirical, false) => {
                return Err(Error::Invalid(
                    "empirical error mode requires a calibration set".into(),
                ))
            }
            (ErrorMode::Gaussian, true) => {
                return Err(Error::Invalid(
                    "gaussian error mode carries no calibration set".into(),
                ))
            }
            _ => {}
        }
        let p = feature_names.len();
        Ok(Self {
            feature_names,
            p,
            mean,
            variance,
            error_mode,
            calibration,
            standardizer,
        })
    }

    /// Predicted (conditional mean, conditional standard deviation) at a
    /// full-dimension covariate vector. Selection masks and the
    /// standardizer are applied internally.
    pub fn predict(&self, x: &[f64]) -> Result<(f64, f64)> {
        if x.len() != self.p {
            return Err(Error::DimensionMismatch {
                got: x.len(),
                expected: self.p,
            });
        }
        let standardized;
        let xs: &[f64] = match &self.standardizer {
            Some(s) => {
                standardized = s.transform_row(x);
                &standardized
            }
            None => x,
        };
        Ok((self.mean.predict(xs), self.variance.predict_sd(xs)))
    }

    /// Row-parallel batch prediction over a dataset's feature matrix.
    pub fn predict_batch(&self, data: &Dataset) -> Result<Vec<(f64, f64)>> {
        if data.p() != self.p {
            return Err(Error::DimensionMismatch {
                got: data.p(),
                expected: self.p,
            });
        }
        (0..data.n())
            .into_par_iter()
            .map(|i| self.predict(data.row(i)))
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let model: ScaleLocModel = serde_json::from_str(json)?;
        match (model.error_mode, model.calibration.is_some()) {
            (ErrorMode::Empirical, false) => Err(Error::Invalid(
                "artifact declares empirical mode but has no calibration set".into(),
            )),
            _ => Ok(model),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let json = std::fs::read_to_string(path)?;
        Self::from_json(&json)
    }
}
