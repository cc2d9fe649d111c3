//! Prediction intervals around the fitted conditional mean, scaled by the
//! fitted conditional standard deviation.
//!
//! Two calibrations of the half-width multiplier are supported: the
//! empirical quantile of held-out absolute standardized residuals with the
//! conservative ceil((1-alpha)(n+1)) order statistic, and the standard
//! normal quantile under the Gaussian error assumption. Both produce
//! symmetric intervals m(x) +/- c * sigma(x).

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::{ErrorMode, ScaleLocModel};
use crate::stats;

/// Interval request: miscoverage level and calibration mode.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IntervalSpec {
    pub alpha: f64,
    pub mode: IntervalMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalMode {
    Empirical,
    Gaussian,
}

impl IntervalSpec {
    pub fn new(alpha: f64, mode: IntervalMode) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Invalid(format!(
                "alpha = {alpha} outside the open interval (0, 1)"
            )));
        }
        Ok(Self { alpha, mode })
    }
}

/// Standardized residuals (y - m(x)) / sigma(x) from a dedicated
/// calibration split. Rows whose predicted scale is below 1e-12 are dropped
/// and counted rather than divided by.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationSet {
    pub residuals: Vec<f64>,
    pub dropped_zero_scale: usize,
}

const MIN_SCALE: f64 = 1e-12;

/// Compute standardized residuals of `model` on the rows of a calibration
/// split. The split must be disjoint from both fitting splits; disjointness
/// of the pipeline roles is established by the split plan.
pub fn calibrate_empirical(
    model: &ScaleLocModel,
    data: &Dataset,
    rows: &[usize],
) -> Result<CalibrationSet> {
    if rows.is_empty() {
        return Err(Error::Invalid("empty calibration split".into()));
    }
    let mut residuals = Vec::with_capacity(rows.len());
    let mut dropped = 0usize;
    for &r in rows {
        let (m, s) = model.predict(data.row(r))?;
        if s < MIN_SCALE {
            dropped += 1;
            continue;
        }
        residuals.push((data.response()[r] - m) / s);
    }
    Ok(CalibrationSet {
        residuals,
        dropped_zero_scale: dropped,
    })
}

impl CalibrationSet {
    /// Half-width multiplier for miscoverage `alpha`: the
    /// ceil((1-alpha)(n+1))-th order statistic of the absolute standardized
    /// residuals. Errors when that rank exceeds the number of usable rows.
    pub fn quantile_multiplier(&self, alpha: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Invalid(format!(
                "alpha = {alpha} outside the open interval (0, 1)"
            )));
        }
        let n = self.residuals.len();
        let raw = (1.0 - alpha) * (n + 1) as f64;
        // Back off one part in 1e12 so float noise cannot push an exact
        // integer rank up to the next order statistic.
        let rank = (raw * (1.0 - 1e-12)).ceil() as usize;
        if rank > n {
            return Err(Error::InsufficientCalibration {
                rank,
                available: n,
            });
        }
        let mut abs: Vec<f64> = self.residuals.iter().map(|r| r.abs()).collect();
        abs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(abs[rank - 1])
    }
}

/// Gaussian half-width multiplier: the standard normal quantile at
/// 1 - alpha/2.
pub fn gaussian_multiplier(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Invalid(format!(
            "alpha = {alpha} outside the open interval (0, 1)"
        )));
    }
    stats::normal_quantile(1.0 - alpha / 2.0)
}

/// Symmetric prediction interval [m(x) - c sigma(x), m(x) + c sigma(x)].
pub fn predict_interval(
    model: &ScaleLocModel,
    x: &[f64],
    spec: &IntervalSpec,
) -> Result<(f64, f64)> {
    let c = interval_multiplier(model, spec)?;
    let (m, s) = model.predict(x)?;
    Ok((m - c * s, m + c * s))
}

/// Resolve the half-width multiplier once; useful for batched prediction.
pub fn interval_multiplier(model: &ScaleLocModel, spec: &IntervalSpec) -> Result<f64> {
    match spec.mode {
        IntervalMode::Gaussian => gaussian_multiplier(spec.alpha),
        IntervalMode::Empirical => {
            if model.error_mode != ErrorMode::Empirical {
                return Err(Error::Uncalibrated);
            }
            model
                .calibration
                .as_ref()
                .ok_or(Error::Uncalibrated)?
                .quantile_multiplier(spec.alpha)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estim::{MeanModel, VarianceModel};
    use crate::rng;

    #[test]
    fn order_statistic_example() {
        // |residuals| = 0.5, 1.0, ..., 9.5 (19 values); alpha = 0.1 gives
        // rank ceil(0.9 * 20) = 18, i.e. 9.0.
        let residuals: Vec<f64> = (1..=19).map(|i| i as f64 * 0.5).collect();
        let set = CalibrationSet {
            residuals,
            dropped_zero_scale: 0,
        };
        assert_eq!(set.quantile_multiplier(0.1).unwrap(), 9.0);
    }

    #[test]
    fn zero_residuals_collapse_interval() {
        let set = CalibrationSet {
            residuals: vec![0.0; 30],
            dropped_zero_scale: 0,
        };
        assert_eq!(set.quantile_multiplier(0.1).unwrap(), 0.0);
    }

    #[test]
    fn too_few_calibration_rows() {
        let set = CalibrationSet {
            residuals: vec![1.0; 5],
            dropped_zero_scale: 0,
        };
        assert!(matches!(
            set.quantile_multiplier(0.1),
            Err(Error::InsufficientCalibration { rank: 6, available: 5 })
        ));
        // n = 9 is the smallest usable size at alpha = 0.1:
        // ceil(0.9 * 10) = 9 <= 9.
        let set9 = CalibrationSet {
            residuals: (1..=9).map(f64::from).collect(),
            dropped_zero_scale: 0,
        };
        assert_eq!(set9.quantile_multiplier(0.1).unwrap(), 9.0);
    }

    #[test]
    fn exact_integer_ranks_are_not_inflated() {
        // alpha = 0.15, n = 19: (0.85)(20) = 17 exactly; float noise must
        // not bump the rank to 18.
        let residuals: Vec<f64> = (1..=19).map(f64::from).collect();
        let set = CalibrationSet {
            residuals,
            dropped_zero_scale: 0,
        };
        assert_eq!(set.quantile_multiplier(0.15).unwrap(), 17.0);
    }

    #[test]
    fn gaussian_multiplier_reference_values() {
        assert!((gaussian_multiplier(0.05).unwrap() - 1.9599639845400543).abs() < 1e-12);
        // alpha = 2 (1 - Phi(1)) makes the multiplier exactly 1.
        let alpha = 2.0 * (1.0 - stats::normal_cdf(1.0));
        assert!((gaussian_multiplier(alpha).unwrap() - 1.0).abs() < 1e-12);
        // alpha -> 1 collapses the interval.
        assert!(gaussian_multiplier(0.999_999).unwrap() < 2e-6);
        assert!(gaussian_multiplier(0.0).is_err());
        assert!(gaussian_multiplier(1.0).is_err());
    }

    fn fixed_model(error_mode: ErrorMode, calibration: Option<CalibrationSet>) -> ScaleLocModel {
        // Constant mean 2, homoscedastic sd 1.5: easy closed-form intervals.
        let d = Dataset::new(vec![0.0, 1.0], 1, vec![2.0, 2.0], vec!["x".into()]).unwrap();
        let mean = MeanModel::fit(&d, &[0, 1], &[], 1).unwrap();
        let variance =
            VarianceModel::fit(&d, &[0, 1], &[2.25, 2.25], &[], 1, true).unwrap();
        ScaleLocModel::new(
            vec!["x".into()],
            mean,
            variance,
            error_mode,
            calibration,
            None,
        )
        .unwrap()
    }

    #[test]
    fn gaussian_interval_hand_example() {
        let model = fixed_model(ErrorMode::Gaussian, None);
        let spec = IntervalSpec::new(0.05, IntervalMode::Gaussian).unwrap();
        let (lo, hi) = predict_interval(&model, &[0.3], &spec).unwrap();
        assert!((lo - -0.9399459768100815).abs() < 1e-9);
        assert!((hi - 4.9399459768100815).abs() < 1e-9);
        let mid = 0.5 * (lo + hi);
        assert!((mid - 2.0).abs() < 1e-12);
    }

    #[test]
    fn empirical_interval_uses_calibration_quantile() {
        let residuals: Vec<f64> = (1..=19).map(|i| i as f64 * 0.5).collect();
        let set = CalibrationSet {
            residuals,
            dropped_zero_scale: 0,
        };
        let model = fixed_model(ErrorMode::Empirical, Some(set));
        let spec = IntervalSpec::new(0.1, IntervalMode::Empirical).unwrap();
        let (lo, hi) = predict_interval(&model, &[0.0], &spec).unwrap();
        // half-width = 9.0 * 1.5
        assert!((lo - (2.0 - 13.5)).abs() < 1e-12);
        assert!((hi - (2.0 + 13.5)).abs() < 1e-12);
    }

    #[test]
    fn empirical_mode_requires_calibration() {
        let model = fixed_model(ErrorMode::Gaussian, None);
        let spec = IntervalSpec::new(0.1, IntervalMode::Empirical).unwrap();
        assert!(matches!(
            predict_interval(&model, &[0.0], &spec),
            Err(Error::Uncalibrated)
        ));
    }

    #[test]
    fn width_scales_linearly_in_sigma() {
        let model = fixed_model(ErrorMode::Gaussian, None);
        let spec = IntervalSpec::new(0.2, IntervalMode::Gaussian).unwrap();
        let (lo, hi) = predict_interval(&model, &[0.0], &spec).unwrap();
        let width = hi - lo;
        let c = gaussian_multiplier(0.2).unwrap();
        assert!((width - 2.0 * c * 1.5).abs() < 1e-12);
        assert!(width >= 0.0);
    }

    #[test]
    fn coverage_of_conservative_order_statistic() {
        // Oracle mean/scale: standardized residuals are exactly N(0,1).
        // With n_c = 199 and alpha = 0.1 the +1 order-statistic rule is
        // conservative, so mean coverage over seeds stays above 0.89.
        let mut coverages = Vec::new();
        for seed in 0..200u64 {
            let mut r = rng::rng_from_seed(1000 + seed);
            let mut calib = vec![0.0; 199];
            rng::fill_standard_normal(&mut r, &mut calib);
            let set = CalibrationSet {
                residuals: calib,
                dropped_zero_scale: 0,
            };
            let q = set.quantile_multiplier(0.1).unwrap();
            // Exact coverage of |Z| <= q for a fresh standard normal.
            coverages.push(2.0 * stats::normal_cdf(q) - 1.0);
        }
        let mean = coverages.iter().sum::<f64>() / coverages.len() as f64;
        assert!(
            mean >= 0.90 - 0.01,
            "mean coverage {mean} below the conservative bound"
        );
    }
}
