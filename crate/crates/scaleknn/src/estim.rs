//! Conditional mean and variance estimators and the leave-one-out rule for
//! choosing the neighborhood size.
//!
//! The mean estimator is the plain kNN local average of responses; the
//! variance estimator is the same local average applied to squared residuals
//! from a mean model fitted on a disjoint split (two-step). When a support
//! is empty the mean degrades to the global sample mean and the variance to
//! a single pooled value, which is exactly the right behavior for constant
//! targets.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::knn::{KnnIndex, NeighborQuery};

/// kNN local-average regressor over a feature subset.
///
/// Stores its training slice so that a serialized model predicts bit-for-bit
/// identically after reload; the spatial index is rebuilt lazily.
#[derive(Debug, Serialize, Deserialize)]
pub struct KnnRegressor {
    /// Column ids (into the full feature space) this regressor looks at.
    pub support: Vec<usize>,
    pub k: usize,
    points: Vec<f64>,
    values: Vec<f64>,
    train_rows: Vec<usize>,
    #[serde(skip)]
    index: OnceLock<KnnIndex>,
}

impl Clone for KnnRegressor {
    fn clone(&self) -> Self {
        Self {
            support: self.support.clone(),
            k: self.k,
            points: self.points.clone(),
            values: self.values.clone(),
            train_rows: self.train_rows.clone(),
            index: OnceLock::new(),
        }
    }
}

impl KnnRegressor {
    fn fit(
        data: &Dataset,
        rows: &[usize],
        support: &[usize],
        k: usize,
        values: Vec<f64>,
    ) -> Result<Self> {
        debug_assert_eq!(rows.len(), values.len());
        if support.is_empty() {
            return Err(Error::Invalid("empty support for kNN regressor".into()));
        }
        if let Some(&c) = support.iter().find(|&&c| c >= data.p()) {
            return Err(Error::Invalid(format!(
                "support column {c} out of range for p = {}",
                data.p()
            )));
        }
        if k == 0 || k > rows.len() {
            return Err(Error::KOutOfRange {
                k,
                max: rows.len(),
            });
        }
        Ok(Self {
            support: support.to_vec(),
            k,
            points: data.gather(rows, support),
            values,
            train_rows: rows.to_vec(),
            index: OnceLock::new(),
        })
    }

    fn index(&self) -> &KnnIndex {
        self.index.get_or_init(|| {
            KnnIndex::build(self.points.clone(), self.support.len())
                .expect("training slice validated at fit time")
        })
    }

    /// Local average at a full-dimension point; coordinates outside the
    /// support are ignored.
    fn predict(&self, x_full: &[f64]) -> f64 {
        let q: Vec<f64> = self.support.iter().map(|&c| x_full[c]).collect();
        let list = self
            .index()
            .query(&NeighborQuery::new(&q, self.k))
            .expect("k validated at fit time");
        let mut sum = 0.0;
        for &i in &list.indices {
            sum += self.values[i];
        }
        sum / self.k as f64
    }

    pub fn train_len(&self) -> usize {
        self.train_rows.len()
    }
}

/// Conditional-mean model: kNN average of the responses, or the global
/// sample mean when no feature carries signal.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeanModel {
    Constant { value: f64, train_rows: Vec<usize> },
    Knn(KnnRegressor),
}

impl MeanModel {
    /// Fit on the rows of one split. An empty `support` yields the constant
    /// global-mean fallback and ignores `k`.
    pub fn fit(data: &Dataset, rows: &[usize], support: &[usize], k: usize) -> Result<Self> {
        Self::fit_values(data, rows, support, k, data.gather_response(rows))
    }

    /// Fit with explicit target values aligned with `rows`; used when the
    /// regression target is derived (e.g. squared residuals) rather than
    /// the dataset response.
    pub fn fit_values(
        data: &Dataset,
        rows: &[usize],
        support: &[usize],
        k: usize,
        values: Vec<f64>,
    ) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Invalid("empty row set for mean fit".into()));
        }
        if values.len() != rows.len() {
            return Err(Error::Invalid(format!(
                "{} target values for {} rows",
                values.len(),
                rows.len()
            )));
        }
        if support.is_empty() {
            let mean = values.iter().sum::<f64>() / rows.len() as f64;
            return Ok(MeanModel::Constant {
                value: mean,
                train_rows: rows.to_vec(),
            });
        }
        Ok(MeanModel::Knn(KnnRegressor::fit(
            data, rows, support, k, values,
        )?))
    }

    pub fn predict(&self, x_full: &[f64]) -> f64 {
        match self {
            MeanModel::Constant { value, .. } => *value,
            MeanModel::Knn(reg) => reg.predict(x_full),
        }
    }

    pub fn support(&self) -> &[usize] {
        match self {
            MeanModel::Constant { .. } => &[],
            MeanModel::Knn(reg) => &reg.support,
        }
    }

    pub fn k(&self) -> Option<usize> {
        match self {
            MeanModel::Constant { .. } => None,
            MeanModel::Knn(reg) => Some(reg.k),
        }
    }

    pub fn train_rows(&self) -> &[usize] {
        match self {
            MeanModel::Constant { train_rows, .. } => train_rows,
            MeanModel::Knn(reg) => &reg.train_rows,
        }
    }
}

/// Residuals of a fitted mean model over a split disjoint from its own.
pub fn compute_residuals(mean: &MeanModel, data: &Dataset, rows: &[usize]) -> Result<Vec<f64>> {
    let train: std::collections::HashSet<usize> = mean.train_rows().iter().copied().collect();
    if let Some(&r) = rows.iter().find(|r| train.contains(r)) {
        return Err(Error::OverlappingSplits {
            context: format!("row {r} was used to fit the mean model"),
        });
    }
    Ok(rows
        .iter()
        .map(|&r| data.response()[r] - mean.predict(data.row(r)))
        .collect())
}

/// Conditional-variance model over squared residuals: kNN local average, or
/// a single pooled variance in the homoscedastic case.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VarianceModel {
    Homoscedastic { variance: f64, train_rows: Vec<usize> },
    Knn(KnnRegressor),
}

impl VarianceModel {
    /// Fit on squared residuals aligned with `rows`. `homoscedastic` (or an
    /// empty support) pools them into one global variance.
    pub fn fit(
        data: &Dataset,
        rows: &[usize],
        squared_residuals: &[f64],
        support: &[usize],
        k: usize,
        homoscedastic: bool,
    ) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Invalid("empty row set for variance fit".into()));
        }
        if rows.len() != squared_residuals.len() {
            return Err(Error::Invalid(format!(
                "{} squared residuals for {} rows",
                squared_residuals.len(),
                rows.len()
            )));
        }
        if let Some(bad) = squared_residuals.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::Invalid(format!("bad squared residual {bad}")));
        }
        if homoscedastic || support.is_empty() {
            let variance = squared_residuals.iter().sum::<f64>() / rows.len() as f64;
            return Ok(VarianceModel::Homoscedastic {
                variance,
                train_rows: rows.to_vec(),
            });
        }
        Ok(VarianceModel::Knn(KnnRegressor::fit(
            data,
            rows,
            support,
            k,
            squared_residuals.to_vec(),
        )?))
    }

    /// Predicted conditional variance; never negative (an average of squares,
    /// clamped to document the invariant).
    pub fn predict_variance(&self, x_full: &[f64]) -> f64 {
        let v = match self {
            VarianceModel::Homoscedastic { variance, .. } => *variance,
            VarianceModel::Knn(reg) => reg.predict(x_full),
        };
        v.max(0.0)
    }

    pub fn predict_sd(&self, x_full: &[f64]) -> f64 {
        self.predict_variance(x_full).sqrt()
    }

    pub fn support(&self) -> &[usize] {
        match self {
            VarianceModel::Homoscedastic { .. } => &[],
            VarianceModel::Knn(reg) => &reg.support,
        }
    }

    pub fn k(&self) -> Option<usize> {
        match self {
            VarianceModel::Homoscedastic { .. } => None,
            VarianceModel::Knn(reg) => Some(reg.k),
        }
    }

    pub fn is_homoscedastic(&self) -> bool {
        matches!(self, VarianceModel::Homoscedastic { .. })
    }
}

/// Record of the leave-one-out search over candidate neighborhood sizes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KSelectionTrace {
    pub grid: Vec<usize>,
    pub scores: Vec<f64>,
    pub chosen: usize,
}

/// Candidate grid: every k in [1, n-1] for small slices, otherwise the
/// geometric ladder ceil(1.25^j) capped at n-1.
pub fn default_k_grid(n_slice: usize) -> Vec<usize> {
    if n_slice < 2 {
        return Vec::new();
    }
    let top = n_slice - 1;
    if n_slice <= 1000 {
        return (1..=top).collect();
    }
    let mut grid = Vec::new();
    let mut j = 0u32;
    loop {
        let k = 1.25f64.powi(j as i32).ceil() as usize;
        if k > top {
            break;
        }
        if grid.last() != Some(&k) {
            grid.push(k);
        }
        j += 1;
    }
    grid
}

/// Leave-one-out cross-validation of the neighborhood size.
///
/// f(k) = (1/n) sum_i (resp_i - mean of resp over the k nearest neighbors of
/// x_i, self excluded)^2, minimized over the grid with ties resolved toward
/// the largest k. `responses` is the regression target on this slice (raw
/// responses for the mean, squared residuals for the variance).
pub fn select_k(
    data: &Dataset,
    rows: &[usize],
    support: &[usize],
    responses: &[f64],
    grid: &[usize],
) -> Result<KSelectionTrace> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if support.is_empty() {
        return Err(Error::Invalid("empty support for k selection".into()));
    }
    if responses.len() != rows.len() {
        return Err(Error::Invalid(format!(
            "{} responses for {} rows",
            responses.len(),
            rows.len()
        )));
    }
    let n = rows.len();
    let mut grid: Vec<usize> = grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    if grid[0] == 0 || *grid.last().unwrap() > n.saturating_sub(1) {
        return Err(Error::KOutOfRange {
            k: if grid[0] == 0 { 0 } else { *grid.last().unwrap() },
            max: n.saturating_sub(1),
        });
    }
    let k_max = *grid.last().unwrap();
    let dim = support.len();
    let points = data.gather(rows, support);
    let index = KnnIndex::build(points, dim)?;

    // Per-row squared errors for every grid k via one k_max query and
    // running prefix sums over the neighbor list.
    let per_row: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let list = index
                .query(&NeighborQuery::excluding(index.point_row(i), k_max, i))
                .expect("grid validated against slice size");
            let mut errs = Vec::with_capacity(grid.len());
            let mut sum = 0.0;
            let mut next = 0;
            for (rank, &j) in list.indices.iter().enumerate() {
                sum += responses[j];
                if next < grid.len() && rank + 1 == grid[next] {
                    let pred = sum / grid[next] as f64;
                    let e = responses[i] - pred;
                    errs.push(e * e);
                    next += 1;
                }
            }
            errs
        })
        .collect();

    let mut scores = vec![0.0; grid.len()];
    for errs in &per_row {
        for (s, e) in scores.iter_mut().zip(errs) {
            *s += e;
        }
    }
    for s in &mut scores {
        *s /= n as f64;
    }

    let mut chosen = grid[0];
    let mut best = scores[0];
    for (&k, &s) in grid.iter().zip(&scores) {
        if s <= best {
            best = s;
            chosen = k;
        }
    }
    Ok(KSelectionTrace {
        grid,
        scores,
        chosen,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knn::query_brute;
    use crate::rng;

    fn line_dataset(xs: &[f64], ys: &[f64]) -> Dataset {
        Dataset::new(xs.to_vec(), 1, ys.to_vec(), vec!["x".into()]).unwrap()
    }

    #[test]
    fn mean_hand_example() {
        let d = line_dataset(&[0.0, 1.0, 2.0, 4.0], &[0.0, 1.0, 2.0, 4.0]);
        let m = MeanModel::fit(&d, &[0, 1, 2, 3], &[0], 2).unwrap();
        assert_eq!(m.predict(&[1.2]), 1.5);
    }

    #[test]
    fn mean_constant_responses() {
        let d = line_dataset(&[0.0, 1.0, 2.0, 4.0], &[3.5; 4]);
        for k in 1..=4 {
            let m = MeanModel::fit(&d, &[0, 1, 2, 3], &[0], k).unwrap();
            assert_eq!(m.predict(&[0.7]), 3.5);
        }
    }

    #[test]
    fn mean_full_neighborhood_is_global_mean() {
        let d = line_dataset(&[0.0, 1.0, 2.0, 4.0], &[1.0, 2.0, 3.0, 10.0]);
        let m = MeanModel::fit(&d, &[0, 1, 2, 3], &[0], 4).unwrap();
        assert_eq!(m.predict(&[0.0]), 4.0);
    }

    #[test]
    fn mean_empty_support_falls_back_to_constant() {
        let d = line_dataset(&[0.0, 1.0], &[2.0, 4.0]);
        let m = MeanModel::fit(&d, &[0, 1], &[], 1).unwrap();
        assert!(matches!(m, MeanModel::Constant { .. }));
        assert_eq!(m.predict(&[100.0]), 3.0);
    }

    #[test]
    fn mean_k_out_of_range() {
        let d = line_dataset(&[0.0, 1.0], &[2.0, 4.0]);
        assert!(matches!(
            MeanModel::fit(&d, &[0, 1], &[0], 3),
            Err(Error::KOutOfRange { .. })
        ));
    }

    #[test]
    fn mean_prediction_stays_in_response_range() {
        let mut r = rng::rng_from_seed(12);
        let n = 80;
        let feats: Vec<f64> = (0..n * 2).map(|_| rng::uniform01(&mut r)).collect();
        let ys: Vec<f64> = (0..n).map(|_| 10.0 * rng::uniform01(&mut r) - 5.0).collect();
        let d = Dataset::new(feats, 2, ys.clone(), vec!["a".into(), "b".into()]).unwrap();
        let rows: Vec<usize> = (0..n).collect();
        let lo = ys.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for k in [1, 3, 17] {
            let m = MeanModel::fit(&d, &rows, &[0, 1], k).unwrap();
            for _ in 0..50 {
                let x = [rng::uniform01(&mut r), rng::uniform01(&mut r)];
                let pred = m.predict(&x);
                assert!(pred >= lo && pred <= hi);
            }
        }
    }

    #[test]
    fn mean_ignores_features_outside_support() {
        let mut r = rng::rng_from_seed(13);
        let n = 50;
        let mut feats: Vec<f64> = (0..n * 3).map(|_| rng::uniform01(&mut r)).collect();
        let ys: Vec<f64> = (0..n).map(|_| rng::uniform01(&mut r)).collect();
        let names = vec!["a".to_string(), "b".into(), "c".into()];
        let d1 = Dataset::new(feats.clone(), 3, ys.clone(), names.clone()).unwrap();
        // Perturb column 2 (not in the support) arbitrarily.
        for i in 0..n {
            feats[i * 3 + 2] = 1e6 * rng::uniform01(&mut r);
        }
        let d2 = Dataset::new(feats, 3, ys, names).unwrap();
        let rows: Vec<usize> = (0..n).collect();
        let m1 = MeanModel::fit(&d1, &rows, &[0, 1], 5).unwrap();
        let m2 = MeanModel::fit(&d2, &rows, &[0, 1], 5).unwrap();
        for _ in 0..30 {
            let x = [rng::uniform01(&mut r), rng::uniform01(&mut r), -7.0];
            assert_eq!(m1.predict(&x), m2.predict(&x));
        }
    }

    #[test]
    fn mean_permutation_invariant_when_distances_distinct() {
        let xs = [0.11, 0.42, 0.73, 0.95, 0.27];
        let ys = [1.0, 2.0, 3.0, 4.0, 5.0];
        let d1 = line_dataset(&xs, &ys);
        let perm = [3usize, 0, 4, 2, 1];
        let xs2: Vec<f64> = perm.iter().map(|&i| xs[i]).collect();
        let ys2: Vec<f64> = perm.iter().map(|&i| ys[i]).collect();
        let d2 = line_dataset(&xs2, &ys2);
        let m1 = MeanModel::fit(&d1, &[0, 1, 2, 3, 4], &[0], 3).unwrap();
        let m2 = MeanModel::fit(&d2, &[0, 1, 2, 3, 4], &[0], 3).unwrap();
        for q in [0.0, 0.3, 0.55, 0.88, 1.4] {
            assert_eq!(m1.predict(&[q]), m2.predict(&[q]));
        }
    }

    #[test]
    fn residuals_basics() {
        let d = line_dataset(&[0.0, 1.0, 2.0, 3.0], &[3.0, 5.0, 3.0, 5.0]);
        // Mean fit on rows 0..1, residuals on rows 2..3.
        let m = MeanModel::fit(&d, &[0, 1], &[], 1).unwrap(); // constant 4.0
        let eps = compute_residuals(&m, &d, &[2, 3]).unwrap();
        assert_eq!(eps, vec![-1.0, 1.0]);
    }

    #[test]
    fn residuals_reject_overlap() {
        let d = line_dataset(&[0.0, 1.0, 2.0], &[1.0, 2.0, 3.0]);
        let m = MeanModel::fit(&d, &[0, 1], &[0], 1).unwrap();
        assert!(matches!(
            compute_residuals(&m, &d, &[1, 2]),
            Err(Error::OverlappingSplits { .. })
        ));
    }

    #[test]
    fn residuals_zero_for_perfect_fit() {
        let d = line_dataset(&[0.0, 1.0, 2.0, 3.0], &[7.0, 7.0, 7.0, 7.0]);
        let m = MeanModel::fit(&d, &[0, 1], &[], 1).unwrap();
        let eps = compute_residuals(&m, &d, &[2, 3]).unwrap();
        assert_eq!(eps, vec![0.0, 0.0]);
    }

    #[test]
    fn variance_hand_example() {
        let d = line_dataset(&[0.0, 1.0, 2.0], &[0.0; 3]);
        let v = VarianceModel::fit(&d, &[0, 1, 2], &[1.0, 4.0, 9.0], &[0], 2, false).unwrap();
        assert_eq!(v.predict_variance(&[0.1]), 2.5);
        assert!((v.predict_sd(&[0.1]) - 1.5811388300841898).abs() < 1e-12);
    }

    #[test]
    fn variance_zero_residuals() {
        let d = line_dataset(&[0.0, 1.0, 2.0], &[0.0; 3]);
        let v = VarianceModel::fit(&d, &[0, 1, 2], &[0.0; 3], &[0], 2, false).unwrap();
        for x in [0.0, 0.5, 2.0] {
            assert_eq!(v.predict_variance(&[x]), 0.0);
        }
    }

    #[test]
    fn variance_homoscedastic_pools_globally() {
        let d = line_dataset(&[0.0, 1.0, 2.0], &[0.0; 3]);
        let v = VarianceModel::fit(&d, &[0, 1, 2], &[1.0, 4.0, 9.0], &[0], 2, true).unwrap();
        assert!(v.is_homoscedastic());
        for x in [-5.0, 0.3, 9.0] {
            assert!((v.predict_variance(&[x]) - 14.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn select_k_micro_oracle() {
        // X = [0,1,2], Y = [0,1,2]: f(1) = 1 (LOO predictions [1,0,1] under
        // the lower-index tie rule), f(2) = 1.5, so k = 1 wins.
        let d = line_dataset(&[0.0, 1.0, 2.0], &[0.0, 1.0, 2.0]);
        let trace = select_k(&d, &[0, 1, 2], &[0], &[0.0, 1.0, 2.0], &[1, 2]).unwrap();
        assert_eq!(trace.scores, vec![1.0, 1.5]);
        assert_eq!(trace.chosen, 1);
    }

    #[test]
    fn select_k_constant_response_takes_largest() {
        let d = line_dataset(&[0.0, 1.0, 2.0, 3.0, 4.0], &[2.0; 5]);
        let trace = select_k(&d, &[0, 1, 2, 3, 4], &[0], &[2.0; 5], &[1, 2, 3, 4]).unwrap();
        assert!(trace.scores.iter().all(|&s| s == 0.0));
        assert_eq!(trace.chosen, 4);
    }

    #[test]
    fn select_k_singleton_grid() {
        let d = line_dataset(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0], &[1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        let trace = select_k(&d, &[0, 1, 2, 3, 4, 5], &[0], &[1.0, 0.0, 1.0, 0.0, 1.0, 0.0], &[5])
            .unwrap();
        assert_eq!(trace.chosen, 5);
    }

    #[test]
    fn select_k_grid_errors() {
        let d = line_dataset(&[0.0, 1.0, 2.0], &[0.0, 1.0, 2.0]);
        assert!(matches!(
            select_k(&d, &[0, 1, 2], &[0], &[0.0, 1.0, 2.0], &[]),
            Err(Error::EmptyGrid)
        ));
        assert!(matches!(
            select_k(&d, &[0, 1, 2], &[0], &[0.0, 1.0, 2.0], &[3]),
            Err(Error::KOutOfRange { .. })
        ));
    }

    #[test]
    fn select_k_matches_definitional_double_loop() {
        let mut r = rng::rng_from_seed(77);
        for trial in 0..10 {
            let n = 20 + (trial * 7) % 30;
            let d_cols = 1 + trial % 3;
            let feats: Vec<f64> = (0..n * d_cols).map(|_| rng::uniform01(&mut r)).collect();
            let resp: Vec<f64> = (0..n).map(|_| rng::uniform01(&mut r) * 3.0).collect();
            let names: Vec<String> = (0..d_cols).map(|c| format!("x{c}")).collect();
            let data = Dataset::new(feats.clone(), d_cols, resp.clone(), names).unwrap();
            let rows: Vec<usize> = (0..n).collect();
            let support: Vec<usize> = (0..d_cols).collect();
            let grid: Vec<usize> = (1..n).step_by(3).collect();
            let fast = select_k(&data, &rows, &support, &resp, &grid).unwrap();

            // Definitional double loop on the brute-force engine.
            let pts = data.gather(&rows, &support);
            for (gi, &k) in fast.grid.iter().enumerate() {
                let mut total = 0.0;
                for i in 0..n {
                    let q: Vec<f64> = support.iter().map(|&c| data.row(i)[c]).collect();
                    let list =
                        query_brute(&pts, d_cols, &NeighborQuery::excluding(&q, k, i)).unwrap();
                    let mut sum = 0.0;
                    for &j in &list.indices {
                        sum += resp[j];
                    }
                    let e = resp[i] - sum / k as f64;
                    total += e * e;
                }
                assert_eq!(total / n as f64, fast.scores[gi], "k = {k}");
            }
        }
    }

    #[test]
    fn default_grid_shapes() {
        assert_eq!(default_k_grid(5), vec![1, 2, 3, 4]);
        assert_eq!(default_k_grid(1000).len(), 999);
        let g = default_k_grid(5000);
        assert_eq!(g[0], 1);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(*g.last().unwrap() <= 4999);
        assert!(g.len() < 60);
    }

    #[test]
    fn knn_regressor_roundtrip_bitwise() {
        let mut r = rng::rng_from_seed(5);
        let n = 40;
        let feats: Vec<f64> = (0..n * 2).map(|_| rng::uniform01(&mut r)).collect();
        let ys: Vec<f64> = (0..n).map(|_| rng::uniform01(&mut r)).collect();
        let d = Dataset::new(feats, 2, ys, vec!["a".into(), "b".into()]).unwrap();
        let rows: Vec<usize> = (0..n).collect();
        let m = MeanModel::fit(&d, &rows, &[0, 1], 7).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        let back: MeanModel = serde_json::from_str(&json).unwrap();
        for _ in 0..20 {
            let x = [rng::uniform01(&mut r), rng::uniform01(&mut r)];
            assert_eq!(m.predict(&x), back.predict(&x));
        }
    }
}
