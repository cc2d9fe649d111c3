//! Sample representation, CSV ingestion, seeded splitting, and feature
//! standardization.
//!
//! A [`Dataset`] is an immutable n x p feature matrix plus a response
//! vector; every entry is finite by construction. A [`SplitPlan`] carves the
//! row indices into named, pairwise-disjoint roles with a seeded shuffle and
//! largest-remainder apportionment, so identical inputs reproduce identical
//! splits bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Immutable sample: features (row-major n x p), response, and column names.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dataset {
    features: Vec<f64>,
    n: usize,
    p: usize,
    response: Vec<f64>,
    feature_names: Vec<String>,
}

impl Dataset {
    /// Build a dataset from a row-major feature buffer.
    pub fn new(
        features: Vec<f64>,
        p: usize,
        response: Vec<f64>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        let n = response.len();
        if n == 0 || p == 0 {
            return Err(Error::Invalid(format!(
                "dataset must have n >= 1 and p >= 1, got n = {n}, p = {p}"
            )));
        }
        if features.len() != n * p {
            return Err(Error::Invalid(format!(
                "feature buffer holds {} values, expected {n} x {p}",
                features.len()
            )));
        }
        if feature_names.len() != p {
            return Err(Error::Invalid(format!(
                "{} feature names for {p} columns",
                feature_names.len()
            )));
        }
        if let Some(bad) = features.iter().chain(response.iter()).find(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!("non-finite value {bad} in dataset")));
        }
        Ok(Self {
            features,
            n,
            p,
            response,
            feature_names,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Feature row `i` as a slice of length p.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.p..(i + 1) * self.p]
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Copy of the rows in `rows`, restricted to the columns in `cols`,
    /// flattened row-major.
    pub fn gather(&self, rows: &[usize], cols: &[usize]) -> Vec<f64> {
        let mut out = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            let row = self.row(r);
            for &c in cols {
                out.push(row[c]);
            }
        }
        out
    }

    /// Response values at `rows`, in order.
    pub fn gather_response(&self, rows: &[usize]) -> Vec<f64> {
        rows.iter().map(|&r| self.response[r]).collect()
    }
}

/// Load a dataset from an RFC-4180-style CSV file with a header row.
///
/// Every column other than `target_column` becomes a feature, in file order.
/// Cells must parse as finite numbers; violations report the data row and
/// column name.
pub fn load_csv(path: impl AsRef<Path>, target_column: &str, delimiter: u8) -> Result<Dataset> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::Io(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("{display}: {e}"),
            )),
            _ => Error::CsvStructure {
                path: display.clone(),
                msg: e.to_string(),
            },
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

    for (i, h) in headers.iter().enumerate() {
        if headers[..i].contains(h) {
            return Err(Error::CsvStructure {
                path: display,
                msg: format!("duplicate column `{h}`"),
            });
        }
    }
    let target_idx = headers
        .iter()
        .position(|h| h == target_column)
        .ok_or_else(|| Error::CsvStructure {
            path: display.clone(),
            msg: format!("missing target column `{target_column}`"),
        })?;

    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != target_idx)
        .map(|(_, h)| h.clone())
        .collect();
    if feature_names.is_empty() {
        return Err(Error::CsvStructure {
            path: display,
            msg: "no feature columns besides the target".into(),
        });
    }

    let mut features = Vec::new();
    let mut response = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::CsvStructure {
            path: display.clone(),
            msg: e.to_string(),
        })?;
        if record.len() != headers.len() {
            return Err(Error::CsvStructure {
                path: display,
                msg: format!(
                    "data row {}: {} cells, header has {}",
                    row_idx + 1,
                    record.len(),
                    headers.len()
                ),
            });
        }
        for (col_idx, cell) in record.iter().enumerate() {
            let value: f64 = cell.trim().parse().unwrap_or(f64::NAN);
            if !value.is_finite() {
                return Err(Error::CsvCell {
                    path: display,
                    row: row_idx + 1,
                    column: headers[col_idx].clone(),
                    value: cell.to_string(),
                });
            }
            if col_idx == target_idx {
                response.push(value);
            } else {
                features.push(value);
            }
        }
    }
    if response.is_empty() {
        return Err(Error::CsvStructure {
            path: display,
            msg: "no data rows".into(),
        });
    }
    Dataset::new(features, feature_names.len(), response, feature_names)
}

/// Named, pairwise-disjoint row index sets produced by a seeded shuffle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitPlan {
    pub seed: u64,
    pub roles: Vec<SplitRole>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitRole {
    pub name: String,
    pub indices: Vec<usize>,
}

impl SplitPlan {
    /// Rows assigned to `name`, sorted ascending.
    pub fn role(&self, name: &str) -> Option<&[usize]> {
        self.roles
            .iter()
            .find(|r| r.name == name)
            .map(|r| r.indices.as_slice())
    }

    /// All rows claimed by any role, sorted ascending.
    pub fn all_rows(&self) -> Vec<usize> {
        let mut rows: Vec<usize> = self
            .roles
            .iter()
            .flat_map(|r| r.indices.iter().copied())
            .collect();
        rows.sort_unstable();
        rows
    }

    /// Check pairwise disjointness (always true for plans built here).
    pub fn is_disjoint(&self) -> bool {
        let rows = self.all_rows();
        rows.windows(2).all(|w| w[0] != w[1])
    }
}

/// Largest-remainder quotas without the non-emptiness fixup; lets callers
/// see which role would starve at a given n.
pub fn apportion_raw(n: usize, weights: &[f64]) -> Result<Vec<usize>> {
    if weights.is_empty() {
        return Err(Error::Invalid("no roles given".into()));
    }
    if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
        return Err(Error::Invalid(format!("non-positive role weight {w}")));
    }
    let total: f64 = weights.iter().sum();
    let quotas: Vec<f64> = weights.iter().map(|w| n as f64 * w / total).collect();
    let mut sizes: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = sizes.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - sizes[a] as f64;
        let rb = quotas[b] - sizes[b] as f64;
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for &i in order.iter().take(n - assigned) {
        sizes[i] += 1;
    }
    Ok(sizes)
}

/// Apportion `n` rows among positive weights by largest remainder.
///
/// Quotas are floored; leftover rows go to the largest fractional remainders,
/// earliest role first on ties. Any role left empty afterwards takes one row
/// from the currently largest role, so every role ends non-empty.
pub fn apportion(n: usize, weights: &[f64]) -> Result<Vec<usize>> {
    if n < weights.len() {
        return Err(Error::Invalid(format!(
            "n = {n} is smaller than the number of roles ({})",
            weights.len()
        )));
    }
    let mut sizes = apportion_raw(n, weights)?;
    while sizes.iter().any(|&s| s == 0) {
        let empty = sizes.iter().position(|&s| s == 0).unwrap();
        let donor = (0..sizes.len())
            .max_by(|&a, &b| sizes[a].cmp(&sizes[b]).then(b.cmp(&a)))
            .unwrap();
        sizes[donor] -= 1;
        sizes[empty] += 1;
    }
    Ok(sizes)
}

/// Partition rows 0..n-1 into named roles by a seeded Fisher-Yates shuffle
/// cut at the largest-remainder boundaries. Indices within each role are
/// returned sorted.
pub fn make_splits(n: usize, fractions: &[(String, f64)], seed: u64) -> Result<SplitPlan> {
    let weights: Vec<f64> = fractions.iter().map(|(_, w)| *w).collect();
    let sizes = apportion(n, &weights)?;
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rng = rng::rng_from_seed(seed);
    rng::shuffle(&mut rng, &mut perm);
    let mut roles = Vec::with_capacity(fractions.len());
    let mut offset = 0;
    for ((name, _), size) in fractions.iter().zip(sizes) {
        let mut indices = perm[offset..offset + size].to_vec();
        indices.sort_unstable();
        roles.push(SplitRole {
            name: name.clone(),
            indices,
        });
        offset += size;
    }
    Ok(SplitPlan {
        seed,
        roles,
    })
}

/// Per-feature centering and scaling parameters fitted on a designated
/// row set. Scaling uses the population standard deviation (denominator n);
/// zero-variance columns are flagged and passed through untouched.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
    /// True for columns left untouched because their variance is zero.
    pub passthrough: Vec<bool>,
}

impl Standardizer {
    pub fn fit(data: &Dataset, rows: &[usize]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Invalid("empty row set for standardizer".into()));
        }
        let p = data.p();
        let nf = rows.len() as f64;
        let mut means = vec![0.0; p];
        for &r in rows {
            for (m, v) in means.iter_mut().zip(data.row(r)) {
                *m += v;
            }
        }
        for m in &mut means {
            *m /= nf;
        }
        let mut sds = vec![0.0; p];
        for &r in rows {
            for ((s, v), m) in sds.iter_mut().zip(data.row(r)).zip(&means) {
                let d = v - m;
                *s += d * d;
            }
        }
        let mut passthrough = vec![false; p];
        for (s, flag) in sds.iter_mut().zip(&mut passthrough) {
            *s = (*s / nf).sqrt();
            if *s == 0.0 {
                *flag = true;
            }
        }
        Ok(Self {
            means,
            sds,
            passthrough,
        })
    }

    /// Apply the fitted transform to a whole dataset.
    pub fn transform(&self, data: &Dataset) -> Result<Dataset> {
        if data.p() != self.means.len() {
            return Err(Error::DimensionMismatch {
                got: data.p(),
                expected: self.means.len(),
            });
        }
        let p = data.p();
        let mut features = Vec::with_capacity(data.n() * p);
        for i in 0..data.n() {
            let row = data.row(i);
            for c in 0..p {
                features.push(self.transform_value(row[c], c));
            }
        }
        Dataset::new(
            features,
            p,
            data.response().to_vec(),
            data.feature_names().to_vec(),
        )
    }

    /// Apply the transform to a single feature vector.
    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(c, &v)| self.transform_value(v, c))
            .collect()
    }

    fn transform_value(&self, v: f64, col: usize) -> f64 {
        if self.passthrough[col] {
            v
        } else {
            (v - self.means[col]) / self.sds[col]
        }
    }
}
