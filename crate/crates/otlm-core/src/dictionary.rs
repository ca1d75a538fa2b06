//! Non-negative dictionary (column-compressed) and target vector.

use crate::error::{OtlmError, Result};

/// Non-negative basis matrix X (N x M), stored by columns since every
/// consumer walks atoms: X w accumulation, normalized-weight builds, and
/// the per-column sums of the multiplicative steps.
#[derive(Debug, Clone)]
pub struct Dictionary {
    n_samples: usize,
    n_atoms: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
    col_sums: Vec<f64>,
    row_support: Vec<bool>,
}

impl Dictionary {
    /// Builds from per-column (row, value) entries. Zero values are dropped;
    /// every column must keep a positive sum.
    pub fn from_columns(n_samples: usize, columns: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let n_atoms = columns.len();
        if n_atoms == 0 || n_samples == 0 {
            return Err(OtlmError::InvalidValue(
                "dictionary needs at least one row and one column".into(),
            ));
        }
        let mut col_ptr = Vec::with_capacity(n_atoms + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        let mut col_sums = Vec::with_capacity(n_atoms);
        let mut row_support = vec![false; n_samples];
        col_ptr.push(0);
        for (j, col) in columns.into_iter().enumerate() {
            let mut sum = 0.0;
            let mut last: Option<usize> = None;
            for (i, v) in col {
                if i >= n_samples {
                    return Err(OtlmError::InvalidValue(format!(
                        "dictionary row index {i} out of bounds for {n_samples} samples"
                    )));
                }
                if !v.is_finite() || v < 0.0 {
                    return Err(OtlmError::InvalidValue(format!(
                        "dictionary entry ({i}, {j}) must be finite and >= 0, got {v}"
                    )));
                }
                if let Some(prev) = last {
                    if i <= prev {
                        return Err(OtlmError::InvalidValue(format!(
                            "column {j} entries must have strictly increasing rows"
                        )));
                    }
                }
                last = Some(i);
                if v > 0.0 {
                    row_idx.push(i);
                    values.push(v);
                    row_support[i] = true;
                    sum += v;
                }
            }
            if sum <= 0.0 {
                return Err(OtlmError::InvalidValue(format!(
                    "column {j} has zero sum; every atom needs positive mass"
                )));
            }
            col_sums.push(sum);
            col_ptr.push(row_idx.len());
        }
        Ok(Self {
            n_samples,
            n_atoms,
            col_ptr,
            row_idx,
            values,
            col_sums,
            row_support,
        })
    }

    /// Builds from dense column vectors of length `n_samples`.
    pub fn from_dense_columns(columns: Vec<Vec<f64>>) -> Result<Self> {
        let n_samples = columns.first().map_or(0, |c| c.len());
        if columns.iter().any(|c| c.len() != n_samples) {
            return Err(OtlmError::InvalidValue(
                "dictionary columns must share a length".into(),
            ));
        }
        let cols = columns
            .into_iter()
            .map(|c| c.into_iter().enumerate().collect())
            .collect();
        Self::from_columns(n_samples, cols)
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Cached column sums x_j.
    pub fn col_sums(&self) -> &[f64] {
        &self.col_sums
    }

    /// Rows and values of atom `j`.
    pub fn col(&self, j: usize) -> (&[usize], &[f64]) {
        let span = self.col_ptr[j]..self.col_ptr[j + 1];
        (&self.row_idx[span.clone()], &self.values[span])
    }

    /// True when row i holds at least one stored entry.
    pub fn row_has_support(&self, i: usize) -> bool {
        self.row_support[i]
    }

    /// out = X w, accumulated column by column in atom order.
    pub fn mul_weights(&self, w: &[f64], out: &mut [f64]) {
        assert_eq!(w.len(), self.n_atoms, "mul_weights: weight length");
        assert_eq!(out.len(), self.n_samples, "mul_weights: output length");
        out.fill(0.0);
        for (j, &wj) in w.iter().enumerate() {
            if wj == 0.0 {
                continue;
            }
            let (rows, vals) = self.col(j);
            for (&i, &v) in rows.iter().zip(vals) {
                out[i] += v * wj;
            }
        }
    }

    /// out = X^T v.
    pub fn mul_t(&self, v: &[f64], out: &mut [f64]) {
        assert_eq!(v.len(), self.n_samples, "mul_t: input length");
        assert_eq!(out.len(), self.n_atoms, "mul_t: output length");
        for (j, o) in out.iter_mut().enumerate() {
            let (rows, vals) = self.col(j);
            let mut acc = 0.0;
            for (&i, &x) in rows.iter().zip(vals) {
                acc += x * v[i];
            }
            *o = acc;
        }
    }
}

/// Non-negative target vector with positive total mass.
#[derive(Debug, Clone)]
pub struct Target {
    values: Vec<f64>,
}

impl Target {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(OtlmError::InvalidValue("empty target".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(OtlmError::InvalidValue(
                "target entries must be finite and >= 0".into(),
            ));
        }
        if values.iter().sum::<f64>() <= 0.0 {
            return Err(OtlmError::InvalidValue(
                "target must carry positive total mass".into(),
            ));
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn total_mass(&self) -> f64 {
        self.values.iter().sum()
    }
}

impl std::ops::Deref for Target {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.values
    }
}
