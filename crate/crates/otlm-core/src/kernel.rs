//! Gibbs kernel K = exp(-C/epsilon), stored sparse with a precomputed
//! transpose so both product orientations run over compressed rows.

use crate::cost::SparseCostMatrix;
use crate::error::{OtlmError, Result};
use crate::sparse::CsrMatrix;

/// Entries with C/epsilon beyond this are dropped as structural zeros;
/// exp underflows to subnormals shortly past it and to zero at ~745.
const UNDERFLOW_DROP: f64 = 690.0;

#[derive(Debug, Clone)]
pub struct GibbsKernel {
    k: CsrMatrix,
    kt: CsrMatrix,
    row_sums: Vec<f64>,
    col_sums: Vec<f64>,
    epsilon: f64,
}

/// Exponentiates the stored costs, dropping entries past the underflow
/// threshold. Erroring on an emptied row or column signals that epsilon is
/// too small for the cost scale.
pub fn build_kernel(cost: &SparseCostMatrix, epsilon: f64) -> Result<GibbsKernel> {
    if epsilon <= 0.0 || !epsilon.is_finite() {
        return Err(OtlmError::InvalidValue(format!(
            "epsilon must be positive and finite, got {epsilon}"
        )));
    }
    let n = cost.n();
    let mut entries = Vec::with_capacity(cost.nnz());
    for (i, j, c) in cost.iter() {
        let t = c / epsilon;
        if t <= UNDERFLOW_DROP {
            entries.push((i, j, (-t).exp()));
        }
    }
    let k = CsrMatrix::from_triplets(n, n, entries)?;
    for i in 0..n {
        if k.row_is_empty(i) {
            return Err(OtlmError::EmptyRow(i));
        }
    }
    let col_sums = k.col_sums();
    for (j, s) in col_sums.iter().enumerate() {
        if *s == 0.0 {
            return Err(OtlmError::EmptyCol(j));
        }
    }
    let kt = k.transpose();
    let row_sums = k.row_sums();
    Ok(GibbsKernel {
        k,
        kt,
        row_sums,
        col_sums,
        epsilon,
    })
}

impl GibbsKernel {
    pub fn n(&self) -> usize {
        self.k.n_rows()
    }

    pub fn nnz(&self) -> usize {
        self.k.nnz()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn row_sums(&self) -> &[f64] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[f64] {
        &self.col_sums
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.k.get(i, j)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.k.iter()
    }

    /// out = K u.
    pub fn mul_vec(&self, u: &[f64], out: &mut [f64]) {
        self.k.mul_vec(u, out);
    }

    /// out = K^T u, computed over the stored transpose.
    pub fn mul_vec_t(&self, u: &[f64], out: &mut [f64]) {
        self.kt.mul_vec(u, out);
    }
}
