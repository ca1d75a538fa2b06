//! Row-compressed sparse matrix with the few operations the scaling
//! iterations need: matrix-vector products, transposition, and entry access.

use rayon::prelude::*;

use crate::error::{OtlmError, Result};

/// Row count above which matrix-vector products fan out over rayon.
/// Each output row is summed by exactly one task in storage order, so the
/// result is bitwise identical to the serial path.
const PAR_ROWS: usize = 4096;

/// CSR matrix over f64. Values are stored row-major; within a row, column
/// indices are strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from (row, col, value) triplets. Triplets may arrive in any
    /// order; duplicates and out-of-bounds indices are rejected.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        for &(i, j, _) in &triplets {
            if i >= n_rows {
                return Err(OtlmError::InvalidValue(format!(
                    "row index {i} out of bounds for {n_rows} rows"
                )));
            }
            if j >= n_cols {
                return Err(OtlmError::InvalidValue(format!(
                    "column index {j} out of bounds for {n_cols} columns"
                )));
            }
        }
        triplets.sort_unstable_by_key(|a| (a.0, a.1));
        for pair in triplets.windows(2) {
            if pair[0].0 == pair[1].0 && pair[0].1 == pair[1].1 {
                return Err(OtlmError::InvalidValue(format!(
                    "duplicate entry at ({}, {})",
                    pair[0].0, pair[0].1
                )));
            }
        }
        let mut row_ptr = vec![0usize; n_rows + 1];
        for &(i, _, _) in &triplets {
            row_ptr[i + 1] += 1;
        }
        for i in 0..n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let col_idx = triplets.iter().map(|t| t.1).collect();
        let values = triplets.iter().map(|t| t.2).collect();
        Ok(Self {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    pub fn row_is_empty(&self, i: usize) -> bool {
        self.row_ptr[i] == self.row_ptr[i + 1]
    }

    /// Entry lookup by binary search within the row.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).ok().map(|k| vals[k])
    }

    /// Iterates stored entries as (row, col, value) in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut row_ptr = vec![0usize; self.n_cols + 1];
        for &j in &self.col_idx {
            row_ptr[j + 1] += 1;
        }
        for j in 0..self.n_cols {
            row_ptr[j + 1] += row_ptr[j];
        }
        let mut cursor = row_ptr.clone();
        let mut col_idx = vec![0usize; self.nnz()];
        let mut values = vec![0f64; self.nnz()];
        for (i, j, v) in self.iter() {
            let k = cursor[j];
            col_idx[k] = i;
            values[k] = v;
            cursor[j] += 1;
        }
        CsrMatrix {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// out = A x. `out` must have length `n_rows`.
    pub fn mul_vec(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.n_cols, "mul_vec: input length");
        assert_eq!(out.len(), self.n_rows, "mul_vec: output length");
        let row_sum = |i: usize| -> f64 {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (&j, &v) in cols.iter().zip(vals) {
                acc += v * x[j];
            }
            acc
        };
        if self.n_rows >= PAR_ROWS {
            out.par_iter_mut()
                .enumerate()
                .for_each(|(i, o)| *o = row_sum(i));
        } else {
            for (i, o) in out.iter_mut().enumerate() {
                *o = row_sum(i);
            }
        }
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n_rows)
            .map(|i| self.row(i).1.iter().sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n_cols];
        for (_, j, v) in self.iter() {
            sums[j] += v;
        }
        sums
    }

    /// Keeps entries satisfying the predicate; used by the cost builders.
    pub fn filter(&self, mut keep: impl FnMut(usize, usize, f64) -> bool) -> CsrMatrix {
        let triplets: Vec<_> = self.iter().filter(|&(i, j, v)| keep(i, j, v)).collect();
        // Entries stay sorted, so the unchecked rebuild cannot fail.
        CsrMatrix::from_triplets(self.n_rows, self.n_cols, triplets)
            .expect("filtered rebuild preserves validity")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CsrMatrix {
        CsrMatrix::from_triplets(
            3,
            3,
            vec![(0, 0, 1.0), (0, 2, 2.0), (1, 1, 3.0), (2, 0, 4.0)],
        )
        .unwrap()
    }

    #[test]
    fn triplets_any_order() {
        let a = CsrMatrix::from_triplets(2, 2, vec![(1, 1, 4.0), (0, 0, 1.0)]).unwrap();
        assert_eq!(a.get(0, 0), Some(1.0));
        assert_eq!(a.get(1, 1), Some(4.0));
        assert_eq!(a.get(0, 1), None);
    }

    #[test]
    fn duplicates_rejected() {
        let err = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (0, 0, 2.0)]);
        assert!(err.is_err());
    }

    #[test]
    fn out_of_bounds_rejected() {
        assert!(CsrMatrix::from_triplets(2, 2, vec![(2, 0, 1.0)]).is_err());
        assert!(CsrMatrix::from_triplets(2, 2, vec![(0, 2, 1.0)]).is_err());
    }

    #[test]
    fn mul_vec_matches_dense() {
        let a = sample();
        let x = [1.0, 2.0, 3.0];
        let mut out = [0.0; 3];
        a.mul_vec(&x, &mut out);
        assert_eq!(out, [1.0 * 1.0 + 2.0 * 3.0, 3.0 * 2.0, 4.0 * 1.0]);
    }

    #[test]
    fn transpose_round_trip() {
        let a = sample();
        let att = a.transpose().transpose();
        assert_eq!(a, att);
        assert_eq!(a.transpose().get(0, 2), Some(4.0));
    }

    #[test]
    fn sums() {
        let a = sample();
        assert_eq!(a.row_sums(), vec![3.0, 3.0, 4.0]);
        assert_eq!(a.col_sums(), vec![5.0, 3.0, 2.0]);
    }
}
