//! Dual scalings, the implicit-plan marginal identities, and solver output.
//!
//! The transport plan is never materialized inside iterations; its row and
//! column sums are defined through Q = diag(u2) K diag(u1):
//! row marginal Q 1 = u2 .* (K u1), column marginal Q^T 1 = u1 .* (K^T u2).

use crate::error::{OtlmError, Result};
use crate::kernel::GibbsKernel;
use crate::sparse::CsrMatrix;

/// Dual scalings and current weights of one solver run.
#[derive(Debug, Clone)]
pub struct ScalingState {
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    pub w: Vec<f64>,
    pub iter: usize,
}

impl ScalingState {
    pub fn new(u1: Vec<f64>, u2: Vec<f64>, w: Vec<f64>, iter: usize) -> Result<Self> {
        if u1.len() != u2.len() {
            return Err(OtlmError::DimensionMismatch {
                context: "u1 vs u2",
                expected: u1.len(),
                got: u2.len(),
            });
        }
        for (name, v) in [("u1", &u1), ("u2", &u2)] {
            if v.iter().any(|x| !x.is_finite() || *x <= 0.0) {
                return Err(OtlmError::InvalidValue(format!(
                    "{name} must be strictly positive and finite"
                )));
            }
        }
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(OtlmError::InvalidValue(
                "weights must be finite and >= 0".into(),
            ));
        }
        Ok(Self { u1, u2, w, iter })
    }

    fn check_dims(&self, kernel: &GibbsKernel) -> Result<()> {
        if self.u1.len() != kernel.n() {
            return Err(OtlmError::DimensionMismatch {
                context: "state vs kernel",
                expected: kernel.n(),
                got: self.u1.len(),
            });
        }
        Ok(())
    }
}

/// Source marginal of the implicit plan: u2 .* (K u1).
pub fn plan_row_marginal(state: &ScalingState, kernel: &GibbsKernel) -> Result<Vec<f64>> {
    state.check_dims(kernel)?;
    let mut out = vec![0.0; kernel.n()];
    kernel.mul_vec(&state.u1, &mut out);
    for (o, &u) in out.iter_mut().zip(&state.u2) {
        *o *= u;
    }
    Ok(out)
}

/// Target marginal of the implicit plan: u1 .* (K^T u2).
pub fn plan_col_marginal(state: &ScalingState, kernel: &GibbsKernel) -> Result<Vec<f64>> {
    state.check_dims(kernel)?;
    let mut out = vec![0.0; kernel.n()];
    kernel.mul_vec_t(&state.u2, &mut out);
    for (o, &u) in out.iter_mut().zip(&state.u1) {
        *o *= u;
    }
    Ok(out)
}

/// Explicit plan Q_ij = u2_i k_ij u1_j on the kernel's sparsity pattern.
/// Not used by the iteration loop; for inspection and small-scale checks.
pub fn materialize_plan(state: &ScalingState, kernel: &GibbsKernel) -> Result<CsrMatrix> {
    state.check_dims(kernel)?;
    Ok(scaled_plan(&state.u2, kernel, &state.u1))
}

/// Shared implementation; also used on solver output where scalings may
/// legitimately carry zeros (zero-mass target bins).
pub(crate) fn scaled_plan(u2: &[f64], kernel: &GibbsKernel, u1: &[f64]) -> CsrMatrix {
    let triplets: Vec<_> = kernel
        .iter()
        .map(|(i, j, k)| (i, j, u2[i] * k * u1[j]))
        .collect();
    CsrMatrix::from_triplets(kernel.n(), kernel.n(), triplets)
        .expect("kernel pattern is valid by construction")
}

/// Residuals and surrogate objective at one convergence check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    /// Max-norm relative change of the weights over the last iteration.
    pub w_rel_change: f64,
    /// ||u2 .* (K u1) - X w||_1 / ||X w||_1, with K u1 taken after the
    /// target update; measures stationarity of the source identity.
    pub source_residual: f64,
    /// ||u1 .* (K^T u2) - prox(K^T u2 | y)||_1 / ||y||_1; held at zero by
    /// construction right after the target update, recorded as a
    /// consistency diagnostic.
    pub target_prox_residual: f64,
    /// Penalized projection objective alpha R(w) + eps KL(X w || K u1).
    pub objective_surrogate: f64,
}

/// Final weights, scalings, and per-check diagnostics of a solve.
#[derive(Debug, Clone)]
pub struct Solution {
    pub w: Vec<f64>,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    pub diagnostics: Vec<IterationRecord>,
    pub converged: bool,
    pub iters_used: usize,
}

impl Solution {
    /// Per-check records in iteration order.
    pub fn diagnostics(&self) -> &[IterationRecord] {
        &self.diagnostics
    }

    pub fn final_record(&self) -> Option<&IterationRecord> {
        self.diagnostics.last()
    }

    /// Materializes the final plan on the kernel pattern.
    pub fn plan(&self, kernel: &GibbsKernel) -> Result<CsrMatrix> {
        if self.u1.len() != kernel.n() {
            return Err(OtlmError::DimensionMismatch {
                context: "solution vs kernel",
                expected: kernel.n(),
                got: self.u1.len(),
            });
        }
        Ok(scaled_plan(&self.u2, kernel, &self.u1))
    }
}

#[cfg(test)]
mod tests {
    #![allow(clippy::needless_range_loop)] // dense cross-checks read clearest with indices

    use super::*;
    use crate::cost::SparseCostMatrix;
    use crate::kernel::build_kernel;

    fn dense_kernel(n: usize, costs: &[f64], eps: f64) -> GibbsKernel {
        let entries = (0..n * n).map(|k| (k / n, k % n, costs[k])).collect();
        let c = SparseCostMatrix::new(n, entries).unwrap();
        build_kernel(&c, eps).unwrap()
    }

    fn ident_kernel(n: usize) -> GibbsKernel {
        let c = SparseCostMatrix::new(n, (0..n).map(|i| (i, i, 0.0)).collect()).unwrap();
        build_kernel(&c, 1.0).unwrap()
    }

    #[test]
    fn unit_scalings_give_kernel_sums() {
        let k = dense_kernel(3, &[0.0, 0.5, 1.0, 0.5, 0.0, 0.5, 1.0, 0.5, 0.0], 1.0);
        let st = ScalingState::new(vec![1.0; 3], vec![1.0; 3], vec![1.0], 0).unwrap();
        let rows = plan_row_marginal(&st, &k).unwrap();
        let cols = plan_col_marginal(&st, &k).unwrap();
        assert_eq!(rows, k.row_sums());
        assert_eq!(cols, k.col_sums());
    }

    #[test]
    fn identity_kernel_unit_scalings() {
        let k = ident_kernel(4);
        let st = ScalingState::new(vec![1.0; 4], vec![1.0; 4], vec![], 0).unwrap();
        assert_eq!(plan_row_marginal(&st, &k).unwrap(), vec![1.0; 4]);
    }

    #[test]
    fn row_marginal_is_linear_in_u2() {
        let k = dense_kernel(2, &[0.0, 1.0, 1.0, 0.0], 0.5);
        let st1 = ScalingState::new(vec![1.0, 2.0], vec![0.5, 1.5], vec![], 0).unwrap();
        let st2 = ScalingState::new(vec![1.0, 2.0], vec![1.0, 3.0], vec![], 0).unwrap();
        let a = plan_row_marginal(&st1, &k).unwrap();
        let b = plan_row_marginal(&st2, &k).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((2.0 * x - y).abs() <= 1e-15 * y.abs());
        }
    }

    #[test]
    fn col_marginal_is_row_marginal_of_transpose() {
        // Swapping the roles of u1, u2 and transposing K turns the column
        // marginal into the row marginal. A symmetric kernel keeps K = K^T,
        // so only the scaling swap matters here.
        let k = dense_kernel(3, &[0.0, 0.3, 0.6, 0.3, 0.0, 0.3, 0.6, 0.3, 0.0], 1.0);
        let u1 = vec![1.0, 2.0, 0.5];
        let u2 = vec![3.0, 0.25, 1.0];
        let st = ScalingState::new(u1.clone(), u2.clone(), vec![], 0).unwrap();
        let swapped = ScalingState::new(u2, u1, vec![], 0).unwrap();
        let cols = plan_col_marginal(&st, &k).unwrap();
        let rows = plan_row_marginal(&swapped, &k).unwrap();
        for (a, b) in cols.iter().zip(&rows) {
            assert!((a - b).abs() <= 1e-15 * a.abs().max(1.0));
        }
    }

    #[test]
    fn marginals_match_dense_materialization() {
        // Random-ish fixed 4x4 instance checked against the dense oracle:
        // diag(u2) K diag(u1) summed by hand.
        let costs = [
            0.0, 0.2, 0.9, 0.4, 0.2, 0.0, 0.1, 0.7, 0.9, 0.1, 0.0, 0.3, 0.4, 0.7, 0.3, 0.0,
        ];
        let k = dense_kernel(4, &costs, 0.8);
        let u1 = vec![0.7, 1.3, 2.1, 0.4];
        let u2 = vec![1.9, 0.6, 1.1, 0.9];
        let st = ScalingState::new(u1.clone(), u2.clone(), vec![], 0).unwrap();

        let mut dense = vec![vec![0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                dense[i][j] = u2[i] * k.get(i, j).unwrap() * u1[j];
            }
        }
        let rows = plan_row_marginal(&st, &k).unwrap();
        let cols = plan_col_marginal(&st, &k).unwrap();
        let plan = materialize_plan(&st, &k).unwrap();
        for i in 0..4 {
            let dense_row: f64 = dense[i].iter().sum();
            let dense_col: f64 = (0..4).map(|r| dense[r][i]).sum();
            assert!((rows[i] - dense_row).abs() <= 8.0 * f64::EPSILON * dense_row);
            assert!((cols[i] - dense_col).abs() <= 8.0 * f64::EPSILON * dense_col);
            let plan_row: f64 = plan.row(i).1.iter().sum();
            assert!((rows[i] - plan_row).abs() <= 8.0 * f64::EPSILON * plan_row);
            for j in 0..4 {
                assert_eq!(plan.get(i, j).unwrap(), dense[i][j]);
            }
        }

        // Total mass identity over the same entry set.
        let total_rows: f64 = rows.iter().sum();
        let total_cols: f64 = cols.iter().sum();
        assert!((total_rows - total_cols).abs() <= 1e-12 * total_rows);
    }

    #[test]
    fn materialized_scaling_formula() {
        let k = dense_kernel(3, &[0.0; 9], 1.0);
        let st = ScalingState::new(vec![1.0, 2.0, 1.0], vec![1.0, 1.0, 3.0], vec![], 0).unwrap();
        let plan = materialize_plan(&st, &k).unwrap();
        assert_eq!(plan.get(0, 1), Some(2.0));
        assert_eq!(plan.get(2, 0), Some(3.0));
        assert_eq!(plan.get(2, 1), Some(6.0));
    }

    #[test]
    fn unit_scalings_reproduce_kernel() {
        let k = dense_kernel(2, &[0.0, 0.4, 0.4, 0.0], 1.0);
        let st = ScalingState::new(vec![1.0; 2], vec![1.0; 2], vec![], 0).unwrap();
        let plan = materialize_plan(&st, &k).unwrap();
        for (i, j, q) in plan.iter() {
            assert_eq!(q, k.get(i, j).unwrap());
        }
    }

    #[test]
    fn state_rejects_bad_scalings() {
        assert!(ScalingState::new(vec![0.0], vec![1.0], vec![], 0).is_err());
        assert!(ScalingState::new(vec![1.0], vec![-1.0], vec![], 0).is_err());
        assert!(ScalingState::new(vec![1.0], vec![f64::NAN], vec![], 0).is_err());
        assert!(ScalingState::new(vec![1.0], vec![1.0], vec![-0.5], 0).is_err());
        assert!(ScalingState::new(vec![1.0, 1.0], vec![1.0], vec![], 0).is_err());
    }

    #[test]
    fn dimension_mismatch_reported() {
        let k = ident_kernel(3);
        let st = ScalingState::new(vec![1.0; 2], vec![1.0; 2], vec![], 0).unwrap();
        assert!(plan_row_marginal(&st, &k).is_err());
        assert!(plan_col_marginal(&st, &k).is_err());
        assert!(materialize_plan(&st, &k).is_err());
    }
}
