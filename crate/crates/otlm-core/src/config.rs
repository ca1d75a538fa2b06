//! Solver configuration.

use crate::error::{OtlmError, Result};
use crate::mm::PenaltyKind;
use crate::prox::DatafitKind;

/// Regularization strengths, loss selection, and convergence policy for one
/// solve. `lambda` is ignored by the equality datafit.
#[derive(Debug, Clone)]
pub struct OtlmConfig {
    pub epsilon: f64,
    pub lambda: f64,
    pub datafit: DatafitKind,
    pub penalty: PenaltyKind,
    pub max_iters: usize,
    /// Joint threshold on the weight change and the source residual.
    pub tol: f64,
    /// Residuals are evaluated every this many iterations (and at the end).
    pub check_every: usize,
    /// MM steps per outer iteration; one step already guarantees descent.
    pub mm_inner_iters: usize,
    /// Initial-weight floor, relative to the total-mass ratio. Multiplicative
    /// updates cannot leave exact zero, so default weights start here.
    pub w_min_rel: f64,
}

impl Default for OtlmConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-3,
            lambda: 1.0,
            datafit: DatafitKind::Equality,
            penalty: PenaltyKind::None,
            max_iters: 10_000,
            tol: 1e-9,
            check_every: 1,
            mm_inner_iters: 1,
            w_min_rel: 1e-12,
        }
    }
}

impl OtlmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epsilon <= 0.0 || !self.epsilon.is_finite() {
            return Err(OtlmError::InvalidValue(format!(
                "epsilon must be positive and finite, got {}",
                self.epsilon
            )));
        }
        if self.lambda.is_nan() || self.lambda < 0.0 || self.lambda.is_infinite() {
            return Err(OtlmError::InvalidValue(format!(
                "lambda must be finite and >= 0, got {}",
                self.lambda
            )));
        }
        self.penalty.validate()?;
        if self.max_iters == 0 {
            return Err(OtlmError::InvalidValue("max_iters must be >= 1".into()));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(OtlmError::InvalidValue(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.check_every == 0 {
            return Err(OtlmError::InvalidValue("check_every must be >= 1".into()));
        }
        if self.mm_inner_iters == 0 {
            return Err(OtlmError::InvalidValue(
                "mm_inner_iters must be >= 1".into(),
            ));
        }
        if self.w_min_rel.is_nan() || self.w_min_rel <= 0.0 || self.w_min_rel >= 1.0 {
            return Err(OtlmError::InvalidValue(format!(
                "w_min_rel must lie in (0, 1), got {}",
                self.w_min_rel
            )));
        }
        Ok(())
    }
}
