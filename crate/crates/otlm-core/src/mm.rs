//! Majorization-minimization step for the penalized non-negative
//! column-span projection: given normalized weights Z from the previous
//! iterate, one step minimizes the Jensen majorant of
//! alpha R(w) + eps KL(X w || y_eff) in closed form per column.
//!
//! The quadratic penalties solve ln w_j + gamma_j w_j = nu_j through the
//! principal Lambert branch; the derivation fixes the l1 shift as
//! alpha/(eps x_j) inside the per-column exponent, which is also the
//! beta -> 0 limit of the elastic-net step and the per-coordinate
//! minimizer the oracle tests pin down.

use crate::dictionary::Dictionary;
use crate::error::{OtlmError, Result};
use crate::lambertw::{lambert_w0, lambert_w0_of_log};

/// Weight penalty R with its strength parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PenaltyKind {
    None,
    /// alpha * sum_j w_j (weights are non-negative).
    L1 {
        alpha: f64,
    },
    /// (alpha / 2) * sum_j w_j^2.
    L2Squared {
        alpha: f64,
    },
    /// alpha * l1 + (beta / 2) * l2^2.
    ElasticNet {
        alpha: f64,
        beta: f64,
    },
}

impl PenaltyKind {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        match *self {
            PenaltyKind::None => Ok(()),
            PenaltyKind::L1 { alpha } | PenaltyKind::L2Squared { alpha } => {
                if ok(alpha) {
                    Ok(())
                } else {
                    Err(OtlmError::InvalidValue(format!(
                        "penalty strength must be finite and >= 0, got {alpha}"
                    )))
                }
            }
            PenaltyKind::ElasticNet { alpha, beta } => {
                if ok(alpha) && ok(beta) && alpha > 0.0 && beta > 0.0 {
                    Ok(())
                } else {
                    Err(OtlmError::InvalidValue(format!(
                        "elastic net requires alpha > 0 and beta > 0, got ({alpha}, {beta})"
                    )))
                }
            }
        }
    }

    /// Penalty value alpha R(w).
    pub fn value(&self, w: &[f64]) -> f64 {
        match *self {
            PenaltyKind::None => 0.0,
            PenaltyKind::L1 { alpha } => alpha * w.iter().sum::<f64>(),
            PenaltyKind::L2Squared { alpha } => 0.5 * alpha * w.iter().map(|v| v * v).sum::<f64>(),
            PenaltyKind::ElasticNet { alpha, beta } => {
                alpha * w.iter().sum::<f64>() + 0.5 * beta * w.iter().map(|v| v * v).sum::<f64>()
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PenaltyKind::None => "none",
            PenaltyKind::L1 { .. } => "l1",
            PenaltyKind::L2Squared { .. } => "l2_squared",
            PenaltyKind::ElasticNet { .. } => "elastic_net",
        }
    }
}

/// Normalized previous-iterate weights on the dictionary pattern,
/// Z_ij = X_ij w'_j / sum_k X_ik w'_k, stored in column order alongside a
/// borrowed view of X.
#[derive(Debug)]
pub struct MMWorkspace<'a> {
    dict: &'a Dictionary,
    /// Z values aligned with the dictionary's column storage.
    z: Vec<f64>,
    /// Start of each column's slice in `z`.
    offsets: Vec<usize>,
}

impl<'a> MMWorkspace<'a> {
    pub fn dictionary(&self) -> &Dictionary {
        self.dict
    }

    /// Z entries of column j, aligned with `Dictionary::col(j)`.
    pub fn z_col(&self, j: usize) -> &[f64] {
        &self.z[self.offsets[j]..self.offsets[j + 1]]
    }
}

/// Builds Z for the current weights. Errors with `DegenerateRow` when a row
/// with dictionary support sees X w' = 0 there, which means the weights were
/// zeroed on every atom covering that row.
pub fn build_normalized_weights<'a>(
    dict: &'a Dictionary,
    w_prev: &[f64],
) -> Result<MMWorkspace<'a>> {
    if w_prev.len() != dict.n_atoms() {
        return Err(OtlmError::DimensionMismatch {
            context: "weights vs atoms",
            expected: dict.n_atoms(),
            got: w_prev.len(),
        });
    }
    if w_prev.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(OtlmError::InvalidValue(
            "weights must be finite and >= 0".into(),
        ));
    }
    let mut denom = vec![0.0; dict.n_samples()];
    dict.mul_weights(w_prev, &mut denom);
    for (i, &d) in denom.iter().enumerate() {
        if d == 0.0 && dict.row_has_support(i) {
            return Err(OtlmError::DegenerateRow(i));
        }
    }
    let mut z = Vec::with_capacity(dict.nnz());
    let mut offsets = Vec::with_capacity(dict.n_atoms() + 1);
    offsets.push(0);
    for (j, &wj) in w_prev.iter().enumerate() {
        let (rows, vals) = dict.col(j);
        for (&i, &x) in rows.iter().zip(vals) {
            z.push(if wj == 0.0 { 0.0 } else { x * wj / denom[i] });
        }
        offsets.push(z.len());
    }
    Ok(MMWorkspace { dict, z, offsets })
}

/// One closed-form MM step against the effective target `y_eff` (K u1 in
/// the solver loop). Terms with X_ij = 0 are structurally absent, which
/// realizes the 0 log 0 = 0 convention.
pub fn mm_step(
    ws: &MMWorkspace,
    y_eff: &[f64],
    penalty: &PenaltyKind,
    epsilon: f64,
) -> Result<Vec<f64>> {
    let dict = ws.dict;
    if y_eff.len() != dict.n_samples() {
        return Err(OtlmError::DimensionMismatch {
            context: "effective target vs samples",
            expected: dict.n_samples(),
            got: y_eff.len(),
        });
    }
    if epsilon <= 0.0 || !epsilon.is_finite() {
        return Err(OtlmError::InvalidValue(format!(
            "epsilon must be positive and finite, got {epsilon}"
        )));
    }
    penalty.validate()?;
    for (i, &v) in y_eff.iter().enumerate() {
        if (!v.is_finite() || v <= 0.0) && dict.row_has_support(i) {
            return Err(OtlmError::NonPositiveEffTarget(i));
        }
    }

    let col_sums = dict.col_sums();
    let mut w = Vec::with_capacity(dict.n_atoms());
    for (j, &xj) in col_sums.iter().enumerate() {
        let (rows, vals) = dict.col(j);
        let z = ws.z_col(j);
        // S_j = sum_i X_ij ln(Z_ij y_i / X_ij); -inf when the atom's weight
        // hit zero, whose exp correctly keeps the multiplicative step at 0.
        let mut s = 0.0;
        for ((&i, &x), &zi) in rows.iter().zip(vals).zip(z) {
            s += x * (zi * y_eff[i] / x).ln();
        }
        let wj = match *penalty {
            PenaltyKind::None => (s / xj).exp(),
            PenaltyKind::L1 { alpha } => ((s - alpha / epsilon) / xj).exp(),
            PenaltyKind::L2Squared { alpha } => {
                if alpha == 0.0 {
                    (s / xj).exp()
                } else {
                    lambert_form(alpha / (epsilon * xj), s / xj)?
                }
            }
            PenaltyKind::ElasticNet { alpha, beta } => {
                let nu = (s - alpha / epsilon) / xj;
                if beta == 0.0 {
                    nu.exp()
                } else {
                    lambert_form(beta / (epsilon * xj), nu)?
                }
            }
        };
        w.push(wj);
    }
    Ok(w)
}

/// Solves ln w + gamma w = nu for w >= 0: w = W0(gamma e^nu) / gamma,
/// evaluated without overflow on either side.
fn lambert_form(gamma: f64, nu: f64) -> Result<f64> {
    let log_arg = gamma.ln() + nu;
    if log_arg > 300.0 {
        Ok(lambert_w0_of_log(log_arg)? / gamma)
    } else if log_arg < -700.0 {
        // W0(t)/gamma -> e^nu as t = gamma e^nu -> 0.
        Ok(nu.exp())
    } else {
        Ok(lambert_w0(log_arg.exp())? / gamma)
    }
}

/// Generalized KL term a ln(a/b) - a + b with the 0 log 0 convention.
fn gkl(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        b
    } else if b == 0.0 {
        f64::INFINITY
    } else {
        a * (a / b).ln() - a + b
    }
}

/// Projection objective V(w) = alpha R(w) + eps KL(X w || y_eff).
pub fn mm_objective(
    w: &[f64],
    dict: &Dictionary,
    y_eff: &[f64],
    penalty: &PenaltyKind,
    epsilon: f64,
) -> Result<f64> {
    if w.len() != dict.n_atoms() {
        return Err(OtlmError::DimensionMismatch {
            context: "weights vs atoms",
            expected: dict.n_atoms(),
            got: w.len(),
        });
    }
    if y_eff.len() != dict.n_samples() {
        return Err(OtlmError::DimensionMismatch {
            context: "effective target vs samples",
            expected: dict.n_samples(),
            got: y_eff.len(),
        });
    }
    let mut xw = vec![0.0; dict.n_samples()];
    dict.mul_weights(w, &mut xw);
    let kl: f64 = xw.iter().zip(y_eff).map(|(&a, &b)| gkl(a, b)).sum();
    Ok(penalty.value(w) + epsilon * kl)
}

/// Jensen majorant G(w, w_prev) + alpha R(w); touches the objective at
/// w = w_prev and upper-bounds it elsewhere.
pub fn mm_majorant(
    w: &[f64],
    w_prev: &[f64],
    dict: &Dictionary,
    y_eff: &[f64],
    penalty: &PenaltyKind,
    epsilon: f64,
) -> Result<f64> {
    let ws = build_normalized_weights(dict, w_prev)?;
    if w.len() != dict.n_atoms() {
        return Err(OtlmError::DimensionMismatch {
            context: "weights vs atoms",
            expected: dict.n_atoms(),
            got: w.len(),
        });
    }
    let mut total = 0.0;
    for (j, &wj) in w.iter().enumerate() {
        let (rows, vals) = dict.col(j);
        let z = ws.z_col(j);
        for ((&i, &x), &zi) in rows.iter().zip(vals).zip(z) {
            let yi = y_eff[i];
            if zi == 0.0 {
                if wj > 0.0 {
                    return Ok(f64::INFINITY);
                }
                continue;
            }
            let t = x * wj / zi;
            total += zi * gkl(t, yi);
        }
    }
    Ok(penalty.value(w) + epsilon * total)
}
