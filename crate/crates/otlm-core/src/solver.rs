//! Alternating scaling iterations for the transport linear model.
//!
//! Each iteration runs a source update (normalized-weight build, one MM
//! step against the effective target K u1, then u2 = X w / K u1) followed
//! by a target update (datafit prox of K^T u2, then u1 = prox / K^T u2).
//! Convergence gates jointly on the weight change and the source-marginal
//! residual; the target identity holds by construction after its update.

use crate::config::OtlmConfig;
use crate::dictionary::{Dictionary, Target};
use crate::error::{OtlmError, Result};
use crate::kernel::GibbsKernel;
use crate::mm::{build_normalized_weights, mm_objective, mm_step};
use crate::prox::{prox_datafit, DatafitKind};
use crate::state::{IterationRecord, Solution};

/// Scalings outside this magnitude window abort the run; the usual cause is
/// an epsilon too small for the cost scale.
const SCALE_MIN: f64 = 1e-290;
const SCALE_MAX: f64 = 1e290;

/// Runs the scaling iterations. `w0` overrides the default uniform
/// total-mass initialization; zero entries are floored so the
/// multiplicative updates can move them.
pub fn solve(
    kernel: &GibbsKernel,
    dict: &Dictionary,
    target: &Target,
    cfg: &OtlmConfig,
    w0: Option<&[f64]>,
) -> Result<Solution> {
    cfg.validate()?;
    let n = kernel.n();
    if dict.n_samples() != n {
        return Err(OtlmError::DimensionMismatch {
            context: "dictionary vs kernel",
            expected: n,
            got: dict.n_samples(),
        });
    }
    if target.len() != n {
        return Err(OtlmError::DimensionMismatch {
            context: "target vs kernel",
            expected: n,
            got: target.len(),
        });
    }

    let m = dict.n_atoms();
    let mass_ratio = target.total_mass() / dict.col_sums().iter().sum::<f64>();
    let w_min = cfg.w_min_rel * mass_ratio;
    let mut w = match w0 {
        Some(init) => {
            if init.len() != m {
                return Err(OtlmError::DimensionMismatch {
                    context: "w0 vs atoms",
                    expected: m,
                    got: init.len(),
                });
            }
            if init.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(OtlmError::InvalidValue("w0 must be finite and >= 0".into()));
            }
            init.iter().map(|&v| v.max(w_min)).collect::<Vec<_>>()
        }
        None => vec![mass_ratio.max(w_min); m],
    };

    let mut u1 = vec![1.0; n];
    let mut u2 = vec![0.0; n];
    let mut ku1 = kernel.row_sums().to_vec();
    let mut ktu2 = vec![0.0; n];
    let mut xw = vec![0.0; n];

    let y_mass = target.total_mass();
    let mut diagnostics = Vec::new();
    let mut converged = false;
    let mut iters_used = 0;

    for iter in 1..=cfg.max_iters {
        iters_used = iter;
        let w_prev = w.clone();

        // Source update: penalized column-span projection, single MM step.
        for _ in 0..cfg.mm_inner_iters {
            let ws = build_normalized_weights(dict, &w)?;
            w = mm_step(&ws, &ku1, &cfg.penalty, cfg.epsilon)?;
        }
        dict.mul_weights(&w, &mut xw);
        for i in 0..n {
            if ku1[i] == 0.0 {
                if xw[i] > 0.0 {
                    return Err(OtlmError::Infeasible(format!(
                        "K u1 vanished on row {i} while X w is positive there"
                    )));
                }
                u2[i] = 0.0;
            } else {
                u2[i] = xw[i] / ku1[i];
            }
        }
        guard_scaling(&u2, iter, "u2")?;

        // Target update: datafit proximal step.
        kernel.mul_vec_t(&u2, &mut ktu2);
        let v2 = prox_datafit(cfg.datafit, &ktu2, target, cfg.lambda, cfg.epsilon)?;
        for j in 0..n {
            if ktu2[j] == 0.0 {
                if v2[j] > 0.0 {
                    return Err(OtlmError::Infeasible(format!(
                        "target mass at column {j} is unreachable through the kernel"
                    )));
                }
                u1[j] = 0.0;
            } else {
                u1[j] = v2[j] / ktu2[j];
            }
        }
        guard_scaling(&u1, iter, "u1")?;

        kernel.mul_vec(&u1, &mut ku1);

        if iter % cfg.check_every == 0 || iter == cfg.max_iters {
            let w_scale = w
                .iter()
                .cloned()
                .fold(0.0f64, f64::max)
                .max(f64::MIN_POSITIVE);
            let w_rel_change = w
                .iter()
                .zip(&w_prev)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max)
                / w_scale;

            let xw_mass: f64 = xw.iter().sum();
            let source_residual = (0..n).map(|i| (u2[i] * ku1[i] - xw[i]).abs()).sum::<f64>()
                / xw_mass.max(f64::MIN_POSITIVE);
            let target_prox_residual =
                (0..n).map(|j| (u1[j] * ktu2[j] - v2[j]).abs()).sum::<f64>() / y_mass;
            let objective_surrogate = mm_objective(&w, dict, &ku1, &cfg.penalty, cfg.epsilon)?;

            diagnostics.push(IterationRecord {
                iter,
                w_rel_change,
                source_residual,
                target_prox_residual,
                objective_surrogate,
            });

            if w_rel_change <= cfg.tol && source_residual <= cfg.tol {
                converged = true;
                break;
            }
        }
    }

    Ok(Solution {
        w,
        u1,
        u2,
        diagnostics,
        converged,
        iters_used,
    })
}

/// Balanced variant: the target marginal is pinned to y exactly.
pub fn solve_balanced(
    kernel: &GibbsKernel,
    dict: &Dictionary,
    target: &Target,
    cfg: &OtlmConfig,
    w0: Option<&[f64]>,
) -> Result<Solution> {
    let mut balanced = cfg.clone();
    balanced.datafit = DatafitKind::Equality;
    solve(kernel, dict, target, &balanced, w0)
}

fn guard_scaling(v: &[f64], iter: usize, what: &'static str) -> Result<()> {
    for &x in v {
        if !x.is_finite() || x > SCALE_MAX || (x > 0.0 && x < SCALE_MIN) {
            return Err(OtlmError::NumericalOverflow { iter, what });
        }
    }
    Ok(())
}
