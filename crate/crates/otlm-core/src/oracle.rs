//! Independent numeric oracles and small baselines.
//!
//! Everything here deliberately avoids the closed forms it is used to
//! check: the prox oracle bisects stationarity conditions instead of
//! calling Lambert W, the per-coordinate majorant minimizer bisects the
//! majorant gradient, and the Sinkhorn reference is a plain two-marginal
//! loop with no weight update.

use crate::dictionary::Dictionary;
use crate::error::{OtlmError, Result};
use crate::kernel::GibbsKernel;
use crate::mm::PenaltyKind;
use crate::prox::DatafitKind;

/// Bracketing and stopping policy for the 1-D bisections.
#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    /// Stop when the bracket width falls under tol * max(1, q).
    pub tol: f64,
    pub max_steps: usize,
    /// Geometric factor for bracket expansion.
    pub expand: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_steps: 400,
            expand: 4.0,
        }
    }
}

/// Minimizer of lambda L(q | y) + eps (q ln(q/s) - q + s) over q > 0 by
/// bisection on the stationarity function, which is strictly increasing
/// for every supported datafit.
pub fn prox_oracle_1d(
    kind: DatafitKind,
    s: f64,
    y: f64,
    lambda: f64,
    epsilon: f64,
    cfg: &OracleConfig,
) -> Result<f64> {
    if epsilon.is_nan()
        || epsilon <= 0.0
        || lambda < 0.0
        || !s.is_finite()
        || !y.is_finite()
        || s < 0.0
        || y < 0.0
    {
        return Err(OtlmError::InvalidValue(
            "prox oracle needs s, y >= 0, lambda >= 0, epsilon > 0".into(),
        ));
    }
    match kind {
        DatafitKind::Equality => return Ok(y),
        DatafitKind::Kl if y == 0.0 => return Ok(0.0),
        _ => {}
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    if lambda == 0.0 {
        return Ok(s);
    }
    let grad = |q: f64| -> f64 {
        let fit = match kind {
            DatafitKind::Equality => unreachable!("handled above"),
            DatafitKind::Kl => (q / y).ln(),
            DatafitKind::Tv => {
                if q > y {
                    1.0
                } else if q < y {
                    -1.0
                } else {
                    0.0
                }
            }
            DatafitKind::L2 => q - y,
            DatafitKind::Poisson => 1.0 - y / q,
        };
        epsilon * (q / s).ln() + lambda * fit
    };
    bisect_increasing(grad, s.max(1e-300), cfg)
}

/// Root of a strictly increasing function on (0, inf): geometric bracket
/// expansion, log-space halving while the bracket is wide, then linear
/// bisection down to the stopping width.
fn bisect_increasing(g: impl Fn(f64) -> f64, q0: f64, cfg: &OracleConfig) -> Result<f64> {
    let mut lo = q0;
    let mut hi = q0;
    let mut steps = 0;
    while g(lo) >= 0.0 {
        lo /= cfg.expand;
        steps += 1;
        if lo < 1e-307 || steps > cfg.max_steps {
            // The root sits at (or numerically below) zero mass.
            return Ok(0.0);
        }
    }
    steps = 0;
    while g(hi) <= 0.0 {
        hi *= cfg.expand;
        steps += 1;
        if hi > 1e300 || steps > cfg.max_steps {
            return Err(OtlmError::BracketFailure(format!(
                "no sign change below 1e300 (started at {q0})"
            )));
        }
    }
    let mut steps = 0;
    while hi / lo > 1.5 && steps < cfg.max_steps {
        let mid = (lo * hi).sqrt();
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        steps += 1;
    }
    while hi - lo > cfg.tol * hi.max(1.0) && steps < cfg.max_steps {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        steps += 1;
    }
    Ok(0.5 * (lo + hi))
}

/// Plain two-marginal Sinkhorn scalings for prescribed marginals a and b:
/// u2 <- a / K u1, u1 <- b / K^T u2, from u1 = 1. Returns (u1, u2) with the
/// plan diag(u2) K diag(u1).
pub fn sinkhorn_reference(
    kernel: &GibbsKernel,
    a: &[f64],
    b: &[f64],
    tol: f64,
    max_iters: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = kernel.n();
    if a.len() != n || b.len() != n {
        return Err(OtlmError::DimensionMismatch {
            context: "marginals vs kernel",
            expected: n,
            got: a.len().min(b.len()),
        });
    }
    let sa: f64 = a.iter().sum();
    let sb: f64 = b.iter().sum();
    if sa <= 0.0 || sb <= 0.0 {
        return Err(OtlmError::InvalidValue(
            "marginals must carry positive mass".into(),
        ));
    }
    if (sa - sb).abs() > 1e-9 * sa.max(sb) {
        return Err(OtlmError::InvalidValue(format!(
            "marginal masses differ: {sa} vs {sb}"
        )));
    }
    let mut u1 = vec![1.0; n];
    let mut u2 = vec![0.0; n];
    let mut ku1 = vec![0.0; n];
    let mut ktu2 = vec![0.0; n];
    for _ in 0..max_iters {
        kernel.mul_vec(&u1, &mut ku1);
        for i in 0..n {
            u2[i] = if ku1[i] == 0.0 {
                if a[i] > 0.0 {
                    return Err(OtlmError::Infeasible(format!(
                        "source mass at row {i} unreachable through the kernel"
                    )));
                }
                0.0
            } else {
                a[i] / ku1[i]
            };
        }
        kernel.mul_vec_t(&u2, &mut ktu2);
        for j in 0..n {
            u1[j] = if ktu2[j] == 0.0 {
                if b[j] > 0.0 {
                    return Err(OtlmError::Infeasible(format!(
                        "target mass at column {j} unreachable through the kernel"
                    )));
                }
                0.0
            } else {
                b[j] / ktu2[j]
            };
        }
        kernel.mul_vec(&u1, &mut ku1);
        let row_res: f64 = (0..n).map(|i| (u2[i] * ku1[i] - a[i]).abs()).sum::<f64>() / sa;
        let col_res: f64 = (0..n).map(|j| (u1[j] * ktu2[j] - b[j]).abs()).sum::<f64>() / sb;
        if row_res <= tol && col_res <= tol {
            return Ok((u1, u2));
        }
    }
    Err(OtlmError::NonConvergence(max_iters))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineLoss {
    L2,
    Kl,
}

/// Classical multiplicative updates for non-negative regression; the
/// per-sample stand-in the transported fits are compared against. Each
/// iteration does not increase the chosen loss.
pub fn baseline_nn_regression(
    dict: &Dictionary,
    y: &[f64],
    loss: BaselineLoss,
    iters: usize,
) -> Result<Vec<f64>> {
    let n = dict.n_samples();
    let m = dict.n_atoms();
    if y.len() != n {
        return Err(OtlmError::DimensionMismatch {
            context: "target vs dictionary",
            expected: n,
            got: y.len(),
        });
    }
    let y_mass: f64 = y.iter().sum();
    let x_mass: f64 = dict.col_sums().iter().sum();
    let mut w = vec![(y_mass / x_mass).max(1e-12); m];
    let mut xw = vec![0.0; n];
    match loss {
        BaselineLoss::L2 => {
            let mut xty = vec![0.0; m];
            dict.mul_t(y, &mut xty);
            let mut xtxw = vec![0.0; m];
            for _ in 0..iters {
                dict.mul_weights(&w, &mut xw);
                dict.mul_t(&xw, &mut xtxw);
                for j in 0..m {
                    if xtxw[j] > 0.0 {
                        w[j] *= xty[j] / xtxw[j];
                    }
                }
            }
        }
        BaselineLoss::Kl => {
            let col_sums = dict.col_sums().to_vec();
            let mut ratio = vec![0.0; n];
            let mut numer = vec![0.0; m];
            for _ in 0..iters {
                dict.mul_weights(&w, &mut xw);
                for i in 0..n {
                    ratio[i] = if xw[i] > 0.0 { y[i] / xw[i] } else { 0.0 };
                }
                dict.mul_t(&ratio, &mut numer);
                for j in 0..m {
                    w[j] *= numer[j] / col_sums[j];
                }
            }
        }
    }
    Ok(w)
}

/// Per-sample loss the baseline minimizes, for descent checks.
pub fn baseline_loss_value(dict: &Dictionary, y: &[f64], w: &[f64], loss: BaselineLoss) -> f64 {
    let mut xw = vec![0.0; dict.n_samples()];
    dict.mul_weights(w, &mut xw);
    match loss {
        BaselineLoss::L2 => {
            0.5 * xw
                .iter()
                .zip(y)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
        }
        BaselineLoss::Kl => xw
            .iter()
            .zip(y)
            .map(|(&a, &b)| {
                if b == 0.0 {
                    a
                } else if a == 0.0 {
                    f64::INFINITY
                } else {
                    b * (b / a).ln() - b + a
                }
            })
            .sum(),
    }
}

/// Full transport objective <C, Q> + eps KL(Q || K) + alpha R(w) +
/// lambda L(Q^T 1 | y) for a dense plan on a small support (N <= 64).
/// The plan must satisfy Q 1 = X w (the projection certificate) and may
/// carry mass only where the cost is finite; violations return infinity.
pub fn dense_objective(
    q: &[f64],
    w: &[f64],
    cost: &crate::cost::SparseCostMatrix,
    dict: &Dictionary,
    y: &[f64],
    cfg: &crate::config::OtlmConfig,
) -> Result<f64> {
    let n = cost.n();
    if n > 64 {
        return Err(OtlmError::InvalidValue(format!(
            "dense objective is for N <= 64, got {n}"
        )));
    }
    if q.len() != n * n {
        return Err(OtlmError::DimensionMismatch {
            context: "plan vs cost",
            expected: n * n,
            got: q.len(),
        });
    }
    if y.len() != n || dict.n_samples() != n || w.len() != dict.n_atoms() {
        return Err(OtlmError::DimensionMismatch {
            context: "dense objective inputs",
            expected: n,
            got: y.len().min(dict.n_samples()),
        });
    }
    let eps = cfg.epsilon;

    // Transport plus entropic terms over the finite-cost support. The
    // entropy term is the plain q ln q - q + k form: together with <C, Q>
    // it reassembles eps KL(Q || K) exactly, since -eps ln k = c. Adding
    // <C, Q> to the full KL would count the cost twice.
    let mut obj = 0.0;
    for (i, j, c) in cost.iter() {
        let k = (-c / eps).exp();
        let qv = q[i * n + j];
        if qv < 0.0 {
            return Ok(f64::INFINITY);
        }
        let entropy = if qv == 0.0 { k } else { qv * qv.ln() - qv + k };
        obj += c * qv + eps * entropy;
    }
    for i in 0..n {
        for j in 0..n {
            if cost.get(i, j).is_none() && q[i * n + j] != 0.0 {
                return Ok(f64::INFINITY);
            }
        }
    }

    // projection certificate: the row marginal must be X w
    let mut xw = vec![0.0; n];
    dict.mul_weights(w, &mut xw);
    let xw_mass: f64 = xw.iter().sum();
    let mut row_gap = 0.0;
    for i in 0..n {
        let row: f64 = (0..n).map(|j| q[i * n + j]).sum();
        row_gap += (row - xw[i]).abs();
    }
    if row_gap > 1e-8 * xw_mass.max(1e-300) {
        return Ok(f64::INFINITY);
    }
    obj += cfg.penalty.value(w);

    // datafit on the column marginal
    let col: Vec<f64> = (0..n).map(|j| (0..n).map(|i| q[i * n + j]).sum()).collect();
    let fit = match cfg.datafit {
        DatafitKind::Equality => {
            let gap: f64 = col.iter().zip(y).map(|(a, b)| (a - b).abs()).sum();
            let mass: f64 = y.iter().sum();
            if gap > 1e-9 * mass {
                return Ok(f64::INFINITY);
            }
            0.0
        }
        DatafitKind::Kl => col.iter().zip(y).map(|(&a, &b)| gkl(a, b)).sum(),
        DatafitKind::Tv => col.iter().zip(y).map(|(a, b)| (a - b).abs()).sum(),
        DatafitKind::L2 => {
            0.5 * col
                .iter()
                .zip(y)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
        }
        DatafitKind::Poisson => col
            .iter()
            .zip(y)
            .map(|(&a, &b)| {
                if b == 0.0 {
                    a
                } else if a == 0.0 {
                    f64::INFINITY
                } else {
                    a - b * a.ln()
                }
            })
            .sum(),
    };
    Ok(obj + cfg.lambda * fit)
}

fn gkl(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        b
    } else if b == 0.0 {
        f64::INFINITY
    } else {
        a * (a / b).ln() - a + b
    }
}

/// Numeric minimizer of the majorant along coordinate j: bisection on
/// dG/dw_j = eps sum_i X_ij ln(X_ij t / (Z_ij y_i)) + d penalty / d w_j,
/// with Z rebuilt here from first principles. Independent of the closed
/// forms in the MM step (no Lambert evaluation, no solved exponents).
pub fn mm_coordinate_minimizer(
    dict: &Dictionary,
    w_prev: &[f64],
    y_eff: &[f64],
    penalty: &PenaltyKind,
    epsilon: f64,
    j: usize,
    cfg: &OracleConfig,
) -> Result<f64> {
    if w_prev[j] == 0.0 {
        return Ok(0.0);
    }
    let mut denom = vec![0.0; dict.n_samples()];
    dict.mul_weights(w_prev, &mut denom);
    let (rows, vals) = dict.col(j);
    // per-entry constants: X_ij and ln(X_ij / (Z_ij y_i))
    let mut entries = Vec::with_capacity(rows.len());
    for (&i, &x) in rows.iter().zip(vals) {
        let z = x * w_prev[j] / denom[i];
        entries.push((x, (x / (z * y_eff[i])).ln()));
    }
    let grad = |t: f64| -> f64 {
        let mut g = 0.0;
        for &(x, c) in &entries {
            g += x * (t.ln() + c);
        }
        g *= epsilon;
        g + match *penalty {
            PenaltyKind::None => 0.0,
            PenaltyKind::L1 { alpha } => alpha,
            PenaltyKind::L2Squared { alpha } => alpha * t,
            PenaltyKind::ElasticNet { alpha, beta } => alpha + beta * t,
        }
    };
    bisect_increasing(grad, w_prev[j].max(1e-300), cfg)
}
