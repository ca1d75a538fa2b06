//! KL-proximal operators of the marginal datafit losses.
//!
//! Each operator returns the elementwise minimizer of
//! lambda L(q | y) + eps (q ln(q/s) - q + s) over q > 0. Large exponents
//! route through the log-argument Lambert evaluation so that lambda/eps in
//! the thousands stays finite.

use crate::error::{OtlmError, Result};
use crate::lambertw::{lambert_w0, lambert_w0_of_log};

/// Exponent past which Lambert arguments are evaluated in log space.
const LOG_ROUTE: f64 = 300.0;

/// Marginal datafit selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatafitKind {
    /// Hard equality: the target marginal is pinned to y; lambda is ignored.
    Equality,
    Kl,
    Tv,
    L2,
    Poisson,
}

impl DatafitKind {
    pub fn name(&self) -> &'static str {
        match self {
            DatafitKind::Equality => "equality",
            DatafitKind::Kl => "kl",
            DatafitKind::Tv => "tv",
            DatafitKind::L2 => "l2",
            DatafitKind::Poisson => "poisson",
        }
    }
}

impl std::str::FromStr for DatafitKind {
    type Err = OtlmError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "equality" | "eq" => Ok(DatafitKind::Equality),
            "kl" => Ok(DatafitKind::Kl),
            "tv" => Ok(DatafitKind::Tv),
            "l2" => Ok(DatafitKind::L2),
            "poisson" | "poiss" => Ok(DatafitKind::Poisson),
            other => Err(OtlmError::InvalidValue(format!(
                "unknown datafit '{other}' (expected equality|kl|tv|l2|poisson)"
            ))),
        }
    }
}

fn check_pair(s: &[f64], y: &[f64]) -> Result<()> {
    if s.len() != y.len() {
        return Err(OtlmError::DimensionMismatch {
            context: "prox s vs y",
            expected: s.len(),
            got: y.len(),
        });
    }
    Ok(())
}

fn check_params(lambda: f64, epsilon: f64) -> Result<()> {
    if lambda.is_nan() || lambda < 0.0 {
        return Err(OtlmError::InvalidValue(format!(
            "lambda must be >= 0, got {lambda}"
        )));
    }
    if epsilon <= 0.0 || !epsilon.is_finite() {
        return Err(OtlmError::InvalidValue(format!(
            "epsilon must be positive and finite, got {epsilon}"
        )));
    }
    Ok(())
}

fn check_inputs(s: &[f64], y: &[f64]) -> Result<()> {
    if s.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(OtlmError::InvalidValue(
            "prox input s must be finite and >= 0".into(),
        ));
    }
    if y.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(OtlmError::InvalidValue(
            "prox target y must be finite and >= 0".into(),
        ));
    }
    Ok(())
}

/// Hard marginal constraint: prox is y itself.
pub fn prox_equality(s: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    check_pair(s, y)?;
    Ok(y.to_vec())
}

/// lambda KL datafit: s^(eps/(eps+lambda)) .* y^(lambda/(eps+lambda)).
pub fn prox_kl(s: &[f64], y: &[f64], lambda: f64, epsilon: f64) -> Result<Vec<f64>> {
    check_pair(s, y)?;
    check_params(lambda, epsilon)?;
    check_inputs(s, y)?;
    if lambda == 0.0 {
        return Ok(s.to_vec());
    }
    let a = epsilon / (epsilon + lambda);
    let b = lambda / (epsilon + lambda);
    Ok(s.iter()
        .zip(y)
        .map(|(&si, &yi)| {
            if si == 0.0 || yi == 0.0 {
                0.0
            } else {
                si.powf(a) * yi.powf(b)
            }
        })
        .collect())
}

/// lambda TV datafit: y clipped into [s e^(-lambda/eps), s e^(lambda/eps)].
pub fn prox_tv(s: &[f64], y: &[f64], lambda: f64, epsilon: f64) -> Result<Vec<f64>> {
    check_pair(s, y)?;
    check_params(lambda, epsilon)?;
    check_inputs(s, y)?;
    if lambda == 0.0 {
        return Ok(s.to_vec());
    }
    let r = lambda / epsilon;
    let down = (-r).exp();
    let up = r.exp();
    Ok(s.iter()
        .zip(y)
        .map(|(&si, &yi)| {
            if si == 0.0 {
                return 0.0;
            }
            // min(s e^r, max(s e^-r, y)); up may be +inf, si > 0 keeps the
            // product well-defined.
            yi.max(si * down).min(si * up)
        })
        .collect())
}

/// lambda/2 squared-error datafit:
/// (eps/lambda) W0((lambda/eps) s exp((lambda/eps) y)).
pub fn prox_l2(s: &[f64], y: &[f64], lambda: f64, epsilon: f64) -> Result<Vec<f64>> {
    check_pair(s, y)?;
    check_params(lambda, epsilon)?;
    check_inputs(s, y)?;
    if lambda == 0.0 {
        return Ok(s.to_vec());
    }
    let r = lambda / epsilon;
    s.iter()
        .zip(y)
        .map(|(&si, &yi)| {
            if si == 0.0 {
                return Ok(0.0);
            }
            let log_arg = r.ln() + si.ln() + r * yi;
            let w = if log_arg > LOG_ROUTE {
                lambert_w0_of_log(log_arg)?
            } else {
                lambert_w0(log_arg.exp())?
            };
            Ok(w / r)
        })
        .collect()
}

/// Negative Poisson log-likelihood datafit:
/// q = (lambda/eps) y / W0((lambda y / (eps s)) exp(lambda/eps)); bins with
/// y = 0 take the stationary value s exp(-lambda/eps).
pub fn prox_poisson(s: &[f64], y: &[f64], lambda: f64, epsilon: f64) -> Result<Vec<f64>> {
    check_pair(s, y)?;
    check_params(lambda, epsilon)?;
    check_inputs(s, y)?;
    if lambda == 0.0 {
        return Ok(s.to_vec());
    }
    let r = lambda / epsilon;
    s.iter()
        .zip(y)
        .map(|(&si, &yi)| {
            if si == 0.0 {
                return Ok(0.0);
            }
            if yi == 0.0 {
                return Ok(si * (-r).exp());
            }
            let log_arg = r.ln() + yi.ln() - si.ln() + r;
            let u = if log_arg > LOG_ROUTE {
                lambert_w0_of_log(log_arg)?
            } else {
                lambert_w0(log_arg.exp())?
            };
            Ok(r * yi / u)
        })
        .collect()
}

/// Dispatch over the datafit kinds. Equality ignores lambda.
pub fn prox_datafit(
    kind: DatafitKind,
    s: &[f64],
    y: &[f64],
    lambda: f64,
    epsilon: f64,
) -> Result<Vec<f64>> {
    match kind {
        DatafitKind::Equality => prox_equality(s, y),
        DatafitKind::Kl => prox_kl(s, y, lambda, epsilon),
        DatafitKind::Tv => prox_tv(s, y, lambda, epsilon),
        DatafitKind::L2 => prox_l2(s, y, lambda, epsilon),
        DatafitKind::Poisson => prox_poisson(s, y, lambda, epsilon),
    }
}
