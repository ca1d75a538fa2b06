//! Principal-branch Lambert W function.
//!
//! `lambert_w0` solves w * exp(w) = x for x >= -1/e using a
//! branch-appropriate initial guess refined by Halley iterations.
//! `lambert_w0_of_log` evaluates W0(exp(log_x)) without forming
//! exp(log_x), which the L2/Poisson proximal operators and the
//! penalized multiplicative steps need once lambda/epsilon gets large.

use crate::error::{OtlmError, Result};

const INV_E: f64 = 1.0 / std::f64::consts::E;

/// Principal branch W0(x) for x >= -1/e.
///
/// The residual satisfies |w * exp(w) - x| <= 1e-14 * max(1, |x|).
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(OtlmError::InvalidValue("lambert_w0 of NaN".into()));
    }
    if x < -INV_E {
        return Err(OtlmError::InvalidValue(format!(
            "lambert_w0 domain: {x} < -1/e"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }

    let mut w = initial_guess(x);
    // Halley's method; quadratic-plus convergence from any of the guesses.
    for _ in 0..60 {
        let ew = w.exp();
        let f = w * ew - x;
        if f.abs() <= 2e-16 * x.abs().max(1.0) {
            break;
        }
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        w -= step;
        if step.abs() <= 1e-17 * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w)
}

fn initial_guess(x: f64) -> f64 {
    if x > std::f64::consts::E {
        // Asymptotic: w ~ ln x - ln ln x + ln ln x / ln x.
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    } else if x >= -0.3 {
        // Series around 0 is enough to land in Halley's basin here.
        x * (1.0 - x + 1.5 * x * x)
    } else {
        // Near the branch point -1/e: expansion in p = sqrt(2(1 + e x)).
        let p = (2.0 * (1.0 + std::f64::consts::E * x)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 * p * p * p / 72.0
    }
}

/// W0(exp(log_x)) for finite log_x, overflow-safe.
///
/// For log_x >= 1 this solves w + ln w = log_x on the w >= 1 branch by
/// Newton iteration; below that it defers to `lambert_w0(exp(log_x))`,
/// which cannot overflow there. The two paths agree to better than 1e-12
/// relative where both are defined.
pub fn lambert_w0_of_log(log_x: f64) -> Result<f64> {
    if log_x.is_nan() {
        return Err(OtlmError::InvalidValue("lambert_w0_of_log of NaN".into()));
    }
    if log_x < 1.0 {
        return lambert_w0(log_x.exp());
    }
    // w + ln w = log_x, monotone with derivative 1 + 1/w on w >= 1.
    let mut w = (log_x - log_x.ln()).max(1.0);
    for _ in 0..60 {
        let g = w + w.ln() - log_x;
        if g.abs() <= 1e-15 * log_x.max(1.0) {
            break;
        }
        w -= g / (1.0 + 1.0 / w);
    }
    Ok(w)
}
