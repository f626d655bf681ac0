//! Moment-based baselines: Chebyshev, Markov, Cantelli, and the Chernoff
//! bound minimized over an interval of exponents. Moments are supplied by
//! the caller.

use crate::error::{domain, Error, Result};
use crate::lr_core::{BoundReport, Method, TiltParam};
use crate::numerics::{minimize_scalar, RootFindConfig, DEFAULT_GRID_POINTS};

fn require_positive(pairs: &[(&str, f64)]) -> Result<()> {
    for &(name, v) in pairs {
        if !(v > 0.0) || !v.is_finite() {
            return domain(format!("{name} must be positive and finite, got {v}"));
        }
    }
    Ok(())
}

/// `E|X - μ|^s / ε^s`.
pub fn chebyshev_bound(central_abs_moment: f64, s: f64, eps: f64) -> Result<f64> {
    require_positive(&[("moment", central_abs_moment), ("s", s), ("eps", eps)])?;
    Ok(central_abs_moment / eps.powf(s))
}

/// `E[X^s] / γ^s`.
pub fn markov_bound(raw_moment: f64, s: f64, gamma: f64) -> Result<f64> {
    require_positive(&[("moment", raw_moment), ("s", s), ("gamma", gamma)])?;
    Ok(raw_moment / gamma.powf(s))
}

/// One-sided `σ² / (σ² + ε²)`.
pub fn cantelli_bound(variance: f64, eps: f64) -> Result<f64> {
    require_positive(&[("variance", variance), ("eps", eps)])?;
    Ok(variance / (variance + eps * eps))
}

/// `inf_{s in [s_lo, s_hi]} exp(log_mgf(s) - γ s)`, with `vartheta_star = s*`.
pub fn chernoff_bound(log_mgf: impl Fn(f64) -> f64, gamma: f64, s_lo: f64, s_hi: f64) -> Result<BoundReport> {
    if !(s_lo >= 0.0 && s_lo < s_hi) {
        return domain(format!("need 0 <= s_lo < s_hi, got [{s_lo}, {s_hi}]"));
    }
    let objective = |s: f64| log_mgf(s) - gamma * s;
    for s in [s_lo, s_hi] {
        let v = objective(s);
        if !v.is_finite() {
            return Err(Error::Evaluation { at: s, value: v });
        }
    }
    let (arg, val) = minimize_scalar(objective, s_lo, s_hi, DEFAULT_GRID_POINTS, &RootFindConfig::default())?;
    Ok(BoundReport::new(val, TiltParam::Scalar(arg), Method::Grid))
}
