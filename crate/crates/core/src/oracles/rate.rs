use serde::Serialize;

use super::OracleEstimate;
use crate::error::{Error, Result};
use crate::lr_core::{mom_param, rho, ExpFamily1D};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePoint {
    pub n: u64,
    /// `(1/n) ln P{mean >= z}`.
    pub log_tail_over_n: f64,
    /// Per-sample log bound at the optimal tilt.
    pub rho: f64,
    /// `rho - log_tail_over_n`; nonnegative whenever the bound dominates.
    pub gap: f64,
}

/// Compares the per-sample log bound `rho(z)` with `(1/n) ln` of the exact
/// upper tail for each `n`. The tail handle maps `n` to an exact estimate.
pub fn rate_convergence_check(
    fam: &ExpFamily1D,
    theta: f64,
    z: f64,
    n_list: &[u64],
    exact_tail: impl Fn(u64) -> Result<OracleEstimate>,
) -> Result<Vec<RatePoint>> {
    let vartheta = mom_param(fam, z)?;
    let r = rho(fam, z, theta, vartheta)?;
    n_list
        .iter()
        .map(|&n| {
            if n == 0 {
                return Err(Error::Infeasible("n must be positive".into()));
            }
            let tail = exact_tail(n)?.estimate;
            if !(tail > 0.0) {
                return Err(Error::Infeasible(format!("tail underflows to zero at n = {n}")));
            }
            let log_tail_over_n = tail.ln() / n as f64;
            Ok(RatePoint {
                n,
                log_tail_over_n,
                rho: r,
                gap: r - log_tail_over_n,
            })
        })
        .collect()
}
