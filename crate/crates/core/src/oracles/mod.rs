//! Ground-truth tail probabilities used to check the bounds: exact
//! summation and closed-form CDFs, lattice enumeration, and seeded Monte
//! Carlo with Wilson brackets.
//!
//! Lattice events follow one convention throughout: `{mean >= z}` is
//! `{sum >= ⌈nz⌉}` and `{mean <= z}` is `{sum <= ⌊nz⌋}`, with a relative
//! slack of `1e-9` so thresholds such as `0.7 * 20` land on the integer.

use std::fmt;

use serde::Serialize;

mod enumerate;
mod exact;
mod monte_carlo;
mod rate;

pub use enumerate::enumerate_tail;
pub use exact::{
    binomial_exact_tail, dirichlet_marginal_tail, gamma_sum_tail_exact, gen_poisson_sum_tail, hypergeom_exact_tail,
    inv_hypergeom_exact_tail, irwin_hall_tail, neg_binomial_exact_tail,
};
pub use monte_carlo::{mc_tail, wilson_interval, WILSON_Z};
pub use rate::{rate_convergence_check, RatePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    Exact,
    Truncated,
    MonteCarlo,
}

impl fmt::Display for OracleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OracleKind::Exact => "exact",
            OracleKind::Truncated => "truncated",
            OracleKind::MonteCarlo => "monte_carlo",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleEstimate {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub kind: OracleKind,
    pub detail: String,
}

/// Relative rounding allowance for a bound in [`OracleEstimate::dominated_by`].
pub const DOMINATION_RTOL: f64 = 1e-12;

/// Widest half-bracket reported for an exact value.
const EXACT_HALF_WIDTH_CAP: f64 = 5e-13;

impl OracleEstimate {
    /// An exact value whose relative rounding error is about `terms` ulps.
    pub(crate) fn exact(value: f64, terms: usize, detail: impl Into<String>) -> Self {
        let value = value.clamp(0.0, 1.0);
        let half = (value * (terms as f64 + 8.0) * f64::EPSILON).min(EXACT_HALF_WIDTH_CAP);
        Self {
            estimate: value,
            lower: (value - half).max(0.0),
            upper: (value + half).min(1.0),
            kind: OracleKind::Exact,
            detail: detail.into(),
        }
    }

    pub(crate) fn certain(value: f64, detail: impl Into<String>) -> Self {
        Self {
            estimate: value,
            lower: value,
            upper: value,
            kind: OracleKind::Exact,
            detail: detail.into(),
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// Whether `bound` is at least the lower edge of the bracket, allowing
    /// [`DOMINATION_RTOL`] for rounding in the bound itself. Some bounds are
    /// attained exactly (single-point events), so they can land an ulp or
    /// two below the oracle.
    pub fn dominated_by(&self, bound: f64) -> bool {
        bound >= self.lower * (1.0 - DOMINATION_RTOL)
    }
}

const LATTICE_SLACK: f64 = 1e-9;

/// Smallest integer count `m` with `m >= x` up to the lattice slack.
pub(crate) fn ceil_count(x: f64) -> i64 {
    (x - LATTICE_SLACK * x.abs().max(1.0)).ceil() as i64
}

/// Largest integer count `m` with `m <= x` up to the lattice slack.
pub(crate) fn floor_count(x: f64) -> i64 {
    (x + LATTICE_SLACK * x.abs().max(1.0)).floor() as i64
}
