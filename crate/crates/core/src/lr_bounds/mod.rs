//! Closed-form likelihood-ratio tail bounds, one function per family.
//!
//! Every function returns a [`BoundReport`] in log domain. A threshold on the
//! wrong side of the mean yields `valid = false` with bound 1; a threshold
//! exactly at the mean yields a valid bound of 1.
//!
//! For vectors, `Direction::Upper` is the order `x ≻ z` (componentwise `>=`
//! on indices `1..=κ`) and `Direction::Lower` is `x ≺ z`. Component 0 is
//! fixed by the sum constraint and never compared. Matrices use the Loewner
//! order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

mod multivariate;
mod univariate;

pub use multivariate::{
    dirichlet_bound, inv_hypergeom_bound, matrix_gamma_bound, multi_hypergeom_bound, multi_hypergeom_stirling_bound,
    multinomial_bound, neg_multinomial_bound, StirlingBound,
};
pub use univariate::{
    bernoulli_bound, gamma_bound, gen_poisson_bound, hypergeom_bound, poisson_sharp_bound, uniform_mean_upper_bound,
    uniform_tilt_root,
};

/// Slack used when comparing a threshold with the mean.
pub const ORDER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `{mean >= z}`, or `≻` for vectors and matrices.
    Upper,
    /// `{mean <= z}`, or `≺`.
    Lower,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Upper => "upper",
            Direction::Lower => "lower",
        })
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "upper" | "upper_tail" => Ok(Direction::Upper),
            "lower" | "lower_tail" => Ok(Direction::Lower),
            other => Err(Error::InvalidParams(format!("unknown direction '{other}'"))),
        }
    }
}

impl Direction {
    /// Whether `z` lies on this side of `mean` (or at it).
    pub fn admits(self, z: f64, mean: f64) -> bool {
        let tol = ORDER_TOL * mean.abs().max(1.0);
        match self {
            Direction::Upper => z >= mean - tol,
            Direction::Lower => z <= mean + tol,
        }
    }

    /// Componentwise [`admits`](Self::admits) on indices `1..`.
    pub fn admits_vector(self, z: &[f64], mean: &[f64]) -> bool {
        z.iter().zip(mean).skip(1).all(|(&zi, &mi)| self.admits(zi, mi))
    }

    /// Whether `x` satisfies the event `x ≻ z` (upper) or `x ≺ z` (lower)
    /// on indices `1..`.
    pub fn event_holds(self, x: &[f64], z: &[f64]) -> bool {
        x.iter().zip(z).skip(1).all(|(&xi, &zi)| match self {
            Direction::Upper => xi >= zi - ORDER_TOL * zi.abs().max(1.0),
            Direction::Lower => xi <= zi + ORDER_TOL * zi.abs().max(1.0),
        })
    }
}

/// MoM or MLE tilt for the generalized Poisson bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimizer {
    Mom,
    Mle,
}

impl FromStr for Optimizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "mom" => Ok(Optimizer::Mom),
            "mle" => Ok(Optimizer::Mle),
            other => Err(Error::InvalidParams(format!("unknown method '{other}'"))),
        }
    }
}

fn at_mean(z: f64, mean: f64) -> bool {
    (z - mean).abs() <= ORDER_TOL * mean.abs().max(1.0)
}

fn mismatch_note(dir: Direction) -> String {
    format!("threshold on the wrong side of the mean for direction {dir}")
}
