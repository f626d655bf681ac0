//! Likelihood-ratio concentration bounds.
//!
//! Closed-form tail bounds for sample means of univariate and multivariate
//! families (Bernoulli, hypergeometric, generalized Poisson, gamma, uniform,
//! multivariate generalized hypergeometric and its inverse, multinomial,
//! negative multinomial, Dirichlet, matrix gamma), the classical
//! moment-based baselines, and independent oracles (exact summation,
//! closed-form CDFs, seeded Monte Carlo) for checking that every bound
//! dominates the true tail probability.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]

pub mod classical;
pub mod distributions;
pub mod error;
pub mod lr_bounds;
pub mod lr_core;
pub mod numerics;
pub mod oracles;

pub use error::{Error, Result};
