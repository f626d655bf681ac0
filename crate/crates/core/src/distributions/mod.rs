//! Validated parameter records, log-densities, analytic means, and exact
//! samplers for every family the bounds cover.

mod family;
mod params;
mod sampling;

pub use family::{family_mean, log_beta, log_density, log_multivariate_gamma, FamilyParams, Point, UnitUniform};
pub(crate) use family::{multi_hyper_log_pmf, multinomial_log_pmf};
pub use params::{
    spd_factor, BernoulliParams, DirichletParams, GammaParams, GenPoissonParams, HypergeomParams, InvHyperParams,
    MatrixGammaParams, MultiHyperParams, MultinomialParams, NegMultinomialParams, PD_PIVOT_REL, PROB_SUM_TOL,
    SIMPLEX_TOL,
};
pub(crate) use params::log_det_from_factor;
pub use sampling::{draw_sample, RngState, Sampler};
