//! Family dispatch for bounds and oracles.
//!
//! Thresholds are the sample-mean `z` for families observed `n` times
//! (Bernoulli, generalized Poisson, gamma, uniform, Dirichlet, matrix gamma).
//! The count families (hypergeometric, multivariate hypergeometric and its
//! inverse, multinomial, negative multinomial) are a single observation:
//! `z` is the count (or count vector) itself and `n` must be 1.

use lrbounds::distributions::{FamilyParams, GammaParams, Point};
use lrbounds::lr_bounds::{
    bernoulli_bound, dirichlet_bound, gamma_bound, gen_poisson_bound, hypergeom_bound, inv_hypergeom_bound,
    matrix_gamma_bound, multi_hypergeom_bound, multinomial_bound, neg_multinomial_bound, poisson_sharp_bound,
    uniform_mean_upper_bound, Direction, Optimizer,
};
use lrbounds::lr_core::{BoundReport, Method, TiltParam};
use lrbounds::oracles::{
    binomial_exact_tail, dirichlet_marginal_tail, enumerate_tail, gamma_sum_tail_exact, gen_poisson_sum_tail,
    hypergeom_exact_tail, inv_hypergeom_exact_tail, irwin_hall_tail, mc_tail, neg_binomial_exact_tail,
    OracleEstimate,
};
use lrbounds::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundOptions {
    pub method: Optimizer,
    pub sharpen: bool,
}

impl Default for BoundOptions {
    fn default() -> Self {
        Self {
            method: Optimizer::Mom,
            sharpen: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleChoice {
    Exact,
    MonteCarlo { samples: u64, seed: u64, workers: usize },
}

/// Whether the family is a single observation with a count threshold.
pub fn is_count_family(family: &FamilyParams) -> bool {
    matches!(
        family,
        FamilyParams::Hypergeometric(_)
            | FamilyParams::MultiHyper(_)
            | FamilyParams::InvHyper(_)
            | FamilyParams::Multinomial(_)
            | FamilyParams::NegMultinomial(_)
    )
}

fn check_n(family: &FamilyParams, n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    if is_count_family(family) && n != 1 {
        return Err(Error::Domain(format!(
            "{} is a single observation; n must be 1, got {n}",
            family.name()
        )));
    }
    Ok(())
}

fn count(x: f64) -> Result<u64> {
    if x >= 0.0 && x.fract() == 0.0 && x < 2f64.powi(53) {
        Ok(x as u64)
    } else {
        Err(Error::InvalidPoint(format!("{x} is not a nonnegative integer count")))
    }
}

fn counts(z: &Point) -> Result<Vec<u64>> {
    z.as_vector()?.iter().map(|&x| count(x)).collect()
}

/// The uniform bound covers `{mean >= z}` for `z >= 1/2`; the lower tail
/// follows from the symmetry `U -> 1 - U`.
fn uniform_bound(n: u64, z: f64, dir: Direction) -> Result<BoundReport> {
    let zz = match dir {
        Direction::Upper => z,
        Direction::Lower => 1.0 - z,
    };
    if zz < 0.5 {
        return Ok(BoundReport::invalid(
            TiltParam::Scalar(0.0),
            Method::Mom,
            format!("threshold on the wrong side of the mean for direction {dir}"),
        ));
    }
    uniform_mean_upper_bound(n, zz)
}

/// Likelihood-ratio bound on `P{mean of n draws ≻ z}` (or `≺`).
///
/// `opts.sharpen` applies where a sharpened form exists (Bernoulli, gamma,
/// and the `α = 0` generalized Poisson); elsewhere it is noted and ignored.
pub fn compute_bound(family: &FamilyParams, n: u64, z: &Point, dir: Direction, opts: &BoundOptions) -> Result<BoundReport> {
    check_n(family, n)?;
    let unsharpened = |r: BoundReport| {
        if opts.sharpen && r.notes.is_empty() {
            r.with_notes("no sharpened form for this family")
        } else {
            r
        }
    };
    match family {
        FamilyParams::Bernoulli(b) => bernoulli_bound(n, b, z.as_scalar()?, dir, opts.sharpen),
        FamilyParams::Hypergeometric(h) => Ok(unsharpened(hypergeom_bound(h, count(z.as_scalar()?)?, dir)?)),
        FamilyParams::GenPoisson(g) => {
            if opts.sharpen && g.alpha() == 0.0 {
                poisson_sharp_bound(n, g.lambda(), z.as_scalar()?, dir)
            } else {
                Ok(unsharpened(gen_poisson_bound(n, g, z.as_scalar()?, dir, opts.method)?))
            }
        }
        FamilyParams::Gamma(g) => gamma_bound(n, g, z.as_scalar()? / g.mean(), dir, opts.sharpen),
        FamilyParams::Uniform(_) => Ok(unsharpened(uniform_bound(n, z.as_scalar()?, dir)?)),
        FamilyParams::MultiHyper(m) => Ok(unsharpened(multi_hypergeom_bound(m, &counts(z)?, dir)?)),
        FamilyParams::InvHyper(m) => Ok(unsharpened(inv_hypergeom_bound(m, &counts(z)?, dir)?)),
        FamilyParams::Multinomial(m) => Ok(unsharpened(multinomial_bound(m, &counts(z)?, dir)?)),
        FamilyParams::NegMultinomial(m) => Ok(unsharpened(neg_multinomial_bound(m, &counts(z)?, dir)?)),
        FamilyParams::Dirichlet(d) => match dir {
            Direction::Lower => Ok(unsharpened(dirichlet_bound(n, d, z.as_vector()?)?)),
            Direction::Upper => Err(Error::Unsupported("the Dirichlet bound covers the lower order only".into())),
        },
        FamilyParams::MatrixGamma(m) => Ok(unsharpened(matrix_gamma_bound(n, m, z.as_matrix()?, dir)?)),
    }
}

fn needs_mc(what: &str) -> Error {
    Error::Unsupported(format!("no exact oracle for {what}; use --oracle mc"))
}

/// Tail probability from an exact oracle or a seeded Monte-Carlo run.
pub fn compute_oracle(
    family: &FamilyParams,
    n: u64,
    z: &Point,
    dir: Direction,
    choice: OracleChoice,
) -> Result<OracleEstimate> {
    check_n(family, n)?;
    if let OracleChoice::MonteCarlo { samples, seed, workers } = choice {
        return mc_tail(family, n, z, dir, samples, seed, workers);
    }
    match family {
        FamilyParams::Bernoulli(b) => binomial_exact_tail(n, b.p(), z.as_scalar()?, dir),
        FamilyParams::Hypergeometric(h) => hypergeom_exact_tail(h, count(z.as_scalar()?)?, dir),
        FamilyParams::GenPoisson(g) => gen_poisson_sum_tail(n, g, z.as_scalar()?, dir),
        FamilyParams::Gamma(g) => gamma_sum_tail_exact(n, g, z.as_scalar()?, dir),
        FamilyParams::Uniform(_) => {
            let z = z.as_scalar()?;
            match dir {
                Direction::Upper => irwin_hall_tail(n, z),
                Direction::Lower => irwin_hall_tail(n, 1.0 - z),
            }
        }
        FamilyParams::MultiHyper(_) | FamilyParams::Multinomial(_) => enumerate_tail(family, &counts(z)?, dir),
        FamilyParams::NegMultinomial(m) if m.dim() == 2 => neg_binomial_exact_tail(m, &counts(z)?, dir),
        FamilyParams::InvHyper(m) if m.dim() == 2 => inv_hypergeom_exact_tail(m, &counts(z)?, dir),
        FamilyParams::NegMultinomial(_) | FamilyParams::InvHyper(_) => Err(needs_mc("more than two categories")),
        FamilyParams::Dirichlet(d) if n == 1 && d.dim() == 2 => dirichlet_marginal_tail(d, z.as_vector()?, dir),
        FamilyParams::Dirichlet(_) => Err(needs_mc("Dirichlet means beyond one two-category draw")),
        FamilyParams::MatrixGamma(m) if m.dim() == 1 => {
            let g = GammaParams::new(m.alpha(), m.beta() * m.sigma()[(0, 0)])?;
            gamma_sum_tail_exact(n, &g, z.as_matrix()?[(0, 0)], dir)
        }
        FamilyParams::MatrixGamma(_) => Err(needs_mc("matrix gamma with p > 1")),
    }
}
