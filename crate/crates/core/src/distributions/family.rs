use nalgebra::DMatrix;

use super::params::*;
use crate::error::{Error, Result};
use crate::numerics::{ln_choose, ln_factorial, log_gamma, signed_log_gen_binom, SignedLogValue};

/// A sample point or parameter-shaped value: scalar, vector, or matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    Scalar(f64),
    Vector(Vec<f64>),
    Matrix(DMatrix<f64>),
}

impl Point {
    pub fn as_scalar(&self) -> Result<f64> {
        match self {
            Point::Scalar(x) => Ok(*x),
            _ => Err(Error::InvalidPoint("expected a scalar".into())),
        }
    }

    pub fn as_vector(&self) -> Result<&[f64]> {
        match self {
            Point::Vector(v) => Ok(v),
            _ => Err(Error::InvalidPoint("expected a vector".into())),
        }
    }

    pub fn as_matrix(&self) -> Result<&DMatrix<f64>> {
        match self {
            Point::Matrix(m) => Ok(m),
            _ => Err(Error::InvalidPoint("expected a matrix".into())),
        }
    }
}

/// Uniform distribution on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct UnitUniform;

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyParams {
    Bernoulli(BernoulliParams),
    Hypergeometric(HypergeomParams),
    GenPoisson(GenPoissonParams),
    Gamma(GammaParams),
    Uniform(UnitUniform),
    MultiHyper(MultiHyperParams),
    InvHyper(InvHyperParams),
    Multinomial(MultinomialParams),
    NegMultinomial(NegMultinomialParams),
    Dirichlet(DirichletParams),
    MatrixGamma(MatrixGammaParams),
}

impl FamilyParams {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyParams::Bernoulli(_) => "bernoulli",
            FamilyParams::Hypergeometric(_) => "hypergeometric",
            FamilyParams::GenPoisson(_) => "gen_poisson",
            FamilyParams::Gamma(_) => "gamma",
            FamilyParams::Uniform(_) => "uniform",
            FamilyParams::MultiHyper(_) => "multi_hypergeom",
            FamilyParams::InvHyper(_) => "inv_hypergeom",
            FamilyParams::Multinomial(_) => "multinomial",
            FamilyParams::NegMultinomial(_) => "neg_multinomial",
            FamilyParams::Dirichlet(_) => "dirichlet",
            FamilyParams::MatrixGamma(_) => "matrix_gamma",
        }
    }
}

fn as_count(x: f64) -> Result<u64> {
    if x >= 0.0 && x == x.trunc() && x < 2f64.powi(53) {
        Ok(x as u64)
    } else {
        Err(Error::InvalidPoint(format!("{x} is not a nonnegative integer")))
    }
}

fn counts(v: &[f64], dim: usize) -> Result<Vec<u64>> {
    if v.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: v.len(),
        });
    }
    v.iter().map(|&x| as_count(x)).collect()
}

/// `prod C(c_i, x_i)` over classes, in signed-log form.
fn class_binomial_product(classes: &[f64], x: &[u64]) -> SignedLogValue {
    classes
        .iter()
        .zip(x)
        .fold(SignedLogValue::ONE, |acc, (&c, &k)| acc * signed_log_gen_binom(c, k))
}

/// The `x_i >= 1 + C_i > 1` zero-mass branch.
fn outside_class_capacity(classes: &[f64], x: &[u64]) -> bool {
    classes
        .iter()
        .zip(x)
        .any(|(&c, &k)| c > 0.0 && k as f64 >= 1.0 + c)
}

fn positive_log(v: SignedLogValue) -> Result<f64> {
    match v.sign() {
        0 => Ok(f64::NEG_INFINITY),
        1 => Ok(v.log_mag()),
        _ => Err(Error::InvalidParams(
            "generalized hypergeometric mass came out negative".into(),
        )),
    }
}

/// Natural-log pmf or pdf at `point`; `-inf` where the mass is zero.
pub fn log_density(params: &FamilyParams, point: &Point) -> Result<f64> {
    match params {
        FamilyParams::Bernoulli(b) => {
            let x = as_count(point.as_scalar()?)?;
            Ok(match x {
                0 => (1.0 - b.p()).ln(),
                1 => b.p().ln(),
                _ => f64::NEG_INFINITY,
            })
        }
        FamilyParams::Hypergeometric(h) => {
            let x = as_count(point.as_scalar()?)?;
            Ok(hypergeom_log_pmf(h, x))
        }
        FamilyParams::GenPoisson(g) => {
            let x = as_count(point.as_scalar()?)?;
            Ok(gen_poisson_log_pmf(g.lambda(), g.alpha(), x))
        }
        FamilyParams::Gamma(g) => {
            let x = point.as_scalar()?;
            if !(x > 0.0) {
                return Ok(f64::NEG_INFINITY);
            }
            Ok((g.shape() - 1.0) * x.ln() - x / g.scale() - log_gamma(g.shape())? - g.shape() * g.scale().ln())
        }
        FamilyParams::Uniform(_) => {
            let x = point.as_scalar()?;
            Ok(if (0.0..=1.0).contains(&x) { 0.0 } else { f64::NEG_INFINITY })
        }
        FamilyParams::MultiHyper(m) => {
            let x = counts(point.as_vector()?, m.dim())?;
            if x.iter().sum::<u64>() != m.draws() {
                return Err(Error::InvalidPoint(format!("counts must sum to n = {}", m.draws())));
            }
            multi_hyper_log_pmf(m.classes(), m.total(), &x)
        }
        FamilyParams::InvHyper(m) => {
            let x = counts(point.as_vector()?, m.dim())?;
            if x[0] != m.stop_count() {
                return Err(Error::InvalidPoint(format!("x_0 must equal gamma = {}", m.stop_count())));
            }
            let n: u64 = x.iter().sum();
            if (n as f64 - 1.0) / m.total() >= 1.0 || outside_class_capacity(&m.classes()[1..], &x[1..]) {
                return Ok(f64::NEG_INFINITY);
            }
            let num = class_binomial_product(m.classes(), &x);
            let den = signed_log_gen_binom(m.total(), n);
            let lp = positive_log(num / den)?;
            Ok(lp + (m.stop_count() as f64 / n as f64).ln())
        }
        FamilyParams::Multinomial(m) => {
            let x = counts(point.as_vector()?, m.dim())?;
            if x.iter().sum::<u64>() != m.trials() {
                return Err(Error::InvalidPoint(format!("counts must sum to n = {}", m.trials())));
            }
            Ok(multinomial_log_pmf(m.probs(), &x))
        }
        FamilyParams::NegMultinomial(m) => {
            let x = counts(point.as_vector()?, m.dim())?;
            if x[0] != m.stop_count() {
                return Err(Error::InvalidPoint(format!("x_0 must equal gamma = {}", m.stop_count())));
            }
            let n: u64 = x.iter().sum();
            Ok((m.stop_count() as f64 / n as f64).ln() + multinomial_log_pmf(m.probs(), &x))
        }
        FamilyParams::Dirichlet(d) => {
            let x = point.as_vector()?;
            if x.len() != d.dim() {
                return Err(Error::DimensionMismatch {
                    expected: d.dim(),
                    got: x.len(),
                });
            }
            let s: f64 = x.iter().sum();
            if x.iter().any(|v| *v < 0.0) || (s - 1.0).abs() > SIMPLEX_TOL {
                return Err(Error::InvalidPoint("Dirichlet point is off the simplex".into()));
            }
            let mut acc = -log_beta(d.alpha())?;
            for (&a, &xi) in d.alpha().iter().zip(x) {
                if a != 1.0 {
                    acc += (a - 1.0) * xi.ln();
                }
            }
            Ok(acc)
        }
        FamilyParams::MatrixGamma(mg) => {
            let x = point.as_matrix()?;
            if x.nrows() != mg.dim() || x.ncols() != mg.dim() {
                return Err(Error::DimensionMismatch {
                    expected: mg.dim(),
                    got: x.nrows(),
                });
            }
            let lx = spd_factor(x)?;
            let p = mg.dim() as f64;
            let a = mg.alpha();
            Ok(-a * mg.log_det_sigma() - p * a * mg.beta().ln() - log_multivariate_gamma(mg.dim(), a)?
                + (a - (p + 1.0) / 2.0) * log_det_from_factor(&lx)
                - mg.trace_sigma_inv(x) / mg.beta())
        }
    }
}

pub(crate) fn hypergeom_log_pmf(h: &HypergeomParams, x: u64) -> f64 {
    let (lo, hi) = h.support();
    if x < lo || x > hi {
        return f64::NEG_INFINITY;
    }
    ln_choose(h.marked(), x) + ln_choose(h.unmarked(), h.draws() - x) - ln_choose(h.population(), h.draws())
}

/// `ln lambda + (x-1) ln(lambda + x alpha) - lambda - x alpha - ln x!`.
pub(crate) fn gen_poisson_log_pmf(lambda: f64, alpha: f64, x: u64) -> f64 {
    let xf = x as f64;
    lambda.ln() + (xf - 1.0) * (lambda + xf * alpha).ln() - lambda - xf * alpha - ln_factorial(x)
}

pub(crate) fn multi_hyper_log_pmf(classes: &[f64], total: f64, x: &[u64]) -> Result<f64> {
    if outside_class_capacity(classes, x) {
        return Ok(f64::NEG_INFINITY);
    }
    let n: u64 = x.iter().sum();
    positive_log(class_binomial_product(classes, x) / signed_log_gen_binom(total, n))
}

pub(crate) fn multinomial_log_pmf(probs: &[f64], x: &[u64]) -> f64 {
    let n: u64 = x.iter().sum();
    let mut acc = ln_factorial(n);
    for (&p, &k) in probs.iter().zip(x) {
        acc -= ln_factorial(k);
        if k > 0 {
            acc += k as f64 * p.ln();
        }
    }
    acc
}

/// `ln B(alpha) = sum ln Gamma(alpha_i) - ln Gamma(sum alpha_i)`.
pub fn log_beta(alpha: &[f64]) -> Result<f64> {
    let mut acc = 0.0;
    for &a in alpha {
        acc += log_gamma(a)?;
    }
    Ok(acc - log_gamma(alpha.iter().sum())?)
}

/// `ln Gamma_p(a)`, the multivariate gamma function.
pub fn log_multivariate_gamma(p: usize, a: f64) -> Result<f64> {
    let pf = p as f64;
    let mut acc = pf * (pf - 1.0) / 4.0 * std::f64::consts::PI.ln();
    for j in 1..=p {
        acc += log_gamma(a + (1.0 - j as f64) / 2.0)?;
    }
    Ok(acc)
}

/// Analytic mean of one draw.
pub fn family_mean(params: &FamilyParams) -> Point {
    match params {
        FamilyParams::Bernoulli(b) => Point::Scalar(b.p()),
        FamilyParams::Hypergeometric(h) => Point::Scalar(h.mean()),
        FamilyParams::GenPoisson(g) => Point::Scalar(g.mean()),
        FamilyParams::Gamma(g) => Point::Scalar(g.mean()),
        FamilyParams::Uniform(_) => Point::Scalar(0.5),
        FamilyParams::MultiHyper(m) => Point::Vector(m.mean()),
        FamilyParams::InvHyper(m) => Point::Vector(m.mean()),
        FamilyParams::Multinomial(m) => Point::Vector(m.mean()),
        FamilyParams::NegMultinomial(m) => Point::Vector(m.mean()),
        FamilyParams::Dirichlet(d) => Point::Vector(d.mean()),
        FamilyParams::MatrixGamma(mg) => Point::Matrix(mg.mean()),
    }
}
