use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Tolerance on `sum(p) == 1` for probability vectors.
pub const PROB_SUM_TOL: f64 = 1e-12;
/// Tolerance on `sum(z) == 1` for simplex points.
pub const SIMPLEX_TOL: f64 = 1e-9;
/// Cholesky pivots must exceed this multiple of the largest diagonal entry.
pub const PD_PIVOT_REL: f64 = 1e-12;

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParams(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernoulliParams {
    p: f64,
}

impl BernoulliParams {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return invalid(format!("Bernoulli p must lie in (0,1), got {p}"));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// Hypergeometric: `draws` units taken without replacement from a
/// population of `population` units, `marked` of which carry the attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HypergeomParams {
    population: u64,
    marked: u64,
    draws: u64,
}

impl HypergeomParams {
    pub fn new(population: u64, marked: u64, draws: u64) -> Result<Self> {
        if population == 0 {
            return invalid("hypergeometric population must be positive");
        }
        if marked > population {
            return invalid(format!("marked units {marked} exceed population {population}"));
        }
        if draws == 0 || draws > population {
            return invalid(format!("draws must lie in [1, {population}], got {draws}"));
        }
        Ok(Self {
            population,
            marked,
            draws,
        })
    }

    pub fn population(&self) -> u64 {
        self.population
    }

    pub fn marked(&self) -> u64 {
        self.marked
    }

    pub fn unmarked(&self) -> u64 {
        self.population - self.marked
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn mean(&self) -> f64 {
        self.draws as f64 * self.marked as f64 / self.population as f64
    }

    /// Support `[max(0, n - B), min(n, R)]`.
    pub fn support(&self) -> (u64, u64) {
        (
            self.draws.saturating_sub(self.unmarked()),
            self.draws.min(self.marked),
        )
    }
}

/// Consul's generalized Poisson distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenPoissonParams {
    lambda: f64,
    alpha: f64,
}

impl GenPoissonParams {
    pub fn new(lambda: f64, alpha: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return invalid(format!("generalized Poisson lambda must be > 0, got {lambda}"));
        }
        if !(0.0..1.0).contains(&alpha) {
            return invalid(format!("generalized Poisson alpha must lie in [0,1), got {alpha}"));
        }
        Ok(Self { lambda, alpha })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mean(&self) -> f64 {
        self.lambda / (1.0 - self.alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaParams {
    shape: f64,
    scale: f64,
}

impl GammaParams {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 0.0) || !shape.is_finite() || !(scale > 0.0) || !scale.is_finite() {
            return invalid(format!("gamma needs shape > 0 and scale > 0, got k={shape}, theta={scale}"));
        }
        Ok(Self { shape, scale })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn mean(&self) -> f64 {
        self.shape * self.scale
    }
}

fn check_class_vector(c: &[f64]) -> Result<f64> {
    if c.len() < 2 {
        return invalid(format!("need at least two classes, got {}", c.len()));
    }
    if c.iter().any(|x| !x.is_finite()) {
        return invalid("class sizes must be finite");
    }
    let total: f64 = c.iter().sum();
    if total == 0.0 {
        return invalid("class sizes sum to zero");
    }
    Ok(total)
}

/// Multivariate generalized hypergeometric distribution. Class sizes may be
/// real, and all negative (negative hypergeometric / Polya case).
#[derive(Debug, Clone, PartialEq)]
pub struct MultiHyperParams {
    classes: Vec<f64>,
    draws: u64,
    total: f64,
}

impl MultiHyperParams {
    pub fn new(classes: Vec<f64>, draws: u64) -> Result<Self> {
        let total = check_class_vector(&classes)?;
        if draws == 0 {
            return invalid("draws must be positive");
        }
        if classes.iter().any(|c| !(c / total > 0.0)) {
            return invalid("every class size must share the sign of the total");
        }
        if !((draws as f64 - 1.0) / total < 1.0) {
            return invalid(format!("(n-1)/N must be < 1, got n={draws}, N={total}"));
        }
        Ok(Self {
            classes,
            draws,
            total,
        })
    }

    pub fn classes(&self) -> &[f64] {
        &self.classes
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn dim(&self) -> usize {
        self.classes.len()
    }

    pub fn mean(&self) -> Vec<f64> {
        let n = self.draws as f64;
        self.classes.iter().map(|c| n * c / self.total).collect()
    }
}

/// Multivariate generalized inverse hypergeometric distribution: draws
/// continue until `stop_count` units of class 0 have been seen.
#[derive(Debug, Clone, PartialEq)]
pub struct InvHyperParams {
    classes: Vec<f64>,
    stop_count: u64,
    total: f64,
}

impl InvHyperParams {
    pub fn new(classes: Vec<f64>, stop_count: u64) -> Result<Self> {
        let total = check_class_vector(&classes)?;
        if stop_count == 0 {
            return invalid("stopping count must be positive");
        }
        if !(classes[0] / total > (stop_count as f64 - 1.0) / total) {
            return invalid("need C_0/N > (gamma-1)/N");
        }
        if classes[1..].iter().any(|c| !(c / total > 0.0)) {
            return invalid("need C_i/N > 0 for i >= 1");
        }
        Ok(Self {
            classes,
            stop_count,
            total,
        })
    }

    pub fn classes(&self) -> &[f64] {
        &self.classes
    }

    pub fn stop_count(&self) -> u64 {
        self.stop_count
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn dim(&self) -> usize {
        self.classes.len()
    }

    /// `gamma` for class 0 and `gamma C_i / (C_0 + 1)` for the others.
    pub fn mean(&self) -> Vec<f64> {
        let g = self.stop_count as f64;
        let mut m: Vec<f64> = self.classes.iter().map(|c| g * c / (self.classes[0] + 1.0)).collect();
        m[0] = g;
        m
    }
}

fn check_prob_vector(p: &[f64]) -> Result<()> {
    if p.len() < 2 {
        return invalid(format!("need at least two categories, got {}", p.len()));
    }
    if p.iter().any(|x| !(*x > 0.0)) {
        return invalid("category probabilities must be positive");
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > PROB_SUM_TOL {
        return invalid(format!("category probabilities sum to {s}, not 1"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultinomialParams {
    probs: Vec<f64>,
    trials: u64,
}

impl MultinomialParams {
    pub fn new(probs: Vec<f64>, trials: u64) -> Result<Self> {
        check_prob_vector(&probs)?;
        if trials == 0 {
            return invalid("trials must be positive");
        }
        Ok(Self { probs, trials })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn mean(&self) -> Vec<f64> {
        self.probs.iter().map(|p| self.trials as f64 * p).collect()
    }
}

/// Negative multinomial: categorical trials until `stop_count` outcomes of
/// category 0.
#[derive(Debug, Clone, PartialEq)]
pub struct NegMultinomialParams {
    probs: Vec<f64>,
    stop_count: u64,
}

impl NegMultinomialParams {
    pub fn new(probs: Vec<f64>, stop_count: u64) -> Result<Self> {
        check_prob_vector(&probs)?;
        if stop_count == 0 {
            return invalid("stopping count must be positive");
        }
        Ok(Self { probs, stop_count })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn stop_count(&self) -> u64 {
        self.stop_count
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn mean(&self) -> Vec<f64> {
        let g = self.stop_count as f64;
        self.probs.iter().map(|p| g * p / self.probs[0]).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirichletParams {
    alpha: Vec<f64>,
}

impl DirichletParams {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.len() < 2 {
            return invalid(format!("Dirichlet needs at least two components, got {}", alpha.len()));
        }
        if alpha.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
            return invalid("Dirichlet concentrations must be positive");
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn mean(&self) -> Vec<f64> {
        let s: f64 = self.alpha.iter().sum();
        self.alpha.iter().map(|a| a / s).collect()
    }
}

/// Symmetric positive-definite check with a relative pivot floor. Returns the
/// lower Cholesky factor.
pub fn spd_factor(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let p = m.nrows();
    if p == 0 || m.ncols() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            got: m.ncols(),
        });
    }
    let scale = m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    for i in 0..p {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale.max(1.0) {
                return Err(Error::InvalidPoint("matrix is not symmetric".into()));
            }
        }
    }
    let max_diag = (0..p).map(|i| m[(i, i)]).fold(f64::NEG_INFINITY, f64::max);
    if !(max_diag > 0.0) {
        return Err(Error::InvalidPoint("matrix is not positive definite".into()));
    }
    // Plain Cholesky so the pivot floor can be applied to each pivot.
    let mut l = DMatrix::<f64>::zeros(p, p);
    for j in 0..p {
        let mut pivot = m[(j, j)];
        for k in 0..j {
            pivot -= l[(j, k)] * l[(j, k)];
        }
        if !(pivot > PD_PIVOT_REL * max_diag) {
            return Err(Error::InvalidPoint("matrix is not positive definite".into()));
        }
        let d = pivot.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..p {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

pub(crate) fn log_det_from_factor(l: &DMatrix<f64>) -> f64 {
    2.0 * (0..l.nrows()).map(|i| l[(i, i)].ln()).sum::<f64>()
}

/// Matrix gamma with shape `alpha`, scale `beta`, and SPD scale matrix
/// `sigma`; mean `alpha * beta * sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGammaParams {
    alpha: f64,
    beta: f64,
    sigma: DMatrix<f64>,
    sigma_chol: DMatrix<f64>,
}

impl MatrixGammaParams {
    /// Requires `alpha > (p - 1) / 2` so the density is normalizable.
    pub fn new(alpha: f64, beta: f64, sigma: DMatrix<f64>) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return invalid(format!("matrix gamma beta must be > 0, got {beta}"));
        }
        let sigma_chol = spd_factor(&sigma).map_err(|e| match e {
            Error::InvalidPoint(m) => Error::InvalidParams(format!("Sigma: {m}")),
            other => other,
        })?;
        let p = sigma.nrows() as f64;
        if !(alpha > (p - 1.0) / 2.0) || !alpha.is_finite() {
            return invalid(format!("matrix gamma alpha must exceed (p-1)/2 = {}, got {alpha}", (p - 1.0) / 2.0));
        }
        Ok(Self {
            alpha,
            beta,
            sigma,
            sigma_chol,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub(crate) fn sigma_chol(&self) -> &DMatrix<f64> {
        &self.sigma_chol
    }

    pub fn dim(&self) -> usize {
        self.sigma.nrows()
    }

    pub fn log_det_sigma(&self) -> f64 {
        log_det_from_factor(&self.sigma_chol)
    }

    /// `tr(Sigma^{-1} z)`.
    pub fn trace_sigma_inv(&self, z: &DMatrix<f64>) -> f64 {
        let l = &self.sigma_chol;
        let mut solved = z.clone();
        l.solve_lower_triangular_mut(&mut solved);
        let lt = l.transpose();
        lt.solve_upper_triangular_mut(&mut solved);
        solved.trace()
    }

    pub fn mean(&self) -> DMatrix<f64> {
        &self.sigma * (self.alpha * self.beta)
    }
}
