use super::{ceil_count, floor_count, OracleEstimate, OracleKind};
use crate::distributions::{
    log_density, DirichletParams, FamilyParams, GammaParams, GenPoissonParams, HypergeomParams, InvHyperParams,
    NegMultinomialParams, Point,
};
use crate::error::{domain, Error, Result};
use crate::lr_bounds::Direction;
use crate::numerics::{
    binom_log_pmf, hypergeom_log_pmf_exact, poisson_log_pmf, reg_gamma_lower, reg_gamma_upper, KahanSum,
};

const BINOMIAL_MAX_N: u64 = 100_000;
const HYPERGEOM_MAX_N: u64 = 10_000;
const GP_MAX_MEAN: f64 = 1e4;
const GP_TERM_CAP: u64 = 10_000_000;
const GP_CUMULATIVE_TARGET: f64 = 1.0 - 1e-13;

fn sum_exp(range: impl Iterator<Item = f64>) -> (f64, usize) {
    let mut acc = KahanSum::default();
    let mut terms = 0;
    for lp in range {
        acc.add(lp.exp());
        terms += 1;
    }
    (acc.value(), terms)
}

/// `P{Bin(n, p) in [lo, hi]}` by direct summation.
fn binomial_range(n: u64, p: f64, lo: i64, hi: i64) -> (f64, usize) {
    let lo = lo.max(0);
    let hi = hi.min(n as i64);
    if lo > hi {
        return (0.0, 0);
    }
    sum_exp((lo..=hi).map(|k| binom_log_pmf(k as u64, n, p)))
}

/// `P{mean of n Bernoulli(p) >= z}` (upper) or `<= z` (lower).
pub fn binomial_exact_tail(n: u64, p: f64, z: f64, dir: Direction) -> Result<OracleEstimate> {
    if n == 0 || n > BINOMIAL_MAX_N {
        return domain(format!("binomial oracle needs 1 <= n <= {BINOMIAL_MAX_N}, got {n}"));
    }
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("p must lie in [0, 1], got {p}"));
    }
    let nz = n as f64 * z;
    let (lo, hi) = match dir {
        Direction::Upper => (ceil_count(nz), n as i64),
        Direction::Lower => (0, floor_count(nz)),
    };
    let (v, terms) = binomial_range(n, p, lo, hi);
    Ok(OracleEstimate::exact(v, terms, format!("sum over k in [{lo}, {hi}]")))
}

/// Exact hypergeometric tail `P{X >= r}` or `P{X <= r}`.
pub fn hypergeom_exact_tail(params: &HypergeomParams, r: u64, dir: Direction) -> Result<OracleEstimate> {
    if params.population() > HYPERGEOM_MAX_N {
        return domain(format!("hypergeometric oracle needs N <= {HYPERGEOM_MAX_N}"));
    }
    let (s_lo, s_hi) = params.support();
    let (lo, hi) = match dir {
        Direction::Upper => (r.max(s_lo), s_hi),
        Direction::Lower => (s_lo, r.min(s_hi)),
    };
    if lo > hi {
        return Ok(OracleEstimate::certain(0.0, "event outside the support"));
    }
    let (v, terms) = sum_exp(
        (lo..=hi).map(|x| hypergeom_log_pmf_exact(x, params.marked(), params.unmarked(), params.draws())),
    );
    Ok(OracleEstimate::exact(v, terms, format!("sum over x in [{lo}, {hi}]")))
}

/// `ln P{GP(lambda, alpha) = y}` written as `lambda/(lambda + y alpha)` times
/// a Poisson mass at mean `lambda + y alpha`.
fn gp_log_pmf(lambda: f64, alpha: f64, y: u64) -> f64 {
    let m = lambda + y as f64 * alpha;
    lambda.ln() - m.ln() + poisson_log_pmf(y, m)
}

/// Tail of the mean of `n` generalized Poisson draws, using that the sum is
/// `GP(n lambda, alpha)`. Upper tails are summed directly and the unsummed
/// mass `1 - cumulative` is added to the upper bracket edge.
pub fn gen_poisson_sum_tail(n: u64, params: &GenPoissonParams, z: f64, dir: Direction) -> Result<OracleEstimate> {
    let big_lambda = n as f64 * params.lambda();
    let alpha = params.alpha();
    if n == 0 || big_lambda > GP_MAX_MEAN {
        return Err(Error::Infeasible(format!(
            "generalized Poisson oracle needs 1 <= n and n*lambda <= {GP_MAX_MEAN}"
        )));
    }
    let nz = n as f64 * z;
    match dir {
        Direction::Lower => {
            let hi = floor_count(nz);
            if hi < 0 {
                return Ok(OracleEstimate::certain(0.0, "event is empty"));
            }
            let (v, terms) = sum_exp((0..=hi as u64).map(|y| gp_log_pmf(big_lambda, alpha, y)));
            let mut est = OracleEstimate::exact(v, terms, format!("sum over y in [0, {hi}]"));
            est.kind = OracleKind::Truncated;
            Ok(est)
        }
        Direction::Upper => {
            let m = ceil_count(nz).max(0) as u64;
            if m == 0 {
                return Ok(OracleEstimate::certain(1.0, "event is certain"));
            }
            let mode = (big_lambda / (1.0 - alpha)).ceil() as u64;
            let mut cum = KahanSum::default();
            let mut tail = KahanSum::default();
            let mut y = 0u64;
            loop {
                let p = gp_log_pmf(big_lambda, alpha, y).exp();
                cum.add(p);
                if y >= m {
                    tail.add(p);
                }
                let done = y >= m && y >= mode && cum.value() >= GP_CUMULATIVE_TARGET && p <= 1e-17 * tail.value();
                y += 1;
                if done || y >= GP_TERM_CAP {
                    break;
                }
            }
            let t = tail.value();
            let rounding = t * (y as f64 + 8.0) * f64::EPSILON;
            let remainder = (1.0 - cum.value()).max(0.0) + 4.0 * f64::EPSILON;
            Ok(OracleEstimate {
                estimate: t.min(1.0),
                lower: (t - rounding).max(0.0),
                upper: (t + rounding + remainder).min(1.0),
                kind: OracleKind::Truncated,
                detail: format!("summed y in [{m}, {}], remainder {remainder:.3e}", y - 1),
            })
        }
    }
}

/// Tail of the mean of `n` Gamma(k, θ) draws via the regularized incomplete
/// gamma function of the `Gamma(nk, θ)` sum.
pub fn gamma_sum_tail_exact(n: u64, params: &GammaParams, z: f64, dir: Direction) -> Result<OracleEstimate> {
    if n == 0 {
        return domain("n must be positive");
    }
    if !(z > 0.0) {
        let v = match dir {
            Direction::Upper => 1.0,
            Direction::Lower => 0.0,
        };
        return Ok(OracleEstimate::certain(v, "threshold at or below the support"));
    }
    let a = n as f64 * params.shape();
    let x = n as f64 * z / params.scale();
    let v = match dir {
        Direction::Upper => reg_gamma_upper(a, x)?,
        Direction::Lower => reg_gamma_lower(a, x)?,
    };
    Ok(OracleEstimate::exact(v, 64, format!("incomplete gamma at a={a}, x={x}")))
}

/// `F(x)` for the sum of `n` uniforms, via the nonnegative recurrence
/// `F_m(y) = [y F_{m-1}(y) + (m - y) F_{m-1}(y - 1)] / m`.
fn irwin_hall_cdf(n: usize, x: f64) -> f64 {
    // g[j] holds F_m(x - j).
    let mut g: Vec<f64> = (0..=n).map(|j| if x - j as f64 >= 0.0 { 1.0 } else { 0.0 }).collect();
    for m in 1..=n {
        let mf = m as f64;
        for j in 0..=(n - m) {
            let y = x - j as f64;
            g[j] = if y <= 0.0 {
                0.0
            } else if y >= mf {
                1.0
            } else {
                (y * g[j] + (mf - y) * g[j + 1]) / mf
            };
        }
    }
    g[0]
}

/// `P{mean of n uniforms on [0, 1] >= z}`.
pub fn irwin_hall_tail(n: u64, z: f64) -> Result<OracleEstimate> {
    if n == 0 || n > 1000 {
        return domain(format!("Irwin-Hall oracle needs 1 <= n <= 1000, got {n}"));
    }
    if !(0.0..=1.0).contains(&z) {
        return domain(format!("z must lie in [0, 1], got {z}"));
    }
    let nf = n as f64;
    // By symmetry P{S >= s} = F(n - s).
    let v = irwin_hall_cdf(n as usize, nf - nf * z);
    Ok(OracleEstimate::exact(v, 4 * n as usize, "Irwin-Hall recurrence"))
}

fn two_class(dim: usize) -> Result<()> {
    if dim != 2 {
        return Err(Error::Unsupported(format!(
            "exact oracle covers two categories only, got {dim}"
        )));
    }
    Ok(())
}

/// Negative binomial tail for the two-category negative multinomial:
/// `X_1` counts category-1 outcomes before the `gamma`-th category-0 one.
/// Uses `P{X_1 >= k} = P{Bin(k + gamma - 1, p_0) <= gamma - 1}`.
pub fn neg_binomial_exact_tail(params: &NegMultinomialParams, z: &[u64], dir: Direction) -> Result<OracleEstimate> {
    two_class(params.dim())?;
    let g = params.stop_count();
    if z.len() != 2 || z[0] != g {
        return Err(Error::InvalidPoint(format!("z must be (gamma = {g}, k)")));
    }
    let p0 = params.probs()[0];
    let k = z[1];
    let (v, terms) = match dir {
        Direction::Upper if k == 0 => return Ok(OracleEstimate::certain(1.0, "event is certain")),
        Direction::Upper => binomial_range(k + g - 1, p0, 0, g as i64 - 1),
        Direction::Lower => binomial_range(k + g, p0, g as i64, (k + g) as i64),
    };
    Ok(OracleEstimate::exact(v, terms, "negative binomial via binomial identity"))
}

/// Exact tail of `X_1` for the two-class inverse hypergeometric law.
pub fn inv_hypergeom_exact_tail(params: &InvHyperParams, z: &[u64], dir: Direction) -> Result<OracleEstimate> {
    two_class(params.dim())?;
    let g = params.stop_count();
    if z.len() != 2 || z[0] != g {
        return Err(Error::InvalidPoint(format!("z must be (gamma = {g}, k)")));
    }
    let fam = FamilyParams::InvHyper(params.clone());
    let log_pmf = |k: u64| log_density(&fam, &Point::Vector(vec![g as f64, k as f64]));
    let partial = |hi: u64| -> Result<(f64, usize)> {
        let mut acc = KahanSum::default();
        for k in 0..=hi {
            acc.add(log_pmf(k)?.exp());
        }
        Ok((acc.value(), hi as usize + 1))
    };
    let k = z[1];
    match dir {
        Direction::Lower => {
            let (v, terms) = partial(k)?;
            Ok(OracleEstimate::exact(v, terms, format!("sum over x_1 in [0, {k}]")))
        }
        Direction::Upper if k == 0 => Ok(OracleEstimate::certain(1.0, "event is certain")),
        Direction::Upper => {
            let c1 = params.classes()[1];
            if c1 > 0.0 {
                let top = c1.floor() as u64;
                let mut acc = KahanSum::default();
                for j in k..=top {
                    acc.add(log_pmf(j)?.exp());
                }
                let terms = (top + 1).saturating_sub(k) as usize;
                Ok(OracleEstimate::exact(acc.value(), terms, format!("sum over x_1 in [{k}, {top}]")))
            } else {
                let (v, terms) = partial(k - 1)?;
                let mut est = OracleEstimate::exact(1.0 - v, terms, "complement of the lower sum");
                let half = (terms as f64 + 8.0) * f64::EPSILON;
                est.lower = (est.estimate - half).max(0.0);
                est.upper = (est.estimate + half).min(1.0);
                Ok(est)
            }
        }
    }
}

/// `P{X_1 <= z_1}` or `P{X_1 >= z_1}` for one two-component Dirichlet draw,
/// where `X_1 ~ Beta(alpha_1, alpha_0)`.
pub fn dirichlet_marginal_tail(params: &DirichletParams, z: &[f64], dir: Direction) -> Result<OracleEstimate> {
    two_class(params.dim())?;
    if z.len() != 2 || !(0.0..=1.0).contains(&z[1]) {
        return Err(Error::InvalidPoint("z must be a two-component simplex point".into()));
    }
    let a = params.alpha();
    let cdf = statrs::function::beta::checked_beta_reg(a[1], a[0], z[1])
        .map_err(|e| Error::InvalidParams(e.to_string()))?;
    let v = match dir {
        Direction::Lower => cdf,
        Direction::Upper => 1.0 - cdf,
    };
    Ok(OracleEstimate::exact(v, 256, "regularized incomplete beta"))
}
