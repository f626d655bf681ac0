use nalgebra::DMatrix;
use serde::Serialize;

use super::{at_mean, mismatch_note, Direction, ORDER_TOL};
use crate::distributions::{
    log_beta, log_density, log_det_from_factor, multi_hyper_log_pmf, spd_factor, DirichletParams, FamilyParams,
    InvHyperParams, MatrixGammaParams, MultiHyperParams, MultinomialParams, NegMultinomialParams, Point, SIMPLEX_TOL,
};
use crate::error::{Error, Result};
use crate::lr_core::{BoundReport, Method, TiltParam};
use crate::numerics::{signed_log_gen_binom, SignedLogValue};

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

fn as_f64(z: &[u64]) -> Vec<f64> {
    z.iter().map(|&v| v as f64).collect()
}

/// `prod_i C(classes_i, z_i) / C(hat_i, z_i)` as a log, or `None` when the
/// ratio is not positive.
fn binomial_ratio_log(classes: &[f64], hat: &[f64], z: &[u64]) -> Option<f64> {
    let mut acc = SignedLogValue::ONE;
    for ((&c, &h), &k) in classes.iter().zip(hat).zip(z) {
        acc = acc * signed_log_gen_binom(c, k) / signed_log_gen_binom(h, k);
    }
    match acc.sign() {
        1 => Some(acc.log_mag()),
        _ => None,
    }
}

/// `sum_i z_i ln(m_i / z_i)` with `0 ln(·) = 0`.
fn multinomial_log_ratio(mean: &[f64], z: &[u64]) -> f64 {
    mean.iter()
        .zip(z)
        .filter(|(_, &k)| k > 0)
        .map(|(&m, &k)| k as f64 * (m / k as f64).ln())
        .sum()
}

fn lattice_report(
    log_ratio: Option<f64>,
    hat: Vec<f64>,
    z: &[f64],
    center: &[f64],
) -> BoundReport {
    let at_center = z.iter().zip(center).all(|(&a, &b)| at_mean(a, b));
    match log_ratio {
        _ if at_center => BoundReport::new(0.0, TiltParam::Vector(hat), Method::Mom).with_notes("trivial at mean"),
        Some(l) => BoundReport::new(l, TiltParam::Vector(hat), Method::Mom),
        None => BoundReport::invalid(
            TiltParam::Vector(hat),
            Method::Mom,
            "generalized binomial ratio is not positive",
        ),
    }
}

/// `prod_i C(C_i, z_i) / C(Ĉ_i, z_i)` with `Ĉ_i = N z_i / n`.
pub fn multi_hypergeom_bound(params: &MultiHyperParams, z: &[u64], dir: Direction) -> Result<BoundReport> {
    check_dim(params.dim(), z.len())?;
    if z.iter().sum::<u64>() != params.draws() {
        return Err(Error::InvalidPoint(format!("z must sum to n = {}", params.draws())));
    }
    if multi_hyper_log_pmf(params.classes(), params.total(), z)? == f64::NEG_INFINITY {
        return Err(Error::InvalidPoint("z has zero probability".into()));
    }
    let n = params.draws() as f64;
    let hat: Vec<f64> = z.iter().map(|&k| params.total() * k as f64 / n).collect();
    let zf = as_f64(z);
    let mean = params.mean();
    if !dir.admits_vector(&zf, &mean) {
        return Ok(BoundReport::invalid(TiltParam::Vector(hat), Method::Mom, mismatch_note(dir)));
    }
    let log_ratio = binomial_ratio_log(params.classes(), &hat, z);
    Ok(lattice_report(log_ratio, hat, &zf, &mean))
}

/// Stirling-type upper estimate of [`multi_hypergeom_bound`] together with
/// the exact bound it majorizes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StirlingBound {
    pub report: BoundReport,
    pub exact: BoundReport,
    /// `exp(report) - exp(exact)`; positive on the validity region.
    pub gap: f64,
}

/// `[(n/N)^n prod (C_i/z_i)^z_i] (e²/2π)^(κ+1) ((N-n)/N)^(N-n+(κ+1)/2)
/// prod (C_i/(C_i-z_i))^(C_i-z_i+1/2)`, valid when `C_i - z_i >= 1` and
/// `Ĉ_i - z_i >= 1` for every class.
pub fn multi_hypergeom_stirling_bound(params: &MultiHyperParams, z: &[u64], dir: Direction) -> Result<StirlingBound> {
    let exact = multi_hypergeom_bound(params, z, dir)?;
    let big_n = params.total();
    let n = params.draws() as f64;
    let classes = params.classes();
    let hat: Vec<f64> = z.iter().map(|&k| big_n * k as f64 / n).collect();
    let inside = classes
        .iter()
        .zip(&hat)
        .zip(z)
        .all(|((&c, &h), &k)| c - k as f64 >= 1.0 && h - k as f64 >= 1.0);
    if !exact.valid || !inside {
        let report = BoundReport::invalid(
            TiltParam::Vector(hat),
            Method::ClosedForm,
            "needs C_i - z_i >= 1 and Ĉ_i - z_i >= 1 for every class",
        );
        return Ok(StirlingBound {
            report,
            exact,
            gap: f64::NAN,
        });
    }
    let m = classes.len() as f64;
    let mut log_rhs = n * (n / big_n).ln()
        + m * (2.0 - (2.0 * std::f64::consts::PI).ln())
        + (big_n - n + m / 2.0) * ((big_n - n) / big_n).ln();
    for (&c, &k) in classes.iter().zip(z) {
        let kf = k as f64;
        if k > 0 {
            log_rhs += kf * (c / kf).ln();
        }
        log_rhs += (c - kf + 0.5) * (c / (c - kf)).ln();
    }
    let report = BoundReport::new(log_rhs, TiltParam::Vector(hat), Method::ClosedForm);
    let gap = report.bound() - exact.bound();
    Ok(StirlingBound { report, exact, gap })
}

/// `prod_i (μ_i/z_i)^z_i` with `μ_i = n p_i`.
pub fn multinomial_bound(params: &MultinomialParams, z: &[u64], dir: Direction) -> Result<BoundReport> {
    check_dim(params.dim(), z.len())?;
    if z.iter().sum::<u64>() != params.trials() {
        return Err(Error::InvalidPoint(format!("z must sum to n = {}", params.trials())));
    }
    let mean = params.mean();
    let zf = as_f64(z);
    let n = params.trials() as f64;
    let hat: Vec<f64> = zf.iter().map(|k| k / n).collect();
    if !dir.admits_vector(&zf, &mean) {
        return Ok(BoundReport::invalid(TiltParam::Vector(hat), Method::Mom, mismatch_note(dir)));
    }
    Ok(lattice_report(Some(multinomial_log_ratio(&mean, z)), hat, &zf, &mean))
}

/// `prod_i C(C_i, z_i) / C(Ĉ_i, z_i)` with `n = sum z_i`, `Ĉ_i = N z_i / n`;
/// the direction is checked against `μ̂_i = n C_i / N`.
pub fn inv_hypergeom_bound(params: &InvHyperParams, z: &[u64], dir: Direction) -> Result<BoundReport> {
    check_dim(params.dim(), z.len())?;
    if z[0] != params.stop_count() {
        return Err(Error::InvalidPoint(format!("z_0 must equal gamma = {}", params.stop_count())));
    }
    let zf = as_f64(z);
    let n: f64 = zf.iter().sum();
    let big_n = params.total();
    if !((n - 1.0) / big_n < 1.0) {
        return Err(Error::InvalidPoint(format!("(n-1)/N must be < 1, got n={n}, N={big_n}")));
    }
    let fam = FamilyParams::InvHyper(params.clone());
    if log_density(&fam, &Point::Vector(zf.clone()))? == f64::NEG_INFINITY {
        return Err(Error::InvalidPoint("z has zero probability".into()));
    }
    let hat: Vec<f64> = zf.iter().map(|k| big_n * k / n).collect();
    let mu_hat: Vec<f64> = params.classes().iter().map(|c| n * c / big_n).collect();
    if !dir.admits_vector(&zf, &mu_hat) {
        return Ok(BoundReport::invalid(TiltParam::Vector(hat), Method::Mom, mismatch_note(dir)));
    }
    let log_ratio = binomial_ratio_log(params.classes(), &hat, z);
    Ok(lattice_report(log_ratio, hat, &zf, &mu_hat))
}

/// `prod_i (μ̂_i/z_i)^z_i` with `n = sum z_i`, `μ̂_i = n p_i`.
pub fn neg_multinomial_bound(params: &NegMultinomialParams, z: &[u64], dir: Direction) -> Result<BoundReport> {
    check_dim(params.dim(), z.len())?;
    if z[0] != params.stop_count() {
        return Err(Error::InvalidPoint(format!("z_0 must equal gamma = {}", params.stop_count())));
    }
    let zf = as_f64(z);
    let n: f64 = zf.iter().sum();
    let mu_hat: Vec<f64> = params.probs().iter().map(|p| n * p).collect();
    let hat: Vec<f64> = zf.iter().map(|k| k / n).collect();
    if !dir.admits_vector(&zf, &mu_hat) {
        return Ok(BoundReport::invalid(TiltParam::Vector(hat), Method::Mom, mismatch_note(dir)));
    }
    Ok(lattice_report(Some(multinomial_log_ratio(&mu_hat, z)), hat, &zf, &mu_hat))
}

/// `[B(α̂)/B(α) prod_{i>=1} z_i^(α_i - α̂_i)]^n` with `α̂_i = α_0 z_i / z_0`,
/// for the lower order `≺` only.
pub fn dirichlet_bound(n: u64, params: &DirichletParams, z: &[f64]) -> Result<BoundReport> {
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    check_dim(params.dim(), z.len())?;
    let s: f64 = z.iter().sum();
    if z.iter().any(|&v| !(v > 0.0)) || (s - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::InvalidPoint("z must be a positive point of the simplex".into()));
    }
    let alpha = params.alpha();
    let hat: Vec<f64> = z.iter().map(|&zi| alpha[0] * zi / z[0]).collect();
    let mean = params.mean();
    if !Direction::Lower.admits_vector(z, &mean) {
        return Ok(BoundReport::invalid(
            TiltParam::Vector(hat),
            Method::Mom,
            "only z ≺ mean is supported",
        ));
    }
    if z.iter().zip(&mean).all(|(&a, &b)| at_mean(a, b)) {
        return Ok(BoundReport::new(0.0, TiltParam::Vector(hat), Method::Mom).with_notes("trivial at mean"));
    }
    let mut per_draw = log_beta(&hat)? - log_beta(alpha)?;
    for i in 1..z.len() {
        per_draw += (alpha[i] - hat[i]) * z[i].ln();
    }
    Ok(BoundReport::new(n as f64 * per_draw, TiltParam::Vector(hat), Method::Mom))
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// `[(e/(αβ))^(pα) (|z|/|Σ|)^α exp(-tr(Σ⁻¹z)/β)]^n` under the Loewner order.
pub fn matrix_gamma_bound(n: u64, params: &MatrixGammaParams, z: &DMatrix<f64>, dir: Direction) -> Result<BoundReport> {
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let p = params.dim();
    if z.nrows() != p || z.ncols() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            got: z.nrows(),
        });
    }
    let lz = spd_factor(z)?;
    let (alpha, beta) = (params.alpha(), params.beta());
    let tilt = TiltParam::Matrix(matrix_rows(&(z / (alpha * beta))));
    let mean = params.mean();
    let diff = z - &mean;
    let scale = mean.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    if diff.iter().all(|v| v.abs() <= ORDER_TOL * scale) {
        return Ok(BoundReport::new(0.0, tilt, Method::Mom).with_notes("trivial at mean"));
    }
    let ordered = match dir {
        Direction::Upper => spd_factor(&diff).is_ok(),
        Direction::Lower => spd_factor(&(-diff)).is_ok(),
    };
    if !ordered {
        return Ok(BoundReport::invalid(tilt, Method::Mom, mismatch_note(dir)));
    }
    let pf = p as f64;
    let per_draw = pf * alpha * (1.0 - (alpha * beta).ln()) + alpha * (log_det_from_factor(&lz) - params.log_det_sigma())
        - params.trace_sigma_inv(z) / beta;
    Ok(BoundReport::new(n as f64 * per_draw, tilt, Method::Mom))
}
