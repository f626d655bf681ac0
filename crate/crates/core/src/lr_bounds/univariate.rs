use super::{at_mean, mismatch_note, Direction, Optimizer};
use crate::distributions::{BernoulliParams, GammaParams, GenPoissonParams, HypergeomParams};
use crate::error::{domain, Error, Result};
use crate::lr_core::{
    berry_esseen_factor, uniform_tilt_log_normalizer, uniform_tilt_mean, BoundReport, Method, TiltParam,
    TYURIN_CONSTANT,
};
use crate::numerics::{find_root_bracketed, signed_log_gen_binom, RootFindConfig};

fn xlogy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

/// `[(p/z)^z ((1-p)/(1-z))^(1-z)]^n`, optionally times `1/2 + Δ`.
pub fn bernoulli_bound(n: u64, params: &BernoulliParams, z: f64, dir: Direction, sharpen: bool) -> Result<BoundReport> {
    if n == 0 {
        return domain("n must be positive");
    }
    if !(0.0..=1.0).contains(&z) {
        return domain(format!("Bernoulli threshold must lie in [0, 1], got {z}"));
    }
    let p = params.p();
    let tilt = TiltParam::Scalar(z);
    if !dir.admits(z, p) {
        return Ok(BoundReport::invalid(tilt, Method::ClosedForm, mismatch_note(dir)));
    }
    let log_m = if at_mean(z, p) {
        0.0
    } else {
        xlogy(z, p / z) + xlogy(1.0 - z, (1.0 - p) / (1.0 - z))
    };
    let report = BoundReport::new(n as f64 * log_m, tilt, Method::ClosedForm);
    if !sharpen {
        return Ok(report);
    }
    let ratio = (z * z + (1.0 - z) * (1.0 - z)) / (z * (1.0 - z)).sqrt();
    let factor = berry_esseen_factor(n, ratio, TYURIN_CONSTANT)?;
    Ok(report.sharpened(factor))
}

/// `C(R,r)C(B,b) / (C(R̂,r)C(B̂,b))` with `R̂ = min(N, ⌊(N+1)r/n⌋)`.
pub fn hypergeom_bound(params: &HypergeomParams, r: u64, dir: Direction) -> Result<BoundReport> {
    let (big_n, big_r, big_b, n) = (
        params.population(),
        params.marked(),
        params.unmarked(),
        params.draws(),
    );
    if r > n || r > big_r || n - r > big_b {
        return Err(Error::Infeasible(format!(
            "r = {r} infeasible for N = {big_n}, R = {big_r}, n = {n}"
        )));
    }
    let b = n - r;
    let r_hat = big_n.min(((big_n as u128 + 1) * r as u128 / n as u128) as u64);
    let tilt = TiltParam::Scalar(r_hat as f64);
    if !dir.admits(r as f64, params.mean()) {
        return Ok(BoundReport::invalid(tilt, Method::ClosedForm, mismatch_note(dir)));
    }
    let b_hat = big_n - r_hat;
    let num = signed_log_gen_binom(big_r as f64, r) * signed_log_gen_binom(big_b as f64, b);
    let den = signed_log_gen_binom(r_hat as f64, r) * signed_log_gen_binom(b_hat as f64, b);
    let log_bound = if den.is_zero() {
        f64::INFINITY
    } else {
        num.log_mag() - den.log_mag()
    };
    Ok(BoundReport::new(log_bound, tilt, Method::ClosedForm))
}

/// Generalized Poisson bound on the sample mean of `n` draws.
///
/// The MoM tilt sets the per-draw `λ` to `z(1-α)`; the MLE tilt uses
/// `ν = [(1-α)z + sqrt((1-α)²z² + 4zα/n)] / 2`. Each variant has its own
/// admissible threshold region and reports `valid = false` outside it.
pub fn gen_poisson_bound(
    n: u64,
    params: &GenPoissonParams,
    z: f64,
    dir: Direction,
    method: Optimizer,
) -> Result<BoundReport> {
    if n == 0 {
        return domain("n must be positive");
    }
    if !(z > 0.0) || !z.is_finite() {
        return domain(format!("generalized Poisson threshold must be positive, got {z}"));
    }
    let (lambda, alpha) = (params.lambda(), params.alpha());
    let nf = n as f64;
    match method {
        Optimizer::Mom => {
            let tilt = TiltParam::Scalar(z * (1.0 - alpha));
            let threshold = lambda / (1.0 - alpha);
            if !dir.admits(z, threshold) {
                return Ok(BoundReport::invalid(tilt, Method::Mom, mismatch_note(dir)));
            }
            if at_mean(z, threshold) {
                return Ok(BoundReport::new(0.0, tilt, Method::Mom).with_notes("trivial at mean"));
            }
            let prefactor = lambda.ln() - (1.0 - alpha).ln() - (lambda + z * alpha).ln();
            let per_draw = z * (lambda / z + alpha).ln() + (1.0 - alpha) * z - lambda;
            Ok(BoundReport::new(prefactor + nf * per_draw, tilt, Method::Mom))
        }
        Optimizer::Mle => {
            let a1 = 1.0 - alpha;
            let nu = 0.5 * (a1 * z + (a1 * a1 * z * z + 4.0 * z * alpha / nf).sqrt());
            let tilt = TiltParam::Scalar(nu);
            let threshold = lambda / (a1 + alpha / (nf * lambda));
            if !dir.admits(z, threshold) {
                return Ok(BoundReport::invalid(tilt, Method::Mle, mismatch_note(dir)));
            }
            let prefactor = lambda.ln() + (nu + z * alpha).ln() - nu.ln() - (lambda + z * alpha).ln();
            let per_draw = z * ((lambda + z * alpha) / (nu + z * alpha)).ln() + nu - lambda;
            Ok(BoundReport::new(prefactor + nf * per_draw, tilt, Method::Mle))
        }
    }
}

/// Poisson (`α = 0`) bound sharpened by `1/2 + Δ`, `Δ = min(1/2, C(3 + 1/z)^(3/4)/sqrt(n))`.
pub fn poisson_sharp_bound(n: u64, lambda: f64, z: f64, dir: Direction) -> Result<BoundReport> {
    if n == 0 {
        return domain("n must be positive");
    }
    if !(lambda > 0.0) || !(z > 0.0) || !z.is_finite() || !lambda.is_finite() {
        return domain(format!("need lambda > 0 and z > 0, got lambda={lambda}, z={z}"));
    }
    let tilt = TiltParam::Scalar(z);
    if !dir.admits(z, lambda) {
        return Ok(BoundReport::invalid(tilt, Method::ClosedForm, mismatch_note(dir)));
    }
    let per_draw = if at_mean(z, lambda) {
        0.0
    } else {
        z * lambda.ln() + z - z * z.ln() - lambda
    };
    let factor = berry_esseen_factor(n, (3.0 + 1.0 / z).powf(0.75), TYURIN_CONSTANT)?;
    Ok(BoundReport::new(n as f64 * per_draw, tilt, Method::ClosedForm).sharpened(factor))
}

/// `[ϱ e^(1-ϱ)]^(kn)` for the threshold `z = ϱkθ`, optionally times `1/2 + Δ`
/// with `Δ = min(1/2, C(3 + 6/k)^(3/4)/sqrt(n))`.
pub fn gamma_bound(n: u64, params: &GammaParams, rho_ratio: f64, dir: Direction, sharpen: bool) -> Result<BoundReport> {
    if n == 0 {
        return domain("n must be positive");
    }
    if !(rho_ratio > 0.0) || !rho_ratio.is_finite() {
        return domain(format!("ratio must be positive, got {rho_ratio}"));
    }
    let k = params.shape();
    let tilt = TiltParam::Scalar(rho_ratio * params.scale());
    if !dir.admits(rho_ratio, 1.0) {
        return Ok(BoundReport::invalid(tilt, Method::ClosedForm, mismatch_note(dir)));
    }
    let per_draw = if at_mean(rho_ratio, 1.0) {
        0.0
    } else {
        k * (rho_ratio.ln() + 1.0 - rho_ratio)
    };
    let report = BoundReport::new(n as f64 * per_draw, tilt, Method::ClosedForm);
    if !sharpen {
        return Ok(report);
    }
    let factor = berry_esseen_factor(n, (3.0 + 6.0 / k).powf(0.75), TYURIN_CONSTANT)?;
    Ok(report.sharpened(factor))
}

const UNIFORM_NU_LO: f64 = 1e-8;
const UNIFORM_NU_HI: f64 = 700.0;

/// The tilt `ν > 0` with `1 + 1/(e^ν - 1) - 1/ν = z`, for `z` in `(1/2, 1)`.
pub fn uniform_tilt_root(z: f64) -> Result<f64> {
    if !(z > 0.5 && z < 1.0) {
        return domain(format!("uniform tilt root needs z in (0.5, 1), got {z}"));
    }
    let f = |nu: f64| uniform_tilt_mean(nu) - z;
    if f(UNIFORM_NU_LO) >= 0.0 {
        // Mean is 1/2 + ν/12 + O(ν³) this close to zero.
        return Ok(12.0 * (z - 0.5));
    }
    if f(UNIFORM_NU_HI) <= 0.0 {
        // Past the bracket the mean is 1 - 1/ν up to e^(-ν).
        return Ok(1.0 / (1.0 - z));
    }
    let cfg = RootFindConfig {
        rel_tol: 1e-15,
        abs_tol: 1e-15,
        max_iter: 400,
    };
    find_root_bracketed(f, UNIFORM_NU_LO, UNIFORM_NU_HI, &cfg)
}

/// `[(e^ν - 1)/(ν e^(zν))]^n` for the mean of `n` uniforms on `[0, 1]`.
pub fn uniform_mean_upper_bound(n: u64, z: f64) -> Result<BoundReport> {
    if n == 0 {
        return domain("n must be positive");
    }
    if !(0.5..1.0).contains(&z) {
        return domain(format!("uniform threshold must lie in [0.5, 1), got {z}"));
    }
    if z == 0.5 {
        return Ok(BoundReport::new(0.0, TiltParam::Scalar(0.0), Method::Mom).with_notes("boundary: ν→0"));
    }
    let nu = uniform_tilt_root(z)?;
    let per_draw = uniform_tilt_log_normalizer(nu) - z * nu;
    Ok(BoundReport::new(n as f64 * per_draw, TiltParam::Scalar(nu), Method::Mom))
}
