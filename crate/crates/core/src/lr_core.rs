//! Likelihood-ratio machinery shared by every bound: the report type, the
//! univariate exponential-family descriptor with its per-sample log bound
//! `rho`, moment-matched tilt selection, the Berry-Esseen sharpening factor,
//! and a numeric infimum over a tilt interval.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::numerics::{find_root_bracketed, minimize_scalar, RootFindConfig, DEFAULT_GRID_POINTS};

/// Berry-Esseen constant bound due to Tyurin.
pub const TYURIN_CONSTANT: f64 = 0.4785;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Mom,
    Mle,
    Grid,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::ClosedForm => "closed_form",
            Method::Mom => "mom",
            Method::Mle => "mle",
            Method::Grid => "grid",
        };
        f.write_str(s)
    }
}

/// The optimizing tilt parameter, shaped like the family's parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum TiltParam {
    Scalar(f64),
    Vector(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    /// Natural log of the bound, including the sharpening factor.
    pub log_bound: f64,
    pub vartheta_star: TiltParam,
    pub method: Method,
    /// In `(0, 1]`; 1 when unsharpened.
    pub sharpening_factor: f64,
    pub valid: bool,
    pub notes: String,
}

impl BoundReport {
    pub fn new(log_bound: f64, vartheta_star: TiltParam, method: Method) -> Self {
        Self {
            log_bound,
            vartheta_star,
            method,
            sharpening_factor: 1.0,
            valid: true,
            notes: String::new(),
        }
    }

    /// A report carrying the trivial bound 1 with `valid = false`.
    pub fn invalid(vartheta_star: TiltParam, method: Method, notes: impl Into<String>) -> Self {
        Self {
            log_bound: 0.0,
            vartheta_star,
            method,
            sharpening_factor: 1.0,
            valid: false,
            notes: notes.into(),
        }
    }

    pub fn with_notes(mut self, notes: impl Into<String>) -> Self {
        self.notes = notes.into();
        self
    }

    /// Multiplies the bound by `factor` and records it.
    pub fn sharpened(mut self, factor: f64) -> Self {
        self.log_bound += factor.ln();
        self.sharpening_factor = factor;
        self
    }

    pub fn bound(&self) -> f64 {
        self.log_bound.exp()
    }

    pub fn clamped(&self) -> f64 {
        self.bound().min(1.0)
    }

    /// Log bound before the sharpening factor.
    pub fn unsharpened_log_bound(&self) -> f64 {
        self.log_bound - self.sharpening_factor.ln()
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One-parameter exponential family `v(x) exp(eta(theta) u(x) - zeta(theta))`.
///
/// Only the parameter-side maps are held here; `v` lives with the family's
/// density.
#[derive(Clone)]
pub struct ExpFamily1D {
    eta: ScalarFn,
    zeta: ScalarFn,
    mean_of_u: ScalarFn,
    /// Open interval of admissible parameters.
    theta_domain: (f64, f64),
    u_description: String,
}

impl fmt::Debug for ExpFamily1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExpFamily1D")
            .field("theta_domain", &self.theta_domain)
            .field("u", &self.u_description)
            .finish()
    }
}

impl ExpFamily1D {
    pub fn new(
        eta: impl Fn(f64) -> f64 + Send + Sync + 'static,
        zeta: impl Fn(f64) -> f64 + Send + Sync + 'static,
        mean_of_u: impl Fn(f64) -> f64 + Send + Sync + 'static,
        theta_domain: (f64, f64),
        u_description: impl Into<String>,
    ) -> Self {
        Self {
            eta: Arc::new(eta),
            zeta: Arc::new(zeta),
            mean_of_u: Arc::new(mean_of_u),
            theta_domain,
            u_description: u_description.into(),
        }
    }

    /// Bernoulli in its mean `p`: `u(x) = x`.
    pub fn bernoulli() -> Self {
        Self::new(
            |p| (p / (1.0 - p)).ln(),
            |p| -(-p).ln_1p(),
            |p| p,
            (0.0, 1.0),
            "x",
        )
    }

    /// Poisson in its mean `lambda`: `u(x) = x`.
    pub fn poisson() -> Self {
        Self::new(|l| l.ln(), |l| l, |l| l, (0.0, f64::INFINITY), "x")
    }

    /// Gamma with fixed shape `k`, parameterized by scale: `u(x) = x / k`.
    pub fn gamma_scale(shape: f64) -> Self {
        Self::new(
            move |t| -shape / t,
            move |t| shape * t.ln(),
            |t| t,
            (0.0, f64::INFINITY),
            "x / k",
        )
    }

    /// Exponential tilts `C(t) exp(t x)` of the uniform density on `[0, 1]`.
    pub fn uniform_tilt() -> Self {
        Self::new(
            |t| t,
            uniform_tilt_log_normalizer,
            uniform_tilt_mean,
            (f64::NEG_INFINITY, f64::INFINITY),
            "x",
        )
    }

    pub fn eta(&self, theta: f64) -> f64 {
        (self.eta)(theta)
    }

    pub fn zeta(&self, theta: f64) -> f64 {
        (self.zeta)(theta)
    }

    pub fn mean_of_u(&self, theta: f64) -> f64 {
        (self.mean_of_u)(theta)
    }

    pub fn theta_domain(&self) -> (f64, f64) {
        self.theta_domain
    }

    pub fn u_description(&self) -> &str {
        &self.u_description
    }

    pub fn contains(&self, theta: f64) -> bool {
        theta > self.theta_domain.0 && theta < self.theta_domain.1
    }
}

/// `ln((e^t - 1) / t)`, continuous through `t = 0`.
pub fn uniform_tilt_log_normalizer(t: f64) -> f64 {
    if t.abs() < 1e-8 {
        t / 2.0
    } else if t > 30.0 {
        t + (-(-t).exp()).ln_1p() - t.ln()
    } else if t > 0.0 {
        (t.exp_m1() / t).ln()
    } else {
        (-t.exp_m1()).ln() - (-t).ln()
    }
}

/// Tilted mean `1 + 1/(e^t - 1) - 1/t`, continuous through `t = 0`.
pub fn uniform_tilt_mean(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        0.5 + t / 12.0 - t.powi(3) / 720.0
    } else if t > 30.0 {
        let q = (-t).exp();
        1.0 + q / (1.0 - q) - 1.0 / t
    } else {
        1.0 + 1.0 / t.exp_m1() - 1.0 / t
    }
}

/// `rho(z, vartheta) = [eta(theta) - eta(vartheta)] z - zeta(theta) + zeta(vartheta)`:
/// the log of the per-sample likelihood-ratio bound for a tilt `vartheta`.
pub fn rho(fam: &ExpFamily1D, z: f64, theta: f64, vartheta: f64) -> Result<f64> {
    if !fam.contains(theta) || !fam.contains(vartheta) {
        return domain(format!(
            "rho: parameters ({theta}, {vartheta}) outside {:?}",
            fam.theta_domain()
        ));
    }
    if theta == vartheta {
        return Ok(0.0);
    }
    Ok((fam.eta(theta) - fam.eta(vartheta)) * z - fam.zeta(theta) + fam.zeta(vartheta))
}

/// Candidate points spanning an open interval, increasing, for bracket search.
fn domain_ladder(lo: f64, hi: f64) -> Vec<f64> {
    let mut pts = Vec::new();
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => {
            let w = hi - lo;
            for k in (1..=60).rev() {
                pts.push(lo + w * 0.5f64.powi(k));
            }
            for k in 2..=60 {
                pts.push(hi - w * 0.5f64.powi(k));
            }
        }
        (true, false) => {
            for k in -60..=60 {
                pts.push(lo + 2f64.powi(k));
            }
        }
        (false, true) => {
            for k in (-60..=60).rev() {
                pts.push(hi - 2f64.powi(k));
            }
        }
        (false, false) => {
            for k in (-40..=10).rev() {
                pts.push(-(2f64.powi(k)));
            }
            pts.push(0.0);
            for k in -40..=10 {
                pts.push(2f64.powi(k));
            }
        }
    }
    pts.retain(|&x| x > lo && x < hi);
    pts.dedup();
    pts
}

/// Method-of-moments tilt: the `vartheta` with `mu(vartheta) = z`.
pub fn mom_param(fam: &ExpFamily1D, z: f64) -> Result<f64> {
    let (lo, hi) = fam.theta_domain();
    let g = |t: f64| fam.mean_of_u(t) - z;
    let pts = domain_ladder(lo, hi);
    let mut prev: Option<(f64, f64)> = None;
    for &t in &pts {
        let v = g(t);
        if !v.is_finite() {
            continue;
        }
        if v == 0.0 {
            return Ok(t);
        }
        if let Some((pt, pv)) = prev {
            if pv.signum() != v.signum() {
                let cfg = RootFindConfig {
                    rel_tol: 1e-15,
                    abs_tol: 1e-300,
                    max_iter: 400,
                };
                let root = find_root_bracketed(g, pt, t, &cfg)?;
                let tol = 1e-10 * z.abs().max(1.0);
                if g(root).abs() > tol {
                    return Err(Error::NoSolution(format!("mean equation residual too large at {root}")));
                }
                return Ok(root);
            }
        }
        prev = Some((t, v));
    }
    Err(Error::NoSolution(format!(
        "z = {z} outside the range of the mean map over {:?}",
        fam.theta_domain()
    )))
}

/// `1/2 + min(1/2, C * moment_ratio / sqrt(n))`.
pub fn berry_esseen_factor(n: u64, moment_ratio: f64, c: f64) -> Result<f64> {
    if n == 0 {
        return domain("berry_esseen_factor requires n >= 1");
    }
    if !(moment_ratio > 0.0) {
        return domain(format!("moment ratio must be positive, got {moment_ratio}"));
    }
    if !(c > 0.0 && c <= 0.5) {
        return domain(format!("Berry-Esseen constant must lie in (0, 0.5], got {c}"));
    }
    let delta = (c * moment_ratio / (n as f64).sqrt()).min(0.5);
    Ok(0.5 + delta)
}

/// Numerical `inf Lambda(vartheta)` over `[theta_lo, theta_hi]`, given
/// `log_lambda = ln Lambda`.
pub fn lr_infimum(log_lambda: impl Fn(f64) -> f64, theta_lo: f64, theta_hi: f64) -> Result<BoundReport> {
    let (arg, val) = minimize_scalar(
        log_lambda,
        theta_lo,
        theta_hi,
        DEFAULT_GRID_POINTS,
        &RootFindConfig::default(),
    )?;
    Ok(BoundReport::new(val, TiltParam::Scalar(arg), Method::Grid))
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN_M_07_05: f64 = -0.082_282_878_505_051_846;

    fn fd(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn rho_examples() {
        let b = ExpFamily1D::bernoulli();
        assert_eq!(rho(&b, 0.3, 0.4, 0.4).unwrap(), 0.0);
        assert!((rho(&b, 0.7, 0.5, 0.7).unwrap() - LN_M_07_05).abs() < 1e-15);
        let g = ExpFamily1D::gamma_scale(1.0);
        assert!((rho(&g, 2.0, 1.0, 2.0).unwrap() - (2f64.ln() - 1.0)).abs() < 1e-15);
        assert!(rho(&b, 0.5, 0.5, 1.2).is_err());
    }

    #[test]
    fn mom_examples() {
        assert!((mom_param(&ExpFamily1D::bernoulli(), 0.7).unwrap() - 0.7).abs() < 1e-12);
        let (k, theta, ratio) = (2.0, 1.5, 1.8);
        // u = x/k, so the moment condition is mu(t) = t = ratio * theta.
        let g = ExpFamily1D::gamma_scale(k);
        assert!((mom_param(&g, ratio * theta).unwrap() - ratio * theta).abs() < 1e-10);
        let alpha = 0.3;
        let gp = ExpFamily1D::new(
            |l| l.ln(),
            move |l| l / (1.0 - alpha),
            move |l| l / (1.0 - alpha),
            (0.0, f64::INFINITY),
            "x",
        );
        assert!((mom_param(&gp, 2.0).unwrap() - 1.4).abs() < 1e-10);
        let t = mom_param(&ExpFamily1D::uniform_tilt(), 0.75).unwrap();
        assert!((t - 3.593_511_969_447_426).abs() < 1e-9);
    }

    #[test]
    fn mom_out_of_range() {
        assert!(matches!(mom_param(&ExpFamily1D::bernoulli(), 1.3), Err(Error::NoSolution(_))));
        assert!(matches!(mom_param(&ExpFamily1D::poisson(), -1.0), Err(Error::NoSolution(_))));
    }

    #[test]
    fn berry_esseen_examples() {
        assert_eq!(berry_esseen_factor(3, 1e9, TYURIN_CONSTANT).unwrap(), 1.0);
        let ratio = (0.49 + 0.09) / 0.21f64.sqrt();
        let f = berry_esseen_factor(20, ratio, TYURIN_CONSTANT).unwrap();
        assert!((f - 0.635_420_773_622_703_2).abs() < 1e-14);
        let big = berry_esseen_factor(100_000_000, ratio, TYURIN_CONSTANT).unwrap();
        assert!(big > 0.5 && big - 0.5 < 1e-4);
        assert!(berry_esseen_factor(0, 1.0, 0.4).is_err());
        assert!(berry_esseen_factor(1, 1.0, 0.6).is_err());
    }

    #[test]
    fn berry_esseen_nonincreasing_in_n() {
        let mut prev = 1.0;
        for n in 1..2000 {
            let f = berry_esseen_factor(n, 2.3, TYURIN_CONSTANT).unwrap();
            assert!(f <= prev && f > 0.5);
            prev = f;
        }
    }

    #[test]
    fn lr_infimum_examples() {
        assert_eq!(lr_infimum(|_| 0.0, 0.0, 1.0).unwrap().log_bound, 0.0);

        let b = ExpFamily1D::bernoulli();
        let r = lr_infimum(|t| rho(&b, 0.7, 0.5, t).unwrap(), 0.5 + 1e-9, 0.99).unwrap();
        assert!((r.log_bound - LN_M_07_05).abs() < 1e-12);
        match r.vartheta_star {
            TiltParam::Scalar(t) => assert!((t - 0.7).abs() < 1e-5),
            _ => panic!("scalar tilt expected"),
        }

        let unif = |t: f64| 10.0 * (t.exp_m1().ln() - t.ln() - 0.75 * t);
        let r = lr_infimum(unif, 1e-6, 50.0).unwrap();
        assert!((r.bound() - 0.016_799_801_568_731_45).abs() < 1e-12);
    }

    #[test]
    fn exponential_family_identity() {
        // eta'(t) mu(t) = zeta'(t) by central differences.
        let cases: Vec<(ExpFamily1D, Vec<f64>)> = vec![
            (ExpFamily1D::bernoulli(), vec![0.1, 0.3, 0.5, 0.8]),
            (ExpFamily1D::poisson(), vec![0.2, 1.0, 7.5]),
            (ExpFamily1D::gamma_scale(2.5), vec![0.3, 1.0, 4.0]),
            (ExpFamily1D::uniform_tilt(), vec![-20.0, -1.0, 0.5, 3.0, 40.0]),
        ];
        for (fam, thetas) in cases {
            for t in thetas {
                let h = 1e-6 * t.abs().max(1.0);
                let lhs = fd(|x| fam.eta(x), t, h) * fam.mean_of_u(t);
                let rhs = fd(|x| fam.zeta(x), t, h);
                assert!(
                    (lhs - rhs).abs() <= 1e-6 * rhs.abs().max(1e-3),
                    "{fam:?} at {t}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn uniform_tilt_continuity() {
        for t in [-1e-3, -1e-5, 1e-5, 1e-3] {
            let direct = 1.0 + 1.0 / f64::exp_m1(t) - 1.0 / t;
            assert!((uniform_tilt_mean(t) - direct).abs() < 1e-9);
        }
        assert!((uniform_tilt_mean(0.0) - 0.5).abs() < 1e-15);
        assert!((uniform_tilt_mean(700.0) - (1.0 - 1.0 / 700.0)).abs() < 1e-15);
        assert!(uniform_tilt_log_normalizer(700.0).is_finite());
    }

    #[test]
    fn report_clamps() {
        let r = BoundReport::new(2.0, TiltParam::Scalar(0.0), Method::ClosedForm);
        assert_eq!(r.clamped(), 1.0);
        let s = r.clone().sharpened(0.5);
        assert!((s.bound() - 0.5 * 2f64.exp()).abs() < 1e-12);
        assert!((s.unsharpened_log_bound() - 2.0).abs() < 1e-15);
    }
}
