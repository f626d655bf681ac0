//! Special functions, signed-log arithmetic, and scalar root finding /
//! minimization shared by the rest of the crate.

mod optimize;
mod pmf;
mod signed_log;
mod special;

pub use optimize::{find_root_bracketed, minimize_scalar, RootFindConfig, DEFAULT_GRID_POINTS};
pub use pmf::{binom_log_pmf, hypergeom_log_pmf_exact, poisson_log_pmf};
pub use signed_log::{signed_log_gen_binom, SignedLogValue};
pub use special::{log_gamma, log_sum_exp, reg_gamma_lower, reg_gamma_upper};

/// Compensated (Neumaier) running sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `ln C(n, k)` for integers, `-inf` when `k > n`.
pub(crate) fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    if k <= 30 {
        return signed_log_gen_binom(n as f64, k).log_mag();
    }
    // Arguments are >= 1, so log_gamma cannot fail.
    let lg = |x: u64| log_gamma(x as f64).unwrap_or(f64::NAN);
    lg(n + 1) - lg(k + 1) - lg(n - k + 1)
}

/// `ln x!`.
pub(crate) fn ln_factorial(x: u64) -> f64 {
    log_gamma(x as f64 + 1.0).unwrap_or(f64::NAN)
}
