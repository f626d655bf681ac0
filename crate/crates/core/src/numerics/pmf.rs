//! Log-probability mass functions accurate to a few ulps for large counts,
//! after Loader's saddle-point expansion ("Fast and Accurate Computation of
//! Binomial Probabilities", 2000).

use std::f64::consts::PI;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `ln n! - [(n + 1/2) ln n - n + ln sqrt(2π)]` for integer `n >= 1`.
fn stirlerr(n: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n <= 15 {
        let nf = n as f64;
        let ln_fact: f64 = (2..=n).map(|i| (i as f64).ln()).sum();
        return ln_fact - (nf + 0.5) * nf.ln() + nf - LN_SQRT_2PI;
    }
    let nf = n as f64;
    let nn = nf * nf;
    if n > 500 {
        (S0 - S1 / nn) / nf
    } else if n > 80 {
        (S0 - (S1 - S2 / nn) / nn) / nf
    } else if n > 35 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / nf
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / nf
    }
}

/// Deviance term `x ln(x/m) + m - x`, accurate when `x` is close to `m`.
fn bd0(x: f64, m: f64) -> f64 {
    if (x - m).abs() < 0.1 * (x + m) {
        let mut v = (x - m) / (x + m);
        let mut s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1..1000 {
            ej *= v;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        s
    } else {
        x * (x / m).ln() + m - x
    }
}

/// `ln P{Bin(n, p) = k}`.
pub fn binom_log_pmf(k: u64, n: u64, p: f64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let q = 1.0 - p;
    if p == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if q == 0.0 {
        return if k == n { 0.0 } else { f64::NEG_INFINITY };
    }
    let nf = n as f64;
    if k == 0 {
        return nf * (-p).ln_1p();
    }
    if k == n {
        return nf * p.ln();
    }
    let kf = k as f64;
    let lc = stirlerr(n) - stirlerr(k) - stirlerr(n - k) - bd0(kf, nf * p) - bd0(nf - kf, nf * q);
    let lf = (2.0 * PI).ln() + kf.ln() + (-kf / nf).ln_1p();
    lc - 0.5 * lf
}

/// `ln P{Pois(lambda) = k}`.
pub fn poisson_log_pmf(k: u64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if k == 0 {
        return -lambda;
    }
    let kf = k as f64;
    -stirlerr(k) - bd0(kf, lambda) - 0.5 * (2.0 * PI * kf).ln()
}

/// `ln P{X = x}` for the hypergeometric law: `x` marked among `n` draws from
/// `marked + unmarked` units.
pub fn hypergeom_log_pmf_exact(x: u64, marked: u64, unmarked: u64, n: u64) -> f64 {
    if x > marked || x > n || n - x > unmarked {
        return f64::NEG_INFINITY;
    }
    let total = marked + unmarked;
    if n == 0 || n == total {
        return 0.0;
    }
    let p = n as f64 / total as f64;
    binom_log_pmf(x, marked, p) + binom_log_pmf(n - x, unmarked, p) - binom_log_pmf(n, total, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ln_factorial;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn binomial_exact_values() {
        // C(20,14) = 38760.
        assert!(rel(binom_log_pmf(14, 20, 0.5).exp(), 38760.0 / 1_048_576.0) < 1e-14);
        assert!(rel(binom_log_pmf(0, 7, 0.3).exp(), 0.7f64.powi(7)) < 1e-14);
        assert_eq!(binom_log_pmf(8, 7, 0.3), f64::NEG_INFINITY);
        for n in [1u64, 5, 16, 40, 90] {
            let total: f64 = (0..=n).map(|k| binom_log_pmf(k, n, 0.37).exp()).sum();
            assert!((total - 1.0).abs() < 1e-14, "n = {n}");
        }
    }

    #[test]
    fn binomial_matches_factorials() {
        for (k, n, p) in [(3u64, 10u64, 0.2f64), (17, 30, 0.6), (250, 1000, 0.25)] {
            let direct = ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
                + k as f64 * p.ln()
                + (n - k) as f64 * (1.0 - p).ln();
            assert!((binom_log_pmf(k, n, p) - direct).abs() < 1e-9 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn poisson_values() {
        assert!(rel(poisson_log_pmf(3, 2.0).exp(), 8.0 / 6.0 * (-2.0f64).exp()) < 1e-14);
        let total: f64 = (0..200).map(|k| poisson_log_pmf(k, 30.0).exp()).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hypergeometric_values() {
        assert!(rel(hypergeom_log_pmf_exact(1, 5, 5, 4).exp(), 50.0 / 210.0) < 1e-14);
        assert!(rel(hypergeom_log_pmf_exact(4, 5, 5, 4).exp(), 5.0 / 210.0) < 1e-14);
        assert_eq!(hypergeom_log_pmf_exact(5, 5, 5, 4), f64::NEG_INFINITY);
        let total: f64 = (0..=60).map(|x| hypergeom_log_pmf_exact(x, 70, 130, 60).exp()).sum();
        assert!((total - 1.0).abs() < 1e-13);
    }
}
