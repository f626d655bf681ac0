//! Bounds against exact oracles over randomized parameters.

use lrbounds::distributions::{BernoulliParams, GammaParams, GenPoissonParams, HypergeomParams, MultinomialParams, FamilyParams};
use lrbounds::lr_bounds::{
    bernoulli_bound, gamma_bound, gen_poisson_bound, hypergeom_bound, multinomial_bound, uniform_mean_upper_bound,
    Direction, Optimizer,
};
use lrbounds::oracles::{
    binomial_exact_tail, enumerate_tail, gamma_sum_tail_exact, gen_poisson_sum_tail, hypergeom_exact_tail,
    irwin_hall_tail,
};
use proptest::prelude::*;

fn dir_strategy() -> impl Strategy<Value = Direction> {
    prop_oneof![Just(Direction::Upper), Just(Direction::Lower)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bernoulli_dominates(n in 1u64..300, p in 0.02f64..0.98, u in 0.0f64..1.0, dir in dir_strategy(), sharpen in any::<bool>()) {
        let z = match dir {
            Direction::Upper => p + (1.0 - p) * u,
            Direction::Lower => p * u,
        };
        let b = bernoulli_bound(n, &BernoulliParams::new(p).unwrap(), z, dir, sharpen).unwrap();
        let e = binomial_exact_tail(n, p, z, dir).unwrap();
        prop_assert!(e.dominated_by(b.bound()), "bound {} exact {}", b.bound(), e.estimate);
    }

    #[test]
    fn hypergeometric_dominates(big_n in 2u64..120, fr in 0.0f64..1.0, fd in 0.0f64..1.0, fx in 0.0f64..1.0, dir in dir_strategy()) {
        let marked = 1 + ((big_n - 1) as f64 * fr) as u64;
        let draws = 1 + ((big_n - 1) as f64 * fd) as u64;
        let h = HypergeomParams::new(big_n, marked.min(big_n), draws.min(big_n)).unwrap();
        let (lo, hi) = h.support();
        let r = lo + ((hi - lo) as f64 * fx).round() as u64;
        if let Ok(b) = hypergeom_bound(&h, r, dir) {
            let e = hypergeom_exact_tail(&h, r, dir).unwrap();
            prop_assert!(e.dominated_by(b.bound()), "bound {} exact {}", b.bound(), e.estimate);
        }
    }

    #[test]
    fn gen_poisson_dominates(n in 1u64..30, lambda in 0.2f64..5.0, alpha in 0.0f64..0.6, f in 0.1f64..3.0, mle in any::<bool>()) {
        let g = GenPoissonParams::new(lambda, alpha).unwrap();
        let z = f * lambda / (1.0 - alpha);
        let dir = if f >= 1.0 { Direction::Upper } else { Direction::Lower };
        let method = if mle { Optimizer::Mle } else { Optimizer::Mom };
        let b = gen_poisson_bound(n, &g, z, dir, method).unwrap();
        let e = gen_poisson_sum_tail(n, &g, z, dir).unwrap();
        prop_assert!(e.dominated_by(b.bound()), "bound {} oracle lo {}", b.bound(), e.lower);
    }

    #[test]
    fn gamma_dominates(n in 1u64..200, k in 0.2f64..20.0, theta in 0.1f64..5.0, ratio in 0.05f64..4.0, sharpen in any::<bool>()) {
        let g = GammaParams::new(k, theta).unwrap();
        let dir = if ratio >= 1.0 { Direction::Upper } else { Direction::Lower };
        let b = gamma_bound(n, &g, ratio, dir, sharpen).unwrap();
        let e = gamma_sum_tail_exact(n, &g, ratio * k * theta, dir).unwrap();
        prop_assert!(b.bound() >= e.estimate - 1e-10, "bound {} exact {}", b.bound(), e.estimate);
    }

    #[test]
    fn uniform_dominates(n in 1u64..40, z in 0.5f64..0.999) {
        let b = uniform_mean_upper_bound(n, z).unwrap();
        let e = irwin_hall_tail(n, z).unwrap();
        prop_assert!(e.dominated_by(b.bound()), "bound {} exact {}", b.bound(), e.estimate);
    }

    #[test]
    fn multinomial_dominates(n in 1u64..10, a in 0.05f64..1.0, b in 0.05f64..1.0, c in 0.05f64..1.0, i in 0u64..10, j in 0u64..10, dir in dir_strategy()) {
        let s = a + b + c;
        let m = MultinomialParams::new(vec![a / s, b / s, c / s], n).unwrap();
        let (x1, x2) = (i.min(n), j.min(n - i.min(n)));
        let z = [n - x1 - x2, x1, x2];
        let bound = multinomial_bound(&m, &z, dir).unwrap();
        let e = enumerate_tail(&FamilyParams::Multinomial(m), &z, dir).unwrap();
        prop_assert!(e.dominated_by(bound.bound()), "bound {} exact {}", bound.bound(), e.estimate);
    }
}
