use super::OracleEstimate;
use crate::distributions::{multi_hyper_log_pmf, multinomial_log_pmf, FamilyParams};
use crate::error::{Error, Result};
use crate::lr_bounds::Direction;
use crate::numerics::{ln_choose, KahanSum};

const MAX_COMPOSITIONS: f64 = 1e7;

/// Exact probability of `{x ≻ z}` or `{x ≺ z}` (indices `1..`) by summing
/// the mass of every lattice point, for the multivariate hypergeometric and
/// multinomial families.
pub fn enumerate_tail(family: &FamilyParams, z: &[u64], dir: Direction) -> Result<OracleEstimate> {
    let (n, dim) = match family {
        FamilyParams::MultiHyper(m) => (m.draws(), m.dim()),
        FamilyParams::Multinomial(m) => (m.trials(), m.dim()),
        other => {
            return Err(Error::Unsupported(format!("enumeration does not cover {}", other.name())));
        }
    };
    if z.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: z.len(),
        });
    }
    let count = ln_choose(n + dim as u64 - 1, dim as u64 - 1).exp();
    if count > MAX_COMPOSITIONS {
        return Err(Error::Infeasible(format!("{count:.3e} lattice points exceed the enumeration cap")));
    }
    let log_pmf = |x: &[u64]| -> Result<f64> {
        match family {
            FamilyParams::MultiHyper(m) => multi_hyper_log_pmf(m.classes(), m.total(), x),
            FamilyParams::Multinomial(m) => Ok(multinomial_log_pmf(m.probs(), x)),
            _ => unreachable!(),
        }
    };
    let inside = |i: usize, v: u64| match dir {
        Direction::Upper => v >= z[i],
        Direction::Lower => v <= z[i],
    };

    // Walk x_1..x_κ with sum <= n; x_0 takes the remainder.
    let mut x = vec![0u64; dim];
    let mut acc = KahanSum::default();
    let mut terms = 0usize;
    loop {
        let used: u64 = x[1..].iter().sum();
        if used <= n && (1..dim).all(|i| inside(i, x[i])) {
            x[0] = n - used;
            acc.add(log_pmf(&x)?.exp());
            terms += 1;
        }
        // Odometer increment over indices 1..dim, resetting when the partial
        // sum would exceed n.
        let mut i = dim - 1;
        loop {
            if i == 0 {
                return Ok(OracleEstimate::exact(acc.value(), terms, format!("{terms} lattice points")));
            }
            x[i] += 1;
            if x[1..].iter().sum::<u64>() <= n {
                break;
            }
            x[i] = 0;
            i -= 1;
        }
    }
}
