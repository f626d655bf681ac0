use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{OracleEstimate, OracleKind};
use crate::distributions::{spd_factor, FamilyParams, Point, RngState, Sampler};
use crate::error::{domain, Error, Result};
use crate::lr_bounds::Direction;

/// Normal quantile for a two-sided 99.7% interval.
pub const WILSON_Z: f64 = 3.0;

const MIN_SAMPLES: u64 = 1000;
const EVENT_SLACK: f64 = 1e-9;

/// Wilson score interval for `hits` successes out of `trials`.
pub fn wilson_interval(hits: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0).min(p), (center + half).min(1.0).max(p))
}

fn scalar_event(sum: f64, target: f64, dir: Direction) -> bool {
    let tol = EVENT_SLACK * target.abs().max(1.0);
    match dir {
        Direction::Upper => sum >= target - tol,
        Direction::Lower => sum <= target + tol,
    }
}

enum Threshold {
    Scalar(f64),
    Vector(Vec<f64>),
    Matrix(DMatrix<f64>),
}

/// Thresholds are scaled by `n` so events are tested on sums.
fn threshold(z: &Point, n: f64) -> Threshold {
    match z {
        Point::Scalar(v) => Threshold::Scalar(v * n),
        Point::Vector(v) => Threshold::Vector(v.iter().map(|x| x * n).collect()),
        Point::Matrix(m) => Threshold::Matrix(m * n),
    }
}

fn check_shape(family: &FamilyParams, z: &Point) -> Result<()> {
    let ok = match (family, z) {
        (
            FamilyParams::Bernoulli(_)
            | FamilyParams::Hypergeometric(_)
            | FamilyParams::GenPoisson(_)
            | FamilyParams::Gamma(_)
            | FamilyParams::Uniform(_),
            Point::Scalar(_),
        ) => true,
        (FamilyParams::MultiHyper(p), Point::Vector(v)) => v.len() == p.dim(),
        (FamilyParams::InvHyper(p), Point::Vector(v)) => v.len() == p.dim(),
        (FamilyParams::Multinomial(p), Point::Vector(v)) => v.len() == p.dim(),
        (FamilyParams::NegMultinomial(p), Point::Vector(v)) => v.len() == p.dim(),
        (FamilyParams::Dirichlet(p), Point::Vector(v)) => v.len() == p.dim(),
        (FamilyParams::MatrixGamma(p), Point::Matrix(m)) => m.nrows() == p.dim() && m.ncols() == p.dim(),
        _ => false,
    };
    if !ok {
        return Err(Error::InvalidPoint(format!(
            "threshold shape does not match the {} family",
            family.name()
        )));
    }
    Ok(())
}

fn count_hits(sampler: &Sampler, n: u64, target: &Threshold, dir: Direction, samples: u64, rng: &mut RngState) -> u64 {
    let mut hits = 0;
    for _ in 0..samples {
        let hit = match target {
            Threshold::Scalar(t) => {
                let mut s = 0.0;
                for _ in 0..n {
                    if let Point::Scalar(x) = sampler.draw(rng) {
                        s += x;
                    }
                }
                scalar_event(s, *t, dir)
            }
            Threshold::Vector(t) => {
                let mut s = vec![0.0; t.len()];
                for _ in 0..n {
                    if let Point::Vector(x) = sampler.draw(rng) {
                        for (a, b) in s.iter_mut().zip(&x) {
                            *a += b;
                        }
                    }
                }
                (1..t.len()).all(|i| scalar_event(s[i], t[i], dir))
            }
            Threshold::Matrix(t) => {
                let mut s = DMatrix::<f64>::zeros(t.nrows(), t.ncols());
                for _ in 0..n {
                    if let Point::Matrix(x) = sampler.draw(rng) {
                        s += x;
                    }
                }
                let diff = match dir {
                    Direction::Upper => s - t,
                    Direction::Lower => t - s,
                };
                spd_factor(&diff).is_ok()
            }
        };
        hits += hit as u64;
    }
    hits
}

/// Monte-Carlo estimate of `P{mean of n draws ≻ z}` (or `≺`) with a 99.7%
/// Wilson bracket.
///
/// Work is split into `workers` shards; shard `w` draws
/// `samples / workers` samples (plus one for `w < samples % workers`) from
/// stream `w` of `seed`. The result depends only on `(seed, workers)`, not
/// on the thread pool.
pub fn mc_tail(
    family: &FamilyParams,
    n: u64,
    z: &Point,
    dir: Direction,
    samples: u64,
    seed: u64,
    workers: usize,
) -> Result<OracleEstimate> {
    if samples < MIN_SAMPLES {
        return domain(format!("Monte Carlo needs at least {MIN_SAMPLES} samples, got {samples}"));
    }
    if n == 0 || workers == 0 {
        return domain("n and the worker count must be positive");
    }
    check_shape(family, z)?;
    let sampler = Sampler::new(family)?;
    let target = threshold(z, n as f64);
    let per = samples / workers as u64;
    let extra = samples % workers as u64;
    let hits: u64 = (0..workers)
        .into_par_iter()
        .map(|w| {
            let share = per + u64::from((w as u64) < extra);
            let mut rng = RngState::new(seed, w as u64);
            count_hits(&sampler, n, &target, dir, share, &mut rng)
        })
        .sum();
    let (lower, upper) = wilson_interval(hits, samples, WILSON_Z);
    Ok(OracleEstimate {
        estimate: hits as f64 / samples as f64,
        lower,
        upper,
        kind: OracleKind::MonteCarlo,
        detail: format!("{hits}/{samples} hits, Wilson z={WILSON_Z}, seed {seed}, {workers} workers"),
    })
}
