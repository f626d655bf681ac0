//! Exact samplers for every family.
//!
//! Random numbers come from ChaCha8 keyed by a 64-bit seed, with the 64-bit
//! stream id selecting an independent keystream.

use nalgebra::DMatrix;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, Gamma, StandardNormal};

use super::family::{gen_poisson_log_pmf, hypergeom_log_pmf, FamilyParams, Point};
use crate::error::{Error, Result};

/// Generator state; `(seed, stream)` fully determines the output sequence.
#[derive(Debug, Clone)]
pub struct RngState {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngState {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

impl RngCore for RngState {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Cumulative table over a lattice support starting at `offset`.
#[derive(Debug, Clone)]
struct CdfTable {
    offset: u64,
    cdf: Vec<f64>,
}

impl CdfTable {
    fn draw(&self, rng: &mut impl Rng) -> u64 {
        let u: f64 = rng.random();
        // Mass beyond the table (< 1e-15 for truncated supports) maps to its end.
        let idx = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        self.offset + idx as u64
    }
}

/// Urn process behind the (inverse) generalized hypergeometric families.
#[derive(Debug, Clone)]
enum Urn {
    /// Positive integer class sizes, drawn without replacement.
    WithoutReplacement(Vec<f64>),
    /// All-negative class sizes: a Polya urn with weights `-C_i`, each draw
    /// adding one unit to its class.
    Polya(Vec<f64>),
}

impl Urn {
    fn new(classes: &[f64]) -> Result<Self> {
        if classes.iter().all(|&c| c > 0.0 && c == c.trunc()) {
            Ok(Urn::WithoutReplacement(classes.to_vec()))
        } else if classes.iter().all(|&c| c < 0.0) {
            Ok(Urn::Polya(classes.iter().map(|c| -c).collect()))
        } else {
            Err(Error::Unsupported(
                "urn sampling needs positive-integer or all-negative class sizes".into(),
            ))
        }
    }

    fn draw_one(weights: &mut [f64], total: &mut f64, step: f64, rng: &mut impl Rng) -> usize {
        let u = rng.random::<f64>() * *total;
        let mut acc = 0.0;
        let mut pick = weights.len() - 1;
        for (i, &w) in weights.iter().enumerate() {
            acc += w;
            if u < acc {
                pick = i;
                break;
            }
        }
        weights[pick] += step;
        *total += step;
        pick
    }

    fn weights(&self) -> (Vec<f64>, f64) {
        let w = match self {
            Urn::WithoutReplacement(c) | Urn::Polya(c) => c.clone(),
        };
        let total = w.iter().sum();
        (w, total)
    }

    fn step(&self) -> f64 {
        match self {
            Urn::WithoutReplacement(_) => -1.0,
            Urn::Polya(_) => 1.0,
        }
    }

    fn draw_fixed(&self, draws: u64, rng: &mut impl Rng) -> Vec<f64> {
        let (mut w, mut total) = self.weights();
        let mut counts = vec![0.0; w.len()];
        for _ in 0..draws {
            counts[Self::draw_one(&mut w, &mut total, self.step(), rng)] += 1.0;
        }
        counts
    }

    fn draw_until(&self, stop_count: u64, rng: &mut impl Rng) -> Vec<f64> {
        let (mut w, mut total) = self.weights();
        let mut counts = vec![0.0; w.len()];
        while counts[0] < stop_count as f64 {
            counts[Self::draw_one(&mut w, &mut total, self.step(), rng)] += 1.0;
        }
        counts
    }
}

fn categorical(cum: &[f64], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.random();
    cum.partition_point(|&c| c <= u).min(cum.len() - 1)
}

fn cumulative(p: &[f64]) -> Vec<f64> {
    p.iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

#[derive(Debug, Clone)]
enum Kind {
    Bernoulli(f64),
    Lattice(CdfTable),
    Gamma(Gamma<f64>),
    Uniform,
    MultiHyper { urn: Urn, draws: u64 },
    InvHyper { urn: Urn, stop_count: u64 },
    Multinomial { cum: Vec<f64>, trials: u64 },
    NegMultinomial { cum: Vec<f64>, stop_count: u64 },
    Dirichlet(Vec<Gamma<f64>>),
    MatrixGamma { factor: DMatrix<f64>, chi2: Vec<ChiSquared<f64>> },
}

/// Sampler with per-family precomputation (cumulative tables, factors).
/// Immutable once built; safe to share across threads.
#[derive(Debug, Clone)]
pub struct Sampler {
    kind: Kind,
}

const GP_TABLE_TAIL: f64 = 1e-15;
const GP_TABLE_CAP: u64 = 10_000_000;

impl Sampler {
    pub fn new(params: &FamilyParams) -> Result<Self> {
        let kind = match params {
            FamilyParams::Bernoulli(b) => Kind::Bernoulli(b.p()),
            FamilyParams::Hypergeometric(h) => {
                let (lo, hi) = h.support();
                let probs: Vec<f64> = (lo..=hi).map(|x| hypergeom_log_pmf(h, x).exp()).collect();
                Kind::Lattice(CdfTable {
                    offset: lo,
                    cdf: cumulative(&probs),
                })
            }
            FamilyParams::GenPoisson(g) => {
                let mut cdf = Vec::new();
                let mut acc = 0.0;
                let mut x = 0;
                while acc < 1.0 - GP_TABLE_TAIL && x < GP_TABLE_CAP {
                    acc += gen_poisson_log_pmf(g.lambda(), g.alpha(), x).exp();
                    cdf.push(acc);
                    x += 1;
                }
                Kind::Lattice(CdfTable { offset: 0, cdf })
            }
            FamilyParams::Gamma(g) => Kind::Gamma(
                Gamma::new(g.shape(), g.scale()).map_err(|e| Error::InvalidParams(e.to_string()))?,
            ),
            FamilyParams::Uniform(_) => Kind::Uniform,
            FamilyParams::MultiHyper(m) => Kind::MultiHyper {
                urn: Urn::new(m.classes())?,
                draws: m.draws(),
            },
            FamilyParams::InvHyper(m) => Kind::InvHyper {
                urn: Urn::new(m.classes())?,
                stop_count: m.stop_count(),
            },
            FamilyParams::Multinomial(m) => Kind::Multinomial {
                cum: cumulative(m.probs()),
                trials: m.trials(),
            },
            FamilyParams::NegMultinomial(m) => Kind::NegMultinomial {
                cum: cumulative(m.probs()),
                stop_count: m.stop_count(),
            },
            FamilyParams::Dirichlet(d) => Kind::Dirichlet(
                d.alpha()
                    .iter()
                    .map(|&a| Gamma::new(a, 1.0).map_err(|e| Error::InvalidParams(e.to_string())))
                    .collect::<Result<_>>()?,
            ),
            FamilyParams::MatrixGamma(mg) => {
                // Wishart with 2*alpha degrees of freedom and scale (beta/2) Sigma.
                let p = mg.dim();
                let dof = 2.0 * mg.alpha();
                if !(dof > p as f64 - 1.0) {
                    return Err(Error::Unsupported(format!(
                        "matrix gamma sampling needs 2*alpha > p-1, got alpha={}, p={p}",
                        mg.alpha()
                    )));
                }
                let factor = mg.sigma_chol() * (mg.beta() / 2.0).sqrt();
                let chi2 = (0..p)
                    .map(|i| ChiSquared::new(dof - i as f64).map_err(|e| Error::InvalidParams(e.to_string())))
                    .collect::<Result<_>>()?;
                Kind::MatrixGamma { factor, chi2 }
            }
        };
        Ok(Self { kind })
    }

    pub fn draw(&self, rng: &mut RngState) -> Point {
        match &self.kind {
            Kind::Bernoulli(p) => Point::Scalar(if rng.random::<f64>() < *p { 1.0 } else { 0.0 }),
            Kind::Lattice(t) => Point::Scalar(t.draw(rng) as f64),
            Kind::Gamma(g) => Point::Scalar(g.sample(rng)),
            Kind::Uniform => Point::Scalar(rng.random()),
            Kind::MultiHyper { urn, draws } => Point::Vector(urn.draw_fixed(*draws, rng)),
            Kind::InvHyper { urn, stop_count } => Point::Vector(urn.draw_until(*stop_count, rng)),
            Kind::Multinomial { cum, trials } => {
                let mut x = vec![0.0; cum.len()];
                for _ in 0..*trials {
                    x[categorical(cum, rng)] += 1.0;
                }
                Point::Vector(x)
            }
            Kind::NegMultinomial { cum, stop_count } => {
                let mut x = vec![0.0; cum.len()];
                while x[0] < *stop_count as f64 {
                    x[categorical(cum, rng)] += 1.0;
                }
                Point::Vector(x)
            }
            Kind::Dirichlet(gammas) => {
                let mut x: Vec<f64> = gammas.iter().map(|g| g.sample(rng)).collect();
                let s: f64 = x.iter().sum();
                x.iter_mut().for_each(|v| *v /= s);
                Point::Vector(x)
            }
            Kind::MatrixGamma { factor, chi2 } => {
                // Bartlett: W = L A A^T L^T with A lower triangular.
                let p = chi2.len();
                let mut a = DMatrix::<f64>::zeros(p, p);
                for i in 0..p {
                    a[(i, i)] = chi2[i].sample(rng).sqrt();
                    for j in 0..i {
                        a[(i, j)] = StandardNormal.sample(rng);
                    }
                }
                let la = factor * a;
                Point::Matrix(&la * la.transpose())
            }
        }
    }
}

/// One exact draw. Builds the sampler each call; use [`Sampler`] directly
/// for repeated draws.
pub fn draw_sample(params: &FamilyParams, rng: &mut RngState) -> Result<Point> {
    Ok(Sampler::new(params)?.draw(rng))
}
