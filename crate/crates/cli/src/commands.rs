use std::io::Write;

use lrbounds::classical::{cantelli_bound, chebyshev_bound, chernoff_bound};
use lrbounds::distributions::{FamilyParams, Point};
use lrbounds::lr_bounds::{Direction, Optimizer};
use lrbounds::lr_core::{uniform_tilt_log_normalizer, BoundReport, ExpFamily1D};
use lrbounds::oracles::{
    binomial_exact_tail, gamma_sum_tail_exact, gen_poisson_sum_tail, irwin_hall_tail, rate_convergence_check,
    OracleEstimate, RatePoint,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::engine::{compute_bound, compute_oracle, BoundOptions, OracleChoice};
use crate::input::{parse_family, parse_point, Sweep};
use crate::table::{fmt_num, fmt_point, fmt_value};
use crate::CliError;

#[derive(Serialize)]
struct BoundOutput<'a> {
    family: &'a str,
    n: u64,
    dir: Direction,
    #[serde(flatten)]
    report: &'a BoundReport,
    bound: f64,
    bound_clamped: f64,
}

/// One-line JSON report for a single bound.
pub fn bound_json(family: &str, params: &Value, z: &Value, n: u64, dir: Direction, opts: &BoundOptions) -> Result<String, CliError> {
    let fp = parse_family(family, params)?;
    let point = parse_point(&fp, z)?;
    let report = compute_bound(&fp, n, &point, dir, opts)?;
    let out = BoundOutput {
        family: fp.name(),
        n,
        dir,
        report: &report,
        bound: report.bound(),
        bound_clamped: report.clamped(),
    };
    serde_json::to_string(&out).map_err(|e| CliError::Numeric(e.to_string()))
}

#[derive(Debug, Clone)]
pub struct VerifyRow {
    pub params: Vec<String>,
    pub dir: Direction,
    pub z: Point,
    pub n: u64,
    pub report: BoundReport,
    pub oracle: OracleEstimate,
    pub dominated: bool,
}

#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub param_names: Vec<String>,
    pub rows: Vec<VerifyRow>,
    /// Cases that could not be evaluated, as `(case label, message)`.
    pub errors: Vec<(String, String)>,
}

impl VerifyOutcome {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.dominated).count()
    }

    pub fn write_csv(&self, out: &mut dyn Write) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = self.param_names.clone();
        header.extend(
            [
                "dir",
                "z",
                "n",
                "valid",
                "bound",
                "bound_clamped",
                "oracle_kind",
                "oracle_lo",
                "oracle_est",
                "oracle_hi",
                "dominated",
            ]
            .map(String::from),
        );
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec = r.params.clone();
            rec.extend([
                r.dir.to_string(),
                fmt_point(&r.z),
                r.n.to_string(),
                r.report.valid.to_string(),
                fmt_num(r.report.bound()),
                fmt_num(r.report.clamped()),
                r.oracle.kind.to_string(),
                fmt_num(r.oracle.lower),
                fmt_num(r.oracle.estimate),
                fmt_num(r.oracle.upper),
                r.dominated.to_string(),
            ]);
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Evaluates every case of a sweep in parallel; row order is parameter set,
/// then `n`, then `z`, independent of scheduling.
///
/// With Monte Carlo, case `i` (in that order) uses seed `seed + i`.
pub fn verify_sweep(family: &str, sweep: &Sweep, choice: OracleChoice) -> Result<VerifyOutcome, CliError> {
    let sets = sweep.param_sets();
    let mut param_names: Vec<String> = match &sets[0] {
        Value::Object(m) => m.keys().cloned().collect(),
        Value::Null => Vec::new(),
        _ => return Err(CliError::Usage("sweep params must be JSON objects".into())),
    };
    param_names.sort();
    let opts = BoundOptions {
        method: sweep.method.unwrap_or(Optimizer::Mom),
        sharpen: sweep.sharpen,
    };

    let mut cases = Vec::new();
    for set in &sets {
        let fp = parse_family(family, set)?;
        let labels: Vec<String> = param_names
            .iter()
            .map(|k| set.get(k).map(fmt_value).unwrap_or_default())
            .collect();
        for &n in &sweep.n_grid {
            for zv in &sweep.z_grid {
                cases.push((fp.clone(), labels.clone(), n, parse_point(&fp, zv)?));
            }
        }
    }

    let dir = sweep.dir;
    let results: Vec<Result<VerifyRow, (String, String)>> = cases
        .par_iter()
        .enumerate()
        .map(|(i, (fp, labels, n, z))| {
            let choice = match choice {
                OracleChoice::MonteCarlo { samples, seed, workers } => OracleChoice::MonteCarlo {
                    samples,
                    seed: seed.wrapping_add(i as u64),
                    workers,
                },
                exact => exact,
            };
            let label = || format!("params=[{}] n={n} z={}", labels.join(","), fmt_point(z));
            let report = compute_bound(fp, *n, z, dir, &opts).map_err(|e| (label(), e.to_string()))?;
            let oracle = compute_oracle(fp, *n, z, dir, choice).map_err(|e| (label(), e.to_string()))?;
            Ok(VerifyRow {
                params: labels.clone(),
                dir,
                z: z.clone(),
                n: *n,
                dominated: oracle.dominated_by(report.bound()),
                report,
                oracle,
            })
        })
        .collect();

    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => errors.push(e),
        }
    }
    Ok(VerifyOutcome {
        param_names,
        rows,
        errors,
    })
}

/// Per-draw mean, variance, log-MGF, and the exponent range the Chernoff
/// search may use, for the families with a closed-form MGF.
struct Moments {
    mean: f64,
    variance: f64,
    log_mgf: Option<Box<dyn Fn(f64) -> f64 + Sync>>,
    t_max: f64,
}

fn moments(fp: &FamilyParams, dir: Direction) -> Result<Moments, CliError> {
    let upper = dir == Direction::Upper;
    let m = match fp {
        FamilyParams::Bernoulli(b) => {
            let p = b.p();
            Moments {
                mean: p,
                variance: p * (1.0 - p),
                log_mgf: Some(Box::new(move |t: f64| (1.0 - p + p * t.exp()).ln())),
                t_max: 60.0,
            }
        }
        FamilyParams::Gamma(g) => {
            let (k, th) = (g.shape(), g.scale());
            Moments {
                mean: k * th,
                variance: k * th * th,
                log_mgf: Some(Box::new(move |t: f64| -k * (-th * t).ln_1p())),
                t_max: if upper { (1.0 - 1e-9) / th } else { 1e3 / th },
            }
        }
        FamilyParams::Uniform(_) => Moments {
            mean: 0.5,
            variance: 1.0 / 12.0,
            log_mgf: Some(Box::new(uniform_tilt_log_normalizer)),
            t_max: 600.0,
        },
        FamilyParams::GenPoisson(g) => {
            let (l, a) = (g.lambda(), g.alpha());
            let log_mgf: Option<Box<dyn Fn(f64) -> f64 + Sync>> = if a == 0.0 {
                Some(Box::new(move |t: f64| l * t.exp_m1()))
            } else {
                None
            };
            Moments {
                mean: l / (1.0 - a),
                variance: l / (1.0 - a).powi(3),
                log_mgf,
                t_max: 20.0,
            }
        }
        other => {
            return Err(CliError::Usage(format!(
                "compare covers bernoulli, gamma, uniform and gen_poisson, not {}",
                other.name()
            )))
        }
    };
    Ok(m)
}

fn has_sharpened_form(fp: &FamilyParams) -> bool {
    match fp {
        FamilyParams::Bernoulli(_) | FamilyParams::Gamma(_) => true,
        FamilyParams::GenPoisson(g) => g.alpha() == 0.0,
        _ => false,
    }
}

fn opt_num(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

/// CSV of classical baselines next to the likelihood-ratio bounds for the
/// mean of `n` draws. Empty cells mark bounds with no closed form.
pub fn compare_csv(
    family: &str,
    params: &Value,
    z_grid: &[f64],
    n: u64,
    dir: Direction,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let fp = parse_family(family, params)?;
    let m = moments(&fp, dir)?;
    let nf = n as f64;
    let sign = if dir == Direction::Upper { 1.0 } else { -1.0 };
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "z",
        "chebyshev",
        "chebyshev_clamped",
        "cantelli",
        "chernoff",
        "lr",
        "lr_clamped",
        "lr_sharpened",
        "lr_sharpened_clamped",
    ])?;
    for &z in z_grid {
        let point = Point::Scalar(z);
        let plain = compute_bound(&fp, n, &point, dir, &BoundOptions::default())?;
        let sharp = compute_bound(
            &fp,
            n,
            &point,
            dir,
            &BoundOptions {
                method: Optimizer::Mom,
                sharpen: true,
            },
        )?;
        let sharp = has_sharpened_form(&fp).then(|| sharp.bound());
        let eps = sign * (z - m.mean);
        let (cheb, cant, chern) = if eps > 0.0 {
            let var = m.variance / nf;
            let chern = match &m.log_mgf {
                // Mean of n draws: K_mean(s) = n K(±s/n).
                Some(k) => Some(chernoff_bound(|s| nf * k(sign * s / nf), sign * z, 0.0, nf * m.t_max)?.bound()),
                None => None,
            };
            (chebyshev_bound(var, 2.0, eps)?, cantelli_bound(var, eps)?, chern)
        } else {
            (1.0, 1.0, m.log_mgf.as_ref().map(|_| 1.0))
        };
        w.write_record([
            fmt_num(z),
            fmt_num(cheb),
            fmt_num(cheb.min(1.0)),
            fmt_num(cant),
            opt_num(chern),
            fmt_num(plain.bound()),
            fmt_num(plain.clamped()),
            opt_num(sharp),
            opt_num(sharp.map(|b| b.min(1.0))),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Rate-function gaps `rho(z) - (1/n) ln P{mean >= z}` for the families
/// with an exact upper-tail oracle.
pub fn rate_points(family: &str, params: &Value, z: f64, n_list: &[u64]) -> Result<Vec<RatePoint>, CliError> {
    let fp = parse_family(family, params)?;
    let points = match &fp {
        FamilyParams::Bernoulli(b) => {
            let p = b.p();
            check_rate_side(z, p)?;
            rate_convergence_check(&ExpFamily1D::bernoulli(), p, z, n_list, |n| {
                binomial_exact_tail(n, p, z, Direction::Upper)
            })?
        }
        FamilyParams::GenPoisson(g) if g.alpha() == 0.0 => {
            check_rate_side(z, g.lambda())?;
            rate_convergence_check(&ExpFamily1D::poisson(), g.lambda(), z, n_list, |n| {
                gen_poisson_sum_tail(n, g, z, Direction::Upper)
            })?
        }
        FamilyParams::Gamma(g) => {
            check_rate_side(z, g.mean())?;
            let fam = ExpFamily1D::gamma_scale(g.shape());
            rate_convergence_check(&fam, g.scale(), z / g.shape(), n_list, |n| {
                gamma_sum_tail_exact(n, g, z, Direction::Upper)
            })?
        }
        FamilyParams::Uniform(_) => {
            check_rate_side(z, 0.5)?;
            rate_convergence_check(&ExpFamily1D::uniform_tilt(), 0.0, z, n_list, |n| irwin_hall_tail(n, z))?
        }
        other => {
            return Err(CliError::Usage(format!(
                "rate covers bernoulli, gamma, uniform and gen_poisson with alpha = 0, not {}",
                other.name()
            )))
        }
    };
    Ok(points)
}

fn check_rate_side(z: f64, mean: f64) -> Result<(), CliError> {
    if z < mean {
        return Err(CliError::Usage(format!("rate needs z >= mean ({mean}), got {z}")));
    }
    Ok(())
}

pub fn rate_csv(points: &[RatePoint], out: &mut dyn Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "log_tail_over_n", "rho", "gap"])?;
    for p in points {
        w.write_record([p.n.to_string(), fmt_num(p.log_tail_over_n), fmt_num(p.rho), fmt_num(p.gap)])?;
    }
    w.flush()?;
    Ok(())
}
