//! JSON inputs: family parameter objects, thresholds, and sweep files.

use lrbounds::distributions::{
    BernoulliParams, DirichletParams, FamilyParams, GammaParams, GenPoissonParams, HypergeomParams, InvHyperParams,
    MatrixGammaParams, MultiHyperParams, MultinomialParams, NegMultinomialParams, Point, UnitUniform,
};
use lrbounds::lr_bounds::{Direction, Optimizer};
use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

/// Names accepted by `--family`.
pub const FAMILY_NAMES: &[&str] = &[
    "bernoulli",
    "hypergeometric",
    "gen_poisson",
    "gamma",
    "uniform",
    "multi_hypergeom",
    "inv_hypergeom",
    "multinomial",
    "neg_multinomial",
    "dirichlet",
    "matrix_gamma",
];

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Bernoulli {
    p: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Hypergeometric {
    #[serde(alias = "N")]
    population: u64,
    #[serde(alias = "R")]
    marked: u64,
    #[serde(alias = "n")]
    draws: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GenPoisson {
    lambda: f64,
    #[serde(default)]
    alpha: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Gamma {
    #[serde(alias = "k")]
    shape: f64,
    #[serde(alias = "theta", default = "one")]
    scale: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Uniform {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MultiHyper {
    #[serde(alias = "C")]
    classes: Vec<f64>,
    #[serde(alias = "n")]
    draws: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InvHyper {
    #[serde(alias = "C")]
    classes: Vec<f64>,
    #[serde(alias = "gamma")]
    stop_count: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Multinomial {
    #[serde(alias = "p")]
    probs: Vec<f64>,
    #[serde(alias = "n")]
    trials: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NegMultinomial {
    #[serde(alias = "p")]
    probs: Vec<f64>,
    #[serde(alias = "gamma")]
    stop_count: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Dirichlet {
    alpha: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixGamma {
    alpha: f64,
    beta: f64,
    sigma: Vec<Vec<f64>>,
}

fn one() -> f64 {
    1.0
}

fn from_value<T: DeserializeOwned>(family: &str, params: &Value) -> Result<T, CliError> {
    let params = if params.is_null() { &Value::Object(Default::default()) } else { params };
    serde_json::from_value(params.clone()).map_err(|e| CliError::Usage(format!("bad --params for {family}: {e}")))
}

/// Square matrix from a JSON array of rows.
pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>, CliError> {
    let p = rows.len();
    if p == 0 || rows.iter().any(|r| r.len() != p) {
        return Err(CliError::Usage("matrix must be a non-empty square array of rows".into()));
    }
    Ok(DMatrix::from_fn(p, p, |i, j| rows[i][j]))
}

/// Builds validated parameters for `family` from its JSON object.
pub fn parse_family(family: &str, params: &Value) -> Result<FamilyParams, CliError> {
    let fp = match family {
        "bernoulli" => {
            let b: Bernoulli = from_value(family, params)?;
            FamilyParams::Bernoulli(BernoulliParams::new(b.p)?)
        }
        "hypergeometric" => {
            let h: Hypergeometric = from_value(family, params)?;
            FamilyParams::Hypergeometric(HypergeomParams::new(h.population, h.marked, h.draws)?)
        }
        "gen_poisson" => {
            let g: GenPoisson = from_value(family, params)?;
            FamilyParams::GenPoisson(GenPoissonParams::new(g.lambda, g.alpha)?)
        }
        "gamma" => {
            let g: Gamma = from_value(family, params)?;
            FamilyParams::Gamma(GammaParams::new(g.shape, g.scale)?)
        }
        "uniform" => {
            let _: Uniform = from_value(family, params)?;
            FamilyParams::Uniform(UnitUniform)
        }
        "multi_hypergeom" => {
            let m: MultiHyper = from_value(family, params)?;
            FamilyParams::MultiHyper(MultiHyperParams::new(m.classes, m.draws)?)
        }
        "inv_hypergeom" => {
            let m: InvHyper = from_value(family, params)?;
            FamilyParams::InvHyper(InvHyperParams::new(m.classes, m.stop_count)?)
        }
        "multinomial" => {
            let m: Multinomial = from_value(family, params)?;
            FamilyParams::Multinomial(MultinomialParams::new(m.probs, m.trials)?)
        }
        "neg_multinomial" => {
            let m: NegMultinomial = from_value(family, params)?;
            FamilyParams::NegMultinomial(NegMultinomialParams::new(m.probs, m.stop_count)?)
        }
        "dirichlet" => {
            let d: Dirichlet = from_value(family, params)?;
            FamilyParams::Dirichlet(DirichletParams::new(d.alpha)?)
        }
        "matrix_gamma" => {
            let m: MatrixGamma = from_value(family, params)?;
            FamilyParams::MatrixGamma(MatrixGammaParams::new(m.alpha, m.beta, matrix_from_rows(&m.sigma)?)?)
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown family '{other}'; expected one of {}",
                FAMILY_NAMES.join(", ")
            )))
        }
    };
    Ok(fp)
}

/// Reads a threshold in the shape the family expects: a number, an array,
/// or an array of matrix rows.
pub fn parse_point(family: &FamilyParams, z: &Value) -> Result<Point, CliError> {
    let bad = |what: &str| CliError::Usage(format!("--z for {} must be {what}, got {z}", family.name()));
    match family {
        FamilyParams::Bernoulli(_)
        | FamilyParams::Hypergeometric(_)
        | FamilyParams::GenPoisson(_)
        | FamilyParams::Gamma(_)
        | FamilyParams::Uniform(_) => z.as_f64().map(Point::Scalar).ok_or_else(|| bad("a number")),
        FamilyParams::MatrixGamma(_) => {
            let rows: Vec<Vec<f64>> = serde_json::from_value(z.clone()).map_err(|_| bad("an array of rows"))?;
            Ok(Point::Matrix(matrix_from_rows(&rows)?))
        }
        _ => {
            let v: Vec<f64> = serde_json::from_value(z.clone()).map_err(|_| bad("an array of numbers"))?;
            Ok(Point::Vector(v))
        }
    }
}

pub fn parse_json(flag: &str, text: &str) -> Result<Value, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Usage(format!("{flag} is not valid JSON: {e}")))
}

fn default_n_grid() -> Vec<u64> {
    vec![1]
}

fn default_dir() -> Direction {
    Direction::Upper
}

/// A `verify` sweep: every combination of parameter set, `n`, and `z`.
///
/// ```json
/// {"params": {"p": 0.5}, "z_grid": [0.6, 0.7], "n_grid": [10, 20], "dir": "upper"}
/// ```
///
/// `params_grid` (a list of parameter objects) may replace `params`;
/// `n_grid` defaults to `[1]`, `dir` to `"upper"`, `method` to `"mom"`, and
/// `sharpen` to `false`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    #[serde(default)]
    pub params: Option<Value>,
    #[serde(default)]
    pub params_grid: Vec<Value>,
    pub z_grid: Vec<Value>,
    #[serde(default = "default_n_grid")]
    pub n_grid: Vec<u64>,
    #[serde(default = "default_dir")]
    pub dir: Direction,
    #[serde(default)]
    pub method: Option<Optimizer>,
    #[serde(default)]
    pub sharpen: bool,
}

impl Sweep {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let sweep: Sweep =
            serde_json::from_str(text).map_err(|e| CliError::Usage(format!("bad sweep file: {e}")))?;
        if sweep.params.is_some() == !sweep.params_grid.is_empty() {
            return Err(CliError::Usage("sweep needs exactly one of params or params_grid".into()));
        }
        if sweep.z_grid.is_empty() || sweep.n_grid.is_empty() {
            return Err(CliError::Usage("sweep z_grid and n_grid must be non-empty".into()));
        }
        Ok(sweep)
    }

    pub fn param_sets(&self) -> Vec<Value> {
        match &self.params {
            Some(p) => vec![p.clone()],
            None => self.params_grid.clone(),
        }
    }
}
