use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootFindConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_iter: usize,
}

impl Default for RootFindConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_iter: 200,
        }
    }
}

impl RootFindConfig {
    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) || self.max_iter == 0 {
            return domain(format!("invalid root-finding config {self:?}"));
        }
        Ok(())
    }

    fn converged(&self, a: f64, b: f64) -> bool {
        (b - a).abs() <= self.abs_tol + self.rel_tol * a.abs().max(b.abs())
    }
}

pub const DEFAULT_GRID_POINTS: usize = 129;

fn eval(f: &impl Fn(f64) -> f64, x: f64) -> Result<f64> {
    let v = f(x);
    if v.is_nan() {
        return Err(Error::Evaluation { at: x, value: v });
    }
    Ok(v)
}

/// Root of `f` on `[lo, hi]` given a sign change.
///
/// Secant steps are taken while they shrink the bracket by at least half;
/// otherwise the next step bisects. The iteration sequence depends only on
/// the inputs.
pub fn find_root_bracketed(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    cfg: &RootFindConfig,
) -> Result<f64> {
    cfg.validate()?;
    if !(lo <= hi) {
        return domain(format!("empty bracket [{lo}, {hi}]"));
    }
    let (mut a, mut b) = (lo, hi);
    let mut fa = eval(&f, a)?;
    let mut fb = eval(&f, b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }

    let mut try_secant = true;
    for _ in 0..cfg.max_iter {
        if cfg.converged(a, b) {
            return Ok(if fa.abs() <= fb.abs() { a } else { b });
        }
        let mid = 0.5 * (a + b);
        let mut c = mid;
        if try_secant && fa.is_finite() && fb.is_finite() {
            let s = b - fb * (b - a) / (fb - fa);
            if s > a && s < b {
                c = s;
            }
        }
        let fc = eval(&f, c)?;
        if fc == 0.0 {
            return Ok(c);
        }
        let width = b - a;
        if fc.signum() == fa.signum() {
            a = c;
            fa = fc;
        } else {
            b = c;
            fb = fc;
        }
        try_secant = (b - a) <= 0.5 * width;
    }
    if cfg.converged(a, b) {
        return Ok(if fa.abs() <= fb.abs() { a } else { b });
    }
    Err(Error::NoConvergence(cfg.max_iter))
}

/// Minimizes `f` on `[lo, hi]`: a uniform grid scan followed by
/// golden-section refinement inside the two cells around the best grid point.
///
/// The returned value never exceeds the grid minimum. `+inf` values are
/// allowed (treated as infeasible points); `NaN` is an error.
pub fn minimize_scalar(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    grid_points: usize,
    cfg: &RootFindConfig,
) -> Result<(f64, f64)> {
    cfg.validate()?;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return domain(format!("minimize_scalar needs a finite interval lo < hi, got [{lo}, {hi}]"));
    }
    if grid_points < 3 {
        return domain(format!("minimize_scalar needs at least 3 grid points, got {grid_points}"));
    }
    let step = (hi - lo) / (grid_points - 1) as f64;
    let node = |i: usize| if i + 1 == grid_points { hi } else { lo + step * i as f64 };

    let mut best_i = 0;
    let mut best_v = f64::INFINITY;
    for i in 0..grid_points {
        let v = eval(&f, node(i))?;
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    if best_v == f64::INFINITY {
        return Err(Error::Evaluation {
            at: lo,
            value: f64::INFINITY,
        });
    }

    let mut a = node(best_i.saturating_sub(1));
    let mut b = node((best_i + 1).min(grid_points - 1));
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = eval(&f, c)?;
    let mut fd = eval(&f, d)?;
    for _ in 0..cfg.max_iter {
        if cfg.converged(a, b) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(&f, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(&f, d)?;
        }
    }
    let (x_ref, v_ref) = if fc <= fd { (c, fc) } else { (d, fd) };
    if v_ref < best_v {
        Ok((x_ref, v_ref))
    } else {
        Ok((node(best_i), best_v))
    }
}
