//! Adaptive quadrature and bracketed root finding.

use crate::error::{Error, Result};

/// Maximum number of interval evaluations before quadrature gives up.
const QUAD_BUDGET: usize = 1 << 20;
const QUAD_MAX_DEPTH: u32 = 60;

/// Adaptive Simpson integration of `f` over `[lo, hi]` to absolute tolerance `tol`.
///
/// Intervals are split until the Richardson error estimate of each piece is
/// below its share of `tol`. Fails if the evaluation budget runs out or the
/// recursion bottoms out on a non-converging piece.
pub fn adaptive_simpson<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::Domain(format!("bad interval [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if lo == hi {
        return Ok(0.0);
    }
    let fa = f(lo);
    let fb = f(hi);
    let mid = 0.5 * (lo + hi);
    let fm = f(mid);
    let whole = simpson(lo, hi, fa, fm, fb);
    let mut evals = 3usize;
    let out = simpson_step(&f, Piece { lo, hi, fa, fm, fb, whole }, tol, QUAD_MAX_DEPTH, &mut evals)?;
    if !out.is_finite() {
        return Err(Error::Numerical("integral is not finite".into()));
    }
    Ok(out)
}

#[derive(Clone, Copy)]
struct Piece {
    lo: f64,
    hi: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

fn simpson(lo: f64, hi: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (hi - lo) / 6.0 * (fa + 4.0 * fm + fb)
}

fn simpson_step<F>(f: &F, p: Piece, tol: f64, depth: u32, evals: &mut usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mid = 0.5 * (p.lo + p.hi);
    let lm = 0.5 * (p.lo + mid);
    let rm = 0.5 * (mid + p.hi);
    let flm = f(lm);
    let frm = f(rm);
    *evals += 2;
    if *evals > QUAD_BUDGET {
        return Err(Error::Numerical(format!(
            "quadrature did not converge within {QUAD_BUDGET} evaluations"
        )));
    }
    let left = simpson(p.lo, mid, p.fa, flm, p.fm);
    let right = simpson(mid, p.hi, p.fm, frm, p.fb);
    let delta = left + right - p.whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Numerical(format!(
            "quadrature hit maximum depth on [{}, {}]",
            p.lo, p.hi
        )));
    }
    let l = simpson_step(
        f,
        Piece { lo: p.lo, hi: mid, fa: p.fa, fm: flm, fb: p.fm, whole: left },
        tol / 2.0,
        depth - 1,
        evals,
    )?;
    let r = simpson_step(
        f,
        Piece { lo: mid, hi: p.hi, fa: p.fm, fm: frm, fb: p.fb, whole: right },
        tol / 2.0,
        depth - 1,
        evals,
    )?;
    Ok(l + r)
}

/// Bisection on a sign-changing bracket `[lo, hi]`.
///
/// Stops when the bracket width is below `rel_tol` times its midpoint.
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::Numerical(format!(
            "root not bracketed by [{lo}, {hi}] (f = {flo}, {fhi})"
        )));
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) <= rel_tol * mid.abs() || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Err(Error::Numerical("bisection did not converge".into()))
}
