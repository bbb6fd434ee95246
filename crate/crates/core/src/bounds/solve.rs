//! Scalar root finding and one-dimensional optimisation.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverInfo {
    pub iterations: u32,
    pub residual: f64,
    pub bracket: [f64; 2],
}

/// Bisection for a sign change of `f` on `[a, b]`, stopping when the bracket
/// is narrower than `tol`. Returns the midpoint of the final bracket.
pub fn bisect(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<(f64, SolverInfo)> {
    let (mut lo, mut hi) = (a, b);
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok((lo, SolverInfo { iterations: 0, residual: 0.0, bracket: [a, b] }));
    }
    if fhi == 0.0 {
        return Ok((hi, SolverInfo { iterations: 0, residual: 0.0, bracket: [a, b] }));
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::Domain(format!(
            "no sign change on [{a}, {b}]: f(a) = {flo}, f(b) = {fhi}"
        )));
    }
    let lo_negative = flo < 0.0;
    let mut iterations = 0;
    while hi - lo > tol && iterations < 200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let x = 0.5 * (lo + hi);
    Ok((
        x,
        SolverInfo {
            iterations,
            residual: f(x).abs(),
            bracket: [lo, hi],
        },
    ))
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a maximum of `f` on `[a, b]`. Returns the best
/// point seen, its value, and the iteration count.
pub fn golden_max(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64, u32) {
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iterations = 0;
    while hi - lo > tol && iterations < 300 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        iterations += 1;
    }
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    for x in [a, b] {
        let fx = f(x);
        if fx > best.1 {
            best = (x, fx);
        }
    }
    (best.0, best.1, iterations)
}

/// Golden-section search for a minimum; see [`golden_max`].
pub fn golden_min(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64, u32) {
    let (x, v, it) = golden_max(|x| -f(x), a, b, tol);
    (x, -v, it)
}
