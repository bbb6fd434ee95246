//! Random-coding bounds for almost cover-free codes.
//!
//! All logarithms are base 2. The main quantities, for a column weight
//! fraction `Q` and a union weight fraction `q`:
//!
//! * `A(s, Q, q)`: exponent of the probability that `s` columns have union
//!   weight `q N`, in parametric form through `y` solving
//!   `q = Q (1 - y^s) / (1 - y)`;
//! * `D(l, Q, q)`: exponent of the probability that the conjunction of `l`
//!   columns is covered by a fixed set of weight `q N`, evaluated at the
//!   extremal type given by `z`;
//! * the capacity lower bound `(1/l) max_Q D(l, Q, q_hat)` with
//!   `q_hat = 1 - (1 - Q)^s`, and the error exponent
//!   `max_Q min_q A + [D - l R]^+`.
//!
//! Out-of-domain arguments are reported as [`Error::Domain`]; inputs are never
//! clamped.

mod solve;

use std::f64::consts::{E, LOG2_E};

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

pub use solve::{bisect, golden_max, golden_min, SolverInfo};

use crate::combin::log2_big;
use crate::design::count_strict_big;
use crate::error::{Error, Result};

/// Inset used for open-interval endpoints.
pub const INSET: f64 = 1e-9;
/// Bracket width at which `y` and `z` solves stop.
pub const ROOT_TOL: f64 = 1e-13;
/// Step of the coarse `Q` grid.
pub const Q_GRID_STEP: f64 = 1e-3;
/// Width at which golden-section refinement stops.
pub const REFINE_TOL: f64 = 1e-9;

const INNER_GRID: usize = 400;
const DENSE_STEP: f64 = 1e-4;

fn lg(x: f64) -> f64 {
    x.log2()
}

/// `x log2 x` with the continuous value 0 at 0.
fn xlgx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * lg(x)
    }
}

fn h(a: f64) -> f64 {
    -xlgx(a) - xlgx(1.0 - a)
}

/// Binary entropy in bits.
pub fn binary_entropy(a: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::Domain(format!("entropy argument {a} outside [0,1]")));
    }
    Ok(h(a))
}

pub fn pos_part(x: f64) -> f64 {
    x.max(0.0)
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::Domain(format!("{name} = {v} must lie in (0,1)")));
    }
    Ok(())
}

fn check_l(l: usize) -> Result<()> {
    if l < 2 {
        return Err(Error::Domain(format!(
            "l = {l}: the extremal-type bounds need l >= 2; for l = 1 use the known results for \
             (s,1) list decoding and planning screening designs"
        )));
    }
    Ok(())
}

/// `1 - (1 - Q)^s`.
pub fn q_hat(big_q: f64, s: usize) -> Result<f64> {
    check_unit("Q", big_q)?;
    if s == 0 {
        return Err(Error::Domain("s must be >= 1".into()));
    }
    Ok(-(s as f64 * (-big_q).ln_1p()).exp_m1())
}

fn q_range(s: usize, big_q: f64) -> (f64, f64) {
    (big_q, (s as f64 * big_q).min(1.0))
}

/// `sum_{i<n} x^i`.
fn geometric(x: f64, n: usize) -> f64 {
    (0..n).fold(0.0, |acc, _| acc * x + 1.0)
}

/// The `y` in `(0,1)` with `q = Q (1 - y^s) / (1 - y)`; requires
/// `Q < q < min(1, s Q)`.
pub fn solve_y(s: usize, big_q: f64, q: f64) -> Result<(f64, SolverInfo)> {
    check_unit("Q", big_q)?;
    let (lo, hi) = q_range(s, big_q);
    if !(q > lo && q < hi) {
        return Err(Error::Domain(format!(
            "q = {q} outside the open interval ({lo}, {hi}) for s = {s}, Q = {big_q}"
        )));
    }
    let (y, mut info) = bisect(|y| big_q * geometric(y, s) - q, 0.0, 1.0, ROOT_TOL)?;
    info.residual = (q - big_q * (1.0 - y.powi(s as i32)) / (1.0 - y)).abs();
    Ok((y, info))
}

/// `A(s, Q, q)` in parametric form.
pub fn a_exponent(s: usize, big_q: f64, q: f64) -> Result<f64> {
    let (y, _) = solve_y(s, big_q, q)?;
    Ok(a_from_y(s, big_q, q, y))
}

fn a_from_y(s: usize, big_q: f64, q: f64, y: f64) -> f64 {
    let sf = s as f64;
    let lg1my = (-y).ln_1p() * LOG2_E;
    xlgx(1.0 - q) + q * (lg(big_q) + sf * lg(y) - lg1my) + sf * big_q * (lg1my - lg(y)) + sf * h(big_q)
}

/// The `z` in `(0,1)` with `(1 - Q)/z = (1 - q (1-z)^l) / (1 - (1-z)^l)`,
/// found as the root of the decreasing function
/// `(1-Q) sum_{i<l} (1-z)^i - 1 + q (1-z)^l`. Requires `l >= 2`, `Q <= q <= 1`.
pub fn solve_z(l: usize, big_q: f64, q: f64) -> Result<(f64, SolverInfo)> {
    check_l(l)?;
    check_unit("Q", big_q)?;
    if !(q >= big_q && q <= 1.0) {
        return Err(Error::Domain(format!("q = {q} outside [Q, 1] = [{big_q}, 1]")));
    }
    let f = |z: f64| {
        let v = 1.0 - z;
        (1.0 - big_q) * geometric(v, l) - 1.0 + q * v.powi(l as i32)
    };
    let (z, mut info) = bisect(f, 0.0, 1.0, ROOT_TOL)?;
    info.residual = z_residual(l, big_q, q, z);
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::Domain(format!("z = {z} for l = {l}, Q = {big_q}, q = {q} is not interior")));
    }
    Ok((z, info))
}

/// Residual of `Q = ((1-z)(1-u) - (1-q) z u) / (1-u)` with `u = (1-z)^l`.
pub fn z_residual(l: usize, big_q: f64, q: f64, z: f64) -> f64 {
    let u = (1.0 - z).powi(l as i32);
    let qc = ((1.0 - z) * (1.0 - u) - (1.0 - q) * z * u) / (1.0 - u);
    (qc - big_q).abs()
}

/// A probability distribution on `{0,1}^l`; entry `a` is the pattern whose
/// coordinate `i` is bit `i` of `a`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeDistribution {
    pub l: usize,
    pub tau: Vec<f64>,
}

impl TypeDistribution {
    pub fn all_ones(&self) -> f64 {
        self.tau[(1 << self.l) - 1]
    }

    pub fn total(&self) -> f64 {
        self.tau.iter().sum()
    }

    /// `sum_{a : a_i = 1} tau(a)`.
    pub fn marginal(&self, i: usize) -> f64 {
        self.tau
            .iter()
            .enumerate()
            .filter(|(a, _)| a >> i & 1 == 1)
            .map(|(_, p)| p)
            .sum()
    }
}

/// The minimising type of the covering exponent.
pub fn extremal_type(l: usize, big_q: f64, q: f64) -> Result<TypeDistribution> {
    let (z, _) = solve_z(l, big_q, q)?;
    validate_type(type_from_z(l, big_q, z), big_q, q)
}

fn type_from_z(l: usize, big_q: f64, z: f64) -> TypeDistribution {
    let c = (1.0 - big_q) / z;
    let full = (1usize << l) - 1;
    let mut tau: Vec<f64> = (0..=full)
        .map(|a| {
            let k = (a as u32).count_ones() as i32;
            c * (1.0 - z).powi(k) * z.powi(l as i32 - k)
        })
        .collect();
    tau[full] = 1.0 - c * (1.0 - (1.0 - z).powi(l as i32));
    TypeDistribution { l, tau }
}

fn validate_type(t: TypeDistribution, big_q: f64, q: f64) -> Result<TypeDistribution> {
    if let Some((a, p)) = t.tau.iter().enumerate().find(|(_, p)| !(**p > 0.0 && **p < 1.0)) {
        return Err(Error::Domain(format!(
            "extremal type leaves the simplex interior at Q = {big_q}, q = {q}: tau({a:b}) = {p}"
        )));
    }
    Ok(t)
}

/// `F(tau) = sum tau log tau - q h(tau(1)/q) + h(tau(1)) + l h(Q)`.
pub fn f_objective(big_q: f64, q: f64, tau: &TypeDistribution) -> Result<f64> {
    let t1 = tau.all_ones();
    if t1 > q * (1.0 + 1e-12) || t1 < 0.0 {
        return Err(Error::Domain(format!("tau(1) = {t1} must lie in [0, q] with q = {q}")));
    }
    let ratio = (t1 / q).min(1.0);
    let neg_entropy: f64 = tau.tau.iter().map(|&p| xlgx(p)).sum();
    Ok(neg_entropy - q * h(ratio) + h(t1) + tau.l as f64 * h(big_q))
}

/// `D(l, Q, q)`: `F` at the extremal type.
pub fn d_exponent(l: usize, big_q: f64, q: f64) -> Result<f64> {
    let tau = extremal_type(l, big_q, q)?;
    f_objective(big_q, q, &tau)
}

/// `D(l, Q, q_hat)` through the closed parametric form.
pub fn d_at_qhat(l: usize, big_q: f64, s: usize) -> Result<f64> {
    let qh = q_hat(big_q, s)?;
    let (z, _) = solve_z(l, big_q, qh)?;
    Ok(d_closed_form(l, big_q, qh, z))
}

fn d_closed_form(l: usize, big_q: f64, qh: f64, z: f64) -> f64 {
    let lf = l as f64;
    let c = (1.0 - big_q) / z;
    let u = (1.0 - z).powi(l as i32);
    let lg1mz = (-z).ln_1p() * LOG2_E;
    (1.0 - big_q) * lf * lg(z) - (1.0 - qh) * lg(1.0 - u)
        + lf * (c * (1.0 - z) - (c - qh) * u) * lg1mz
        + lf * h(big_q)
}

/// Every auxiliary quantity at one `(s, l, Q, q)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundPoint {
    pub s: usize,
    pub l: usize,
    #[serde(rename = "Q")]
    pub big_q: f64,
    pub q: f64,
    pub q_hat: f64,
    pub y: f64,
    pub z: f64,
    pub a: f64,
    pub d: f64,
    pub y_residual: f64,
    pub z_residual: f64,
}

pub fn bound_point(s: usize, l: usize, big_q: f64, q: f64) -> Result<BoundPoint> {
    let qh = q_hat(big_q, s)?;
    let (y, yi) = solve_y(s, big_q, q)?;
    let (z, zi) = solve_z(l, big_q, q)?;
    let tau = validate_type(type_from_z(l, big_q, z), big_q, q)?;
    Ok(BoundPoint {
        s,
        l,
        big_q,
        q,
        q_hat: qh,
        y,
        z,
        a: a_from_y(s, big_q, q, y),
        d: f_objective(big_q, q, &tau)?,
        y_residual: yi.residual,
        z_residual: zi.residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundResult {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmax_q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmin_q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    pub solver: SolverInfo,
    /// Local maxima seen on the coarse `Q` grid; more than one means the
    /// refined value may be a local optimum.
    pub grid_local_maxima: usize,
}

fn q_grid() -> impl Iterator<Item = f64> {
    let n = (1.0 / Q_GRID_STEP).round() as usize;
    (1..n).map(|i| i as f64 * Q_GRID_STEP)
}

/// Coarse-grid scan followed by golden-section refinement around the best
/// grid point.
fn maximize_over_q(mut f: impl FnMut(f64) -> f64) -> (f64, f64, SolverInfo, usize) {
    let grid: Vec<f64> = q_grid().collect();
    let vals: Vec<f64> = grid
        .iter()
        .map(|&x| {
            let v = f(x);
            if v.is_nan() {
                f64::NEG_INFINITY
            } else {
                v
            }
        })
        .collect();
    let mut best = 0;
    for i in 1..vals.len() {
        if vals[i] > vals[best] {
            best = i;
        }
    }
    let local_maxima = (0..vals.len())
        .filter(|&i| {
            let left = i == 0 || vals[i] > vals[i - 1];
            let right = i + 1 == vals.len() || vals[i] >= vals[i + 1];
            left && right && vals[i] > f64::NEG_INFINITY
        })
        .count();
    let lo = if best == 0 { INSET } else { grid[best - 1] };
    let hi = if best + 1 == grid.len() { 1.0 - INSET } else { grid[best + 1] };
    let (x, v, iterations) = golden_max(
        |x| {
            let v = f(x);
            if v.is_nan() {
                f64::NEG_INFINITY
            } else {
                v
            }
        },
        lo,
        hi,
        REFINE_TOL,
    );
    let (x, v) = if v >= vals[best] { (x, v) } else { (grid[best], vals[best]) };
    (
        x,
        v,
        SolverInfo {
            iterations,
            residual: 0.0,
            bracket: [lo, hi],
        },
        local_maxima,
    )
}

/// `(1/l) max_Q D(l, Q, q_hat(Q, s))`.
pub fn capacity_lower(s: usize, l: usize) -> Result<BoundResult> {
    check_l(l)?;
    if s == 0 {
        return Err(Error::Domain("s must be >= 1".into()));
    }
    let (x, v, mut solver, local) = maximize_over_q(|q| d_at_qhat(l, q, s).unwrap_or(f64::NEG_INFINITY));
    let qh = q_hat(x, s)?;
    let (z, zi) = solve_z(l, x, qh)?;
    solver.residual = zi.residual;
    Ok(BoundResult {
        value: v / l as f64,
        argmax_q: Some(x),
        argmin_q: None,
        q_hat: Some(qh),
        z: Some(z),
        solver,
        grid_local_maxima: local,
    })
}

/// Inner minimisation of the exponent at one `Q`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentAtQ {
    pub value: f64,
    pub argmin_q: f64,
    pub q_hat: f64,
    /// Points where `D(l, Q, q) = l R`.
    pub kinks: Vec<f64>,
    /// True when `D(l, Q, q_hat) <= l R`, which makes the exponent 0.
    pub saturated: bool,
}

fn check_exponent_args(s: usize, l: usize, rate: f64, big_q: f64) -> Result<(f64, f64)> {
    check_l(l)?;
    check_unit("Q", big_q)?;
    if s < 2 {
        return Err(Error::Domain(format!("the exponent needs s >= 2, got {s}")));
    }
    if rate.is_nan() || rate <= 0.0 {
        return Err(Error::Domain(format!("R = {rate} must be positive")));
    }
    let (lo, hi) = q_range(s, big_q);
    Ok((lo + INSET, hi - INSET))
}

/// `A(s,Q,q)` clipped at 0 plus `[D(l,Q,q) - l R]^+`; `+inf` outside the domain.
pub fn exponent_objective(s: usize, l: usize, rate: f64, big_q: f64, q: f64) -> f64 {
    let a = match a_exponent(s, big_q, q) {
        Ok(v) => v,
        Err(_) => return f64::INFINITY,
    };
    let d = match d_exponent(l, big_q, q) {
        Ok(v) => v,
        Err(_) => return f64::INFINITY,
    };
    pos_part(a) + pos_part(d - l as f64 * rate)
}

/// `min_q A(s,Q,q) + [D(l,Q,q) - l R]^+` over `Q < q < min(1, sQ)`.
///
/// The kinks of the second term are located by bisection and each smooth piece
/// is minimised by golden-section search; the coarse grid values are kept as
/// candidates.
pub fn exponent_lower_at_q(s: usize, l: usize, rate: f64, big_q: f64) -> Result<ExponentAtQ> {
    let (lo, hi) = check_exponent_args(s, l, rate, big_q)?;
    let qh = q_hat(big_q, s)?;
    let lr = l as f64 * rate;
    if d_at_qhat(l, big_q, s)? <= lr {
        return Ok(ExponentAtQ {
            value: 0.0,
            argmin_q: qh,
            q_hat: qh,
            kinks: Vec::new(),
            saturated: true,
        });
    }
    let obj = |q: f64| exponent_objective(s, l, rate, big_q, q);
    let gap = |q: f64| d_exponent(l, big_q, q).map_or(f64::NAN, |d| d - lr);

    let grid: Vec<f64> = (0..=INNER_GRID)
        .map(|i| lo + (hi - lo) * i as f64 / INNER_GRID as f64)
        .collect();
    let gaps: Vec<f64> = grid.iter().map(|&q| gap(q)).collect();
    let mut kinks = Vec::new();
    for i in 0..INNER_GRID {
        let (g0, g1) = (gaps[i], gaps[i + 1]);
        if g0.is_nan() || g1.is_nan() {
            continue;
        }
        if g0 == 0.0 {
            kinks.push(grid[i]);
        } else if g0.signum() != g1.signum() && g1 != 0.0 {
            if let Ok((k, _)) = bisect(gap, grid[i], grid[i + 1], ROOT_TOL) {
                kinks.push(k);
            }
        }
    }

    let mut breaks = vec![lo, hi];
    if qh > lo && qh < hi {
        breaks.push(qh);
    }
    breaks.extend(kinks.iter().copied().filter(|&k| k > lo && k < hi));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let mut best = (qh, obj(qh));
    for &q in grid.iter().chain(breaks.iter()) {
        let v = obj(q);
        if v < best.1 {
            best = (q, v);
        }
    }
    for w in breaks.windows(2) {
        let (q, v, _) = golden_min(obj, w[0], w[1], REFINE_TOL * 0.1);
        if v < best.1 {
            best = (q, v);
        }
    }
    Ok(ExponentAtQ {
        value: best.1,
        argmin_q: best.0,
        q_hat: qh,
        kinks,
        saturated: false,
    })
}

/// Plain dense-grid version of [`exponent_lower_at_q`] (step `1e-4` in `q`).
pub fn exponent_lower_at_q_dense(s: usize, l: usize, rate: f64, big_q: f64) -> Result<(f64, f64)> {
    let (lo, hi) = check_exponent_args(s, l, rate, big_q)?;
    let n = ((hi - lo) / DENSE_STEP).ceil().max(1.0) as usize;
    let mut best = (lo, f64::INFINITY);
    for i in 0..=n {
        let q = lo + (hi - lo) * i as f64 / n as f64;
        let v = exponent_objective(s, l, rate, big_q, q);
        if v < best.1 {
            best = (q, v);
        }
    }
    Ok(best)
}

/// `max_Q min_q A(s,Q,q) + [D(l,Q,q) - l R]^+`.
pub fn exponent_lower(s: usize, l: usize, rate: f64) -> Result<BoundResult> {
    check_exponent_args(s, l, rate, 0.5)?;
    let eval = |x: f64| exponent_lower_at_q(s, l, rate, x).map_or(f64::NEG_INFINITY, |e| e.value);
    let (x, v, solver, local) = maximize_over_q(eval);
    let at = exponent_lower_at_q(s, l, rate, x)?;
    Ok(BoundResult {
        value: v,
        argmax_q: Some(x),
        argmin_q: Some(at.argmin_q),
        q_hat: Some(at.q_hat),
        z: None,
        solver,
        grid_local_maxima: local,
    })
}

/// `1 / (s l)`.
pub fn capacity_upper(s: usize, l: usize) -> Result<f64> {
    if s == 0 || l == 0 {
        return Err(Error::Domain("s and l must be >= 1".into()));
    }
    Ok(1.0 / (s * l) as f64)
}

/// Size of the strict `(s, l)`-superset family over `t` columns.
pub fn superset_count(t: &BigUint, s: usize, l: usize) -> BigUint {
    count_strict_big(t, s, l)
}

/// `floor(2^x)` for `x >= 0`.
pub fn floor_pow2(x: f64) -> Result<BigUint> {
    if x.is_nan() || !(0.0..=1e6).contains(&x) {
        return Err(Error::Domain(format!("2^{x} is out of the supported range")));
    }
    let int = x.floor();
    let frac = x - int;
    let mant = frac.exp2();
    if int < 53.0 {
        return Ok(BigUint::from(x.exp2().floor() as u64));
    }
    // 2^x = mant * 2^int with mant in [1, 2); keep 52 fractional bits of mant
    let scaled = (mant * (1u64 << 52) as f64).floor() as u64;
    Ok(BigUint::from(scaled) << (int as usize - 52))
}

/// Lower bound on the strict design error at length `N` and rate `R`:
/// `1 - 2^N / |family|` clipped to `[0, 1]`, with `t = floor(2^{R N})`.
pub fn design_error_floor(n: usize, rate: f64, s: usize, l: usize) -> Result<f64> {
    if n == 0 || s == 0 || l == 0 {
        return Err(Error::Domain("N, s and l must be >= 1".into()));
    }
    if rate.is_nan() || rate <= 0.0 {
        return Err(Error::Domain(format!("R = {rate} must be positive")));
    }
    let t = floor_pow2(rate * n as f64)?;
    let count = superset_count(&t, s, l);
    if count.is_zero() {
        return Ok(0.0);
    }
    let expo = n as f64 - log2_big(&count);
    Ok((1.0 - expo.exp2()).clamp(0.0, 1.0))
}

/// Leading-order asymptotic expressions (no `o(1)` terms) as `s` grows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticRates {
    pub s: usize,
    pub l: usize,
    /// Upper bound on the zero-error rate.
    pub rate_upper: f64,
    /// Lower bound on the zero-error rate.
    pub rate_lower: f64,
    /// Asymptotic form of the capacity lower bound.
    pub capacity_lower_asym: f64,
}

pub fn asymptotic_rates(s: usize, l: usize) -> Result<AsymptoticRates> {
    if s == 0 || l == 0 {
        return Err(Error::Domain("s and l must be >= 1".into()));
    }
    let (sf, lf) = (s as f64, l as f64);
    let top = (lf + 1.0).powf(lf + 1.0) * lg(sf);
    let sl1 = sf.powf(lf + 1.0);
    Ok(AsymptoticRates {
        s,
        l,
        rate_upper: top / (2.0 * E.powf(lf - 1.0) * sl1),
        rate_lower: top / (E.powf(lf + 1.0) * sl1),
        capacity_lower_asym: LOG2_E * lf.powf(lf - 1.0) / (E.powf(lf) * sf.powf(lf)),
    })
}

/// `capacity_lower * s^l e^l / (l^(l-1) log2 e)`, which tends to 1.
pub fn asymptotic_ratio(s: usize, l: usize) -> Result<f64> {
    let c = capacity_lower(s, l)?.value;
    Ok(c / asymptotic_rates(s, l)?.capacity_lower_asym)
}

/// `log2 |family|` for big `t`, convenient for reporting.
pub fn log2_superset_count(t: &BigUint, s: usize, l: usize) -> f64 {
    log2_big(&superset_count(t, s, l))
}
