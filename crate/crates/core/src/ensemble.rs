//! The random constant-weight ensemble: `t` independent columns, each uniform
//! over the weight-`w` vectors of length `N`, `w = floor(Q N)`.
//!
//! Besides sampling and Monte Carlo estimation of `Pr{S is bad}` for the fixed
//! set `S = {1..s}`, the module provides exact finite-length oracles: the union
//! weight distribution `P2`, the conditional covering probability `P1`, the
//! union-bound expectation, and a fully exhaustive small-instance probability.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bits::BitVector;
use crate::code::BinaryCode;
use crate::combin::{binomial_big, binomial_u128, next_lex};
use crate::cover::{trial_rng, WitnessSearch};
use crate::error::{Error, Result};

/// Above this length the exact oracles switch from rationals to log-space floats.
pub const RATIONAL_MAX_N: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleParams {
    #[serde(rename = "N")]
    pub n: usize,
    pub t: usize,
    #[serde(rename = "Q")]
    pub q: f64,
    pub w: usize,
}

impl EnsembleParams {
    pub fn new(n: usize, t: usize, q: f64) -> Result<Self> {
        if n < 2 || t < 2 {
            return Err(Error::Parameter(format!("need N >= 2 and t >= 2, got N={n}, t={t}")));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Parameter(format!("Q must lie in (0,1), got {q}")));
        }
        let w = weight_for(n, q);
        if w == 0 || w >= n {
            return Err(Error::Parameter(format!(
                "column weight floor(Q*N) = {w} must lie in [1, N-1] (N={n}, Q={q})"
            )));
        }
        Ok(EnsembleParams { n, t, q, w })
    }
}

/// `floor(Q N)`, tolerant of products that land a rounding error below an integer.
pub fn weight_for(n: usize, q: f64) -> usize {
    (q * n as f64 + 1e-9).floor() as usize
}

/// One uniform weight-`w` column: a partial Fisher-Yates shuffle of the rows.
pub fn sample_column<R: Rng + ?Sized>(n: usize, w: usize, rows: &mut [usize], rng: &mut R) -> BitVector {
    for (i, r) in rows.iter_mut().enumerate() {
        *r = i;
    }
    let (chosen, _) = rows.partial_shuffle(rng, w);
    let mut v = BitVector::zeros(n);
    for &i in chosen.iter() {
        v.set(i, true);
    }
    v
}

pub fn sample_code_with<R: Rng + ?Sized>(params: &EnsembleParams, rng: &mut R) -> BinaryCode {
    let mut rows = vec![0; params.n];
    let cols: Vec<BitVector> = (0..params.t)
        .map(|_| sample_column(params.n, params.w, &mut rows, rng))
        .collect();
    BinaryCode::from_columns(&cols).expect("columns share one length")
}

/// Samples a code of the ensemble; the same seed gives the same code.
pub fn sample_code(params: &EnsembleParams, seed: u64) -> BinaryCode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_code_with(params, &mut rng)
}

/// Distribution of the weight of the union of `s` independent columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnionWeightDistribution {
    pub n: usize,
    pub w: usize,
    pub s: usize,
    /// `k -> Pr{|union| = k}`, only nonzero entries.
    pub probabilities: BTreeMap<usize, f64>,
}

impl UnionWeightDistribution {
    pub fn prob(&self, k: usize) -> f64 {
        self.probabilities.get(&k).copied().unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.probabilities.values().sum()
    }
}

fn big(n: usize) -> BigUint {
    BigUint::from(n)
}

fn ratio(num: BigUint, den: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den.clone()))
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact `P2` by iterated hypergeometric convolution.
pub fn p2_exact(n: usize, w: usize, s: usize) -> Result<UnionWeightDistribution> {
    if s == 0 {
        return Err(Error::Parameter("need s >= 1".into()));
    }
    if w > n {
        return Err(Error::Parameter(format!("need w <= N, got w={w}, N={n}")));
    }
    let probabilities = if n <= RATIONAL_MAX_N {
        p2_rational(n, w, s)
            .into_iter()
            .map(|(k, p)| (k, to_f64(&p)))
            .collect()
    } else {
        p2_float(n, w, s)
    };
    Ok(UnionWeightDistribution { n, w, s, probabilities })
}

/// Exact rational `P2`.
pub fn p2_rational(n: usize, w: usize, s: usize) -> BTreeMap<usize, BigRational> {
    let total = binomial_big(&big(n), w as u64);
    let mut dist: BTreeMap<usize, BigRational> = BTreeMap::new();
    dist.insert(w, BigRational::one());
    for _ in 1..s {
        let mut next: BTreeMap<usize, BigRational> = BTreeMap::new();
        for (&u, pu) in &dist {
            for d in 0..=w.min(n - u) {
                if w - d > u {
                    continue;
                }
                let ways = binomial_big(&big(n - u), d as u64) * binomial_big(&big(u), (w - d) as u64);
                if ways.is_zero() {
                    continue;
                }
                let term = pu * ratio(ways, &total);
                *next.entry(u + d).or_insert_with(BigRational::zero) += term;
            }
        }
        dist = next;
    }
    dist
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

fn p2_float(n: usize, w: usize, s: usize) -> BTreeMap<usize, f64> {
    let ln_total = ln_binomial(n, w);
    let mut dist: BTreeMap<usize, f64> = BTreeMap::new();
    dist.insert(w, 1.0);
    for _ in 1..s {
        let mut next: BTreeMap<usize, f64> = BTreeMap::new();
        for (&u, &pu) in &dist {
            for d in 0..=w.min(n - u) {
                if w - d > u {
                    continue;
                }
                let lp = ln_binomial(n - u, d) + ln_binomial(u, w - d) - ln_total;
                *next.entry(u + d).or_insert(0.0) += pu * lp.exp();
            }
        }
        next.retain(|_, p| *p > 0.0);
        dist = next;
    }
    dist
}

/// Probability that the conjunction of `l` independent weight-`w` columns lies
/// inside a fixed `k`-set of rows, by inclusion-exclusion over the excluded rows:
/// `sum_j (-1)^j C(N-k, j) [C(N-j, w-j) / C(N, w)]^l`.
pub fn p1_exact(n: usize, w: usize, l: usize, k: usize) -> Result<f64> {
    if w > n || k > n {
        return Err(Error::Parameter(format!("need w <= N and k <= N, got w={w}, k={k}, N={n}")));
    }
    if n <= RATIONAL_MAX_N {
        Ok(to_f64(&p1_rational(n, w, l, k)))
    } else {
        Ok(p1_float(n, w, l, k))
    }
}

pub fn p1_rational(n: usize, w: usize, l: usize, k: usize) -> BigRational {
    let total = binomial_big(&big(n), w as u64);
    let mut acc = BigRational::zero();
    for j in 0..=(n - k).min(w) {
        let base = ratio(binomial_big(&big(n - j), (w - j) as u64), &total);
        let mut term = BigRational::from_integer(BigInt::from(binomial_big(&big(n - k), j as u64)));
        for _ in 0..l {
            term *= &base;
        }
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Neumaier-compensated sum.
fn compensated_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

fn p1_float(n: usize, w: usize, l: usize, k: usize) -> f64 {
    let ln_total = ln_binomial(n, w);
    let terms = (0..=(n - k).min(w)).map(|j| {
        let lt = ln_binomial(n - k, j) + l as f64 * (ln_binomial(n - j, w - j) - ln_total);
        let v = lt.exp();
        if j % 2 == 0 {
            v
        } else {
            -v
        }
    });
    compensated_sum(terms).clamp(0.0, 1.0)
}

/// `sum_k P2(k) min{1, C(t-s, l) P1(k)}`.
pub fn union_bound_expectation(params: &EnsembleParams, s: usize, l: usize) -> Result<f64> {
    if s == 0 || l == 0 {
        return Err(Error::Parameter("need s >= 1 and l >= 1".into()));
    }
    if s > params.t {
        return Err(Error::Parameter(format!("need s <= t, got s={s}, t={}", params.t)));
    }
    let others = params.t - s;
    let mult = binomial_u128(others as u64, l as u64).map_or(f64::INFINITY, |v| v as f64);
    if mult == 0.0 {
        return Ok(0.0);
    }
    let p2 = p2_exact(params.n, params.w, s)?;
    let mut acc = 0.0;
    for (&k, &pk) in &p2.probabilities {
        let p1 = p1_exact(params.n, params.w, l, k)?;
        acc += pk * (mult * p1).min(1.0);
    }
    Ok(acc.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimate {
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub std_error: f64,
    pub seed: u64,
}

/// Monte Carlo estimate of `Pr{{1..s} is (s,l)-bad}`. Trial `i` draws its code
/// from stream `i` of the master seed, so the result does not depend on the
/// thread count.
pub fn mc_bad_probability(params: &EnsembleParams, s: usize, l: usize, trials: u64, seed: u64) -> Result<McEstimate> {
    if s == 0 || l == 0 {
        return Err(Error::Parameter("need s >= 1 and l >= 1".into()));
    }
    if s + l > params.t {
        return Err(Error::Parameter(format!("need s + l <= t, got s={s}, l={l}, t={}", params.t)));
    }
    if trials == 0 {
        return Err(Error::Parameter("need trials >= 1".into()));
    }
    let set: Vec<usize> = (0..s).collect();
    let successes: u64 = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let code = sample_code_with(params, &mut rng);
            let mut search = WitnessSearch::new(&code);
            u64::from(search.find(&code, &set, l).is_some())
        })
        .sum();
    let p_hat = successes as f64 / trials as f64;
    Ok(McEstimate {
        trials,
        successes,
        p_hat,
        std_error: (p_hat * (1.0 - p_hat) / trials as f64).sqrt(),
        seed,
    })
}

/// Upper estimate of the work of [`exhaustive_bad_probability`]: the `s`-tuples
/// of columns plus, per union weight, every tuple of restricted patterns.
pub fn exhaustive_cost(params: &EnsembleParams, s: usize) -> BigUint {
    let (n, w) = (params.n, params.w);
    let cols = binomial_big(&big(n), w as u64);
    let patterns: BigUint = (0..=w).map(|i| binomial_big(&big(n - w), i as u64)).sum();
    let weights = big((s * w).min(n) - w + 1);
    let others = params.t.saturating_sub(s) as u32;
    cols.pow(s as u32) + weights * patterns.pow(others)
}

/// Exact `Pr{{1..s} is (s,l)-bad}` by exhaustive enumeration, without `P1` or `P2`.
///
/// The columns of `S` are enumerated outright and grouped by the union mask.
/// For the remaining `t - s` columns only the part outside the union matters,
/// and by row symmetry only the union weight; for each weight every tuple of
/// restricted patterns is enumerated with its multiplicity.
pub fn exhaustive_bad_probability(params: &EnsembleParams, s: usize, l: usize) -> Result<f64> {
    exhaustive_bad_rational(params, s, l).map(|r| to_f64(&r))
}

pub fn exhaustive_bad_rational(params: &EnsembleParams, s: usize, l: usize) -> Result<BigRational> {
    let (n, w, t) = (params.n, params.w, params.t);
    if n > 16 {
        return Err(Error::Parameter(format!("exhaustive oracle supports N <= 16, got {n}")));
    }
    if s == 0 || l == 0 || s + l > t {
        return Err(Error::Parameter("need s, l >= 1 and s + l <= t".into()));
    }
    let columns = all_columns(n, w);
    let m = columns.len() as u128;

    // union weight counts over all ordered s-tuples of columns
    let mut by_weight: HashMap<u32, u128> = HashMap::new();
    let mut unions: HashMap<u32, u128> = HashMap::new();
    unions.insert(0, 1);
    for _ in 0..s {
        let mut next: HashMap<u32, u128> = HashMap::new();
        for (&u, &c) in &unions {
            for &col in &columns {
                *next.entry(u | col).or_insert(0) += c;
            }
        }
        unions = next;
    }
    for (u, c) in unions {
        *by_weight.entry(u.count_ones()).or_insert(0) += c;
    }

    let others = t - s;
    let mut bad = BigUint::zero();
    for (&k, &count_s) in &by_weight {
        let union: u32 = (1u32 << k) - 1;
        let mut patterns: HashMap<u32, u128> = HashMap::new();
        for &col in &columns {
            *patterns.entry(col & !union).or_insert(0) += 1;
        }
        let pats: Vec<(u32, u128)> = patterns.into_iter().collect();
        let bad_k = count_bad_tuples(&pats, others, l);
        bad += BigUint::from(count_s) * bad_k;
    }
    let denom = BigUint::from(m).pow(t as u32);
    Ok(ratio(bad, &denom))
}

fn all_columns(n: usize, w: usize) -> Vec<u32> {
    let mut out = Vec::new();
    let mut c: Vec<usize> = (0..w).collect();
    loop {
        out.push(c.iter().fold(0u32, |m, &i| m | (1 << i)));
        if !next_lex(&mut c, n) {
            break;
        }
    }
    out
}

/// Weighted number of ordered `m`-tuples of patterns containing `l` entries
/// with zero AND.
fn count_bad_tuples(pats: &[(u32, u128)], m: usize, l: usize) -> BigUint {
    let mut idx = vec![0usize; m];
    let mut total = BigUint::zero();
    let mut chosen = vec![0u32; m];
    loop {
        let mut weight: u128 = 1;
        for (slot, &i) in idx.iter().enumerate() {
            chosen[slot] = pats[i].0;
            weight *= pats[i].1;
        }
        if has_zero_conjunction(&chosen, l) {
            total += BigUint::from(weight);
        }
        // odometer over pattern indices
        let mut d = 0;
        loop {
            if d == m {
                return total;
            }
            idx[d] += 1;
            if idx[d] < pats.len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

fn has_zero_conjunction(vals: &[u32], l: usize) -> bool {
    let mut c: Vec<usize> = (0..l).collect();
    loop {
        if c.iter().fold(u32::MAX, |a, &i| a & vals[i]) == 0 {
            return true;
        }
        if !next_lex(&mut c, vals.len()) {
            return false;
        }
    }
}
