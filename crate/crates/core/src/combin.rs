//! Binomial coefficients and subset enumeration.
//!
//! `s`-subsets of `0..n` are visited in colexicographic order by an explicit
//! odometer, so any contiguous block of ranks can be enumerated independently
//! after [`unrank_colex`].

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// `C(n, k)` or `None` on `u128` overflow.
pub fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) is always integral; divide by the gcd first to
        // postpone overflow.
        let num = (n - i) as u128;
        let den = (i + 1) as u128;
        let g = gcd(acc, den);
        let (a, d) = (acc / g, den / g);
        let g2 = gcd(num, d);
        acc = a.checked_mul(num / g2)? / (d / g2);
    }
    Some(acc)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// `C(n, k)` saturating at `u64::MAX`.
pub fn binomial_sat(n: u64, k: u64) -> u64 {
    binomial_u128(n, k)
        .and_then(|v| u64::try_from(v).ok())
        .unwrap_or(u64::MAX)
}

pub fn binomial_big(n: &BigUint, k: u64) -> BigUint {
    if BigUint::from(k) > *n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - BigUint::from(i);
        acc /= BigUint::from(i + 1);
    }
    acc
}

pub fn binomial_f64(n: u64, k: u64) -> f64 {
    match binomial_u128(n, k) {
        Some(v) => v as f64,
        None => binomial_big(&BigUint::from(n), k)
            .to_f64()
            .unwrap_or(f64::INFINITY),
    }
}

/// Base-2 logarithm of a big integer (`-inf` for zero).
pub fn log2_big(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        return (v.to_u64().unwrap() as f64).log2();
    }
    let shift = bits - 64;
    let top = (v >> shift).to_u64().unwrap();
    (top as f64).log2() + shift as f64
}

/// Advances `c` to the next `k`-subset of `0..n` in colexicographic order.
/// Returns `false` (leaving `c` unchanged) after the last subset.
pub fn next_colex(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in 0..k {
        let limit = if i + 1 < k { c[i + 1] } else { n };
        if c[i] + 1 < limit {
            c[i] += 1;
            for (j, item) in c.iter_mut().enumerate().take(i) {
                *item = j;
            }
            return true;
        }
    }
    false
}

/// Colexicographic rank of a sorted subset: `sum C(c_i, i + 1)`.
pub fn rank_colex(c: &[usize]) -> u128 {
    c.iter()
        .enumerate()
        .map(|(i, &x)| binomial_u128(x as u64, i as u64 + 1).expect("rank overflow"))
        .sum()
}

/// Inverse of [`rank_colex`] for `k`-subsets.
pub fn unrank_colex(mut rank: u128, k: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for i in (0..k).rev() {
        // largest x with C(x, i + 1) <= rank
        let mut x = i;
        while binomial_u128(x as u64 + 1, i as u64 + 1).expect("rank overflow") <= rank {
            x += 1;
        }
        rank -= binomial_u128(x as u64, i as u64 + 1).unwrap();
        out[i] = x;
    }
    out
}

/// Advances `c` to the next `k`-subset of `0..n` in lexicographic order.
pub fn next_lex(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
