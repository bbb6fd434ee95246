#![allow(dead_code)]

use cfcodes::{BinaryCode, BitVector, IndexSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Bernoulli(p) code with `n` rows and `t` columns.
pub fn random_code(n: usize, t: usize, p: f64, seed: u64) -> BinaryCode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cols: Vec<BitVector> = (0..t)
        .map(|_| BitVector::from_bools(&(0..n).map(|_| rng.gen_bool(p)).collect::<Vec<_>>()))
        .collect();
    BinaryCode::from_columns(&cols).unwrap()
}

/// All `k`-subsets of `items`, by plain recursion.
pub fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if items.len() < k {
        return vec![];
    }
    let mut out = Vec::new();
    for mut rest in subsets(&items[1..], k - 1) {
        rest.insert(0, items[0]);
        out.push(rest);
    }
    out.extend(subsets(&items[1..], k));
    out
}

pub fn union(code: &BinaryCode, set: &[usize]) -> BitVector {
    set.iter().fold(BitVector::zeros(code.n_rows()), |acc, &j| {
        acc.disjunction(&code.column_vector(j)).unwrap()
    })
}

pub fn conj(code: &BinaryCode, set: &[usize]) -> BitVector {
    set.iter().fold(BitVector::ones(code.n_rows()), |acc, &j| {
        acc.conjunction(&code.column_vector(j)).unwrap()
    })
}

/// Direct reading of the bad-set definition.
pub fn brute_is_bad(code: &BinaryCode, set: &[usize], l: usize) -> bool {
    let u = union(code, set);
    let others: Vec<usize> = (0..code.n_cols()).filter(|j| !set.contains(j)).collect();
    subsets(&others, l).iter().any(|lam| u.covers(&conj(code, lam)).unwrap())
}

pub fn brute_bad_sets(code: &BinaryCode, s: usize, l: usize) -> Vec<IndexSet> {
    let all: Vec<usize> = (0..code.n_cols()).collect();
    subsets(&all, s)
        .into_iter()
        .filter(|set| brute_is_bad(code, set, l))
        .map(|set| IndexSet::new(set).unwrap())
        .collect()
}
