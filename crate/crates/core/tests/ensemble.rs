mod common;

use cfcodes::cover;
use cfcodes::ensemble::{self, EnsembleParams};
use cfcodes::{BinaryCode, BitVector, IndexSet};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn columns(n: usize, w: usize) -> Vec<BitVector> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == w)
        .map(|m| BitVector::from_bools(&(0..n).map(|i| m >> i & 1 == 1).collect::<Vec<_>>()))
        .collect()
}

fn rat(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[test]
fn p1_and_p2_match_pair_enumeration() {
    // N = 4, w = 2: 6 columns, 36 ordered pairs
    let cols = columns(4, 2);
    assert_eq!(cols.len(), 6);
    let mut union_counts = [0u64; 5];
    let mut inside = [0u64; 5];
    for a in &cols {
        for b in &cols {
            union_counts[a.disjunction(b).unwrap().weight()] += 1;
            let c = a.conjunction(b).unwrap();
            for (k, slot) in inside.iter_mut().enumerate() {
                // fixed k-set: the first k rows
                if c.ones_iter().all(|i| i < k) {
                    *slot += 1;
                }
            }
        }
    }
    let p2 = ensemble::p2_rational(4, 2, 2);
    for (k, &count) in union_counts.iter().enumerate() {
        let got = p2.get(&k).cloned().unwrap_or_else(|| rat(0, 1));
        assert_eq!(got, rat(count, 36), "P2({k})");
    }
    for (k, &count) in inside.iter().enumerate() {
        assert_eq!(ensemble::p1_rational(4, 2, 2, k), rat(count, 36), "P1({k})");
    }
    assert_eq!(ensemble::p1_rational(4, 2, 2, 2), rat(19, 36));
}

#[test]
fn p2_support_and_normalisation() {
    for (n, w, s) in [(10, 3, 2), (20, 6, 3), (40, 12, 2), (100, 30, 2), (200, 20, 4), (12, 1, 5)] {
        let d = ensemble::p2_exact(n, w, s).unwrap();
        let lo = *d.probabilities.keys().next().unwrap();
        let hi = *d.probabilities.keys().last().unwrap();
        assert_eq!((lo, hi), (w, (s * w).min(n)), "n={n} w={w} s={s}");
        assert!(d.probabilities.values().all(|&p| p > 0.0));
        assert!((d.total_mass() - 1.0).abs() < 1e-12, "mass {}", d.total_mass());
    }
}

#[test]
fn float_and_rational_paths_agree_near_the_switch() {
    use num_traits::ToPrimitive;
    for (n, w, s, l) in [(60, 18, 2, 2), (64, 20, 3, 2)] {
        let exact = ensemble::p2_rational(n, w, s);
        let d = ensemble::p2_exact(n, w, s).unwrap();
        for (k, p) in &exact {
            assert!((d.prob(*k) - p.to_f64().unwrap()).abs() < 1e-12);
        }
        for k in [w, n / 2, n] {
            let a = ensemble::p1_rational(n, w, l, k).to_f64().unwrap();
            let b = ensemble::p1_exact(n, w, l, k).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }
    let d = ensemble::p2_exact(65, 20, 2).unwrap();
    assert!((d.total_mass() - 1.0).abs() < 1e-10);
}

#[test]
fn p1_is_monotone_in_k() {
    for (n, w, l) in [(10, 3, 2), (30, 9, 3), (100, 30, 2), (80, 8, 4)] {
        let mut prev = -1.0;
        for k in 0..=n {
            let p = ensemble::p1_exact(n, w, l, k).unwrap();
            assert!(p >= prev - 1e-15, "n={n} w={w} l={l} k={k}");
            assert!((0.0..=1.0).contains(&p));
            prev = p;
        }
        assert!((prev - 1.0).abs() < 1e-12);
    }
}

#[test]
fn union_bound_reference_values() {
    let ub = |n, t, q| ensemble::union_bound_expectation(&EnsembleParams::new(n, t, q).unwrap(), 2, 2).unwrap();
    assert!((ub(10, 6, 0.7) - 0.996_579_861_111_111_1).abs() < 1e-12);
    assert!((ub(10, 6, 0.6) - 0.998_685_455_134_434_7).abs() < 1e-12);
    assert!((ub(20, 10, 0.6) - 0.999_763_936_387_124_1).abs() < 1e-12);
    assert_eq!(ub(20, 10, 0.3), 1.0);
}

#[test]
fn weight_rounding() {
    assert_eq!(ensemble::weight_for(10, 0.3), 3);
    assert_eq!(ensemble::weight_for(10, 0.7), 7);
    assert_eq!(ensemble::weight_for(20, 0.35), 7);
    assert!(EnsembleParams::new(10, 6, 0.05).is_err());
    assert!(EnsembleParams::new(10, 6, 1.0).is_err());
}

#[test]
fn sampled_columns_are_uniform() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let mut rows = vec![0; 5];
    let draws = 10_000;
    let mut counts = std::collections::HashMap::new();
    for _ in 0..draws {
        let c = ensemble::sample_column(5, 2, &mut rows, &mut rng);
        assert_eq!(c.weight(), 2);
        *counts.entry(c).or_insert(0u32) += 1;
    }
    assert_eq!(counts.len(), 10);
    // each pattern has probability 1/10
    let sd = (draws as f64 * 0.1 * 0.9).sqrt();
    for &c in counts.values() {
        assert!((c as f64 - 1000.0).abs() < 4.0 * sd, "count {c}");
    }
    let chi2: f64 = counts.values().map(|&c| (c as f64 - 1000.0).powi(2) / 1000.0).sum();
    // 9 degrees of freedom, 0.999 quantile is about 27.9
    assert!(chi2 < 27.9, "chi2 {chi2}");
}

#[test]
fn sample_code_is_reproducible() {
    let p = EnsembleParams::new(30, 12, 0.3).unwrap();
    let a = ensemble::sample_code(&p, 5);
    assert_eq!(a, ensemble::sample_code(&p, 5));
    assert_ne!(a, ensemble::sample_code(&p, 6));
    assert_eq!(a.constant_weight(), Some(9));
}

/// Probability over every code in the ensemble, by listing all of them.
fn brute_bad_probability(n: usize, w: usize, t: usize, s: usize, l: usize) -> BigRational {
    let cols = columns(n, w);
    let m = cols.len();
    let total = m.pow(t as u32);
    let set = IndexSet::new((0..s).collect()).unwrap();
    let mut bad = 0u64;
    for mut idx in 0..total {
        let chosen: Vec<BitVector> = (0..t)
            .map(|_| {
                let c = cols[idx % m].clone();
                idx /= m;
                c
            })
            .collect();
        let code = BinaryCode::from_columns(&chosen).unwrap();
        bad += u64::from(cover::is_bad_set(&code, &set, l).unwrap().is_some());
    }
    rat(bad, total as u64)
}

#[test]
fn exhaustive_oracle_matches_full_listing() {
    for (n, q, t, s, l) in [(4, 0.5, 3, 1, 2), (4, 0.5, 4, 1, 2), (4, 0.5, 4, 2, 2), (5, 0.4, 4, 2, 1), (5, 0.4, 4, 1, 3)] {
        let p = EnsembleParams::new(n, t, q).unwrap();
        let got = ensemble::exhaustive_bad_rational(&p, s, l).unwrap();
        assert_eq!(got, brute_bad_probability(n, p.w, t, s, l), "n={n} t={t} s={s} l={l}");
    }
}

#[test]
fn union_bound_dominates_exact_probability() {
    for (n, t, q, s, l) in [(6, 4, 0.5, 2, 2), (8, 5, 0.25, 2, 2), (8, 6, 0.3, 2, 2), (10, 5, 0.3, 2, 2), (8, 5, 0.5, 1, 2), (10, 5, 0.2, 2, 3)] {
        let p = EnsembleParams::new(n, t, q).unwrap();
        let exact = ensemble::exhaustive_bad_probability(&p, s, l).unwrap();
        let ub = ensemble::union_bound_expectation(&p, s, l).unwrap();
        assert!(exact <= ub + 1e-12, "n={n} t={t} Q={q}: exact {exact} > ub {ub}");
    }
}

#[test]
fn monte_carlo_agrees_with_exhaustive() {
    for (n, t, q, seed) in [(8, 6, 0.3, 1), (10, 5, 0.3, 2), (8, 5, 0.25, 3)] {
        let p = EnsembleParams::new(n, t, q).unwrap();
        let exact = ensemble::exhaustive_bad_probability(&p, 2, 2).unwrap();
        let mc = ensemble::mc_bad_probability(&p, 2, 2, 20_000, seed).unwrap();
        let se = (exact * (1.0 - exact) / 20_000.0).sqrt().max(1e-4);
        assert!((mc.p_hat - exact).abs() <= 4.0 * se, "n={n} t={t}: mc {} exact {exact}", mc.p_hat);
    }
}

#[test]
fn monte_carlo_below_union_bound() {
    for (n, t, q) in [(20, 10, 0.3), (30, 10, 0.2), (40, 8, 0.15), (60, 8, 0.1)] {
        let p = EnsembleParams::new(n, t, q).unwrap();
        let ub = ensemble::union_bound_expectation(&p, 2, 2).unwrap();
        let mc = ensemble::mc_bad_probability(&p, 2, 2, 4000, 11).unwrap();
        assert!(mc.p_hat <= ub + 3.0 * mc.std_error, "n={n}: mc {} ub {ub}", mc.p_hat);
    }
}

#[test]
fn monte_carlo_is_thread_independent() {
    let p = EnsembleParams::new(30, 10, 0.2).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| ensemble::mc_bad_probability(&p, 2, 2, 3000, 99).unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn dense_columns_are_almost_always_bad() {
    // w = N - 1: the union misses a row only when both columns miss the same one
    let p = EnsembleParams::new(10, 6, 0.9).unwrap();
    assert_eq!(p.w, 9);
    let exact = ensemble::exhaustive_bad_probability(&p, 2, 2).unwrap();
    assert!(exact >= 0.9);
    let mc = ensemble::mc_bad_probability(&p, 2, 2, 4000, 3).unwrap();
    assert!((mc.p_hat - exact).abs() <= 4.0 * mc.std_error.max(1e-3));
    assert!(ensemble::union_bound_expectation(&p, 2, 2).unwrap() >= exact);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn union_bound_is_a_probability(n in 4usize..80, t in 4usize..30, q in 0.05f64..0.95, l in 1usize..4) {
        if let Ok(p) = EnsembleParams::new(n, t, q) {
            if 2 + l <= t {
                let ub = ensemble::union_bound_expectation(&p, 2, l).unwrap();
                prop_assert!((0.0..=1.0).contains(&ub));
            }
        }
    }
}
