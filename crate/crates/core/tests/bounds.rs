use cfcodes::bounds::*;
use cfcodes::Error;
use num_bigint::BigUint;
use proptest::prelude::*;

const Q_GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// Minimum of F over the l = 2 types with both marginals equal to Q and
/// tau(11) <= q; the only free variable is x = tau(11).
fn brute_force_f(big_q: f64, q: f64) -> f64 {
    let f = |x: f64| {
        let tau = TypeDistribution {
            l: 2,
            tau: vec![1.0 - 2.0 * big_q + x, big_q - x, big_q - x, x],
        };
        f_objective(big_q, q, &tau).unwrap_or(f64::INFINITY)
    };
    let lo = (2.0 * big_q - 1.0).max(0.0);
    let hi = big_q.min(q);
    let n = 20_000;
    let mut best = (lo, f(lo));
    for i in 0..=n {
        let x = lo + (hi - lo) * i as f64 / n as f64;
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    let step = (hi - lo) / n as f64;
    let (_, v, _) = golden_min(f, (best.0 - step).max(lo), (best.0 + step).min(hi), 1e-13);
    v.min(best.1)
}

/// Second capacity path: sign change of a central-difference derivative.
fn capacity_by_derivative(s: usize, l: usize) -> (f64, f64) {
    let d = |q: f64| d_at_qhat(l, q, s).unwrap();
    let step = 1e-6;
    let deriv = |q: f64| d(q + step) - d(q - step);
    let grid: Vec<f64> = (1..2000).map(|i| i as f64 / 2000.0).collect();
    let mut best = (0.0, f64::NEG_INFINITY);
    for w in grid.windows(2) {
        if deriv(w[0]) > 0.0 && deriv(w[1]) <= 0.0 {
            let (q, _) = bisect(deriv, w[0], w[1], 1e-12).unwrap();
            let v = d(q);
            if v > best.1 {
                best = (q, v);
            }
        }
    }
    (best.1 / l as f64, best.0)
}

#[test]
fn a_exponent_matches_high_precision() {
    let v = a_exponent(2, 0.3, 0.4).unwrap();
    assert!((v - 0.191_631_204_006_716_6).abs() < 1e-12, "{v}");
}

#[test]
fn z_matches_high_precision() {
    let (z, info) = solve_z(2, 0.25, 0.4375).unwrap();
    assert!((z - 5.0 / 7.0).abs() < 1e-12, "{z}");
    assert!(info.residual < 1e-12);
}

#[test]
fn a_vanishes_at_q_hat() {
    for s in [2, 3, 5, 8] {
        for &big_q in &Q_GRID {
            let qh = q_hat(big_q, s).unwrap();
            if qh >= (s as f64 * big_q).min(1.0) {
                continue;
            }
            let v = a_exponent(s, big_q, qh).unwrap();
            assert!(v.abs() < 1e-9, "s={s} Q={big_q} A={v}");
            for dq in [-0.05, 0.05] {
                if let Ok(a) = a_exponent(s, big_q, qh + dq) {
                    assert!(a > 0.0, "s={s} Q={big_q} q={}", qh + dq);
                }
            }
        }
    }
}

#[test]
fn a_is_convex_and_nonnegative() {
    for s in [2, 3, 5] {
        for &big_q in &[0.1, 0.3, 0.45] {
            let lo = big_q + 1e-6;
            let hi = (s as f64 * big_q).min(1.0) - 1e-6;
            let n = 1000;
            let vals: Vec<f64> = (0..=n)
                .map(|i| a_exponent(s, big_q, lo + (hi - lo) * i as f64 / n as f64).unwrap())
                .collect();
            for v in &vals {
                assert!(*v > -1e-9);
            }
            for w in vals.windows(3) {
                assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-8);
            }
        }
    }
}

#[test]
fn y_near_lower_endpoint() {
    let (y, _) = solve_y(3, 0.2, 0.2 + 1e-6).unwrap();
    assert!(y < 1e-4);
}

#[test]
fn extremal_type_satisfies_constraints() {
    for l in [2, 3, 4] {
        for &big_q in &Q_GRID {
            for j in 1..=9 {
                let q = big_q + (1.0 - big_q) * j as f64 / 10.0;
                let tau = extremal_type(l, big_q, q).unwrap();
                assert!((tau.total() - 1.0).abs() < 1e-11);
                for i in 0..l {
                    assert!((tau.marginal(i) - big_q).abs() < 1e-10);
                }
            }
            let qh = q_hat(big_q, 3).unwrap();
            let (z, _) = solve_z(l, big_q, qh).unwrap();
            let tau = extremal_type(l, big_q, qh).unwrap();
            assert!((tau.all_ones() - qh * (1.0 - z).powi(l as i32)).abs() < 1e-11);
        }
    }
}

#[test]
fn closed_form_matches_objective_at_q_hat() {
    for l in [2, 3] {
        for s in [2, 3, 5] {
            for &big_q in &Q_GRID {
                let a = d_at_qhat(l, big_q, s).unwrap();
                let b = d_exponent(l, big_q, q_hat(big_q, s).unwrap()).unwrap();
                assert!((a - b).abs() < 1e-9, "l={l} s={s} Q={big_q}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn d_matches_brute_force_minimum() {
    for &big_q in &Q_GRID {
        for j in 1..=9 {
            let q = big_q + (1.0 - big_q) * j as f64 / 10.0;
            let d = d_exponent(2, big_q, q).unwrap();
            let bf = brute_force_f(big_q, q);
            assert!((d - bf).abs() < 1e-6, "Q={big_q} q={q}: {d} vs {bf}");
            assert!(d >= -1e-12);
        }
    }
}

#[test]
fn d_vanishes_at_the_edges() {
    for l in [2, 3] {
        for q in [1e-4, 1.0 - 1e-4] {
            let d = d_at_qhat(l, q, 2).unwrap();
            assert!(d.abs() < 1e-2, "l={l} Q={q} D={d}");
        }
    }
}

#[test]
fn d_sweep_has_interior_maximum() {
    let vals: Vec<f64> = (1..100).map(|i| d_at_qhat(2, i as f64 / 100.0, 2).unwrap()).collect();
    let (arg, _) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    assert!(arg > 0 && arg < vals.len() - 1);
}

#[test]
fn capacity_lower_frozen_values() {
    let cases = [
        (2, 2, 0.058_040_579_314_697_755, 0.527_680_466_027_341_7),
        (3, 2, 0.029_249_802_472_069_248, 0.412_881_516_669_640_6),
        (2, 3, 0.019_891_603_191_755_595, 0.629_096_668_937_082_9),
        (50, 2, 0.000_151_054_133_486_900_86, 0.038_387_920_949_490_63),
        (200, 2, 0.000_009_679_020_612_675_845, 0.009_894_821_006_650_22),
    ];
    for (s, l, value, arg) in cases {
        let r = capacity_lower(s, l).unwrap();
        assert!((r.value - value).abs() < 1e-11, "({s},{l}) {}", r.value);
        assert!((r.argmax_q.unwrap() - arg).abs() < 1e-5, "({s},{l}) {:?}", r.argmax_q);
    }
}

#[test]
fn capacity_lower_two_paths_agree() {
    for (s, l) in [(2, 2), (3, 2), (2, 3), (4, 3)] {
        let r = capacity_lower(s, l).unwrap();
        let (v, arg) = capacity_by_derivative(s, l);
        assert!((r.value - v).abs() < 1e-10, "({s},{l}): {} vs {v}", r.value);
        assert!((r.argmax_q.unwrap() - arg).abs() < 1e-4);
        assert_eq!(r.grid_local_maxima, 1);
    }
}

#[test]
fn capacity_lower_below_upper() {
    for s in 2..=6 {
        for l in 2..=3 {
            let lower = capacity_lower(s, l).unwrap().value;
            assert!(lower > 0.0 && lower < capacity_upper(s, l).unwrap());
        }
    }
}

#[test]
fn exponent_threshold_matches_capacity() {
    for (s, l) in [(2, 2), (3, 2), (2, 3)] {
        let c = capacity_lower(s, l).unwrap().value;
        let below = exponent_lower(s, l, c - 1e-4).unwrap();
        let above = exponent_lower(s, l, c + 1e-4).unwrap();
        assert!(below.value > 0.0, "({s},{l}) below: {}", below.value);
        assert_eq!(above.value, 0.0, "({s},{l}) above");
    }
}

#[test]
fn exponent_is_nonincreasing_in_rate() {
    let mut prev = f64::INFINITY;
    for i in 1..=12 {
        let r = 0.005 * i as f64;
        let e = exponent_lower(2, 2, r).unwrap().value;
        assert!(e <= prev + 1e-12, "R={r}: {e} > {prev}");
        prev = e;
    }
}

#[test]
fn exponent_decreases_with_s() {
    for r in [0.005, 0.01, 0.02] {
        let e2 = exponent_lower(2, 2, r).unwrap().value;
        let e3 = exponent_lower(3, 2, r).unwrap().value;
        assert!(e2 >= e3 - 1e-12, "R={r}: E(2)={e2} E(3)={e3}");
    }
}

#[test]
fn inner_minimum_matches_dense_grid() {
    for (s, l) in [(2, 2), (3, 2), (2, 3)] {
        for &big_q in &[0.2, 0.35, 0.5] {
            for r in [0.005, 0.02, 0.04] {
                let fast = exponent_lower_at_q(s, l, r, big_q).unwrap();
                let (_, dense) = exponent_lower_at_q_dense(s, l, r, big_q).unwrap();
                assert!(fast.value <= dense + 1e-12, "({s},{l},Q={big_q},R={r})");
                assert!(dense - fast.value < 1e-4, "({s},{l},Q={big_q},R={r}): {} vs {dense}", fast.value);
            }
        }
    }
}

#[test]
fn saturated_exponent_is_zero() {
    let e = exponent_lower_at_q(2, 2, 0.3, 0.5).unwrap();
    assert!(e.saturated);
    assert_eq!(e.value, 0.0);
}

#[test]
fn domain_errors() {
    assert!(matches!(solve_y(2, 0.3, 0.7), Err(Error::Domain(_))));
    assert!(matches!(capacity_lower(2, 1), Err(Error::Domain(_))));
    assert!(matches!(exponent_lower(2, 2, 0.0), Err(Error::Domain(_))));
    assert!(matches!(solve_z(2, 0.5, 0.4), Err(Error::Domain(_))));
}

#[test]
fn design_floor_tends_to_one_above_upper() {
    let f = design_error_floor(200, 0.3, 2, 2).unwrap();
    assert!(f > 1.0 - 1e-6, "{f}");
    let small = design_error_floor(200, 0.1, 2, 2).unwrap();
    assert_eq!(small, 0.0);
    assert_eq!(superset_count(&BigUint::from(5u32), 2, 2), BigUint::from(15u32));
    assert_eq!(superset_count(&BigUint::from(4u32), 4, 1), BigUint::from(1u32));
}

#[test]
fn asymptotic_constants() {
    for s in [2, 10, 100] {
        let a = asymptotic_rates(s, 2).unwrap();
        assert!((a.rate_upper / a.rate_lower - std::f64::consts::E.powi(2) / 2.0).abs() < 1e-12);
        let expected = std::f64::consts::LOG2_E * 2.0 / (std::f64::consts::E.powi(2) * (s * s) as f64);
        assert!((a.capacity_lower_asym - expected).abs() < 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn entropy_is_symmetric(a in 0.0f64..=1.0) {
        prop_assert!((binary_entropy(a).unwrap() - binary_entropy(1.0 - a).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn y_residual(s in 2usize..8, big_q in 0.01f64..0.99, frac in 0.001f64..0.999) {
        let hi = (s as f64 * big_q).min(1.0);
        let q = big_q + (hi - big_q) * frac;
        let (y, info) = solve_y(s, big_q, q).unwrap();
        prop_assert!(y > 0.0 && y < 1.0);
        prop_assert!(info.residual < 1e-12);
    }

    #[test]
    fn z_residual_small(l in 2usize..6, big_q in 0.01f64..0.99, frac in 0.001f64..1.0) {
        let q = big_q + (1.0 - big_q) * frac;
        let (z, info) = solve_z(l, big_q, q).unwrap();
        prop_assert!(z > 0.0 && z < 1.0);
        prop_assert!(info.residual < 1e-12, "residual {}", info.residual);
    }

    #[test]
    fn q_hat_in_union_range(s in 2usize..20, big_q in 0.001f64..0.999) {
        let qh = q_hat(big_q, s).unwrap();
        prop_assert!(qh > big_q && qh <= (s as f64 * big_q).min(1.0));
    }

    #[test]
    fn solvers_are_deterministic(s in 2usize..6, l in 2usize..4, big_q in 0.05f64..0.95) {
        prop_assert_eq!(d_at_qhat(l, big_q, s).unwrap().to_bits(), d_at_qhat(l, big_q, s).unwrap().to_bits());
    }
}
