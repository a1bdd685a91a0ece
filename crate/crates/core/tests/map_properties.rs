mod common;

use common::{central_diff, naive_eos};
use eosmap::{MapInstance, Order, Precision};
use proptest::prelude::*;

fn eos_params() -> impl Strategy<Value = (f64, f64)> {
    (5.0f64..200.0, 0.0f64..=1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn rotated_map_is_conjugate((a, b) in eos_params(), t in 0.0f64..=1.0) {
        let m = MapInstance::eos(a, b).unwrap();
        let x = (b - 1.0) + t;
        let mirror = m.mirrored();
        prop_assert!((m.eval(x) + mirror.eval(-x)).abs() <= 1e-13);
    }

    #[test]
    fn matches_naive_formula((a, b) in eos_params(), t in 0.0f64..=1.0) {
        let m = MapInstance::eos(a, b).unwrap();
        let x = (b - 1.0) + t;
        prop_assume!((a * x).abs() < 30.0);
        prop_assert!((m.eval(x) - naive_eos(a, b, x)).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn compensated_agrees_with_double((a, b) in eos_params(), t in 0.0f64..=1.0) {
        let m = MapInstance::eos(a, b).unwrap();
        let c = m.with_precision(Precision::Compensated);
        let x = (b - 1.0) + t;
        prop_assert!((m.eval(x) - c.eval(x)).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn eos_derivatives_match_differences(a in 5.0f64..200.0, b in 0.0f64..=1.0, t in 0.01f64..0.99) {
        let m = MapInstance::eos(a, b).unwrap();
        let x = (b - 1.0) + t;
        let h = 1e-3 / a;
        let cases = [
            (Order::First, central_diff(|y| m.eval(y), x, h), 1.0),
            (Order::Second, central_diff(|y| m.deriv(y, Order::First), x, h), a * a),
            (Order::Third, central_diff(|y| m.deriv(y, Order::Second), x, h), a * a * a),
        ];
        for (order, fd, scale) in cases {
            let d = m.deriv(x, order);
            // relative error is meaningless next to a zero of the derivative
            if d.abs() < 1e-3 * scale {
                continue;
            }
            prop_assert!((d - fd).abs() <= 1e-5 * d.abs(), "{:?}: {} vs {}", order, d, fd);
        }
    }

    #[test]
    fn logistic_derivatives_match_differences(r in 0.1f64..=4.0, x in 0.0f64..=1.0) {
        let m = MapInstance::logistic(r).unwrap();
        let h = 1e-3;
        let d1 = m.deriv(x, Order::First);
        let d2 = m.deriv(x, Order::Second);
        let fd1 = central_diff(|y| m.eval(y), x, h);
        let fd2 = central_diff(|y| m.deriv(y, Order::First), x, h);
        if d1.abs() > 1e-3 * r {
            prop_assert!((d1 - fd1).abs() <= 1e-5 * d1.abs());
        }
        prop_assert!((d2 - fd2).abs() <= 1e-5 * d2.abs());
        prop_assert_eq!(m.deriv(x, Order::Third), 0.0);
    }

    #[test]
    fn iterate_is_recomputable((a, b) in eos_params(), t in 0.0f64..=1.0, n in 1usize..200) {
        let m = MapInstance::eos(a, b).unwrap();
        let x = (b - 1.0) + t;
        let s1 = eosmap::orbit::iterate(&m, x, n, 20).unwrap();
        let s2 = eosmap::orbit::iterate(&m, x, n, 20).unwrap();
        prop_assert_eq!(&s1.samples, &s2.samples);
        for w in s1.samples.windows(2) {
            prop_assert_eq!(w[1], m.eval(w[0]));
        }
    }
}

#[test]
fn domain_is_invariant() {
    for i in 1..=99 {
        let b = i as f64 / 100.0;
        let m = MapInstance::eos(100.0, b).unwrap();
        let (lo, hi) = m.domain();
        for k in 0..=10_000 {
            let x = lo + (hi - lo) * k as f64 / 10_000.0;
            let y = m.eval(x);
            assert!(m.in_domain(y), "b={b} x={x} F(x)={y}");
        }
    }
}

#[test]
fn schwarzian_is_negative() {
    let maps = [
        MapInstance::eos(100.0, 0.1).unwrap(),
        MapInstance::eos(100.0, 1.0 / 3.0).unwrap(),
        MapInstance::eos(100.0, 0.45).unwrap(),
        MapInstance::logistic(3.5).unwrap(),
        MapInstance::logistic(3.83).unwrap(),
    ];
    for m in maps {
        let (lo, hi) = m.domain();
        let mut checked = 0;
        for k in 0..1000 {
            let x = lo + (hi - lo) * (k as f64 + 0.5) / 1000.0;
            if let Ok(s) = m.schwarzian(x) {
                assert!(s < 0.0, "{m:?} x={x} S={s}");
                checked += 1;
            }
        }
        assert!(checked >= 990);
    }
}

#[test]
fn derivative_changes_sign_exactly_at_critical_points() {
    let maps = [
        MapInstance::eos(100.0, 0.3).unwrap(),
        MapInstance::eos(100.0, 0.02).unwrap(),
        MapInstance::eos(7.0, 0.5).unwrap(),
        MapInstance::eos(3.0, 0.5).unwrap(),
        MapInstance::logistic(3.7).unwrap(),
    ];
    for m in maps {
        let crit = m.critical_points().points;
        let (lo, hi) = m.domain();
        let d = |x: f64| m.deriv(x, Order::First);
        for &c in &crit {
            let eps = 1e-6 * (hi - lo);
            assert!(d(c - eps) * d(c + eps) < 0.0, "{m:?} at {c}");
        }
        // no sign change strictly inside a lap
        let mut edges = vec![lo];
        edges.extend(&crit);
        edges.push(hi);
        for lap in edges.windows(2) {
            let (l, r) = (lap[0], lap[1]);
            let pad = 1e-9 * (hi - lo);
            let signs: Vec<bool> = (0..=10_000)
                .map(|k| l + pad + (r - l - 2.0 * pad) * k as f64 / 10_000.0)
                .map(|x| d(x) > 0.0)
                .collect();
            assert!(
                signs.windows(2).all(|w| w[0] == w[1]),
                "{m:?} lap [{l}, {r}]"
            );
        }
    }
}
