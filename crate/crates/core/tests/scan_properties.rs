mod common;

use common::is_subsequence;
use eosmap::orbit::AttractorKind;
use eosmap::periodic;
use eosmap::rotation::{Rational, RotationKind};
use eosmap::scan::{self, sweep, sweep_map, Window};
use eosmap::MapInstance;

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn sweep_is_independent_of_thread_count() {
    let run = || sweep(100.0, (0.1, 0.4), 97, 2000, 100).unwrap();
    let one = in_pool(1, run);
    let many = in_pool(7, run);
    assert_eq!(one, many);
    assert_eq!(one, run());
}

#[test]
fn stored_points_are_recomputable() {
    let s = sweep(100.0, (0.2, 0.25), 5, 300, 40).unwrap();
    for col in &s.columns {
        let m = MapInstance::eos(100.0, col.param).unwrap();
        for (seed, pts) in col.seed_points.iter().zip(&col.points) {
            let mut x = m.eval_n(*seed, 300);
            for &p in pts {
                x = m.eval(x);
                assert_eq!(p, x);
            }
        }
    }
}

#[test]
fn mirrored_sweep_short_horizon() {
    // chaotic amplification (|F'| up to 24) limits pointwise agreement to a
    // few iterates
    let (b0, b1, n) = (0.05, 0.45, 41);
    let s = sweep(100.0, (b0, b1), n, 0, 3).unwrap();
    let t = sweep(100.0, (1.0 - b1, 1.0 - b0), n, 0, 3).unwrap();
    for (k, col) in s.columns.iter().enumerate() {
        let mcol = &t.columns[n - 1 - k];
        assert!((col.param - (1.0 - mcol.param)).abs() < 1e-15);
        let swap = |i: usize| {
            if col.seed_points[0] == col.seed_points[1] {
                i
            } else {
                1 - i
            }
        };
        for i in 0..2 {
            for (x, y) in col.points[i].iter().zip(&mcol.points[swap(i)]) {
                assert!((x + y).abs() < 1e-10, "b={} {x} vs {y}", col.param);
            }
        }
    }
}

#[test]
fn mirrored_sweep_periodic_columns() {
    let (b0, b1, n) = (0.28, 0.32, 41);
    let s = sweep(100.0, (b0, b1), n, 20_000, 500).unwrap();
    let t = sweep(100.0, (1.0 - b1, 1.0 - b0), n, 20_000, 500).unwrap();
    let mut compared = 0;
    for k in 0..n {
        for i in 0..2 {
            let a = s.segment(k, i).unwrap().classify_attractor(64).unwrap();
            let b = t
                .segment(n - 1 - k, 1 - i)
                .unwrap()
                .classify_attractor(64)
                .unwrap();
            assert_eq!(
                a.kind == AttractorKind::PeriodicOrbit,
                b.kind == AttractorKind::PeriodicOrbit
            );
            if a.kind == AttractorKind::PeriodicOrbit {
                assert_eq!(a.period, b.period);
                for (c, d) in a.clusters.iter().zip(b.clusters.iter().rev()) {
                    assert!((c.center + d.center).abs() < 1e-10);
                }
                compared += 1;
            }
        }
    }
    assert!(compared > 20);
}

fn probes_agree(scan: &scan::BifurcationScan, w: &Window) -> bool {
    [0.25, 0.5, 0.75].iter().all(|t| {
        let b = w.param_interval.0 + t * (w.param_interval.1 - w.param_interval.0);
        w.seeds.iter().any(|&s| {
            let seg = scan.probe(b, s).unwrap();
            seg.detect_period(64).unwrap() == Some(w.period)
        })
    })
}

#[test]
fn window_probes_detect_the_period() {
    let cases = [
        (MapInstance::eos(100.0, 0.3).unwrap(), (0.29, 0.31), 400),
        (MapInstance::eos(100.0, 0.12).unwrap(), (0.105, 0.15), 900),
        (MapInstance::logistic(3.8).unwrap(), (3.82, 3.86), 400),
    ];
    for (base, range, n) in cases {
        let s = sweep_map(&base, range, n, 20_000, 500).unwrap();
        let windows = scan::find_windows(&s, 64).unwrap();
        assert!(!windows.is_empty());
        for w in windows
            .iter()
            .filter(|w| w.param_interval.1 - w.param_interval.0 > 4.0 * s.step())
        {
            assert!(probes_agree(&s, w), "{base:?} {w:?}");
        }
    }
}

/// Window periods by onset with the leading period-doubling cascade
/// removed, restricted to periods up to `max`.
fn onset_periods(base: &MapInstance, range: (f64, f64), n: usize, max: usize) -> Vec<usize> {
    let s = sweep_map(base, range, n, 20_000, 500).unwrap();
    let periods: Vec<usize> = scan::find_windows(&s, 64)
        .unwrap()
        .iter()
        .map(|w| w.period)
        .collect();
    let start = periods
        .iter()
        .position(|p| !p.is_power_of_two())
        .unwrap_or(periods.len());
    periods[start..]
        .iter()
        .copied()
        .filter(|&p| p <= max)
        .collect()
}

#[test]
fn small_b_window_order_follows_the_logistic_order() {
    let eos = onset_periods(
        &MapInstance::eos(100.0, 0.01).unwrap(),
        (0.01, 0.04),
        3000,
        6,
    );
    let logistic = onset_periods(&MapInstance::logistic(3.8).unwrap(), (3.6, 4.0), 8000, 6);
    assert_eq!(eos, vec![6, 5, 3, 6, 5, 4]);
    assert!(is_subsequence(&eos, &logistic), "{eos:?} in {logistic:?}");
}

#[test]
fn second_type_windows_appear_in_order_of_period() {
    let s = sweep(100.0, (0.0, 0.07), 2800, 20_000, 500).unwrap();
    let windows = scan::find_windows(&s, 64).unwrap();
    let second: Vec<(usize, Rational)> = windows
        .iter()
        .filter_map(|w| {
            let r = w.rotation.as_ref()?;
            (r.kind == RotationKind::SecondType).then(|| (w.period, r.rotation_number.unwrap()))
        })
        .collect();
    let expected: Vec<(usize, Rational)> = (1..=11).map(|p| (p, Rational::new(1 % p, p))).collect();
    assert_eq!(second, expected);
}

/// Records where the first rotational type begins: the first-type window
/// of smallest b has rotation number 1/9, and the preceding period-10
/// window with rotation number 1/10 is of the second type.
#[test]
fn onset_of_first_type_windows() {
    let s = sweep(100.0, (0.08, 0.16), 3200, 20_000, 500).unwrap();
    let windows = scan::find_windows(&s, 64).unwrap();
    let first = windows
        .iter()
        .find(|w| {
            w.rotation
                .as_ref()
                .is_some_and(|r| r.kind == RotationKind::FirstType)
        })
        .unwrap();
    let r = first.rotation.as_ref().unwrap();
    assert_eq!(r.rotation_number, Some(Rational::new(1, 9)));
    let ten = windows.iter().find(|w| w.period == 10).unwrap();
    assert!(ten.param_interval.1 < first.param_interval.0);
    let r10 = ten.rotation.as_ref().unwrap();
    assert_eq!(
        (r10.kind, r10.rotation_number),
        (RotationKind::SecondType, Some(Rational::new(1, 10)))
    );
}

#[test]
fn period_three_window_is_reported_as_hopping() {
    let s = sweep(100.0, (0.32, 0.35), 300, 20_000, 500).unwrap();
    let w = scan::find_windows(&s, 64)
        .unwrap()
        .into_iter()
        .find(|w| w.period == 3)
        .unwrap();
    assert!(w.contains(1.0 / 3.0));
    let rep = scan::window_report(&s.base, &w).unwrap();
    assert!(rep.is_hopping());
    let h = rep.hopping.unwrap();
    assert!((h.b_peak - 1.0 / 3.0).abs() < 1e-3);
    assert_eq!(rep.rotation.unwrap().kind, RotationKind::FirstType);
    let orb = periodic::find_attracting_orbit(&s.map_at(1.0 / 3.0).unwrap(), 3, 20_000).unwrap();
    assert!(orb.multiplier > 0.99);
}
