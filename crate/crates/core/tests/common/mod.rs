//! Independent reference computations shared by the integration tests.

#![allow(dead_code)]

use eosmap::MapInstance;

/// Textbook logistic sigmoid, fine for |u| well below the overflow range.
pub fn naive_sigmoid(u: f64) -> f64 {
    1.0 / (1.0 + (-u).exp())
}

pub fn naive_eos(a: f64, b: f64, x: f64) -> f64 {
    x + b - naive_sigmoid(a * x)
}

/// Fourth-order central difference of `f` at `x`.
pub fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

/// Period-2 orbit of `r x (1 - x)` and its multiplier, from the quadratic
/// `F^2(x) = x` divided by the fixed-point factors.
pub fn logistic_period_two(r: f64) -> ([f64; 2], f64) {
    let disc = ((r + 1.0) * (r - 3.0)).sqrt();
    let lo = (r + 1.0 - disc) / (2.0 * r);
    let hi = (r + 1.0 + disc) / (2.0 * r);
    ([lo, hi], 4.0 + 2.0 * r - r * r)
}

/// `(F^p)'(x)` by central differences of the composed map.
pub fn fd_multiplier(m: &MapInstance, x: f64, p: usize, h: f64) -> f64 {
    central_diff(|y| m.eval_n(y, p), x, h)
}

/// Whether `needle` occurs in order (not necessarily contiguously) in
/// `hay`.
pub fn is_subsequence(needle: &[usize], hay: &[usize]) -> bool {
    let mut it = hay.iter();
    needle.iter().all(|n| it.any(|h| h == n))
}
