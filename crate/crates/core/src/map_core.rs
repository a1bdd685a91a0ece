//! Map families, their derivatives and critical structure.
//!
//! Two one-parameter families are supported:
//!
//! * EOS maps `F(x) = x + b - 1/(1 + e^{-ax})` on `[b - 1, b]`, bimodal for
//!   `a > 4`;
//! * logistic maps `l(x) = r x (1 - x)` on `[0, 1]`, unimodal.
//!
//! Every analysis in the crate goes through [`MapInstance`].

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};

/// Threshold on `|F'(x)|` below which `x` is treated as a critical point.
pub const CRITICAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Eos { a: f64, b: f64 },
    Logistic { r: f64 },
}

/// Arithmetic used by [`MapInstance::eval`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    #[default]
    Double,
    /// Double-double evaluation, correctly rounded to `f64` at the end of
    /// each step. Intended for very steep EOS maps (`a >= 150`).
    Compensated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapInstance {
    family: Family,
    precision: Precision,
}

/// Critical points inside the domain, ascending.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CriticalSet {
    pub points: Vec<f64>,
}

impl CriticalSet {
    /// Number of monotone laps of the map on its domain.
    pub fn laps(&self) -> usize {
        self.points.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Which derivative to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    First,
    Second,
    Third,
}

/// Logistic sigmoid `1 / (1 + e^{-u})`, overflow-free for any `u`.
#[inline]
pub fn sigmoid(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

fn sigmoid_dd(u: DoubleDouble) -> DoubleDouble {
    let e = (-u.abs()).exp();
    let denom = DoubleDouble::ONE + e;
    if u.hi >= 0.0 {
        DoubleDouble::ONE / denom
    } else {
        e / denom
    }
}

impl MapInstance {
    pub fn eos(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "EOS steepness a = {a} must be > 0"
            )));
        }
        if !(0.0..=1.0).contains(&b) {
            return Err(Error::InvalidParameter(format!(
                "EOS offset b = {b} must lie in [0, 1]"
            )));
        }
        Ok(Self {
            family: Family::Eos { a, b },
            precision: Precision::Double,
        })
    }

    pub fn logistic(r: f64) -> Result<Self> {
        if !(r > 0.0 && r <= 4.0) {
            return Err(Error::InvalidParameter(format!(
                "logistic r = {r} must lie in (0, 4]"
            )));
        }
        Ok(Self {
            family: Family::Logistic { r },
            precision: Precision::Double,
        })
    }

    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn is_eos(&self) -> bool {
        matches!(self.family, Family::Eos { .. })
    }

    /// The family parameter swept in bifurcation diagrams: `b` for EOS, `r`
    /// for logistic maps.
    pub fn parameter(&self) -> f64 {
        match self.family {
            Family::Eos { b, .. } => b,
            Family::Logistic { r } => r,
        }
    }

    /// Same family and fixed parameters, with the swept parameter replaced.
    pub fn with_parameter(&self, p: f64) -> Result<Self> {
        let m = match self.family {
            Family::Eos { a, .. } => Self::eos(a, p)?,
            Family::Logistic { .. } => Self::logistic(p)?,
        };
        Ok(m.with_precision(self.precision))
    }

    /// The EOS map with `b` replaced by `1 - b`; conjugate to `self` via
    /// `x -> -x`. Logistic maps are returned unchanged.
    pub fn mirrored(&self) -> Self {
        match self.family {
            Family::Eos { a, b } => Self {
                family: Family::Eos { a, b: 1.0 - b },
                precision: self.precision,
            },
            Family::Logistic { .. } => *self,
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        match self.family {
            Family::Eos { b, .. } => (b - 1.0, b),
            Family::Logistic { .. } => (0.0, 1.0),
        }
    }

    pub fn domain_width(&self) -> f64 {
        let (lo, hi) = self.domain();
        hi - lo
    }

    pub fn in_domain(&self, x: f64) -> bool {
        let (lo, hi) = self.domain();
        x >= lo && x <= hi
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match (self.family, self.precision) {
            (Family::Eos { a, b }, Precision::Double) => x + b - sigmoid(a * x),
            (Family::Logistic { r }, Precision::Double) => r * x * (1.0 - x),
            (Family::Eos { a, b }, Precision::Compensated) => {
                let s = sigmoid_dd(DoubleDouble::from_prod(a, x));
                (DoubleDouble::from_f64(x) + DoubleDouble::from_f64(b) - s).to_f64()
            }
            (Family::Logistic { r }, Precision::Compensated) => {
                let one_minus = DoubleDouble::ONE - DoubleDouble::from_f64(x);
                (DoubleDouble::from_prod(r, x) * one_minus).to_f64()
            }
        }
    }

    /// `n`-fold composition `F^n(x)`.
    pub fn eval_n(&self, mut x: f64, n: usize) -> f64 {
        for _ in 0..n {
            x = self.eval(x);
        }
        x
    }

    /// First three derivatives at `x`.
    pub fn derivatives(&self, x: f64) -> [f64; 3] {
        match self.family {
            Family::Eos { a, .. } => {
                let u = a * x;
                // q = s(1 - s) written through e = exp(-|u|) so that the
                // tails keep full relative accuracy
                let e = (-u.abs()).exp();
                let q = e / ((1.0 + e) * (1.0 + e));
                let one_minus_2s = if u >= 0.0 {
                    -(1.0 - e) / (1.0 + e)
                } else {
                    (1.0 - e) / (1.0 + e)
                };
                [
                    1.0 - a * q,
                    -a * a * q * one_minus_2s,
                    -a * a * a * q * (1.0 - 6.0 * q),
                ]
            }
            Family::Logistic { r } => [r * (1.0 - 2.0 * x), -2.0 * r, 0.0],
        }
    }

    pub fn deriv(&self, x: f64, order: Order) -> f64 {
        let d = self.derivatives(x);
        match order {
            Order::First => d[0],
            Order::Second => d[1],
            Order::Third => d[2],
        }
    }

    /// `F'''/F' - 3/2 (F''/F')^2`.
    pub fn schwarzian(&self, x: f64) -> Result<f64> {
        let [d1, d2, d3] = self.derivatives(x);
        if d1.abs() < CRITICAL_TOL {
            return Err(Error::CriticalPointSingularity(x));
        }
        let ratio = d2 / d1;
        Ok(d3 / d1 - 1.5 * ratio * ratio)
    }

    /// Critical points lying strictly inside the domain.
    ///
    /// EOS maps with `a <= 4` are monotone and yield an empty set. For small
    /// `b` (or `b` close to 1) one of the two EOS critical points falls
    /// outside `[b - 1, b]` and the map is unimodal on its domain.
    pub fn critical_points(&self) -> CriticalSet {
        let candidates = self.critical_points_unclipped();
        let (lo, hi) = self.domain();
        CriticalSet {
            points: candidates
                .into_iter()
                .filter(|&c| c > lo && c < hi)
                .collect(),
        }
    }

    /// Solutions of `F'(x) = 0` on the whole real line, ascending.
    pub fn critical_points_unclipped(&self) -> Vec<f64> {
        match self.family {
            Family::Eos { a, .. } => {
                if a <= 4.0 {
                    return Vec::new();
                }
                let root = (1.0 - 4.0 / a).sqrt();
                let s = 0.5 * (1.0 + root);
                // 1 - s = 1 / (a s), avoids cancellation for large a
                let c = (s * s * a).ln() / a;
                vec![-c, c]
            }
            Family::Logistic { .. } => vec![0.5],
        }
    }

    /// Fixed points of the map: the unique interior one for EOS, `0` and
    /// `1 - 1/r` (when it lies in the domain) for logistic maps.
    pub fn fixed_points(&self) -> Result<Vec<f64>> {
        match self.family {
            Family::Eos { a, b } => {
                if b <= 0.0 || b >= 1.0 {
                    return Err(Error::NoInteriorFixedPoint(b));
                }
                Ok(vec![(b / (1.0 - b)).ln() / a])
            }
            Family::Logistic { r } => {
                if r > 1.0 {
                    Ok(vec![0.0, 1.0 - 1.0 / r])
                } else {
                    Ok(vec![0.0])
                }
            }
        }
    }
}
