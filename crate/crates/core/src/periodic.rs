//! Periodic orbits: Newton refinement, multipliers, parameter continuation
//! and the steepness of the continued branch.

use crate::error::{Error, Result};
use crate::map_core::MapInstance;
use crate::orbit::{self, OrbitSegment, DEFAULT_TRANSIENT};

const MAX_NEWTON_STEPS: usize = 50;
const RESIDUAL_TOL: f64 = 1e-13;
const SINGULAR_TOL: f64 = 1e-14;
const LOWER_PERIOD_TOL: f64 = 1e-11;
const MAX_HALVINGS: u32 = 10;
/// Largest accepted jump of the tracked point per continuation step, as a
/// fraction of the domain width.
pub const MAX_JUMP_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicOrbit {
    pub map: MapInstance,
    pub period: usize,
    /// One full orbit, ascending.
    pub points: Vec<f64>,
    /// `(F^p)'` along the orbit.
    pub multiplier: f64,
}

impl PeriodicOrbit {
    pub fn is_attracting(&self) -> bool {
        self.multiplier.abs() < 1.0
    }

    /// Index in `points` of the point closest to `x`.
    pub fn nearest_index(&self, x: f64) -> usize {
        let mut best = 0;
        for (i, p) in self.points.iter().enumerate() {
            if (p - x).abs() < (self.points[best] - x).abs() {
                best = i;
            }
        }
        best
    }
}

/// Residual `F^p(x) - x`, its derivative, and a bound on the rounding error
/// accumulated while composing `F` `p` times.
fn residual(m: &MapInstance, x: f64, p: usize) -> (f64, f64, f64) {
    let mut y = x;
    let mut slope = 1.0;
    let mut err = 0.0;
    for _ in 0..p {
        let d = m.deriv(y, crate::map_core::Order::First);
        slope *= d;
        err = err * d.abs() + f64::EPSILON * (1.0 + y.abs());
        y = m.eval(y);
    }
    (y - x, slope - 1.0, 4.0 * err)
}

/// Multiplier of the orbit through `x`, i.e. the product of `F'` over `p`
/// consecutive iterates.
pub fn multiplier_at(m: &MapInstance, x: f64, p: usize) -> f64 {
    let mut y = x;
    let mut prod = 1.0;
    for _ in 0..p {
        prod *= m.deriv(y, crate::map_core::Order::First);
        y = m.eval(y);
    }
    prod
}

fn proper_divisors(p: usize) -> impl Iterator<Item = usize> {
    (1..p).filter(move |&q| p.is_multiple_of(q))
}

/// Solves `F^p(x) = x` by Newton's method from `guess`.
///
/// Full Newton steps are taken; if the residual grows on two consecutive
/// steps and a sign change of the residual has been seen, the next iterate
/// is the midpoint of the tightest bracket instead. Convergence means
/// `|F^p(x) - x| < 1e-13`, or, for long and steep compositions whose
/// rounding error exceeds that, a residual within the rounding bound once
/// the Newton step has shrunk to a few ulps.
pub fn refine(m: &MapInstance, guess: f64, period: usize) -> Result<PeriodicOrbit> {
    if period == 0 {
        return Err(Error::InvalidRange("period must be >= 1".into()));
    }
    if !m.in_domain(guess) {
        let (lo, hi) = m.domain();
        return Err(Error::SeedOutOfDomain {
            seed: guess,
            lo,
            hi,
        });
    }

    let mut x = guess;
    // tightest known points with negative / positive residual
    let mut below: Option<f64> = None;
    let mut above: Option<f64> = None;
    let mut last_abs = f64::INFINITY;
    let mut growth = 0;
    let mut converged = false;

    for _ in 0..MAX_NEWTON_STEPS {
        let (g, dg, floor) = residual(m, x, period);
        if !g.is_finite() {
            break;
        }
        if g.abs() < RESIDUAL_TOL {
            converged = true;
            break;
        }
        if g < 0.0 {
            below = Some(x);
        } else {
            above = Some(x);
        }
        growth = if g.abs() > last_abs { growth + 1 } else { 0 };
        last_abs = g.abs();

        if dg.abs() < SINGULAR_TOL {
            return Err(Error::DerivativeSingular(x));
        }
        let newton = x - g / dg;
        let step_small = (newton - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-300);
        if step_small && g.abs() <= floor {
            converged = true;
            break;
        }

        x = match (below, above) {
            (Some(l), Some(h)) if growth >= 2 => {
                growth = 0;
                0.5 * (l + h)
            }
            _ => newton,
        };
        if !m.in_domain(x) {
            match (below, above) {
                (Some(l), Some(h)) => x = 0.5 * (l + h),
                _ => return Err(Error::NoConvergence(MAX_NEWTON_STEPS)),
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence(MAX_NEWTON_STEPS));
    }

    if let Some(q) =
        proper_divisors(period).find(|&q| (m.eval_n(x, q) - x).abs() < LOWER_PERIOD_TOL)
    {
        return Err(Error::ConvergedToLowerPeriod {
            requested: period,
            found: q,
        });
    }

    Ok(orbit_through(m, x, period))
}

/// Builds the orbit record of a (refined) periodic point.
pub fn orbit_through(m: &MapInstance, x: f64, period: usize) -> PeriodicOrbit {
    let mut points = Vec::with_capacity(period);
    let mut y = x;
    let mut multiplier = 1.0;
    for _ in 0..period {
        points.push(y);
        multiplier *= m.deriv(y, crate::map_core::Order::First);
        y = m.eval(y);
    }
    points.sort_by(f64::total_cmp);
    PeriodicOrbit {
        map: *m,
        period,
        points,
        multiplier,
    }
}

/// The attracting period-`period` orbit passing within a tenth of the
/// domain width of the last sample of `seg`, if Newton refinement finds one. Unlike
/// [`OrbitSegment::detect_period`] this also succeeds for trajectories that
/// are still converging slowly (multiplier close to 1).
pub fn attracting_orbit_near(seg: &OrbitSegment, period: usize) -> Option<PeriodicOrbit> {
    let x = *seg.samples.last()?;
    refine(&seg.map, x, period).ok().filter(|orb| {
        orb.is_attracting()
            && (orb.points[orb.nearest_index(x)] - x).abs()
                < MAX_JUMP_FRACTION * seg.map.domain_width()
    })
}

/// Locates an attracting orbit of exactly `period` by iterating the
/// critical points, then refines it.
pub fn find_attracting_orbit(
    m: &MapInstance,
    period: usize,
    transient: usize,
) -> Option<PeriodicOrbit> {
    let seeds = m.critical_points().points;
    seeds.into_iter().find_map(|c| {
        let seg = orbit::iterate(m, c, transient, 4 * period).ok()?;
        attracting_orbit_near(&seg, period)
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchSample {
    pub b: f64,
    pub position: f64,
    pub multiplier: f64,
}

/// Continuation of one point of an attracting periodic orbit across a
/// parameter interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub window: (f64, f64),
    pub period: usize,
    /// Rank of the tracked point among the sorted orbit points.
    pub track_index: usize,
    /// Strictly increasing in `b`.
    pub samples: Vec<BranchSample>,
    /// `(b, dP/db)` at every sample.
    pub derivative_estimates: Vec<(f64, f64)>,
}

impl Branch {
    pub fn from_samples(
        window: (f64, f64),
        period: usize,
        track_index: usize,
        samples: Vec<BranchSample>,
    ) -> Self {
        let derivative_estimates = differentiate(&samples);
        Self {
            window,
            period,
            track_index,
            samples,
            derivative_estimates,
        }
    }
}

/// Three-point derivative on a non-uniform grid, two-point at the ends.
fn differentiate(samples: &[BranchSample]) -> Vec<(f64, f64)> {
    let n = samples.len();
    (0..n)
        .map(|i| {
            let s = &samples[i];
            let d = if n < 2 {
                0.0
            } else if i == 0 {
                (samples[1].position - s.position) / (samples[1].b - s.b)
            } else if i == n - 1 {
                (s.position - samples[i - 1].position) / (s.b - samples[i - 1].b)
            } else {
                let (l, r) = (&samples[i - 1], &samples[i + 1]);
                let h1 = s.b - l.b;
                let h2 = r.b - s.b;
                h2 / (h1 * (h1 + h2)) * (s.position - l.position)
                    + h1 / (h2 * (h1 + h2)) * (r.position - s.position)
            };
            (s.b, d)
        })
        .collect()
}

/// [`continue_branch_from`] for the EOS family with steepness `a` in
/// double precision.
pub fn continue_branch(
    a: f64,
    window: (f64, f64),
    period: usize,
    track_index: usize,
    steps: usize,
) -> Result<Branch> {
    let base = MapInstance::eos(a, 0.5 * (window.0 + window.1))?;
    continue_branch_from(&base, window, period, track_index, steps)
}

/// Continues the attracting period-`period` orbit found at the middle of
/// `window` in both directions, `steps` uniform steps across the window.
///
/// `base` fixes the family, its non-swept parameters and the precision.
/// A step is retried with half the size (at most ten times) when refinement
/// fails, the orbit stops attracting, or the tracked point moves more than a
/// tenth of the domain width; the branch ends where that still fails.
pub fn continue_branch_from(
    base: &MapInstance,
    window: (f64, f64),
    period: usize,
    track_index: usize,
    steps: usize,
) -> Result<Branch> {
    let (lo, hi) = window;
    if !(lo < hi) || steps < 2 {
        return Err(Error::InvalidRange(format!(
            "window [{lo}, {hi}] with {steps} steps"
        )));
    }
    if track_index >= period {
        return Err(Error::InvalidRange(format!(
            "track index {track_index} >= period {period}"
        )));
    }
    let h = (hi - lo) / steps as f64;
    let mid_k = steps / 2;
    let mid_b = lo + mid_k as f64 * h;
    let mid_map = base.with_parameter(mid_b)?;
    let seed_orbit = find_attracting_orbit(&mid_map, period, DEFAULT_TRANSIENT)
        .ok_or(Error::SeedOrbitNotFound { period, b: mid_b })?;

    let start = BranchSample {
        b: mid_b,
        position: seed_orbit.points[track_index],
        multiplier: seed_orbit.multiplier,
    };
    let max_jump = MAX_JUMP_FRACTION * mid_map.domain_width();

    let march = |target_k: usize, dir: f64| -> Vec<BranchSample> {
        let mut out = Vec::new();
        let mut cur = start;
        let mut k = mid_k;
        while k != target_k {
            let next_k = if dir > 0.0 { k + 1 } else { k - 1 };
            let goal = lo + next_k as f64 * h;
            let mut step = (goal - cur.b).abs();
            let mut halvings = 0;
            loop {
                let b = cur.b + dir * step;
                let accepted = base.with_parameter(b).ok().and_then(|m| {
                    let orb = refine(&m, cur.position, period).ok()?;
                    let pos = orb.points[track_index];
                    (orb.is_attracting() && (pos - cur.position).abs() <= max_jump).then_some(
                        BranchSample {
                            b,
                            position: pos,
                            multiplier: orb.multiplier,
                        },
                    )
                });
                match accepted {
                    Some(s) => {
                        cur = s;
                        out.push(s);
                        break;
                    }
                    None if halvings < MAX_HALVINGS => {
                        step *= 0.5;
                        halvings += 1;
                    }
                    None => return out,
                }
            }
            if (cur.b - goal).abs() <= 1e-12 * h {
                k = next_k;
            }
        }
        out
    };

    let right = march(steps, 1.0);
    let mut left = march(0, -1.0);
    left.reverse();
    left.push(start);
    left.extend(right);

    Ok(Branch::from_samples(window, period, track_index, left))
}

/// Steepness summary of a branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoppingMetric {
    /// Parameter where `|dP/db|` is largest.
    pub b_peak: f64,
    pub slope_peak: f64,
    /// Mean `|dP/db|` over the outer 20% of the samples (10% at each end).
    pub slope_edges: f64,
}

impl HoppingMetric {
    pub fn ratio(&self) -> f64 {
        if self.slope_edges == 0.0 {
            if self.slope_peak == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.slope_peak / self.slope_edges
        }
    }
}

pub fn hopping_metric(branch: &Branch) -> Result<HoppingMetric> {
    let d = &branch.derivative_estimates;
    if d.len() < 5 {
        return Err(Error::BranchTooShort(d.len()));
    }
    let (b_peak, slope_peak) = d
        .iter()
        .map(|&(b, s)| (b, s.abs()))
        .fold((d[0].0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    let edge = ((d.len() as f64 * 0.1).round() as usize).max(1);
    let outer = d[..edge].iter().chain(&d[d.len() - edge..]);
    let slope_edges = outer.map(|&(_, s)| s.abs()).sum::<f64>() / (2 * edge) as f64;
    Ok(HoppingMetric {
        b_peak,
        slope_peak,
        slope_edges,
    })
}
