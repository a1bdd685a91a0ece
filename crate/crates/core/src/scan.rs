//! Parameter sweeps seeded at the critical points, and the searches run on
//! them: periodic windows and attractor jumps.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::map_core::MapInstance;
use crate::orbit::{self, AttractorKind, Cluster, OrbitSegment};
use crate::periodic::{self, HoppingMetric};
use crate::rotation::{self, RotationClass};

/// Smallest separation (in `x`, see [`separation`]) between the attractors
/// of adjacent columns that counts as a jump.
pub const JUMP_THRESHOLD: f64 = 3e-3;
/// Ratio `slope_peak / slope_edges` from which a window is called hopping.
pub const HOPPING_RATIO: f64 = 10.0;
/// Continuation steps used by [`window_report`].
pub const REPORT_STEPS: usize = 200;
/// Boundary bisection stops once the bracket is this fraction of the grid
/// step.
const BISECTION_FRACTION: f64 = 0.01;

/// Which critical point a column's trajectory starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedRole {
    Left,
    Right,
    /// The single critical point of a logistic map.
    Critical,
}

impl SeedRole {
    pub fn as_str(&self) -> &'static str {
        match self {
            SeedRole::Left => "left",
            SeedRole::Right => "right",
            SeedRole::Critical => "critical",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub param: f64,
    /// Starting point of each seed, indexed like [`BifurcationScan::seeds`].
    pub seed_points: Vec<f64>,
    /// Post-transient iterates per seed.
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationScan {
    /// Family, fixed parameters and precision; its swept parameter is
    /// irrelevant.
    pub base: MapInstance,
    pub seeds: Vec<SeedRole>,
    pub transient: usize,
    pub samples: usize,
    /// One column per grid parameter, strictly increasing.
    pub columns: Vec<Column>,
}

impl BifurcationScan {
    pub fn params(&self) -> impl Iterator<Item = f64> + '_ {
        self.columns.iter().map(|c| c.param)
    }

    pub fn range(&self) -> (f64, f64) {
        (
            self.columns.first().map_or(f64::NAN, |c| c.param),
            self.columns.last().map_or(f64::NAN, |c| c.param),
        )
    }

    pub fn step(&self) -> f64 {
        let (lo, hi) = self.range();
        (hi - lo) / (self.columns.len().max(2) - 1) as f64
    }

    pub fn map_at(&self, param: f64) -> Result<MapInstance> {
        self.base.with_parameter(param)
    }

    /// Recorded trajectory of `seed` in column `col`.
    pub fn segment(&self, col: usize, seed: usize) -> Result<OrbitSegment> {
        let c = &self.columns[col];
        Ok(OrbitSegment {
            map: self.map_at(c.param)?,
            seed: c.seed_points[seed],
            transient: self.transient,
            samples: c.points[seed].clone(),
        })
    }

    /// Iterates `seed` at a parameter off the grid with the scan's settings.
    pub fn probe(&self, param: f64, seed: usize) -> Result<OrbitSegment> {
        let m = self.map_at(param)?;
        let s = seed_points(&m, &self.seeds)[seed];
        orbit::iterate(&m, s, self.transient, self.samples)
    }
}

fn seed_roles(m: &MapInstance) -> Vec<SeedRole> {
    if m.is_eos() {
        vec![SeedRole::Left, SeedRole::Right]
    } else {
        vec![SeedRole::Critical]
    }
}

/// Starting points for the given roles. When only one EOS critical point
/// lies in the domain both roles start there; a monotone map starts at the
/// middle of its domain.
fn seed_points(m: &MapInstance, roles: &[SeedRole]) -> Vec<f64> {
    let crit = m.critical_points().points;
    let (lo, hi) = m.domain();
    let fallback = crit.first().copied().unwrap_or(0.5 * (lo + hi));
    roles
        .iter()
        .map(|role| match (role, crit.len()) {
            (SeedRole::Right, 2) => crit[1],
            _ => fallback,
        })
        .collect()
}

/// EOS sweep over `b` with steepness `a` in double precision.
pub fn sweep(
    a: f64,
    b_range: (f64, f64),
    n_params: usize,
    transient: usize,
    samples: usize,
) -> Result<BifurcationScan> {
    let base = MapInstance::eos(a, b_range.0.clamp(0.0, 1.0))?;
    sweep_map(&base, b_range, n_params, transient, samples)
}

/// Sweeps the swept parameter of `base`'s family over `range` on a uniform
/// grid of `n_params` values. Columns are computed in parallel and merged
/// by grid index, so the result does not depend on the thread count.
pub fn sweep_map(
    base: &MapInstance,
    range: (f64, f64),
    n_params: usize,
    transient: usize,
    samples: usize,
) -> Result<BifurcationScan> {
    let (lo, hi) = range;
    if n_params < 2 || !(lo < hi) {
        return Err(Error::InvalidRange(format!(
            "[{lo}, {hi}] with {n_params} parameters"
        )));
    }
    if samples == 0 {
        return Err(Error::InvalidRange("samples must be >= 1".into()));
    }
    base.with_parameter(lo)
        .and_then(|_| base.with_parameter(hi))
        .map_err(|e| Error::InvalidRange(e.to_string()))?;

    let roles = seed_roles(base);
    let columns = (0..n_params)
        .into_par_iter()
        .map(|k| {
            let param = if k == n_params - 1 {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (n_params - 1) as f64
            };
            let m = base.with_parameter(param)?;
            let seed_points = seed_points(&m, &roles);
            let points = seed_points
                .iter()
                .map(|&s| orbit::iterate(&m, s, transient, samples).map(|seg| seg.samples))
                .collect::<Result<Vec<_>>>()?;
            Ok(Column {
                param,
                seed_points,
                points,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(BifurcationScan {
        base: *base,
        seeds: roles,
        transient,
        samples,
        columns,
    })
}

/// A parameter interval on which some seed settles on an attracting orbit
/// of one period.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub param_interval: (f64, f64),
    pub period: usize,
    /// Seeds whose grid runs make up the window.
    pub seeds: Vec<usize>,
    /// Not every seed detects `period` at the midpoint.
    pub seed_split: bool,
    /// Rotational class of the orbit at the midpoint, when it could be
    /// refined.
    pub rotation: Option<RotationClass>,
    pub hopping: Option<HoppingMetric>,
}

impl Window {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.param_interval.0 + self.param_interval.1)
    }

    pub fn contains(&self, p: f64) -> bool {
        p >= self.param_interval.0 && p <= self.param_interval.1
    }

    pub fn is_hopping(&self) -> bool {
        self.hopping.is_some_and(|h| h.ratio() >= HOPPING_RATIO)
    }
}

fn detected(seg: &OrbitSegment, max_period: usize) -> Option<usize> {
    orbit::period_of(&seg.samples, max_period.min(seg.samples.len() / 2))
}

/// Periodic windows of the scan, one per maximal run of grid columns on
/// which a seed has the same detected period.
///
/// Two runs of equal period are joined across columns that have not
/// settled within the transient but sit next to an attracting orbit of
/// that period (multipliers close to 1 converge very slowly). Boundaries
/// are bisected to 1/100 of the grid step, keeping the side where the
/// period is certain. Overlapping runs of different seeds are merged.
pub fn find_windows(scan: &BifurcationScan, max_period: usize) -> Result<Vec<Window>> {
    if scan.columns.is_empty() {
        return Err(Error::EmptyScan);
    }
    let n = scan.columns.len();
    let mut runs: Vec<(usize, usize, usize, usize)> = Vec::new(); // seed, period, first, last

    for seed in 0..scan.seeds.len() {
        let periods: Vec<Option<usize>> = (0..n)
            .into_par_iter()
            .map(|k| scan.segment(k, seed).map(|s| detected(&s, max_period)))
            .collect::<Result<_>>()?;

        let mut seed_runs: Vec<(usize, usize, usize)> = Vec::new();
        let mut k = 0;
        while k < n {
            let Some(p) = periods[k] else {
                k += 1;
                continue;
            };
            let start = k;
            while k + 1 < n && periods[k + 1] == Some(p) {
                k += 1;
            }
            seed_runs.push((p, start, k));
            k += 1;
        }

        let mut merged: Vec<(usize, usize, usize)> = Vec::new();
        for run in seed_runs {
            if let Some(last) = merged.last_mut() {
                let gap = last.2 + 1..run.1;
                if last.0 == run.0
                    && gap.clone().all(|g| periods[g].is_none())
                    && gap.clone().all(|g| {
                        scan.segment(g, seed)
                            .is_ok_and(|s| periodic::attracting_orbit_near(&s, run.0).is_some())
                    })
                {
                    last.2 = run.2;
                    continue;
                }
            }
            merged.push(run);
        }
        runs.extend(merged.into_iter().map(|(p, a, b)| (seed, p, a, b)));
    }

    let step = scan.step();
    let params: Vec<f64> = scan.params().collect();
    let mut windows: Vec<Window> = runs
        .par_iter()
        .map(|&(seed, p, first, last)| {
            let holds = |b: f64| {
                scan.probe(b, seed)
                    .is_ok_and(|s| detected(&s, max_period) == Some(p))
            };
            let lo = if first == 0 {
                params[0]
            } else {
                bisect(params[first - 1], params[first], step, |b| !holds(b)).1
            };
            let hi = if last == n - 1 {
                params[n - 1]
            } else {
                bisect(params[last], params[last + 1], step, holds).0
            };
            Window {
                param_interval: (lo, hi),
                period: p,
                seeds: vec![seed],
                seed_split: false,
                rotation: None,
                hopping: None,
            }
        })
        .filter(|w| w.param_interval.0 < w.param_interval.1)
        .collect();

    windows.sort_by(|a, b| {
        a.param_interval
            .0
            .total_cmp(&b.param_interval.0)
            .then(a.period.cmp(&b.period))
    });
    let mut merged: Vec<Window> = Vec::new();
    for w in windows {
        let overlap = merged.iter_mut().find(|m| {
            m.period == w.period
                && m.param_interval.0 <= w.param_interval.1
                && w.param_interval.0 <= m.param_interval.1
        });
        match overlap {
            Some(m) => {
                m.param_interval.0 = m.param_interval.0.min(w.param_interval.0);
                m.param_interval.1 = m.param_interval.1.max(w.param_interval.1);
                m.seeds.extend(w.seeds);
                m.seeds.sort_unstable();
                m.seeds.dedup();
            }
            None => merged.push(w),
        }
    }

    merged.par_iter_mut().for_each(|w| {
        let mid = w.midpoint();
        let orbits: Vec<_> = (0..scan.seeds.len())
            .map(|s| {
                let seg = scan.probe(mid, s).ok()?;
                let settled = detected(&seg, max_period) == Some(w.period);
                let orb = periodic::attracting_orbit_near(&seg, w.period);
                (settled || orb.is_some()).then_some(orb)
            })
            .collect();
        w.seed_split = orbits.iter().any(Option::is_none);
        w.rotation = orbits
            .into_iter()
            .flatten()
            .flatten()
            .next()
            .and_then(|orb| rotation::classify(&orb.map, &orb).ok());
    });
    Ok(merged)
}

/// Shrinks `[lo, hi]` until it is at most `step / 100` wide, keeping
/// `goes_right(b) == true` to the left of the bracket.
fn bisect(mut lo: f64, mut hi: f64, step: f64, goes_right: impl Fn(f64) -> bool) -> (f64, f64) {
    while hi - lo > BISECTION_FRACTION * step {
        let mid = 0.5 * (lo + hi);
        if goes_right(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Bracket of a discontinuity in the attractor reached by one seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub b_left: f64,
    pub b_right: f64,
    /// Hausdorff distance between the attractors at the bracket ends.
    pub gap: f64,
}

/// Sup-distance from the points of the union of `a` to the union of `b`.
fn directed_hausdorff(a: &[Cluster], b: &[Cluster]) -> f64 {
    let hull = |c: &Cluster| (c.center - 0.5 * c.diameter, c.center + 0.5 * c.diameter);
    let bs: Vec<(f64, f64)> = b.iter().map(hull).collect();
    let dist = |x: f64| {
        bs.iter()
            .map(|&(l, h)| {
                if x < l {
                    l - x
                } else if x > h {
                    x - h
                } else {
                    0.0
                }
            })
            .fold(f64::INFINITY, f64::min)
    };
    let mut worst: f64 = 0.0;
    for (lo, hi) in a.iter().map(hull) {
        worst = worst.max(dist(lo)).max(dist(hi));
        // the farthest point of [lo, hi] from `b` may be a gap midpoint
        for w in bs.windows(2) {
            let m = 0.5 * (w[0].1 + w[1].0);
            if m > lo && m < hi {
                worst = worst.max(dist(m));
            }
        }
    }
    worst
}

/// Hausdorff distance between two unions of intervals.
pub fn hausdorff(a: &[Cluster], b: &[Cluster]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() {
            0.0
        } else {
            f64::INFINITY
        };
    }
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}

/// Smaller of the two directed Hausdorff distances. It vanishes when one
/// attractor lies inside the other (a periodic orbit turning into bands
/// around it, bands merging) and is large only when the attractor moves
/// somewhere else.
pub fn separation(a: &[Cluster], b: &[Cluster]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    directed_hausdorff(a, b).min(directed_hausdorff(b, a))
}

/// Adjacent columns where the attractor of `seed_index` moves away by more
/// than [`JUMP_THRESHOLD`], each bisected to 1/100 of the grid step. The
/// reported gap is the Hausdorff distance across the final bracket.
///
/// Only columns whose attractor is resolved (periodic orbit or cycle of
/// intervals) are compared: samples of a chaotic attractor are scattered
/// too sparsely for their distance to mean anything.
pub fn find_jumps(scan: &BifurcationScan, seed_index: usize) -> Result<Vec<(f64, f64, f64)>> {
    Ok(find_jumps_detailed(scan, seed_index)?
        .into_iter()
        .map(|j| (j.b_left, j.b_right, j.gap))
        .collect())
}

pub fn find_jumps_detailed(scan: &BifurcationScan, seed_index: usize) -> Result<Vec<Jump>> {
    if seed_index >= scan.seeds.len() {
        return Err(Error::InvalidRange(format!(
            "seed index {seed_index} out of range"
        )));
    }
    let max_period = orbit::DEFAULT_MAX_PERIOD.min(scan.samples / 2).max(1);
    let n = scan.columns.len();
    if n < 2 || scan.samples < 2 {
        return Ok(Vec::new());
    }
    let attractor = |seg: &OrbitSegment| seg.classify_attractor(max_period).ok();

    let reports: Vec<_> = (0..n)
        .into_par_iter()
        .map(|k| {
            scan.segment(k, seed_index)
                .ok()
                .as_ref()
                .and_then(attractor)
        })
        .collect();

    let step = scan.step();
    let candidates: Vec<usize> = (0..n - 1)
        .filter(|&k| match (&reports[k], &reports[k + 1]) {
            (Some(l), Some(r)) => {
                l.kind != AttractorKind::Unresolved
                    && r.kind != AttractorKind::Unresolved
                    && separation(&l.clusters, &r.clusters) > JUMP_THRESHOLD
            }
            _ => false,
        })
        .collect();

    let jumps = candidates
        .par_iter()
        .map(|&k| {
            let mut lo = (
                scan.columns[k].param,
                reports[k].as_ref().unwrap().clusters.clone(),
            );
            let mut hi = (
                scan.columns[k + 1].param,
                reports[k + 1].as_ref().unwrap().clusters.clone(),
            );
            while hi.0 - lo.0 > BISECTION_FRACTION * step {
                let mid = 0.5 * (lo.0 + hi.0);
                let Some(rep) = scan
                    .probe(mid, seed_index)
                    .ok()
                    .as_ref()
                    .and_then(attractor)
                else {
                    break;
                };
                if hausdorff(&rep.clusters, &lo.1) <= hausdorff(&rep.clusters, &hi.1) {
                    lo = (mid, rep.clusters);
                } else {
                    hi = (mid, rep.clusters);
                }
            }
            Jump {
                b_left: lo.0,
                b_right: hi.0,
                gap: hausdorff(&lo.1, &hi.1),
            }
        })
        .collect();
    Ok(jumps)
}

/// Adds the continuation-based hopping measurement and the rotational class
/// to a window found by [`find_windows`].
pub fn window_report(base: &MapInstance, window: &Window) -> Result<Window> {
    let branch = periodic::continue_branch_from(
        base,
        window.param_interval,
        window.period,
        0,
        REPORT_STEPS,
    )?;
    let hopping = periodic::hopping_metric(&branch)?;
    let mid = base.with_parameter(window.midpoint())?;
    let rotation = match window.rotation.clone() {
        Some(r) => Some(r),
        None => periodic::find_attracting_orbit(&mid, window.period, orbit::DEFAULT_TRANSIENT)
            .and_then(|orb| rotation::classify(&mid, &orb).ok()),
    };
    Ok(Window {
        rotation,
        hopping: Some(hopping),
        ..window.clone()
    })
}
