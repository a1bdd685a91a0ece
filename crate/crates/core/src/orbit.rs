//! Trajectories, empirical periods and attractor classification.

use crate::error::{Error, Result};
use crate::map_core::MapInstance;

/// Two iterates closer than this are the same periodic point.
pub const TOL_POINT: f64 = 1e-7;
/// Agglomeration distance when grouping samples into clusters.
pub const TOL_CLUSTER: f64 = 1e-5;
/// Smallest cluster diameter that counts as an interval.
pub const TOL_INTERVAL: f64 = 1e-4;

pub const DEFAULT_TRANSIENT: usize = 20_000;
pub const DEFAULT_SAMPLES: usize = 500;
pub const DEFAULT_MAX_PERIOD: usize = 64;

/// Post-transient slice of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitSegment {
    pub map: MapInstance,
    pub seed: f64,
    pub transient: usize,
    pub samples: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttractorKind {
    PeriodicOrbit,
    IntervalCycle,
    Unresolved,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cluster {
    pub center: f64,
    pub diameter: f64,
}

impl Cluster {
    fn from_hull(lo: f64, hi: f64) -> Self {
        Self {
            center: 0.5 * (lo + hi),
            diameter: hi - lo,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttractorReport {
    pub kind: AttractorKind,
    pub period: Option<usize>,
    /// Sorted by center.
    pub clusters: Vec<Cluster>,
    pub seed: f64,
}

/// Skips `transient` iterates of `seed`, then records the next `samples`.
pub fn iterate(
    m: &MapInstance,
    seed: f64,
    transient: usize,
    samples: usize,
) -> Result<OrbitSegment> {
    if !m.in_domain(seed) {
        let (lo, hi) = m.domain();
        return Err(Error::SeedOutOfDomain { seed, lo, hi });
    }
    if samples == 0 {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let mut x = m.eval_n(seed, transient);
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        x = m.eval(x);
        out.push(x);
    }
    Ok(OrbitSegment {
        map: *m,
        seed,
        transient,
        samples: out,
    })
}

impl OrbitSegment {
    fn check_len(&self, max_period: usize) -> Result<()> {
        let needed = 2 * max_period.max(1);
        if self.samples.len() < needed {
            return Err(Error::InsufficientSamples {
                needed,
                got: self.samples.len(),
            });
        }
        Ok(())
    }

    /// Smallest `p <= max_period` with `|x[i+p] - x[i]| < TOL_POINT` along
    /// the whole segment.
    pub fn detect_period(&self, max_period: usize) -> Result<Option<usize>> {
        self.check_len(max_period)?;
        Ok(period_of(&self.samples, max_period))
    }

    /// Classifies the limit set sampled by this segment as a periodic orbit,
    /// a cycle of intervals, or neither.
    ///
    /// Samples are first agglomerated into clusters (gaps wider than
    /// [`TOL_CLUSTER`] separate clusters). If that does not give a cyclic
    /// itinerary, which happens when a chaotic band is sampled too sparsely
    /// to look connected, the samples are grouped by residue `i mod p` for
    /// increasing `p >= 2` and the first `p` whose group hulls are pairwise
    /// separated is used instead.
    ///
    /// A wide cycle whose every `2p`-step subsequence is monotone is an orbit
    /// still converging (multiplier close to `±1`), not a cycle of intervals,
    /// and is reported as unresolved.
    pub fn classify_attractor(&self, max_period: usize) -> Result<AttractorReport> {
        self.check_len(max_period)?;
        let xs = &self.samples;

        let (clusters, labels) = agglomerate(xs);
        let cycle = if clusters.len() <= max_period && is_cyclic(&labels, clusters.len()) {
            Some((clusters.len(), clusters.clone()))
        } else {
            residue_cycle(xs, max_period)
        };

        let report = match cycle {
            Some((p, clusters)) => {
                let widest = clusters.iter().map(|c| c.diameter).fold(0.0, f64::max);
                let kind = if widest < TOL_POINT {
                    AttractorKind::PeriodicOrbit
                } else if widest >= TOL_INTERVAL && !is_slow_drift(xs, p) {
                    AttractorKind::IntervalCycle
                } else {
                    AttractorKind::Unresolved
                };
                AttractorReport {
                    kind,
                    period: (kind != AttractorKind::Unresolved).then_some(p),
                    clusters,
                    seed: self.seed,
                }
            }
            None => AttractorReport {
                kind: AttractorKind::Unresolved,
                period: None,
                clusters,
                seed: self.seed,
            },
        };
        Ok(report)
    }
}

pub(crate) fn period_of(xs: &[f64], max_period: usize) -> Option<usize> {
    (1..=max_period.min(xs.len().saturating_sub(1))).find(|&p| {
        xs.iter()
            .zip(&xs[p..])
            .all(|(a, b)| (a - b).abs() < TOL_POINT)
    })
}

/// Single-linkage clusters of `xs` at distance [`TOL_CLUSTER`], with the
/// cluster index of every sample.
pub fn agglomerate(xs: &[f64]) -> (Vec<Cluster>, Vec<usize>) {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));

    let mut clusters = Vec::new();
    let mut labels = vec![0; xs.len()];
    let mut start = match order.first() {
        Some(&i) => xs[i],
        None => return (clusters, labels),
    };
    let mut prev = start;
    for &i in &order {
        let x = xs[i];
        if x - prev > TOL_CLUSTER {
            clusters.push(Cluster::from_hull(start, prev));
            start = x;
        }
        prev = x;
        labels[i] = clusters.len();
    }
    clusters.push(Cluster::from_hull(start, prev));
    (clusters, labels)
}

fn is_cyclic(labels: &[usize], p: usize) -> bool {
    if p == 0 || labels.len() < 2 * p {
        return false;
    }
    let mut seen = vec![false; p];
    for &l in &labels[..p] {
        if seen[l] {
            return false;
        }
        seen[l] = true;
    }
    labels.iter().zip(&labels[p..]).all(|(a, b)| a == b)
}

fn is_slow_drift(xs: &[f64], p: usize) -> bool {
    let stride = 2 * p;
    (0..stride.min(xs.len())).all(|start| {
        let sub: Vec<f64> = xs[start..].iter().step_by(stride).copied().collect();
        sub.windows(2).all(|w| w[1] >= w[0]) || sub.windows(2).all(|w| w[1] <= w[0])
    })
}

fn residue_cycle(xs: &[f64], max_period: usize) -> Option<(usize, Vec<Cluster>)> {
    (2..=max_period).find_map(|p| {
        let mut hulls = vec![(f64::INFINITY, f64::NEG_INFINITY); p];
        for (i, &x) in xs.iter().enumerate() {
            let h = &mut hulls[i % p];
            h.0 = h.0.min(x);
            h.1 = h.1.max(x);
        }
        hulls.sort_by(|a, b| a.0.total_cmp(&b.0));
        let separated = hulls.windows(2).all(|w| w[1].0 - w[0].1 > TOL_CLUSTER);
        separated.then(|| {
            (
                p,
                hulls
                    .iter()
                    .map(|&(lo, hi)| Cluster::from_hull(lo, hi))
                    .collect(),
            )
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(samples: Vec<f64>) -> OrbitSegment {
        OrbitSegment {
            map: MapInstance::logistic(2.0).unwrap(),
            seed: 0.5,
            transient: 0,
            samples,
        }
    }

    #[test]
    fn iterate_examples() {
        let l = MapInstance::logistic(2.0).unwrap();
        assert_eq!(iterate(&l, 0.5, 10, 3).unwrap().samples, vec![0.5; 3]);
        let e = MapInstance::eos(100.0, 0.5).unwrap();
        assert_eq!(iterate(&e, 0.0, 0, 2).unwrap().samples, vec![0.0; 2]);
    }

    #[test]
    fn iterate_rejects_bad_seed() {
        let e = MapInstance::eos(100.0, 0.3).unwrap();
        assert!(matches!(
            iterate(&e, 0.5, 0, 2),
            Err(Error::SeedOutOfDomain { .. })
        ));
        assert!(iterate(&e, 0.0, 0, 0).is_err());
    }

    #[test]
    fn period_from_synthetic_cycle() {
        let s = seg((0..40).map(|i| [0.1, 0.5, 0.9][i % 3]).collect());
        assert_eq!(s.detect_period(8).unwrap(), Some(3));
        assert_eq!(s.detect_period(2).unwrap(), None);
        assert!(matches!(
            s.detect_period(30),
            Err(Error::InsufficientSamples {
                needed: 60,
                got: 40
            })
        ));
    }

    #[test]
    fn classify_fixed_point() {
        let l = MapInstance::logistic(2.0).unwrap();
        let r = iterate(&l, 0.3, 2000, 500)
            .unwrap()
            .classify_attractor(64)
            .unwrap();
        assert_eq!(r.kind, AttractorKind::PeriodicOrbit);
        assert_eq!(r.period, Some(1));
        assert!((r.clusters[0].center - 0.5).abs() < 1e-12);
    }

    #[test]
    fn classify_sparse_band_cycle() {
        // two bands of width 0.01 sampled far more coarsely than TOL_CLUSTER
        let xs: Vec<f64> = (0..200)
            .map(|i| {
                let jitter = ((i * 7919) % 101) as f64 / 100.0 * 0.01;
                if i % 2 == 0 {
                    0.2 + jitter
                } else {
                    0.7 + jitter
                }
            })
            .collect();
        let r = seg(xs).classify_attractor(16).unwrap();
        assert_eq!(r.kind, AttractorKind::IntervalCycle);
        assert_eq!(r.period, Some(2));
        assert_eq!(r.clusters.len(), 2);
    }

    #[test]
    fn classify_unresolved_when_fattened() {
        // converging too slowly: spread of 1e-6, between the two thresholds
        let xs: Vec<f64> = (0..100)
            .map(|i| 0.3 + 1e-6 * ((i % 5) as f64 / 4.0))
            .collect();
        let r = seg(xs).classify_attractor(8).unwrap();
        assert_eq!(r.kind, AttractorKind::Unresolved);
        assert_eq!(r.period, None);
    }

    #[test]
    fn slow_convergence_is_not_an_interval() {
        // period-3 orbit drifting by 1e-6 per period: spread 1.7e-4 > TOL_INTERVAL
        let xs: Vec<f64> = (0..500)
            .map(|i| [-0.5, -0.1, 0.2][i % 3] + 1e-6 * (i / 3) as f64)
            .collect();
        let r = seg(xs).classify_attractor(64).unwrap();
        assert_eq!(r.kind, AttractorKind::Unresolved);
    }

    #[test]
    fn agglomerate_labels() {
        let (c, l) = agglomerate(&[0.5, 0.1, 0.100001, 0.5]);
        assert_eq!(c.len(), 2);
        assert_eq!(l, vec![1, 0, 0, 1]);
    }
}
