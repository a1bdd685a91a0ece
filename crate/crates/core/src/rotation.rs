//! Rotational types of periodic orbits.
//!
//! A period-`p` orbit is rotation-like when `F` permutes its sorted points
//! as a cyclic shift `i -> i + k (mod p)`, i.e. the same way a rigid
//! rotation by `k/p` permutes points on a circle. Rotation-like orbits are
//! then split by how many of their points sit on the decreasing middle lap.

use std::fmt;

use crate::error::{Error, Result};
use crate::map_core::{MapInstance, CRITICAL_TOL};
use crate::periodic::PeriodicOrbit;

/// Rotation number `k/p` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    pub num: usize,
    pub den: usize,
}

impl Rational {
    pub fn new(num: usize, den: usize) -> Self {
        let g = gcd(num, den).max(1);
        Self {
            num: num / g,
            den: den / g,
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Lap index (1-based) of a point. `on_critical` is set when the point is
/// within `1e-12` of a critical point; such points get the lower lap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LapAssignment {
    pub lap: usize,
    pub on_critical: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotationKind {
    FirstType,
    SecondType,
    OtherRotational,
    NonRotational,
}

impl RotationKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RotationKind::FirstType => "first",
            RotationKind::SecondType => "second",
            RotationKind::OtherRotational => "other",
            RotationKind::NonRotational => "none",
        }
    }
}

impl fmt::Display for RotationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotationClass {
    pub kind: RotationKind,
    pub rotation_number: Option<Rational>,
    /// `lap_histogram[j]` counts orbit points on lap `j + 1`.
    pub lap_histogram: Vec<usize>,
    /// Some orbit point coincides with a critical point.
    pub touches_critical: bool,
}

impl RotationClass {
    /// Points on lap 2, the decreasing lap following the first critical
    /// point.
    pub fn middle_lap_count(&self) -> usize {
        self.lap_histogram.get(1).copied().unwrap_or(0)
    }
}

pub fn lap_of(m: &MapInstance, x: f64) -> Result<LapAssignment> {
    let crit = m.critical_points();
    if crit.is_empty() {
        return Err(Error::MonotoneMap);
    }
    let mut lap = 1;
    let mut on_critical = false;
    for &c in &crit.points {
        if (x - c).abs() <= CRITICAL_TOL {
            on_critical = true;
            break;
        }
        if x > c {
            lap += 1;
        } else {
            break;
        }
    }
    Ok(LapAssignment { lap, on_critical })
}

/// Rotation number of the orbit if `F` acts on its sorted points as a
/// cyclic shift; `None` otherwise.
pub fn is_rotation_like(orbit: &PeriodicOrbit) -> Option<Rational> {
    let p = orbit.points.len();
    if p <= 1 {
        return Some(Rational { num: 0, den: 1 });
    }
    let rank_of_image = |i: usize| orbit.nearest_index(orbit.map.eval(orbit.points[i]));
    let k = (rank_of_image(0) + p) % p;
    (1..p)
        .all(|i| rank_of_image(i) == (i + k) % p)
        .then(|| Rational::new(k, p))
}

pub fn classify(m: &MapInstance, orbit: &PeriodicOrbit) -> Result<RotationClass> {
    let laps = m.critical_points().laps();
    if laps == 1 {
        return Err(Error::MonotoneMap);
    }
    let mut lap_histogram = vec![0; laps];
    let mut touches_critical = false;
    for &x in &orbit.points {
        let a = lap_of(m, x)?;
        lap_histogram[a.lap - 1] += 1;
        touches_critical |= a.on_critical;
    }
    let rotation_number = is_rotation_like(orbit);
    let middle = lap_histogram[1];
    let kind = match rotation_number {
        None => RotationKind::NonRotational,
        Some(_) if middle == 0 => RotationKind::FirstType,
        Some(_) if middle == 1 => RotationKind::SecondType,
        Some(_) => RotationKind::OtherRotational,
    };
    Ok(RotationClass {
        kind,
        rotation_number,
        lap_histogram,
        touches_critical,
    })
}
