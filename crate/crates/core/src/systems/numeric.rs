use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monoid::MonoidElement;

/// Comparison tolerance for numeric points.
pub const NUMERIC_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseSpace {
    /// `[0, 1]` with `|x − y|`.
    Interval,
    /// `ℝ/ℤ` with `min(|x − y|, 1 − |x − y|)`.
    Circle,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum MapFamily {
    Doubling,
    Tent { slope: f64 },
    Logistic { r: f64 },
    Rotation { alpha: f64 },
    /// Multiplication by `a` and by `b` on the circle; a rank-2 action.
    CommutingMult { a: u32, b: u32 },
}

/// A cascade (or rank-2 commuting action) on the interval or the circle,
/// evaluated in double precision.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericCascade {
    family: MapFamily,
}

impl NumericCascade {
    pub fn new(family: MapFamily) -> Result<Self> {
        match family {
            MapFamily::Tent { slope } if !(slope > 0.0 && slope <= 2.0) => {
                return Err(Error::InvalidParameter(format!("tent slope {slope} outside (0, 2]")));
            }
            MapFamily::Logistic { r } if !(0.0..=4.0).contains(&r) => {
                return Err(Error::InvalidParameter(format!("logistic r = {r} outside [0, 4]")));
            }
            MapFamily::Rotation { alpha } if !alpha.is_finite() => {
                return Err(Error::InvalidParameter("rotation angle must be finite".into()));
            }
            MapFamily::CommutingMult { a, b } if a == 0 || b == 0 => {
                return Err(Error::InvalidParameter("multipliers must be positive".into()));
            }
            _ => {}
        }
        Ok(NumericCascade { family })
    }

    pub fn doubling() -> Self {
        NumericCascade { family: MapFamily::Doubling }
    }

    pub fn tent(slope: f64) -> Result<Self> {
        Self::new(MapFamily::Tent { slope })
    }

    pub fn logistic(r: f64) -> Result<Self> {
        Self::new(MapFamily::Logistic { r })
    }

    pub fn rotation(alpha: f64) -> Result<Self> {
        Self::new(MapFamily::Rotation { alpha })
    }

    pub fn commuting_mult(a: u32, b: u32) -> Result<Self> {
        Self::new(MapFamily::CommutingMult { a, b })
    }

    pub fn family(&self) -> MapFamily {
        self.family
    }

    pub fn rank(&self) -> usize {
        match self.family {
            MapFamily::CommutingMult { .. } => 2,
            _ => 1,
        }
    }

    pub fn space(&self) -> PhaseSpace {
        match self.family {
            MapFamily::Doubling | MapFamily::Rotation { .. } | MapFamily::CommutingMult { .. } => PhaseSpace::Circle,
            MapFamily::Tent { .. } | MapFamily::Logistic { .. } => PhaseSpace::Interval,
        }
    }

    /// Brings `x` into the phase space.
    pub fn normalize(&self, x: f64) -> f64 {
        match self.space() {
            PhaseSpace::Circle => wrap(x),
            PhaseSpace::Interval => x.clamp(0.0, 1.0),
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x.is_finite()
            && match self.space() {
                PhaseSpace::Circle => (0.0..1.0).contains(&x),
                PhaseSpace::Interval => (0.0..=1.0).contains(&x),
            }
    }

    /// One application of generator `i`.
    pub fn step(&self, i: usize, x: f64) -> f64 {
        match self.family {
            MapFamily::Doubling => wrap(2.0 * x),
            MapFamily::Tent { slope } => (slope * x.min(1.0 - x)).clamp(0.0, 1.0),
            MapFamily::Logistic { r } => (r * x * (1.0 - x)).clamp(0.0, 1.0),
            MapFamily::Rotation { alpha } => wrap(x + alpha),
            MapFamily::CommutingMult { a, b } => wrap(if i == 0 { a as f64 } else { b as f64 } * x),
        }
    }

    /// Applies generator `i` `n` times.
    pub fn iterate(&self, i: usize, mut x: f64, n: u64) -> f64 {
        for _ in 0..n {
            x = self.step(i, x);
        }
        x
    }

    pub fn act(&self, t: &MonoidElement, x: f64) -> Result<f64> {
        if t.rank() != self.rank() {
            return Err(Error::RankMismatch { expected: self.rank(), got: t.rank() });
        }
        if !self.contains(x) {
            return Err(Error::ForeignPoint);
        }
        Ok(t.coords().iter().enumerate().fold(x, |acc, (i, &n)| self.iterate(i, acc, n)))
    }

    pub fn distance(&self, x: f64, y: f64) -> f64 {
        let d = (x - y).abs();
        match self.space() {
            PhaseSpace::Interval => d,
            PhaseSpace::Circle => {
                let d = d.rem_euclid(1.0);
                d.min(1.0 - d)
            }
        }
    }

    /// Upper bound on the Lipschitz constant of generator `i`.
    pub fn lipschitz(&self, i: usize) -> f64 {
        match self.family {
            MapFamily::Doubling => 2.0,
            MapFamily::Tent { slope } => slope,
            MapFamily::Logistic { r } => r,
            MapFamily::Rotation { .. } => 1.0,
            MapFamily::CommutingMult { a, b } => (if i == 0 { a } else { b }) as f64,
        }
    }

    pub fn is_isometry(&self) -> bool {
        matches!(self.family, MapFamily::Rotation { .. })
    }

    /// How generator `i` acts on dyadic rationals without loss, if it does.
    pub fn dyadic_step(&self, i: usize) -> Option<DyadicStep> {
        match self.family {
            MapFamily::Doubling => Some(DyadicStep::Multiply(2)),
            MapFamily::Tent { slope } if slope == 2.0 => Some(DyadicStep::Tent2),
            MapFamily::CommutingMult { a, b } => Some(DyadicStep::Multiply(if i == 0 { a } else { b })),
            _ => None,
        }
    }
}

/// Exact dyadic evaluation for maps with integer slopes, used where double
/// precision collapses orbits (iterating `x ↦ 2x` on a double reaches 0 in
/// at most 1075 steps).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DyadicStep {
    /// `x ↦ m·x mod 1`.
    Multiply(u32),
    /// `x ↦ 2·min(x, 1 − x)`.
    Tent2,
}

pub(crate) fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(1.0);
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_distance_wraps() {
        let d = NumericCascade::doubling();
        assert!((d.distance(0.05, 0.95) - 0.1).abs() < 1e-15);
        assert_eq!(d.distance(0.25, 0.25), 0.0);
        let t = NumericCascade::tent(2.0).unwrap();
        assert!((t.distance(0.05, 0.95) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn commuting_generators_commute() {
        let m = NumericCascade::commuting_mult(2, 3).unwrap();
        for j in 0..100 {
            let x = j as f64 / 97.0;
            let ab = m.step(0, m.step(1, x));
            let ba = m.step(1, m.step(0, x));
            assert!(m.distance(ab, ba) < 1e-12);
        }
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(NumericCascade::tent(2.5).is_err());
        assert!(NumericCascade::logistic(-1.0).is_err());
        assert!(NumericCascade::commuting_mult(0, 3).is_err());
        assert!(NumericCascade::doubling().act(&[1, 1].into(), 0.5).is_err());
        assert!(NumericCascade::doubling().act(&1.into(), 1.5).is_err());
    }

    #[test]
    fn action_composes() {
        let r = NumericCascade::rotation(0.3).unwrap();
        let x = 0.1;
        let lhs = r.act(&3.into(), r.act(&4.into(), x).unwrap()).unwrap();
        let rhs = r.act(&7.into(), x).unwrap();
        assert!(r.distance(lhs, rhs) < 1e-12);
        assert_eq!(r.act(&0.into(), x).unwrap(), x);
    }
}
