//! Concrete semiflows: finite metric semiflows, one-sided subshifts of
//! finite type, and numerical maps of the interval and circle.

mod distance;
mod finite;
mod numeric;
mod sft;
pub mod spec;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use distance::ExactDistance;
pub use finite::{FiniteMetric, FiniteSemiflow};
pub use numeric::{DyadicStep, MapFamily, NumericCascade, PhaseSpace, NUMERIC_TOLERANCE};
pub use sft::{EventuallyPeriodicPoint, SftSystem};
pub use spec::SystemSpec;

use crate::error::{Error, Result};
use crate::monoid::{FiniteSubset, MonoidElement, ResidueClassSet};

/// A monoid action `ℕ₀ᵏ × X → X` on a metric space.
pub trait Semiflow {
    type Point: Clone;

    fn rank(&self) -> usize;
    fn act(&self, t: &MonoidElement, x: &Self::Point) -> Result<Self::Point>;
    fn distance(&self, x: &Self::Point, y: &Self::Point) -> f64;
}

impl Semiflow for FiniteSemiflow {
    type Point = usize;
    fn rank(&self) -> usize {
        FiniteSemiflow::rank(self)
    }
    fn act(&self, t: &MonoidElement, x: &usize) -> Result<usize> {
        FiniteSemiflow::act(self, t, *x)
    }
    fn distance(&self, x: &usize, y: &usize) -> f64 {
        FiniteSemiflow::distance(self, *x, *y)
    }
}

impl Semiflow for SftSystem {
    type Point = EventuallyPeriodicPoint;
    fn rank(&self) -> usize {
        1
    }
    fn act(&self, t: &MonoidElement, x: &EventuallyPeriodicPoint) -> Result<EventuallyPeriodicPoint> {
        SftSystem::act(self, t, x)
    }
    fn distance(&self, x: &EventuallyPeriodicPoint, y: &EventuallyPeriodicPoint) -> f64 {
        SftSystem::distance(self, x, y)
    }
}

impl Semiflow for NumericCascade {
    type Point = f64;
    fn rank(&self) -> usize {
        NumericCascade::rank(self)
    }
    fn act(&self, t: &MonoidElement, x: &f64) -> Result<f64> {
        NumericCascade::act(self, t, *x)
    }
    fn distance(&self, x: &f64, y: &f64) -> f64 {
        NumericCascade::distance(self, *x, *y)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Point {
    Finite(usize),
    Sft(EventuallyPeriodicPoint),
    Real(f64),
}

impl Point {
    pub fn as_finite(&self) -> Option<usize> {
        match self {
            Point::Finite(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_sft(&self) -> Option<&EventuallyPeriodicPoint> {
        match self {
            Point::Sft(x) => Some(x),
            _ => None,
        }
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            Point::Real(x) => Some(*x),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum System {
    Finite(FiniteSemiflow),
    Sft(SftSystem),
    Numeric(NumericCascade),
}

impl System {
    pub fn kind(&self) -> &'static str {
        match self {
            System::Finite(_) => "finite",
            System::Sft(_) => "sft",
            System::Numeric(n) if n.rank() == 2 => "commuting_circle",
            System::Numeric(_) => "map1d",
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            System::Finite(s) => s.rank(),
            System::Sft(_) => 1,
            System::Numeric(s) => s.rank(),
        }
    }

    pub fn check_point(&self, x: &Point) -> Result<()> {
        match (self, x) {
            (System::Finite(s), Point::Finite(p)) if *p < s.len() => Ok(()),
            (System::Sft(s), Point::Sft(p)) => s.validate(p),
            (System::Numeric(s), Point::Real(p)) if s.contains(*p) => Ok(()),
            _ => Err(Error::ForeignPoint),
        }
    }

    pub fn act(&self, t: &MonoidElement, x: &Point) -> Result<Point> {
        match (self, x) {
            (System::Finite(s), Point::Finite(p)) => s.act(t, *p).map(Point::Finite),
            (System::Sft(s), Point::Sft(p)) => s.act(t, p).map(Point::Sft),
            (System::Numeric(s), Point::Real(p)) => s.act(t, *p).map(Point::Real),
            _ => Err(Error::ForeignPoint),
        }
    }

    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        match (self, x, y) {
            (System::Finite(s), Point::Finite(a), Point::Finite(b)) if *a < s.len() && *b < s.len() => Ok(s.distance(*a, *b)),
            (System::Sft(s), Point::Sft(a), Point::Sft(b)) => Ok(s.distance(a, b)),
            (System::Numeric(s), Point::Real(a), Point::Real(b)) => Ok(s.distance(*a, *b)),
            _ => Err(Error::ForeignPoint),
        }
    }

    /// Distances without rounding, for finite and subshift systems.
    pub fn exact_distance(&self, x: &Point, y: &Point) -> Result<ExactDistance> {
        match (self, x, y) {
            (System::Finite(s), Point::Finite(a), Point::Finite(b)) if *a < s.len() && *b < s.len() => Ok(s.exact_distance(*a, *b)),
            (System::Sft(s), Point::Sft(a), Point::Sft(b)) => Ok(s.exact_distance(a, b)),
            (System::Numeric(_), _, _) => Err(Error::Unsupported("exact distances on numeric maps".into())),
            _ => Err(Error::ForeignPoint),
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, System::Numeric(_))
    }

    /// `{k·x : k ∈ compact}`.
    pub fn orbit_under(&self, x: &Point, compact: &FiniteSubset) -> Result<Vec<Point>> {
        let mut out: Vec<Point> = Vec::new();
        for k in compact {
            let y = self.act(k, x)?;
            if !out.contains(&y) {
                out.push(y);
            }
        }
        Ok(out)
    }

    /// `Fix(x)` for finite and subshift systems.
    pub fn fixer(&self, x: &Point) -> Result<ResidueClassSet> {
        match (self, x) {
            (System::Finite(s), Point::Finite(p)) => s.fixer(*p),
            (System::Sft(s), Point::Sft(p)) => s.fixer(p),
            (System::Numeric(_), _) => Err(Error::Unsupported("exact fixers on numeric maps".into())),
            _ => Err(Error::ForeignPoint),
        }
    }

    /// The full orbit of `x` when it is finite and has at most `cap` points;
    /// `None` signals that the cap was exhausted.
    pub fn bounded_orbit(&self, x: &Point, cap: usize) -> Result<Option<Vec<Point>>> {
        match (self, x) {
            (System::Finite(s), Point::Finite(p)) => {
                let o = s.orbit(*p);
                Ok((o.len() <= cap).then(|| o.into_iter().map(Point::Finite).collect()))
            }
            (System::Sft(s), Point::Sft(p)) => {
                Ok(s.bounded_orbit(p, cap)?.map(|o: BTreeSet<_>| o.into_iter().map(Point::Sft).collect()))
            }
            (System::Numeric(_), _) => Err(Error::Unsupported("orbit enumeration on numeric maps".into())),
            _ => Err(Error::ForeignPoint),
        }
    }
}

impl From<FiniteSemiflow> for System {
    fn from(s: FiniteSemiflow) -> Self {
        System::Finite(s)
    }
}

impl From<SftSystem> for System {
    fn from(s: SftSystem) -> Self {
        System::Sft(s)
    }
}

impl From<NumericCascade> for System {
    fn from(s: NumericCascade) -> Self {
        System::Numeric(s)
    }
}
