use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::systems::{PhaseSpace, Point, SftSystem, System};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverSet {
    /// The open ball `B(center, radius)`.
    Ball { center: Point, radius: f64 },
    /// All walks starting with `word`.
    Cylinder(Vec<usize>),
}

/// A finite open cover of the phase space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cover {
    pub sets: Vec<CoverSet>,
}

/// Largest number of words enumerated when checking a cylinder cover.
const WORD_CAP: usize = 1 << 20;

impl Cover {
    /// The length-1 cylinders `[v]` of the vertices that survive trimming.
    pub fn letters(s: &SftSystem) -> Cover {
        Cover { sets: s.trimmed_vertices().into_iter().map(|v| CoverSet::Cylinder(vec![v])).collect() }
    }

    /// Singletons of a finite system, as balls of radius below the minimum distance.
    pub fn singletons(n: usize, radius: f64) -> Cover {
        Cover { sets: (0..n).map(|x| CoverSet::Ball { center: Point::Finite(x), radius }).collect() }
    }

    pub fn member_contains(&self, system: &System, i: usize, z: &Point) -> bool {
        match (&self.sets[i], z) {
            (CoverSet::Cylinder(w), Point::Sft(p)) => p.word(w.len()) == *w,
            (CoverSet::Ball { center, radius }, _) => system.distance(center, z).map(|d| d < *radius).unwrap_or(false),
            _ => false,
        }
    }

    /// No member contains both points.
    pub fn separates(&self, system: &System, a: &Point, b: &Point) -> bool {
        (0..self.sets.len()).all(|i| !(self.member_contains(system, i, a) && self.member_contains(system, i, b)))
    }

    /// Checks that the sets are open sets of the right shape and that they
    /// cover the phase space.
    pub fn validate(&self, system: &System) -> Result<()> {
        if self.sets.is_empty() {
            return Err(Error::InvalidCover("cover is empty".into()));
        }
        match system {
            System::Finite(s) => {
                let centers = self.balls(system)?;
                for x in 0..s.len() {
                    if !centers.iter().any(|&(c, r)| s.distance(c.as_finite().unwrap(), x) < r) {
                        return Err(Error::InvalidCover(format!("point {x} is not covered")));
                    }
                }
                Ok(())
            }
            System::Sft(s) => {
                let words: Vec<&Vec<usize>> = self
                    .sets
                    .iter()
                    .map(|c| match c {
                        CoverSet::Cylinder(w) => Ok(w),
                        _ => Err(Error::InvalidCover("subshift covers are made of cylinders".into())),
                    })
                    .collect::<Result<_>>()?;
                let len = words.iter().map(|w| w.len()).max().unwrap_or(0).max(1);
                let mut stack: Vec<Vec<usize>> = s.trimmed_vertices().into_iter().map(|v| vec![v]).collect();
                let mut seen = 0usize;
                while let Some(u) = stack.pop() {
                    if words.iter().any(|w| u.len() >= w.len() && u[..w.len()] == w[..]) {
                        continue;
                    }
                    if u.len() == len {
                        return Err(Error::InvalidCover(format!("cylinder {u:?} meets no cover member")));
                    }
                    seen += 1;
                    if seen > WORD_CAP {
                        return Err(Error::InvalidCover("too many words to check coverage".into()));
                    }
                    for &b in s.successors(*u.last().unwrap()) {
                        let mut v = u.clone();
                        v.push(b);
                        stack.push(v);
                    }
                }
                Ok(())
            }
            System::Numeric(n) => {
                let mut intervals: Vec<(f64, f64)> = Vec::new();
                for (c, r) in self.balls(system)? {
                    let c = c.as_real().unwrap();
                    match n.space() {
                        PhaseSpace::Interval => intervals.push((c - r, c + r)),
                        PhaseSpace::Circle => {
                            for shift in [-1.0, 0.0, 1.0] {
                                intervals.push((c - r + shift, c + r + shift));
                            }
                        }
                    }
                }
                if covers_unit_interval(&intervals) {
                    Ok(())
                } else {
                    Err(Error::InvalidCover("balls leave part of the phase space uncovered".into()))
                }
            }
        }
    }

    fn balls(&self, system: &System) -> Result<Vec<(&Point, f64)>> {
        self.sets
            .iter()
            .map(|c| match c {
                CoverSet::Ball { center, radius } if *radius > 0.0 => {
                    system.check_point(center).map_err(|_| Error::InvalidCover(format!("centre {center:?} is not a point")))?;
                    Ok((center, *radius))
                }
                CoverSet::Ball { .. } => Err(Error::InvalidCover("radii must be positive".into())),
                CoverSet::Cylinder(_) => Err(Error::InvalidCover("cylinders only apply to subshifts".into())),
            })
            .collect()
    }
}

/// Whether the open intervals cover `[0, 1]`.
fn covers_unit_interval(intervals: &[(f64, f64)]) -> bool {
    // `cur` is the smallest point not yet known to be covered.
    let mut cur = 0.0;
    loop {
        let reach = intervals.iter().filter(|&&(a, b)| a < cur && cur < b).map(|&(_, b)| b).fold(f64::NEG_INFINITY, f64::max);
        if reach == f64::NEG_INFINITY {
            return false;
        }
        if reach > 1.0 {
            return true;
        }
        cur = reach;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{FiniteSemiflow, NumericCascade};

    #[test]
    fn letter_cover_is_valid() {
        let s = SftSystem::full_shift(2).unwrap();
        let sys: System = s.clone().into();
        Cover::letters(&s).validate(&sys).unwrap();
        let partial = Cover { sets: vec![CoverSet::Cylinder(vec![0])] };
        assert!(partial.validate(&sys).is_err());
        let two = Cover { sets: vec![CoverSet::Cylinder(vec![0]), CoverSet::Cylinder(vec![1, 0]), CoverSet::Cylinder(vec![1, 1])] };
        two.validate(&sys).unwrap();
    }

    #[test]
    fn ball_covers() {
        let f: System = FiniteSemiflow::cascade(vec![1, 2, 0]).unwrap().into();
        Cover::singletons(3, 0.5).validate(&f).unwrap();
        let missing = Cover { sets: vec![CoverSet::Ball { center: Point::Finite(0), radius: 0.5 }] };
        assert!(missing.validate(&f).is_err());

        let circle: System = NumericCascade::doubling().into();
        let halves = |r: f64| Cover {
            sets: vec![
                CoverSet::Ball { center: Point::Real(0.0), radius: r },
                CoverSet::Ball { center: Point::Real(0.5), radius: r },
            ],
        };
        halves(0.3).validate(&circle).unwrap();
        assert!(halves(0.25).validate(&circle).is_err());

        let interval: System = NumericCascade::tent(2.0).unwrap().into();
        let one = Cover { sets: vec![CoverSet::Ball { center: Point::Real(0.5), radius: 0.5 }] };
        assert!(one.validate(&interval).is_err());
        let wide = Cover { sets: vec![CoverSet::Ball { center: Point::Real(0.5), radius: 0.51 }] };
        wide.validate(&interval).unwrap();
    }
}
