//! Periodic orbits: their structure and the sensitivity constant they yield.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monoid::{is_syndetic, FiniteSubset, MonoidElement};
use crate::probe::{
    equicontinuity_report, sample_points, sensitivity_report, sft_horizon, Budget, Claim, EquicontinuityMode, EquicontinuityOutcome,
    SampleSpec, Status, Verdict, WitnessKind, WitnessRecord,
};
use crate::sft_decide;
use crate::systems::{ExactDistance, Point, System};

/// Points the 4c claim is checked at.
pub const CLAIM_SAMPLES: usize = 100;
/// Longest period enumerated when comparing against other periodic orbits.
pub const STRUCTURE_PERIOD_BOUND: usize = 8;
const ORBIT_CAP: usize = 1 << 16;

fn exact_only(system: &System) -> Result<()> {
    if system.is_exact() {
        Ok(())
    } else {
        Err(Error::Unsupported("orbit computations on numeric maps".into()))
    }
}

fn push_unique(v: &mut Vec<Point>, p: Point) {
    if !v.contains(&p) {
        v.push(p);
    }
}

fn same_set(a: &[Point], b: &[Point]) -> bool {
    a.len() == b.len() && a.iter().all(|p| b.contains(p))
}

fn disjoint(a: &[Point], b: &[Point]) -> bool {
    a.iter().all(|p| !b.contains(p))
}

/// The syndetic certificate `K` of `Fix(q)` and the orbit written as `K·q`.
pub fn orbit_of(system: &System, q: &Point) -> Result<(FiniteSubset, Vec<Point>)> {
    exact_only(system)?;
    let fix = system.fixer(q)?;
    let verdict = is_syndetic(&fix);
    let k = match verdict.compact {
        Some(k) if verdict.syndetic => k,
        _ => return Err(Error::NotPeriodic),
    };
    let mut orbit = Vec::new();
    for p in system.orbit_under(q, &k)? {
        push_unique(&mut orbit, p);
    }
    Ok((k, orbit))
}

fn full_orbit(system: &System, x: &Point) -> Result<Vec<Point>> {
    system.bounded_orbit(x, ORBIT_CAP)?.ok_or_else(|| Error::Unsupported("orbit exceeds the enumeration cap".into()))
}

fn set_distance(system: &System, x: &Point, set: &[Point]) -> Result<(ExactDistance, Point)> {
    let mut best: Option<(ExactDistance, Point)> = None;
    for p in set {
        let d = system.exact_distance(x, p)?;
        if best.as_ref().map_or(true, |(b, _)| d < *b) {
            best = Some((d, p.clone()));
        }
    }
    best.ok_or_else(|| Error::InvalidParameter("empty orbit".into()))
}

/// The constant extracted from two disjoint periodic orbits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitConstant {
    /// `d(O₁, O₂) = 8c`.
    pub distance: f64,
    pub c: f64,
    pub orbit1: Vec<Point>,
    pub orbit2: Vec<Point>,
    /// Every sampled `x` is at least `4c` from one of the orbits.
    pub claim_check: Verdict,
    /// Sensitivity searched at constant `c`.
    pub sensitivity: Verdict,
    /// Whether the exact profile says the system is sensitive.
    pub expected_sensitive: bool,
}

impl OrbitConstant {
    /// The 4c claim holds and the sensitivity search agrees with the profile.
    pub fn passed(&self) -> bool {
        self.claim_check.holds() && (self.sensitivity.holds() == self.expected_sensitive)
    }
}

pub fn sensitivity_constant_from_orbits(system: &System, q1: &Point, q2: &Point) -> Result<OrbitConstant> {
    sensitivity_constant_from_orbits_with(system, q1, q2, 0)
}

pub fn sensitivity_constant_from_orbits_with(system: &System, q1: &Point, q2: &Point, seed: u64) -> Result<OrbitConstant> {
    exact_only(system)?;
    system.check_point(q1)?;
    system.check_point(q2)?;
    let (_, o1) = orbit_of(system, q1)?;
    let (_, o2) = orbit_of(system, q2)?;
    if same_set(&o1, &o2) {
        return Err(Error::OrbitOverlap);
    }
    if !disjoint(&o1, &o2) {
        return Err(Error::OrbitPartialOverlap);
    }
    let mut eight_c: Option<ExactDistance> = None;
    for p in &o1 {
        let (d, _) = set_distance(system, p, &o2)?;
        eight_c = Some(eight_c.map_or(d, |e| e.min(d)));
    }
    let eight_c = eight_c.expect("nonempty orbit");
    let four_c = eight_c.div_pow2(1);
    let c = eight_c.div_pow2(3).to_f64();

    let spec = SampleSpec { count: CLAIM_SAMPLES, eps_ladder: vec![four_c.to_f64()], seed };
    let claim = Claim::OrbitSeparation { q1: q1.clone(), q2: q2.clone(), bound: four_c.to_f64() };
    let mut witnesses = Vec::new();
    let mut status = Status::Holds;
    for x in sample_points(system, &spec) {
        let (d1, y1) = set_distance(system, &x, &o1)?;
        let (d2, y2) = set_distance(system, &x, &o2)?;
        let (far, y) = if d1 >= d2 { (d1, y1) } else { (d2, y2) };
        let w = WitnessRecord {
            kind: WitnessKind::OrbitDistance,
            x,
            epsilon: four_c.to_f64(),
            y,
            t0: None,
            t: MonoidElement::zero(system.rank()),
            separation: far.to_f64(),
            seed: None,
        };
        if far < four_c {
            status = Status::Fails;
            witnesses = vec![w];
            break;
        }
        witnesses.push(w);
    }
    let mut budget = Budget::new(&spec, 0);
    budget.samples = witnesses.len();
    let claim_check = Verdict { claim, status, exact: true, witnesses, budget };

    let (horizon, expected_sensitive) = match system {
        System::Sft(s) => (sft_horizon(s.alphabet_size()), sft_decide::is_sensitive_exact(s).sensitive),
        System::Finite(s) => (s.len() as u64, false),
        System::Numeric(_) => unreachable!(),
    };
    let sensitivity = sensitivity_report(system, c, &SampleSpec { count: CLAIM_SAMPLES, seed, ..SampleSpec::default() }, horizon)?;
    Ok(OrbitConstant { distance: eight_c.to_f64(), c, orbit1: o1, orbit2: o2, claim_check, sensitivity, expected_sensitive })
}

/// Results of the five structural checks on a periodic orbit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub compact: FiniteSubset,
    pub orbit: Vec<Point>,
    /// `orb(x') = orb(x)` for every `x' ∈ orb(x)`.
    pub orbit_equality: bool,
    /// Every other enumerated periodic orbit equals or misses `orb(x)`.
    pub equal_or_disjoint: bool,
    /// Every `x' ∈ orb(x)` is periodic with `Fix(x') = Fix(x)`.
    pub fixers_constant: bool,
    /// `orb(x) = K·x`.
    pub compact_orbit: bool,
    /// When `X = orb(x)`: the system is minimal and uniformly equicontinuous.
    pub minimal_equicontinuous: Option<bool>,
}

impl StructureReport {
    pub fn all_pass(&self) -> bool {
        self.orbit_equality && self.equal_or_disjoint && self.fixers_constant && self.compact_orbit && self.minimal_equicontinuous != Some(false)
    }
}

pub fn verify_orbit_structure(system: &System, x: &Point) -> Result<StructureReport> {
    exact_only(system)?;
    system.check_point(x)?;
    let fix = system.fixer(x)?;
    let (compact, kx) = orbit_of(system, x).map_err(|e| match e {
        Error::NotPeriodic => Error::PreconditionFailed("fixer is not syndetic".into()),
        other => other,
    })?;
    let orbit = full_orbit(system, x)?;

    let mut orbit_equality = true;
    let mut fixers_constant = true;
    for y in &orbit {
        orbit_equality &= same_set(&full_orbit(system, y)?, &orbit);
        let fy = system.fixer(y)?;
        fixers_constant &= is_syndetic(&fy).syndetic && fy == fix;
    }

    let others: Vec<Point> = match system {
        System::Finite(s) => (0..s.len()).filter(|&z| s.is_periodic(z).unwrap_or(false)).map(Point::Finite).collect(),
        System::Sft(s) => sft_decide::periodic_points_up_to(s, STRUCTURE_PERIOD_BOUND)?.into_iter().map(Point::Sft).collect(),
        System::Numeric(_) => unreachable!(),
    };
    let mut equal_or_disjoint = true;
    for z in &others {
        let oz = full_orbit(system, z)?;
        equal_or_disjoint &= same_set(&oz, &orbit) || disjoint(&oz, &orbit);
    }

    let minimal_equicontinuous = match system {
        System::Finite(s) if orbit.len() == s.len() => {
            let minimal = (0..s.len()).all(|z| s.orbit(z).len() == s.len());
            let ueq = matches!(
                equicontinuity_report(system, &EquicontinuityMode::Uniform, 0.5, 0)?,
                EquicontinuityOutcome::Delta { exact: true, .. }
            );
            Some(minimal && ueq)
        }
        System::Sft(s) if sft_decide::is_minimal_exact(s) => Some(sft_decide::is_ueq_exact(s) && orbit.len() == s.trimmed_vertex_count()),
        _ => None,
    };

    Ok(StructureReport { compact, compact_orbit: same_set(&kx, &orbit), orbit, orbit_equality, equal_or_disjoint, fixers_constant, minimal_equicontinuous })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probe::revalidate;
    use crate::systems::{EventuallyPeriodicPoint, FiniteSemiflow, SftSystem};

    fn per(w: &[usize]) -> Point {
        Point::Sft(EventuallyPeriodicPoint::periodic(w.to_vec()).unwrap())
    }

    #[test]
    fn full_shift_constant() {
        let s: System = SftSystem::full_shift(2).unwrap().into();
        let r = sensitivity_constant_from_orbits(&s, &per(&[0]), &per(&[1])).unwrap();
        assert_eq!(r.distance, 1.0);
        assert_eq!(r.c, 0.125);
        assert!(r.claim_check.holds());
        assert!(r.claim_check.witnesses.iter().all(|w| w.separation >= 0.5));
        assert!(r.sensitivity.holds());
        assert!(r.passed());
        revalidate(&s, &r.claim_check).unwrap();
        revalidate(&s, &r.sensitivity).unwrap();
    }

    #[test]
    fn golden_mean_constant() {
        let s: System = SftSystem::new(2, [(0, 0), (0, 1), (1, 0)]).unwrap().into();
        let r = sensitivity_constant_from_orbits(&s, &per(&[0]), &per(&[0, 1])).unwrap();
        assert_eq!(r.distance, 0.5);
        assert_eq!(r.c, 1.0 / 16.0);
        assert!(r.passed());
    }

    #[test]
    fn overlapping_orbits_are_rejected() {
        let s: System = SftSystem::full_shift(2).unwrap().into();
        assert_eq!(sensitivity_constant_from_orbits(&s, &per(&[0]), &per(&[0])), Err(Error::OrbitOverlap));
        assert_eq!(sensitivity_constant_from_orbits(&s, &per(&[0, 1]), &per(&[1, 0])), Err(Error::OrbitOverlap));
        let tail = Point::Sft(EventuallyPeriodicPoint::new(vec![1], vec![0]).unwrap());
        assert_eq!(sensitivity_constant_from_orbits(&s, &tail, &per(&[1])), Err(Error::NotPeriodic));
    }

    #[test]
    fn finite_cycle_structure() {
        let f: System = FiniteSemiflow::cascade(vec![1, 2, 0]).unwrap().into();
        let r = verify_orbit_structure(&f, &Point::Finite(0)).unwrap();
        assert!(r.all_pass());
        assert_eq!(r.minimal_equicontinuous, Some(true));
        assert_eq!(r.orbit.len(), 3);

        let fixed: System = FiniteSemiflow::cascade(vec![0, 0]).unwrap().into();
        let r = verify_orbit_structure(&fixed, &Point::Finite(0)).unwrap();
        assert!(r.all_pass());
        assert_eq!(r.orbit, vec![Point::Finite(0)]);
        assert!(matches!(verify_orbit_structure(&fixed, &Point::Finite(1)), Err(Error::PreconditionFailed(_))));
    }

    #[test]
    fn shift_orbit_structure() {
        let s: System = SftSystem::full_shift(2).unwrap().into();
        let r = verify_orbit_structure(&s, &per(&[0, 1])).unwrap();
        assert!(r.all_pass());
        assert_eq!(r.orbit.len(), 2);
        assert_eq!(r.minimal_equicontinuous, None);
        let c: System = SftSystem::cycle(3).unwrap().into();
        assert_eq!(verify_orbit_structure(&c, &per(&[0, 1, 2])).unwrap().minimal_equicontinuous, Some(true));
    }

    #[test]
    fn fixers_are_constant_along_orbits() {
        let f = FiniteSemiflow::new(4, crate::systems::FiniteMetric::Discrete, vec![vec![1, 0, 3, 2], vec![2, 3, 0, 1]]).unwrap();
        let sys: System = f.clone().into();
        let (k, _) = orbit_of(&sys, &Point::Finite(0)).unwrap();
        for t in k.iter() {
            assert_eq!(f.fixer(f.act(t, 0).unwrap()).unwrap(), f.fixer(0).unwrap());
        }
    }
}
