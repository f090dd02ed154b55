//! Equicontinuity: exact moduli where the space allows it, sampled ladders
//! otherwise.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::search::{numeric_times, sft_diverge, sft_resolution};
use super::{rng_for, sample_points, Budget, Claim, SampleSpec, Status, Verdict, WitnessKind, WitnessRecord};
use crate::error::{Error, Result};
use crate::monoid::{FiniteSubset, MonoidElement};
use crate::systems::{EventuallyPeriodicPoint, NumericCascade, Point, SftSystem, System};

/// Number of halvings tried below `eps` on numeric maps.
const LADDER_DEPTH: i32 = 20;
const PAIR_OFFSETS: [f64; 4] = [0.5, -0.5, 0.99, -0.99];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum EquicontinuityMode {
    AtPoint(Point),
    Uniform,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum EquicontinuityOutcome {
    /// `d(x, y) < delta` keeps every `t·x, t·y` within `eps`.
    Delta { delta: f64, exact: bool, witness: Option<WitnessRecord> },
    /// A pair closer than `epsilon` that some time pushes `eps` apart.
    Violation(WitnessRecord),
}

pub fn equicontinuity_report(system: &System, mode: &EquicontinuityMode, eps: f64, horizon: u64) -> Result<EquicontinuityOutcome> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("eps must be positive".into()));
    }
    if let EquicontinuityMode::AtPoint(x) = mode {
        system.check_point(x)?;
    }
    match system {
        System::Finite(s) => {
            let delta = s.min_positive_distance().map_or(1.0, |d| d.to_f64());
            Ok(EquicontinuityOutcome::Delta { delta, exact: true, witness: None })
        }
        System::Sft(s) => Ok(sft_report(s, mode, eps)),
        System::Numeric(n) => Ok(numeric_report(n, system, mode, eps, horizon)),
    }
}

fn sft_report(s: &SftSystem, mode: &EquicontinuityMode, eps: f64) -> EquicontinuityOutcome {
    let exact_delta = |delta| EquicontinuityOutcome::Delta { delta, exact: true, witness: None };
    if eps > 1.0 {
        // No two points are farther apart than 1.
        return exact_delta(eps);
    }
    let x = match mode {
        EquicontinuityMode::Uniform => {
            let g = crate::sft_decide::GraphAnalysis::new(s);
            match g.branching.iter().find(|v| g.cycle_vertices.contains(v)) {
                Some(&v) => cycle_through(s, v),
                None => return exact_delta(2f64.powi(-(s.trimmed_vertex_count() as i32))),
            }
        }
        EquicontinuityMode::AtPoint(p) => p.as_sft().expect("checked point").clone(),
    };
    let branching_on_cycle = x.cycle().iter().any(|&v| s.is_branching(v));
    if !branching_on_cycle {
        let last = (0..x.prefix().len()).rev().find(|&k| s.is_branching(x.at(k)));
        let b = last.map_or(0, |k| k + 1);
        return exact_delta(2f64.powi(-(b as i32)));
    }
    let delta = eps * 2f64.powi(-LADDER_DEPTH);
    let i = sft_resolution(delta);
    let m = (i.max(1)..).find(|&m| s.is_branching(x.at(m - 1))).expect("branching on the cycle");
    let y = sft_diverge(s, &x, m, &mut rng_for(0, m as u64)).expect("branching vertex has another successor");
    EquicontinuityOutcome::Violation(WitnessRecord {
        kind: WitnessKind::Violation,
        separation: s.distance(&x.shift(m as u64), &y.shift(m as u64)),
        x: Point::Sft(x),
        epsilon: delta,
        y: Point::Sft(y),
        t0: None,
        t: MonoidElement::scalar(m as u64),
        seed: None,
    })
}

/// The periodic point running around a shortest cycle through `v`.
fn cycle_through(s: &SftSystem, v: usize) -> EventuallyPeriodicPoint {
    let mut parent = vec![usize::MAX; s.alphabet_size()];
    let mut queue = VecDeque::from([v]);
    while let Some(a) = queue.pop_front() {
        for &b in s.successors(a) {
            if b == v {
                let mut word = vec![a];
                while *word.last().unwrap() != v {
                    word.push(parent[*word.last().unwrap()]);
                }
                word.reverse();
                return EventuallyPeriodicPoint::periodic(word).expect("nonempty");
            }
            if parent[b] == usize::MAX {
                parent[b] = a;
                queue.push_back(b);
            }
        }
    }
    unreachable!("vertex lies on a cycle")
}

fn numeric_report(n: &NumericCascade, system: &System, mode: &EquicontinuityMode, eps: f64, horizon: u64) -> EquicontinuityOutcome {
    let xs: Vec<f64> = match mode {
        EquicontinuityMode::AtPoint(p) => vec![p.as_real().expect("checked point")],
        EquicontinuityMode::Uniform => sample_points(system, &SampleSpec::default()).iter().filter_map(Point::as_real).collect(),
    };
    let mut last_violation = None;
    for j in 0..=LADDER_DEPTH {
        let delta = eps * 2f64.powi(-j);
        match numeric_pairs(n, &xs, delta, eps, horizon) {
            Ok(stable) => {
                return EquicontinuityOutcome::Delta { delta, exact: false, witness: stable };
            }
            Err(w) => last_violation = Some(w),
        }
    }
    EquicontinuityOutcome::Violation(last_violation.expect("ladder is nonempty"))
}

/// Checks the pairs `x + θδ` up to the horizon: the largest excursion below
/// `eps` on success, the first violation otherwise.
fn numeric_pairs(n: &NumericCascade, xs: &[f64], delta: f64, eps: f64, horizon: u64) -> std::result::Result<Option<WitnessRecord>, WitnessRecord> {
    let mut best: Option<WitnessRecord> = None;
    for &x in xs {
        for o in PAIR_OFFSETS {
            let y = n.normalize(x + o * delta);
            if n.distance(x, y) >= delta {
                continue;
            }
            let mut worst = (MonoidElement::new(vec![0; n.rank()]), 0.0f64);
            let mut hit = None;
            numeric_times(n, x, y, horizon, |t, tx, ty| {
                let d = n.distance(tx, ty);
                if d >= eps {
                    hit = Some((t.clone(), d));
                    return true;
                }
                if d > worst.1 {
                    worst = (t.clone(), d);
                }
                false
            });
            let record = |kind, (t, separation): (MonoidElement, f64)| WitnessRecord {
                kind,
                x: Point::Real(x),
                epsilon: delta,
                y: Point::Real(y),
                t0: None,
                t,
                separation,
                seed: None,
            };
            if let Some(h) = hit {
                return Err(record(WitnessKind::Violation, h));
            }
            if best.as_ref().map_or(true, |b| worst.1 > b.separation) {
                best = Some(record(WitnessKind::Stable, worst));
            }
        }
    }
    Ok(best)
}

/// Uniform equicontinuity as a verdict.
pub fn equicontinuity_verdict(system: &System, eps: f64, horizon: u64) -> Result<Verdict> {
    let claim = Claim::Equicontinuity { eps };
    let mut budget = Budget::new(&SampleSpec { eps_ladder: vec![eps], ..SampleSpec::default() }, horizon);
    if !matches!(system, System::Numeric(_)) {
        budget.samples = 0;
    }
    Ok(match equicontinuity_report(system, &EquicontinuityMode::Uniform, eps, horizon)? {
        EquicontinuityOutcome::Delta { delta, exact, witness } => {
            let w = witness.unwrap_or_else(|| trivial_stable(system, delta));
            Verdict { claim, status: Status::Holds, exact, witnesses: vec![w], budget }
        }
        EquicontinuityOutcome::Violation(w) => Verdict { claim, status: Status::Fails, exact: system.is_exact(), witnesses: vec![w], budget },
    })
}

/// A `Stable` record for an exact modulus: the pair `(x, x)`.
fn trivial_stable(system: &System, delta: f64) -> WitnessRecord {
    let x = sample_points(system, &SampleSpec::with_count(1)).remove(0);
    WitnessRecord {
        kind: WitnessKind::Stable,
        y: x.clone(),
        x,
        epsilon: delta,
        t0: None,
        t: MonoidElement::new(vec![0; system.rank()]),
        separation: 0.0,
        seed: None,
    }
}

/// Equicontinuity over a compact (finite) set of times, with an explicit `δ`.
pub fn check_compact_equicontinuity(system: &System, compact: &FiniteSubset, eps: f64, samples: &SampleSpec) -> Result<Verdict> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("eps must be positive".into()));
    }
    if compact.is_empty() {
        return Err(Error::InvalidSet("compact set of times is empty".into()));
    }
    if compact.rank() != Some(system.rank()) {
        return Err(Error::RankMismatch { expected: system.rank(), got: compact.rank().unwrap_or(0) });
    }
    let (delta, exact) = match system {
        System::Finite(s) => (s.min_positive_distance().map_or(1.0, |d| d.to_f64()), true),
        System::Sft(_) => {
            let m = compact.iter().map(|t| t.weight()).max().unwrap_or(0);
            (eps * 2f64.powi(-(m as i32)), true)
        }
        System::Numeric(n) => {
            let growth = compact
                .iter()
                .map(|t| t.coords().iter().enumerate().map(|(i, &k)| n.lipschitz(i).powi(k as i32)).product::<f64>())
                .fold(1.0, f64::max);
            (eps / growth, false)
        }
    };
    let claim = Claim::CompactEquicontinuity { compact: compact.clone(), eps, delta };
    let budget = Budget::new(&SampleSpec { eps_ladder: vec![delta], ..samples.clone() }, compact.upper_bound().map_or(0, |u| u.weight()));
    let mut witnesses = Vec::new();
    let mut rng = rng_for(samples.seed, 1);
    for x in sample_points(system, samples) {
        let ys: Vec<Point> = match (system, &x) {
            (System::Finite(_), _) => vec![x.clone()],
            (System::Sft(s), Point::Sft(p)) => sft_diverge(s, p, sft_resolution(delta), &mut rng).map(Point::Sft).into_iter().collect(),
            (System::Numeric(n), Point::Real(r)) => vec![Point::Real(n.normalize(r + 0.99 * delta))],
            _ => Vec::new(),
        };
        for y in ys {
            if system.distance(&x, &y)? >= delta {
                continue;
            }
            let mut worst = (MonoidElement::new(vec![0; system.rank()]), 0.0f64);
            for t in compact.iter() {
                let d = system.distance(&system.act(t, &x)?, &system.act(t, &y)?)?;
                if d >= eps {
                    let w = WitnessRecord { kind: WitnessKind::Violation, x, epsilon: delta, y, t0: None, t: t.clone(), separation: d, seed: None };
                    return Ok(Verdict { claim, status: Status::Fails, exact: false, witnesses: vec![w], budget });
                }
                if d > worst.1 {
                    worst = (t.clone(), d);
                }
            }
            witnesses.push(WitnessRecord {
                kind: WitnessKind::Stable,
                x: x.clone(),
                epsilon: delta,
                y,
                t0: None,
                t: worst.0,
                separation: worst.1,
                seed: None,
            });
        }
    }
    if witnesses.is_empty() {
        witnesses.push(trivial_stable(system, delta));
    }
    Ok(Verdict { claim, status: Status::Holds, exact, witnesses, budget })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probe::revalidate;
    use crate::systems::FiniteSemiflow;

    #[test]
    fn finite_systems_have_exact_modulus() {
        let f: System = FiniteSemiflow::cascade(vec![1, 2, 0, 0]).unwrap().into();
        match equicontinuity_report(&f, &EquicontinuityMode::Uniform, 0.1, 8).unwrap() {
            EquicontinuityOutcome::Delta { delta, exact, .. } => {
                assert!(exact);
                assert!(delta > 0.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn full_shift_is_not_equicontinuous() {
        let s: System = SftSystem::full_shift(2).unwrap().into();
        let v = equicontinuity_verdict(&s, 0.5, 8).unwrap();
        assert_eq!(v.status, Status::Fails);
        assert!(v.witnesses[0].separation >= 0.5);
        revalidate(&s, &v).unwrap();
    }

    #[test]
    fn finite_subshift_is_equicontinuous() {
        let s: System = SftSystem::new(3, [(0, 1), (0, 2), (1, 1), (2, 2)]).unwrap().into();
        let v = equicontinuity_verdict(&s, 0.5, 8).unwrap();
        assert_eq!(v.status, Status::Holds);
        assert!(v.exact);
        revalidate(&s, &v).unwrap();
    }

    #[test]
    fn equicontinuity_point_on_a_subshift() {
        // 0 -> 1 -> 1 and 0 -> 2 <-> 2: the fixed point 1^∞ sees no branching.
        let s = SftSystem::new(3, [(0, 1), (0, 2), (1, 1), (2, 2)]).unwrap();
        let x = EventuallyPeriodicPoint::periodic(vec![1]).unwrap();
        let sys: System = s.into();
        match equicontinuity_report(&sys, &EquicontinuityMode::AtPoint(Point::Sft(x)), 0.25, 8).unwrap() {
            EquicontinuityOutcome::Delta { delta, .. } => assert_eq!(delta, 1.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rotation_is_equicontinuous_doubling_is_not() {
        let r: System = NumericCascade::rotation(0.3).unwrap().into();
        let v = equicontinuity_verdict(&r, 0.1, 64).unwrap();
        assert_eq!(v.status, Status::Holds);
        revalidate(&r, &v).unwrap();
        let d: System = NumericCascade::doubling().into();
        let v = equicontinuity_verdict(&d, 0.1, 64).unwrap();
        assert_eq!(v.status, Status::Fails);
        revalidate(&d, &v).unwrap();
    }

    #[test]
    fn compact_equicontinuity_everywhere() {
        let k = FiniteSubset::range(5);
        for sys in [
            System::from(SftSystem::full_shift(2).unwrap()),
            System::from(NumericCascade::doubling()),
            System::from(FiniteSemiflow::cascade(vec![1, 0]).unwrap()),
        ] {
            let v = check_compact_equicontinuity(&sys, &k, 0.25, &SampleSpec::with_count(16)).unwrap();
            assert_eq!(v.status, Status::Holds, "{}", sys.kind());
            revalidate(&sys, &v).unwrap();
        }
        let d: System = NumericCascade::doubling().into();
        let Claim::CompactEquicontinuity { delta, .. } = check_compact_equicontinuity(&d, &k, 0.5, &SampleSpec::default()).unwrap().claim else {
            unreachable!()
        };
        assert_eq!(delta, 0.5 / 32.0);
    }
}
