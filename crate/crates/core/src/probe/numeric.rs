//! Evidence for transitivity, density of periodic points and minimality on
//! numeric maps.

use num_bigint::BigUint;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::{rng_for, Budget, Claim, SampleSpec, Status, Verdict, WitnessKind, WitnessRecord, VERDICT_TOLERANCE};
use crate::error::{Error, Result};
use crate::monoid::MonoidElement;
use crate::systems::{DyadicStep, NumericCascade, PhaseSpace, Point};

/// Bisection stops once the bracket is this narrow.
const BISECTION_WIDTH: f64 = 1e-12;
const MAX_SAMPLES: usize = 4096;

/// A dyadic rational `numerator / 2^bits`, hex encoded.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicSeed {
    pub bits: u64,
    pub numerator: String,
}

#[derive(Clone, Debug)]
enum OrbitPoint {
    Dyadic { num: BigUint, bits: u64 },
    Float(f64),
}

impl OrbitPoint {
    fn value(&self) -> f64 {
        match self {
            OrbitPoint::Float(x) => *x,
            OrbitPoint::Dyadic { num, bits } => {
                // Top 64 bits are plenty for a double.
                let shift = bits.saturating_sub(64);
                let top: BigUint = num >> shift;
                let top = top.iter_u64_digits().next().unwrap_or(0) as f64;
                top / 2f64.powi((*bits - shift) as i32)
            }
        }
    }

    fn bin(&self, grid: usize) -> usize {
        let b = match self {
            OrbitPoint::Float(x) => (x * grid as f64).floor() as usize,
            OrbitPoint::Dyadic { num, bits } => {
                let scaled: BigUint = (num * grid) >> *bits;
                scaled.iter_u64_digits().next().unwrap_or(0) as usize
            }
        };
        b.min(grid - 1)
    }

    fn step(&mut self, n: &NumericCascade, i: usize) {
        match self {
            OrbitPoint::Float(x) => *x = n.step(i, *x),
            OrbitPoint::Dyadic { num, bits } => {
                let one = BigUint::from(1u32) << *bits;
                match n.dyadic_step(i).expect("dyadic family") {
                    DyadicStep::Multiply(m) => {
                        let prod: BigUint = &*num * m;
                        *num = prod & (&one - 1u32);
                    }
                    DyadicStep::Tent2 => {
                        let doubled: BigUint = &*num << 1;
                        *num = if doubled <= one { doubled } else { (one << 1) - doubled };
                    }
                }
            }
        }
    }

    fn seed(&self) -> Option<DyadicSeed> {
        match self {
            OrbitPoint::Dyadic { num, bits } => Some(DyadicSeed { bits: *bits, numerator: num.to_str_radix(16) }),
            OrbitPoint::Float(_) => None,
        }
    }
}

fn dyadic_capable(n: &NumericCascade) -> bool {
    (0..n.rank()).all(|i| n.dyadic_step(i).is_some())
}

fn random_start<R: RngCore>(n: &NumericCascade, rng: &mut R, horizon: u64) -> OrbitPoint {
    if dyadic_capable(n) {
        let bits = horizon + 64;
        let mut bytes = vec![0u8; bits.div_ceil(8) as usize];
        rng.fill_bytes(&mut bytes);
        let num = BigUint::from_bytes_le(&bytes) & ((BigUint::from(1u32) << bits) - 1u32);
        OrbitPoint::Dyadic { num, bits }
    } else {
        OrbitPoint::Float(n.normalize(rng.gen::<f64>()))
    }
}

fn start_from_record(w: &WitnessRecord) -> Result<OrbitPoint> {
    match &w.seed {
        Some(s) => {
            let num = BigUint::parse_bytes(s.numerator.as_bytes(), 16).ok_or_else(|| Error::WitnessRejected("bad seed".into()))?;
            Ok(OrbitPoint::Dyadic { num, bits: s.bits })
        }
        None => w.x.as_real().map(OrbitPoint::Float).ok_or(Error::ForeignPoint),
    }
}

/// The time reached after `steps` alternating generator applications.
fn alternating_time(rank: usize, steps: u64) -> MonoidElement {
    match rank {
        1 => MonoidElement::scalar(steps),
        _ => MonoidElement::new(vec![steps.div_ceil(2), steps / 2]),
    }
}

enum OrbitOutcome {
    Dense { steps: u64, last: f64 },
    Returned { anchor: u64, steps: u64, gap: f64 },
    Open,
}

/// Runs one orbit, alternating generators on rank-2 systems, until every bin
/// is visited, the orbit closes up numerically, or the horizon is reached.
fn run_orbit(n: &NumericCascade, start: &OrbitPoint, grid: usize, horizon: u64) -> OrbitOutcome {
    let rank = n.rank() as u64;
    let mut visited = vec![false; grid];
    let mut count = 0;
    let mut cur = start.clone();
    let mut anchor = (cur.value(), 0u64);
    let mut power = 1u64;
    for t in 0..=horizon {
        let v = cur.value();
        if t > anchor.1 && (t - anchor.1) % rank == 0 && n.distance(v, anchor.0) <= VERDICT_TOLERANCE {
            return OrbitOutcome::Returned { anchor: anchor.1, steps: t, gap: n.distance(v, anchor.0) };
        }
        let b = cur.bin(grid);
        if !visited[b] {
            visited[b] = true;
            count += 1;
            if count == grid {
                return OrbitOutcome::Dense { steps: t, last: v };
            }
        }
        if t == power {
            anchor = (v, t);
            power *= 2;
        }
        cur.step(n, (t % rank) as usize);
    }
    OrbitOutcome::Open
}

pub fn transitivity_evidence(system: &NumericCascade, grid: usize, horizon: u64, seed: u64) -> Result<Verdict> {
    if grid < 2 {
        return Err(Error::InvalidParameter("grid must be at least 2".into()));
    }
    let mut budget = Budget::new(&SampleSpec { count: 1, eps_ladder: vec![1.0 / grid as f64], seed }, horizon);
    budget.grid = Some(grid);
    let claim = Claim::Transitivity { grid };
    let start = random_start(system, &mut rng_for(seed, 0), horizon);
    Ok(orbit_verdict(system, claim, budget, &start, grid, horizon))
}

fn orbit_verdict(n: &NumericCascade, claim: Claim, budget: Budget, start: &OrbitPoint, grid: usize, horizon: u64) -> Verdict {
    let record = |kind, y: f64, t0: Option<u64>, steps: u64, separation: f64| WitnessRecord {
        kind,
        x: Point::Real(start.value()),
        epsilon: 1.0 / grid as f64,
        y: Point::Real(y),
        t0: t0.map(|a| alternating_time(n.rank(), a)),
        t: alternating_time(n.rank(), steps),
        separation,
        seed: start.seed(),
    };
    match run_orbit(n, start, grid, horizon) {
        OrbitOutcome::Dense { steps, last } => Verdict {
            claim,
            status: Status::Holds,
            exact: false,
            witnesses: vec![record(WitnessKind::DenseOrbit, last, None, steps, 1.0)],
            budget,
        },
        OrbitOutcome::Returned { anchor, steps, gap } => Verdict {
            claim,
            status: Status::Fails,
            exact: false,
            witnesses: vec![record(WitnessKind::PeriodicReturn, start.value(), Some(anchor), steps, gap)],
            budget,
        },
        OrbitOutcome::Open => Verdict::inconclusive(claim, budget),
    }
}

/// Signed `f^n(x) − x`, folded into `(−½, ½]` on the circle.
pub(crate) fn residual(n: &NumericCascade, period: u64, x: f64) -> f64 {
    let d = n.iterate(0, x, period) - x;
    match n.space() {
        PhaseSpace::Interval => d,
        PhaseSpace::Circle => {
            let w = (d + 0.5).rem_euclid(1.0) - 0.5;
            if w <= -0.5 {
                0.5
            } else {
                w
            }
        }
    }
}

fn samples_for(n: &NumericCascade, period: u64) -> usize {
    let growth = n.lipschitz(0).max(1.0).powi(period as i32);
    ((16.0 * growth).ceil() as usize).clamp(64, MAX_SAMPLES)
}

/// A confirmed root of `f^period(x) = x` in the open interval `(lo, hi)`
/// (unwrapped coordinates), together with its residual.
fn root_in(n: &NumericCascade, period: u64, lo: f64, hi: f64, samples: usize) -> Option<(f64, f64)> {
    let at = |u: f64| residual(n, period, n.normalize(u));
    let confirm = |u: f64| {
        let x = n.normalize(u);
        let r = residual(n, period, x).abs();
        (r <= VERDICT_TOLERANCE && u > lo && u < hi).then_some((x, r))
    };
    let h = (hi - lo) / samples as f64;
    let mut prev = (lo + 0.5 * h, at(lo + 0.5 * h));
    if let Some(hit) = confirm(prev.0) {
        return Some(hit);
    }
    for k in 1..samples {
        let u = lo + (k as f64 + 0.5) * h;
        let r = at(u);
        if let Some(hit) = confirm(u) {
            return Some(hit);
        }
        if prev.1.signum() != r.signum() {
            let (mut a, mut b, mut ra) = (prev.0, u, prev.1);
            while b - a > BISECTION_WIDTH {
                let m = 0.5 * (a + b);
                let rm = at(m);
                if rm.signum() == ra.signum() {
                    a = m;
                    ra = rm;
                } else {
                    b = m;
                }
            }
            if let Some(hit) = confirm(0.5 * (a + b)).or_else(|| confirm(a)).or_else(|| confirm(b)) {
                return Some(hit);
            }
        }
        prev = (u, r);
    }
    None
}

fn centers(n: &NumericCascade, eps: f64) -> Vec<f64> {
    let count = (1.0 / eps).ceil() as usize;
    match n.space() {
        PhaseSpace::Circle => (0..count).map(|j| j as f64 * eps).filter(|&c| c < 1.0).collect(),
        PhaseSpace::Interval => (0..=count).map(|j| (j as f64 * eps).min(1.0)).collect(),
    }
}

/// Smallest residual over the whole space and the period achieving it,
/// or the first confirmed root.
pub(crate) fn global_scan(n: &NumericCascade, period_bound: usize, scale: usize) -> std::result::Result<(f64, u64, f64), (f64, u64, f64)> {
    let mut best = (0.0, 1, f64::INFINITY);
    for p in 1..=period_bound as u64 {
        let samples = samples_for(n, p) * scale;
        if let Some((x, r)) = root_in(n, p, -1e-12, 1.0 + 1e-12, samples) {
            return Ok((x, p, r));
        }
        for k in 0..samples {
            let x = n.normalize((k as f64 + 0.5) / samples as f64);
            let r = residual(n, p, x).abs();
            if r < best.2 {
                best = (x, p, r);
            }
        }
    }
    Err(best)
}

pub fn periodic_density_evidence(system: &NumericCascade, eps: f64, period_bound: usize) -> Result<Verdict> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("eps must be positive".into()));
    }
    if system.rank() != 1 {
        return Err(Error::Unsupported("periodic density evidence for rank-2 actions".into()));
    }
    let mut budget = Budget::new(&SampleSpec { count: 0, eps_ladder: vec![eps], seed: 0 }, period_bound as u64);
    budget.period_bound = Some(period_bound);
    let claim = Claim::PeriodicDensity { eps };
    let cs = centers(system, eps);
    budget.samples = cs.len();
    let mut witnesses = Vec::new();
    let mut missed = false;
    for &c in &cs {
        let hit = (1..=period_bound as u64)
            .find_map(|p| root_in(system, p, c - eps, c + eps, samples_for(system, p)).map(|(x, r)| (p, x, r)));
        match hit {
            Some((p, x, r)) => witnesses.push(WitnessRecord {
                kind: WitnessKind::PeriodicRoot,
                x: Point::Real(x),
                epsilon: eps,
                y: Point::Real(c),
                t0: None,
                t: MonoidElement::scalar(p),
                separation: r,
                seed: None,
            }),
            None => missed = true,
        }
    }
    if !missed {
        return Ok(Verdict { claim, status: Status::Holds, exact: false, witnesses, budget });
    }
    if witnesses.is_empty() {
        if let Err((x, _, r)) = global_scan(system, 2 * period_bound, 2) {
            let w = WitnessRecord {
                kind: WitnessKind::NoRoot,
                x: Point::Real(x),
                epsilon: eps,
                y: Point::Real(x),
                t0: None,
                t: MonoidElement::scalar(2 * period_bound as u64),
                separation: r,
                seed: None,
            };
            return Ok(Verdict { claim, status: Status::Fails, exact: false, witnesses: vec![w], budget });
        }
    }
    Ok(Verdict::inconclusive(claim, budget))
}

/// Minimality evidence: a periodic point on an infinite space refutes it;
/// dense orbits from several random starts support it.
pub fn minimality_evidence(system: &NumericCascade, grid: usize, horizon: u64, period_bound: usize, seed: u64) -> Result<Verdict> {
    let mut budget = Budget::new(&SampleSpec { count: 4, eps_ladder: vec![1.0 / grid as f64], seed }, horizon);
    budget.grid = Some(grid);
    budget.period_bound = Some(period_bound);
    let claim = Claim::Minimality { grid };
    if system.rank() == 1 {
        if let Ok((x, p, r)) = global_scan(system, period_bound, 1) {
            let w = WitnessRecord {
                kind: WitnessKind::PeriodicRoot,
                x: Point::Real(x),
                epsilon: 1.0,
                y: Point::Real(x),
                t0: None,
                t: MonoidElement::scalar(p),
                separation: r,
                seed: None,
            };
            return Ok(Verdict { claim, status: Status::Fails, exact: false, witnesses: vec![w], budget });
        }
    }
    let mut witnesses = Vec::new();
    for i in 0..4 {
        let start = random_start(system, &mut rng_for(seed, i), horizon);
        let v = orbit_verdict(system, claim.clone(), budget.clone(), &start, grid, horizon);
        match v.status {
            Status::Holds => witnesses.extend(v.witnesses),
            Status::Fails if system.rank() == 1 => return Ok(Verdict { claim, ..v }),
            _ => return Ok(Verdict::inconclusive(claim, budget)),
        }
    }
    Ok(Verdict { claim, status: Status::Holds, exact: false, witnesses, budget })
}

/// Re-runs an orbit recorded in a witness; used by revalidation.
pub(crate) fn replay_orbit(n: &NumericCascade, w: &WitnessRecord, grid: usize) -> Result<bool> {
    let start = start_from_record(w)?;
    let steps = w.t.weight();
    match w.kind {
        WitnessKind::DenseOrbit => {
            let mut visited = vec![false; grid];
            let mut cur = start;
            for s in 0..=steps {
                visited[cur.bin(grid)] = true;
                if s < steps {
                    cur.step(n, (s % n.rank() as u64) as usize);
                }
            }
            Ok(visited.iter().all(|&v| v))
        }
        WitnessKind::PeriodicReturn => {
            let anchor = w.t0.as_ref().map(|t| t.weight()).unwrap_or(0);
            let mut visited = vec![false; grid];
            let mut cur = start;
            let mut anchor_value = f64::NAN;
            for s in 0..=steps {
                visited[cur.bin(grid)] = true;
                if s == anchor {
                    anchor_value = cur.value();
                }
                if s < steps {
                    cur.step(n, (s % n.rank() as u64) as usize);
                }
            }
            let gap = n.distance(cur.value(), anchor_value);
            Ok(gap <= VERDICT_TOLERANCE && (gap - w.separation).abs() <= VERDICT_TOLERANCE && !visited.iter().all(|&v| v))
        }
        _ => Ok(false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probe::revalidate;
    use crate::systems::System;

    #[test]
    fn doubling_orbit_is_dense() {
        let d = NumericCascade::doubling();
        let v = transitivity_evidence(&d, 256, 1 << 16, 3).unwrap();
        assert_eq!(v.status, Status::Holds);
        assert!(v.witnesses[0].seed.is_some());
        revalidate(&System::Numeric(d), &v).unwrap();
    }

    #[test]
    fn tent_and_commuting_orbits_are_dense() {
        let t = NumericCascade::tent(2.0).unwrap();
        assert_eq!(transitivity_evidence(&t, 64, 1 << 14, 1).unwrap().status, Status::Holds);
        let m = NumericCascade::commuting_mult(2, 3).unwrap();
        let v = transitivity_evidence(&m, 64, 1 << 14, 1).unwrap();
        assert_eq!(v.status, Status::Holds);
        revalidate(&System::Numeric(m), &v).unwrap();
    }

    #[test]
    fn rational_rotation_closes_up() {
        let r = NumericCascade::rotation(1.0 / 3.0).unwrap();
        let v = transitivity_evidence(&r, 64, 1 << 10, 0).unwrap();
        assert_eq!(v.status, Status::Fails);
        assert_eq!(v.witnesses[0].kind, WitnessKind::PeriodicReturn);
        revalidate(&System::Numeric(r), &v).unwrap();
    }

    #[test]
    fn doubling_has_dense_periodic_points() {
        let d = NumericCascade::doubling();
        let v = periodic_density_evidence(&d, 1.0 / 16.0, 8).unwrap();
        assert_eq!(v.status, Status::Holds);
        assert_eq!(v.witnesses.len(), 16);
        revalidate(&System::Numeric(d), &v).unwrap();
    }

    #[test]
    fn logistic_has_dense_periodic_points() {
        let l = NumericCascade::logistic(4.0).unwrap();
        let v = periodic_density_evidence(&l, 1.0 / 16.0, 10).unwrap();
        assert_eq!(v.status, Status::Holds);
        revalidate(&System::Numeric(l), &v).unwrap();
    }

    #[test]
    fn irrational_rotation_has_no_periodic_points() {
        let r = NumericCascade::rotation((5f64.sqrt() - 1.0) / 2.0).unwrap();
        let v = periodic_density_evidence(&r, 1.0 / 16.0, 8).unwrap();
        assert_eq!(v.status, Status::Fails);
        revalidate(&System::Numeric(r.clone()), &v).unwrap();
        let m = minimality_evidence(&r, 64, 1 << 12, 8, 0).unwrap();
        assert_eq!(m.status, Status::Holds);
        let d = minimality_evidence(&NumericCascade::doubling(), 64, 1 << 12, 8, 0).unwrap();
        assert_eq!(d.status, Status::Fails);
    }
}
