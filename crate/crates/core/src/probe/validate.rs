//! Re-derives every witness of a verdict from the system alone.

use super::numeric::{global_scan, replay_orbit, residual};
use super::search::{local, numeric_times, sft_resolution, Local, Target};
use super::{rng_for, Claim, Status, Verdict, WitnessKind, WitnessRecord, VERDICT_TOLERANCE};
use crate::error::{Error, Result};
use crate::systems::{Point, System};

fn reject(msg: impl Into<String>) -> Error {
    Error::WitnessRejected(msg.into())
}

fn ensure(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(reject(msg))
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= VERDICT_TOLERANCE
}

fn allowed(claim: &Claim, status: Status) -> &'static [WitnessKind] {
    use WitnessKind::*;
    match (claim, status) {
        (_, Status::Inconclusive) => &[],
        (Claim::Sensitivity { .. } | Claim::EventualSensitivity { .. }, Status::Holds) => &[Separation],
        (Claim::Sensitivity { .. } | Claim::EventualSensitivity { .. }, Status::Fails) => &[Isolation, Exhaustive, Isometric],
        (Claim::Gms { .. }, Status::Holds) => &[CoverSeparation],
        (Claim::Gms { .. }, Status::Fails) => &[Isolation, Exhaustive],
        (Claim::Equicontinuity { .. } | Claim::CompactEquicontinuity { .. }, Status::Holds) => &[Stable],
        (Claim::Equicontinuity { .. } | Claim::CompactEquicontinuity { .. }, Status::Fails) => &[Violation],
        (Claim::Transitivity { .. }, Status::Holds) => &[DenseOrbit],
        (Claim::Transitivity { .. }, Status::Fails) => &[PeriodicReturn],
        (Claim::PeriodicDensity { .. }, Status::Holds) => &[PeriodicRoot],
        (Claim::PeriodicDensity { .. }, Status::Fails) => &[NoRoot],
        (Claim::Minimality { .. }, Status::Holds) => &[DenseOrbit],
        (Claim::Minimality { .. }, Status::Fails) => &[PeriodicRoot, PeriodicReturn],
        (Claim::OrbitSeparation { .. }, _) => &[OrbitDistance],
    }
}

/// Checks that every witness of `verdict` is consistent with its claim on
/// `system`. Inconclusive verdicts carry nothing to check.
pub fn revalidate(system: &System, verdict: &Verdict) -> Result<()> {
    if verdict.status == Status::Inconclusive {
        return ensure(verdict.witnesses.is_empty(), "inconclusive verdict with witnesses");
    }
    ensure(!verdict.witnesses.is_empty(), "verdict without witnesses")?;
    let kinds = allowed(&verdict.claim, verdict.status);
    for w in &verdict.witnesses {
        if !kinds.contains(&w.kind) {
            return Err(reject(format!("{:?} witness cannot support {:?} here", w.kind, verdict.status)));
        }
        check(system, verdict, w)?;
    }
    Ok(())
}

fn base(system: &System, w: &WitnessRecord) -> Result<Point> {
    match &w.t0 {
        Some(t0) => system.act(t0, &w.x),
        None => Ok(w.x.clone()),
    }
}

fn check(system: &System, verdict: &Verdict, w: &WitnessRecord) -> Result<()> {
    if w.seed.is_none() {
        system.check_point(&w.x)?;
    }
    system.check_point(&w.y)?;
    let budget = &verdict.budget;
    match w.kind {
        WitnessKind::Separation | WitnessKind::CoverSeparation => {
            let b = base(system, w)?;
            ensure(system.distance(&b, &w.y)? < w.epsilon, "pair is not within epsilon")?;
            let (tb, ty) = (system.act(&w.t, &b)?, system.act(&w.t, &w.y)?);
            let d = system.distance(&tb, &ty)?;
            ensure(close(d, w.separation), "recorded separation does not match")?;
            // Subshift horizons count from the resolution index of epsilon.
            let limit = match system {
                System::Sft(_) => budget.horizon + sft_resolution(w.epsilon) as u64,
                _ => budget.horizon,
            };
            ensure(w.t.coords().iter().all(|&c| c <= limit), "time exceeds the horizon")?;
            match &verdict.claim {
                Claim::Sensitivity { c } | Claim::EventualSensitivity { c } => ensure(d >= *c, "separation below the constant"),
                Claim::Gms { cover } => ensure(cover.separates(system, &tb, &ty), "a cover member contains both points"),
                _ => Err(reject("claim mismatch")),
            }
        }
        WitnessKind::Isolation | WitnessKind::Exhaustive | WitnessKind::Isometric => {
            let (target, t0_horizon) = match &verdict.claim {
                Claim::Sensitivity { c } => (Target::Constant(*c), None),
                Claim::EventualSensitivity { c } => (Target::Constant(*c), budget.t0_horizon),
                Claim::Gms { cover } => (Target::Cover(cover), None),
                _ => return Err(reject("claim mismatch")),
            };
            match local(system, &w.x, w.epsilon, target, budget.horizon, t0_horizon, &mut rng_for(budget.seed, 0)) {
                Local::Refuted(again) if again == *w => Ok(()),
                _ => Err(reject("search did not reproduce the refutation")),
            }
        }
        WitnessKind::PeriodicRoot => {
            let (System::Numeric(n), Some(x)) = (system, w.x.as_real()) else { return Err(reject("not a numeric root")) };
            let r = residual(n, w.t.weight(), x).abs();
            ensure(r <= VERDICT_TOLERANCE && close(r, w.separation), "residual does not vanish")?;
            if let Claim::PeriodicDensity { eps } = verdict.claim {
                ensure(system.distance(&w.x, &w.y)? < eps, "root lies outside the ball")?;
            }
            Ok(())
        }
        WitnessKind::NoRoot => {
            let System::Numeric(n) = system else { return Err(reject("not a numeric map")) };
            match global_scan(n, w.t.weight() as usize, 2) {
                Err((x, _, r)) => ensure(Point::Real(x) == w.x && close(r, w.separation), "scan disagrees with the record"),
                Ok(_) => Err(reject("scan found a root")),
            }
        }
        WitnessKind::DenseOrbit | WitnessKind::PeriodicReturn => {
            let System::Numeric(n) = system else { return Err(reject("not a numeric map")) };
            let grid = match verdict.claim {
                Claim::Transitivity { grid } | Claim::Minimality { grid } => grid,
                _ => return Err(reject("claim mismatch")),
            };
            ensure(replay_orbit(n, w, grid)?, "orbit replay disagrees with the record")
        }
        WitnessKind::OrbitDistance => {
            let Claim::OrbitSeparation { q1, q2, bound } = &verdict.claim else { return Err(reject("claim mismatch")) };
            let orbit = |q: &Point| system.bounded_orbit(q, 1 << 16)?.ok_or_else(|| reject("orbit too large"));
            let dist = |o: &[Point]| -> Result<f64> { o.iter().map(|p| system.distance(&w.x, p)).try_fold(f64::INFINITY, |m, d| d.map(|d| m.min(d))) };
            let (o1, o2) = (orbit(q1)?, orbit(q2)?);
            let (d1, d2) = (dist(&o1)?, dist(&o2)?);
            let far = if d1 >= d2 { &o1 } else { &o2 };
            ensure(far.contains(&w.y), "y is not on the farther orbit")?;
            ensure(close(system.distance(&w.x, &w.y)?, d1.max(d2)) && close(w.separation, d1.max(d2)), "distance mismatch")?;
            match verdict.status {
                Status::Holds => ensure(w.separation >= bound - VERDICT_TOLERANCE, "below the bound"),
                _ => ensure(w.separation < *bound, "not below the bound"),
            }
        }
        WitnessKind::Stable | WitnessKind::Violation => {
            let (eps, delta) = match &verdict.claim {
                Claim::Equicontinuity { eps } => (*eps, w.epsilon),
                Claim::CompactEquicontinuity { eps, delta, .. } => (*eps, *delta),
                _ => return Err(reject("claim mismatch")),
            };
            ensure(system.distance(&w.x, &w.y)? < delta, "pair is not within delta")?;
            if w.kind == WitnessKind::Violation {
                let d = system.distance(&system.act(&w.t, &w.x)?, &system.act(&w.t, &w.y)?)?;
                return ensure(close(d, w.separation) && d >= eps, "violation not reproduced");
            }
            let worst = stable_excursion(system, verdict, w)?;
            ensure(worst < eps && close(worst, w.separation), "excursion mismatch")
        }
    }
}

/// Largest `d(t·x, t·y)` over the times the claim quantifies over.
fn stable_excursion(system: &System, verdict: &Verdict, w: &WitnessRecord) -> Result<f64> {
    let mut worst: f64 = 0.0;
    match (&verdict.claim, system) {
        (Claim::CompactEquicontinuity { compact, .. }, _) => {
            for t in compact.iter() {
                worst = worst.max(system.distance(&system.act(t, &w.x)?, &system.act(t, &w.y)?)?);
            }
        }
        (_, System::Numeric(n)) => {
            let (x, y) = (w.x.as_real().unwrap(), w.y.as_real().unwrap());
            numeric_times(n, x, y, verdict.budget.horizon, |_, a, b| {
                worst = worst.max(n.distance(a, b));
                false
            });
        }
        _ => {
            // Exact moduli are recorded on the diagonal.
            ensure(w.x == w.y, "exact modulus must be recorded on the diagonal")?;
        }
    }
    Ok(worst)
}
