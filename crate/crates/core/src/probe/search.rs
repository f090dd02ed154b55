//! Witness search for sensitivity, eventual sensitivity and cover-based
//! sensitivity.
//!
//! For each sampled `x` and each `ε` on the ladder the search looks for `y`
//! within `ε` of `b = t₀·x` and a time `t` with `t·b`, `t·y` far apart. It either
//! finds one, refutes the pair `(x, ε)`, or gives up.

use rand::Rng;

use super::{rng_for, sample_points, Budget, Claim, Cover, SampleSpec, Status, Verdict, WitnessKind, WitnessRecord, ISOMETRY_TOLERANCE};
use crate::error::{Error, Result};
use crate::monoid::{box_elements, MonoidElement};
use crate::systems::{EventuallyPeriodicPoint, FiniteSemiflow, NumericCascade, Point, SftSystem, System};

/// What "far apart" means.
#[derive(Clone, Copy)]
pub(crate) enum Target<'a> {
    Constant(f64),
    Cover(&'a Cover),
}

impl Target<'_> {
    /// The recorded separation when `a`, `b` are far apart.
    fn met(&self, system: &System, a: &Point, b: &Point) -> Option<f64> {
        let d = system.distance(a, b).ok()?;
        match self {
            Target::Constant(c) => (d >= *c).then_some(d),
            Target::Cover(cover) => cover.separates(system, a, b).then_some(d),
        }
    }

    fn hit_kind(&self) -> WitnessKind {
        match self {
            Target::Constant(_) => WitnessKind::Separation,
            Target::Cover(_) => WitnessKind::CoverSeparation,
        }
    }
}

pub(crate) enum Local {
    Found(WitnessRecord),
    Refuted(WitnessRecord),
    Open,
}

pub fn sensitivity_report(system: &System, c: f64, samples: &SampleSpec, horizon: u64) -> Result<Verdict> {
    check_constant(c)?;
    let budget = Budget::new(samples, horizon);
    Ok(run(system, Claim::Sensitivity { c }, Target::Constant(c), samples, budget, None))
}

pub fn eventual_sensitivity_report(
    system: &System,
    c: f64,
    samples: &SampleSpec,
    horizon: u64,
    t0_horizon: u64,
) -> Result<Verdict> {
    check_constant(c)?;
    let mut budget = Budget::new(samples, horizon);
    budget.t0_horizon = Some(t0_horizon);
    Ok(run(system, Claim::EventualSensitivity { c }, Target::Constant(c), samples, budget, Some(t0_horizon)))
}

pub fn gms_sensitivity_report(system: &System, cover: &Cover, samples: &SampleSpec, horizon: u64) -> Result<Verdict> {
    cover.validate(system)?;
    let budget = Budget::new(samples, horizon);
    Ok(run(system, Claim::Gms { cover: cover.clone() }, Target::Cover(cover), samples, budget, None))
}

fn check_constant(c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("constant must be positive, got {c}")))
    }
}

fn run(system: &System, claim: Claim, target: Target, samples: &SampleSpec, budget: Budget, t0_horizon: Option<u64>) -> Verdict {
    let mut ladder = samples.eps_ladder.clone();
    if let System::Finite(s) = system {
        // Balls of this radius are singletons, so finite spaces are always refuted.
        if let Some(d) = s.min_positive_distance() {
            ladder.push(d.to_f64());
        }
    }
    let exact = system.is_exact();
    let mut found = Vec::new();
    let mut open = false;
    for (i, x) in sample_points(system, samples).iter().enumerate() {
        let mut rng = rng_for(samples.seed, 1 + i as u64);
        for &eps in &ladder {
            match local(system, x, eps, target, budget.horizon, t0_horizon, &mut rng) {
                Local::Found(w) => found.push(w),
                Local::Refuted(w) => return Verdict { claim, status: Status::Fails, exact, witnesses: vec![w], budget },
                Local::Open => open = true,
            }
        }
    }
    if open || found.is_empty() {
        Verdict::inconclusive(claim, budget)
    } else {
        Verdict { claim, status: Status::Holds, exact, witnesses: found, budget }
    }
}

pub(crate) fn local<R: Rng>(
    system: &System,
    x: &Point,
    eps: f64,
    target: Target,
    horizon: u64,
    t0_horizon: Option<u64>,
    rng: &mut R,
) -> Local {
    match (system, x) {
        (System::Finite(s), Point::Finite(p)) => finite_local(s, system, *p, eps, target, horizon, t0_horizon.is_some()),
        (System::Sft(s), Point::Sft(p)) => sft_local(s, system, p, eps, target, horizon, t0_horizon, rng),
        (System::Numeric(n), Point::Real(p)) => numeric_local(n, system, *p, eps, target, horizon, t0_horizon),
        _ => Local::Open,
    }
}

// ---------------------------------------------------------------- finite

/// Each point of the orbit of `x` with the first time (in box order) reaching it.
pub(crate) fn orbit_with_times(s: &FiniteSemiflow, x: usize) -> Vec<(usize, MonoidElement)> {
    let mut out: Vec<(usize, MonoidElement)> = Vec::new();
    for t in box_elements(&s.time_box(&[x])) {
        let z = s.act(&t, x).expect("valid point");
        if !out.iter().any(|(w, _)| *w == z) {
            out.push((z, t));
        }
    }
    out
}

/// Searches every `y` in the ball and every time in the joint box.
/// Returns the witness, or the largest separation seen and whether some
/// witness exists beyond the horizon.
pub(crate) fn finite_ball_search(
    s: &FiniteSemiflow,
    system: &System,
    b: usize,
    eps: f64,
    target: Target,
    horizon: u64,
) -> std::result::Result<(usize, MonoidElement, f64), (usize, f64, bool, bool)> {
    let mut best = (b, 0.0);
    let mut beyond = false;
    let mut singleton = true;
    for y in (0..s.len()).filter(|&y| y != b && s.distance(b, y) < eps) {
        singleton = false;
        for t in box_elements(&s.time_box(&[b, y])) {
            let (tb, ty) = (Point::Finite(s.act(&t, b).unwrap()), Point::Finite(s.act(&t, y).unwrap()));
            let d = system.distance(&tb, &ty).unwrap();
            if d > best.1 {
                best = (y, d);
            }
            if let Some(sep) = target.met(system, &tb, &ty) {
                if t.coords().iter().all(|&c| c <= horizon) {
                    return Ok((y, t, sep));
                }
                beyond = true;
            }
        }
    }
    Err((best.0, best.1, beyond, singleton))
}

fn finite_local(s: &FiniteSemiflow, system: &System, x: usize, eps: f64, target: Target, horizon: u64, eventual: bool) -> Local {
    let bases = if eventual { orbit_with_times(s, x) } else { vec![(x, MonoidElement::zero(s.rank()))] };
    let mut beyond = false;
    let mut all_singletons = true;
    let mut best = (x, 0.0);
    for (b, t0) in bases {
        match finite_ball_search(s, system, b, eps, target, horizon) {
            Ok((y, t, sep)) => {
                return Local::Found(WitnessRecord {
                    kind: target.hit_kind(),
                    x: Point::Finite(x),
                    epsilon: eps,
                    y: Point::Finite(y),
                    t0: eventual.then_some(t0),
                    t,
                    separation: sep,
                    seed: None,
                })
            }
            Err((y, d, over, singleton)) => {
                beyond |= over;
                all_singletons &= singleton;
                if d > best.1 {
                    best = (y, d);
                }
            }
        }
    }
    if beyond {
        return Local::Open;
    }
    Local::Refuted(WitnessRecord {
        kind: if all_singletons { WitnessKind::Isolation } else { WitnessKind::Exhaustive },
        x: Point::Finite(x),
        epsilon: eps,
        y: Point::Finite(best.0),
        t0: None,
        t: MonoidElement::zero(s.rank()),
        separation: best.1,
        seed: None,
    })
}

// ---------------------------------------------------------------- subshift

/// Smallest `i` with `2^-i < eps`: a point within `eps` agrees on `[0, i)`.
pub(crate) fn sft_resolution(eps: f64) -> usize {
    let mut i = 0;
    while i < 1100 && 2f64.powi(-(i as i32)) >= eps {
        i += 1;
    }
    i
}

/// Whether every point within `2^-i`-resolution of `x` equals `x`: no
/// branching vertex is visited from index `i − 1` on.
pub(crate) fn sft_isolated(s: &SftSystem, x: &EventuallyPeriodicPoint, i: usize) -> bool {
    if i == 0 {
        return s.trimmed_vertex_count() == 1 && s.out_degree(x.at(0)) == 1;
    }
    let from = i - 1;
    let to = from.max(x.prefix().len()) + x.period();
    (from..to).all(|k| !s.is_branching(x.at(k)))
}

/// A point agreeing with `b` on `[0, j)` and differing at `j`.
pub(crate) fn sft_diverge<R: Rng>(s: &SftSystem, b: &EventuallyPeriodicPoint, j: usize, rng: &mut R) -> Option<EventuallyPeriodicPoint> {
    let mut word = b.word(j);
    let other = if j == 0 {
        s.trimmed_vertices().into_iter().find(|&v| v != b.at(0))?
    } else {
        *s.successors(b.at(j - 1)).iter().find(|&&v| v != b.at(j))?
    };
    word.push(other);
    s.extend_word(rng, &word).ok()
}

#[allow(clippy::too_many_arguments)]
fn sft_local<R: Rng>(
    s: &SftSystem,
    system: &System,
    x: &EventuallyPeriodicPoint,
    eps: f64,
    target: Target,
    horizon: u64,
    t0_horizon: Option<u64>,
    rng: &mut R,
) -> Local {
    let rank1 = MonoidElement::scalar;
    let i_min = sft_resolution(eps);
    if let Target::Constant(c) = target {
        if c > 1.0 {
            // The diameter is 1.
            return Local::Refuted(WitnessRecord {
                kind: WitnessKind::Exhaustive,
                x: Point::Sft(x.clone()),
                epsilon: eps,
                y: Point::Sft(x.clone()),
                t0: None,
                t: rank1(0),
                separation: 1.0,
                seed: None,
            });
        }
    }
    if sft_isolated(s, x, i_min) {
        return Local::Refuted(WitnessRecord {
            kind: WitnessKind::Isolation,
            x: Point::Sft(x.clone()),
            epsilon: eps,
            y: Point::Sft(x.clone()),
            t0: None,
            t: rank1(0),
            separation: 0.0,
            seed: None,
        });
    }
    let t_max = i_min as u64 + horizon;
    // Largest k with 2^-k ≥ c.
    let k_c = match target {
        Target::Constant(c) => (0..64).take_while(|&k| 2f64.powi(-k) >= c).last().unwrap_or(0) as usize,
        Target::Cover(_) => 0,
    };
    for t0 in 0..=t0_horizon.unwrap_or(0) {
        let b = x.shift(t0);
        let j_max = t_max as usize + k_c;
        for j in i_min..=j_max {
            let branches = if j == 0 { s.trimmed_vertex_count() > 1 } else { s.is_branching(b.at(j - 1)) };
            if !branches {
                continue;
            }
            let Some(y) = sft_diverge(s, &b, j, rng) else { continue };
            let t_lo = match target {
                Target::Constant(_) => j.saturating_sub(k_c),
                Target::Cover(_) => 0,
            };
            for t in t_lo..=j.min(t_max as usize) {
                let (tb, ty) = (Point::Sft(b.shift(t as u64)), Point::Sft(y.shift(t as u64)));
                if let Some(sep) = target.met(system, &tb, &ty) {
                    return Local::Found(WitnessRecord {
                        kind: target.hit_kind(),
                        x: Point::Sft(x.clone()),
                        epsilon: eps,
                        y: Point::Sft(y),
                        t0: t0_horizon.map(|_| rank1(t0)),
                        t: rank1(t as u64),
                        separation: sep,
                        seed: None,
                    });
                }
            }
        }
    }
    Local::Open
}

// ---------------------------------------------------------------- numeric

const OFFSETS: [f64; 6] = [0.5, -0.5, 0.25, -0.25, 0.9, -0.9];

/// Visits `(t, t·a, t·b)` for every `t` in `[0, horizon]^k`, stopping when `f` returns true.
pub(crate) fn numeric_times(n: &NumericCascade, a: f64, b: f64, horizon: u64, mut f: impl FnMut(&MonoidElement, f64, f64) -> bool) {
    match n.rank() {
        1 => {
            let (mut ta, mut tb) = (a, b);
            for t in 0..=horizon {
                if f(&MonoidElement::scalar(t), ta, tb) {
                    return;
                }
                ta = n.step(0, ta);
                tb = n.step(0, tb);
            }
        }
        _ => {
            let (mut ra, mut rb) = (a, b);
            for i in 0..=horizon {
                let (mut ta, mut tb) = (ra, rb);
                for j in 0..=horizon {
                    if f(&MonoidElement::new(vec![i, j]), ta, tb) {
                        return;
                    }
                    ta = n.step(1, ta);
                    tb = n.step(1, tb);
                }
                ra = n.step(0, ra);
                rb = n.step(0, rb);
            }
        }
    }
}

/// `t₀` along the first generator.
pub(crate) fn numeric_t0(n: &NumericCascade, t0: u64) -> MonoidElement {
    let mut c = vec![0; n.rank()];
    c[0] = t0;
    MonoidElement::new(c)
}

/// Nearby candidates `b + θε` that lie in the phase space at distance in `(0, ε)`.
pub(crate) fn numeric_candidates(n: &NumericCascade, b: f64, eps: f64) -> Vec<f64> {
    OFFSETS
        .iter()
        .map(|o| n.normalize(b + o * eps))
        .filter(|&y| {
            let d = n.distance(b, y);
            d > 0.0 && d < eps
        })
        .collect()
}

fn numeric_local(
    n: &NumericCascade,
    system: &System,
    x: f64,
    eps: f64,
    target: Target,
    horizon: u64,
    t0_horizon: Option<u64>,
) -> Local {
    let mut isometric = matches!(target, Target::Constant(_));
    let mut record: Option<(f64, Option<MonoidElement>, f64)> = None;
    for t0 in 0..=t0_horizon.unwrap_or(0) {
        let t0e = numeric_t0(n, t0);
        let Ok(b) = n.act(&t0e, x) else { continue };
        for y in numeric_candidates(n, b, eps) {
            let d0 = n.distance(b, y);
            let mut hit = None;
            let mut max_d: f64 = 0.0;
            numeric_times(n, b, y, horizon, |t, tb, ty| {
                let (pb, py) = (Point::Real(tb), Point::Real(ty));
                if let Some(sep) = target.met(system, &pb, &py) {
                    hit = Some((t.clone(), sep));
                    return true;
                }
                let d = n.distance(tb, ty);
                max_d = max_d.max(d);
                if (d - d0).abs() > ISOMETRY_TOLERANCE {
                    isometric = false;
                }
                false
            });
            if let Some((t, sep)) = hit {
                return Local::Found(WitnessRecord {
                    kind: target.hit_kind(),
                    x: Point::Real(x),
                    epsilon: eps,
                    y: Point::Real(y),
                    t0: t0_horizon.map(|_| t0e.clone()),
                    t,
                    separation: sep,
                    seed: None,
                });
            }
            if record.as_ref().map_or(true, |r| max_d > r.2) {
                record = Some((y, t0_horizon.map(|_| t0e.clone()), max_d));
            }
        }
    }
    match record {
        Some((y, t0, sep)) if isometric => Local::Refuted(WitnessRecord {
            kind: WitnessKind::Isometric,
            x: Point::Real(x),
            epsilon: eps,
            y: Point::Real(y),
            t0,
            t: MonoidElement::new(vec![horizon; n.rank()]),
            separation: sep,
            seed: None,
        }),
        _ => Local::Open,
    }
}
