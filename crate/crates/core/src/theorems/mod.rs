//! Property profiles and the logical relations between their fields.
//!
//! For transitive systems with dense periodic points, non-minimality,
//! sensitivity and eventual sensitivity coincide, and exactly one of uniform
//! equicontinuity and eventual sensitivity holds. [`check_main_theorem`] and
//! [`check_dichotomy`] test a profile against these relations.

mod gms;
mod orbits;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::probe::{
    self, equicontinuity_verdict, eventual_sensitivity_report, minimality_evidence, periodic_density_evidence, sensitivity_report,
    transitivity_evidence, Budget, Claim, SampleSpec, Verdict,
};
use crate::sft_decide;
use crate::systems::{FiniteSemiflow, NumericCascade, SftSystem, System};

pub use crate::probe::check_compact_equicontinuity;
pub use gms::{assemble as assemble_probe, gms_probe, gms_probe_with, probe_row, ProbeReport, ProbeRow};
pub use orbits::{orbit_of, sensitivity_constant_from_orbits, sensitivity_constant_from_orbits_with, verify_orbit_structure, OrbitConstant, StructureReport};

/// A profile entry: decided exactly, or backed by sampled evidence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Exact(bool),
    Evidence(Verdict),
}

impl Field {
    pub fn value(&self) -> Option<bool> {
        match self {
            Field::Exact(b) => Some(*b),
            Field::Evidence(v) => v.value(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Field::Exact(_))
    }

    /// The value when it may enter a consistency check.
    fn usable(&self, allow_evidence: bool) -> Option<bool> {
        match self {
            Field::Exact(b) => Some(*b),
            Field::Evidence(v) if allow_evidence => v.value(),
            Field::Evidence(_) => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensitivity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eventual_sensitivity: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyProfile {
    pub kind: String,
    /// Which procedure produced the fields.
    pub source: String,
    pub tt: Field,
    pub dpp: Field,
    pub min: Field,
    pub sensitive: Field,
    pub eventually_sensitive: Field,
    pub ueq: Field,
    pub infinite: Field,
    /// `tt ∧ dpp ∧ ¬min`, in three-valued logic.
    pub devaney: Option<bool>,
    pub constants: Constants,
}

fn kleene_and(values: &[Option<bool>]) -> Option<bool> {
    if values.contains(&Some(false)) {
        Some(false)
    } else if values.iter().all(Option::is_some) {
        Some(true)
    } else {
        None
    }
}

impl PropertyProfile {
    fn assemble(kind: &str, source: &str, fields: [Field; 7], constants: Constants) -> Self {
        let [tt, dpp, min, sensitive, eventually_sensitive, ueq, infinite] = fields;
        let devaney = kleene_and(&[tt.value(), dpp.value(), min.value().map(|m| !m)]);
        PropertyProfile { kind: kind.into(), source: source.into(), tt, dpp, min, sensitive, eventually_sensitive, ueq, infinite, devaney, constants }
    }

    pub fn is_exact(&self) -> bool {
        self.fields().iter().all(|(_, f)| f.is_exact())
    }

    pub fn fields(&self) -> [(&'static str, &Field); 7] {
        [
            ("tt", &self.tt),
            ("dpp", &self.dpp),
            ("min", &self.min),
            ("sensitive", &self.sensitive),
            ("eventually_sensitive", &self.eventually_sensitive),
            ("ueq", &self.ueq),
            ("infinite", &self.infinite),
        ]
    }
}

/// Budgets for the evidence fields of numeric profiles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyBudget {
    pub samples: SampleSpec,
    pub horizon: u64,
    pub t0_horizon: u64,
    pub c_ladder: Vec<f64>,
    pub grid: usize,
    pub transitivity_horizon: u64,
    pub period_bound: usize,
    pub dpp_eps: f64,
    pub ueq_eps: f64,
}

impl Default for ClassifyBudget {
    fn default() -> Self {
        ClassifyBudget {
            samples: SampleSpec::default(),
            horizon: probe::NUMERIC_HORIZON,
            t0_horizon: 16,
            c_ladder: vec![0.25, 0.125, 0.0625],
            grid: probe::DEFAULT_GRID,
            transitivity_horizon: probe::TRANSITIVITY_HORIZON,
            period_bound: 8,
            dpp_eps: 1.0 / 16.0,
            ueq_eps: 0.1,
        }
    }
}

pub fn classify(system: &System) -> PropertyProfile {
    classify_with(system, &ClassifyBudget::default())
}

pub fn classify_with(system: &System, budget: &ClassifyBudget) -> PropertyProfile {
    match system {
        System::Sft(s) => classify_sft(s),
        System::Finite(s) => classify_finite(s),
        System::Numeric(n) => classify_numeric(n, system, budget),
    }
}

fn classify_sft(s: &SftSystem) -> PropertyProfile {
    let sens = sft_decide::is_sensitive_exact(s);
    let es = sft_decide::is_eventually_sensitive_exact(s);
    let fields = [
        Field::Exact(sft_decide::is_transitive_exact(s)),
        Field::Exact(sft_decide::has_dense_periodic_points_exact(s)),
        Field::Exact(sft_decide::is_minimal_exact(s)),
        Field::Exact(sens.sensitive),
        Field::Exact(es),
        Field::Exact(sft_decide::is_ueq_exact(s)),
        Field::Exact(sft_decide::is_infinite_exact(s)),
    ];
    let constants = Constants { sensitivity: sens.constant, eventual_sensitivity: es.then_some(1.0) };
    PropertyProfile::assemble("sft", "sft_decide", fields, constants)
}

/// Every point of a finite space is isolated: open sets are arbitrary
/// unions of points, so transitivity asks every orbit to be all of `X`.
fn classify_finite(s: &FiniteSemiflow) -> PropertyProfile {
    let everything = (0..s.len()).all(|x| s.orbit(x).len() == s.len());
    let all_periodic = (0..s.len()).all(|x| s.is_periodic(x).expect("valid point"));
    let fields = [
        Field::Exact(everything),
        Field::Exact(all_periodic),
        Field::Exact(everything),
        Field::Exact(false),
        Field::Exact(false),
        Field::Exact(true),
        Field::Exact(false),
    ];
    PropertyProfile::assemble("finite", "finite_exhaustive", fields, Constants::default())
}

fn classify_numeric(n: &NumericCascade, system: &System, b: &ClassifyBudget) -> PropertyProfile {
    let seed = b.samples.seed;
    let fallback = |claim: Claim| Verdict::inconclusive(claim, Budget::new(&b.samples, b.horizon));
    let tt = transitivity_evidence(n, b.grid, b.transitivity_horizon, seed).unwrap_or_else(|_| fallback(Claim::Transitivity { grid: b.grid }));
    let dpp = periodic_density_evidence(n, b.dpp_eps, b.period_bound).unwrap_or_else(|_| fallback(Claim::PeriodicDensity { eps: b.dpp_eps }));
    let min = minimality_evidence(n, b.grid, b.transitivity_horizon, b.period_bound, seed).unwrap_or_else(|_| fallback(Claim::Minimality { grid: b.grid }));
    let (sens, c_s) = ladder(&b.c_ladder, |c| sensitivity_report(system, c, &b.samples, b.horizon));
    let (es, c_es) = ladder(&b.c_ladder, |c| eventual_sensitivity_report(system, c, &b.samples, b.horizon, b.t0_horizon));
    let ueq = equicontinuity_verdict(system, b.ueq_eps, b.horizon).unwrap_or_else(|_| fallback(Claim::Equicontinuity { eps: b.ueq_eps }));
    let fields = [
        Field::Evidence(tt),
        Field::Evidence(dpp),
        Field::Evidence(min),
        Field::Evidence(sens),
        Field::Evidence(es),
        Field::Evidence(ueq),
        Field::Exact(true),
    ];
    PropertyProfile::assemble(system.kind(), "probe", fields, Constants { sensitivity: c_s, eventual_sensitivity: c_es })
}

/// Tries the constants largest first; the first Holds wins. A refutation only
/// counts at the smallest constant, where it is strongest.
fn ladder(cs: &[f64], mut run: impl FnMut(f64) -> Result<Verdict>) -> (Verdict, Option<f64>) {
    let mut last = None;
    for &c in cs {
        match run(c) {
            Ok(v) if v.holds() => return (v, Some(c)),
            Ok(v) => last = Some(v),
            Err(_) => {}
        }
    }
    let v = last.expect("nonempty constant ladder");
    if v.fails() {
        (v, None)
    } else {
        (Verdict::inconclusive(v.claim, v.budget), None)
    }
}

/// Outcome of checking a profile against one of the theorems.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ConsistencyVerdict {
    Consistent,
    /// The profile violates the relation: either the theorem or one of the
    /// listed deciders is wrong.
    Counterexample { profile: Box<PropertyProfile>, deciders: Vec<String> },
    NotApplicable { reason: String },
}

impl ConsistencyVerdict {
    pub fn is_counterexample(&self) -> bool {
        matches!(self, ConsistencyVerdict::Counterexample { .. })
    }
}

fn need(profile: &PropertyProfile, names: &[&str], allow_evidence: bool) -> std::result::Result<Vec<bool>, ConsistencyVerdict> {
    let fields = profile.fields();
    names
        .iter()
        .map(|name| {
            let (_, f) = fields.iter().find(|(n, _)| n == name).expect("known field");
            f.usable(allow_evidence).ok_or_else(|| ConsistencyVerdict::NotApplicable {
                reason: if f.is_exact() || allow_evidence { format!("`{name}` is inconclusive") } else { format!("`{name}` is not exact") },
            })
        })
        .collect()
}

fn counterexample(profile: &PropertyProfile, names: &[&str]) -> ConsistencyVerdict {
    let deciders = names
        .iter()
        .map(|n| {
            let exact = profile.fields().iter().find(|(m, _)| m == n).map_or(false, |(_, f)| f.is_exact());
            format!("{}::{n} ({})", profile.source, if exact { "exact" } else { "evidence" })
        })
        .collect();
    ConsistencyVerdict::Counterexample { profile: Box::new(profile.clone()), deciders }
}

pub fn check_main_theorem(profile: &PropertyProfile) -> ConsistencyVerdict {
    check_main_theorem_with(profile, false)
}

/// `tt ∧ dpp ∧ ¬min`, `tt ∧ dpp ∧ s` and `tt ∧ dpp ∧ es` must agree.
pub fn check_main_theorem_with(profile: &PropertyProfile, allow_evidence: bool) -> ConsistencyVerdict {
    const NAMES: [&str; 5] = ["tt", "dpp", "min", "sensitive", "eventually_sensitive"];
    let v = match need(profile, &NAMES, allow_evidence) {
        Ok(v) => v,
        Err(na) => return na,
    };
    let base = v[0] && v[1];
    let (a, b, c) = (base && !v[2], base && v[3], base && v[4]);
    if a == b && b == c {
        ConsistencyVerdict::Consistent
    } else {
        counterexample(profile, &NAMES)
    }
}

pub fn check_dichotomy(profile: &PropertyProfile) -> ConsistencyVerdict {
    check_dichotomy_with(profile, false)
}

/// Under `tt ∧ dpp`, exactly one of `ueq` and `es`.
pub fn check_dichotomy_with(profile: &PropertyProfile, allow_evidence: bool) -> ConsistencyVerdict {
    const NAMES: [&str; 4] = ["tt", "dpp", "ueq", "eventually_sensitive"];
    let v = match need(profile, &NAMES, allow_evidence) {
        Ok(v) => v,
        Err(na) => return na,
    };
    if !(v[0] && v[1]) {
        return ConsistencyVerdict::NotApplicable { reason: "hypothesis tt ∧ dpp fails".into() };
    }
    if v[2] != v[3] {
        ConsistencyVerdict::Consistent
    } else {
        counterexample(profile, &NAMES)
    }
}

pub fn is_devaney_chaotic(profile: &PropertyProfile) -> Result<bool> {
    is_devaney_chaotic_with(profile, false)
}

pub fn is_devaney_chaotic_with(profile: &PropertyProfile, allow_evidence: bool) -> Result<bool> {
    match need(profile, &["tt", "dpp", "min"], allow_evidence) {
        Ok(v) => Ok(v[0] && v[1] && !v[2]),
        Err(ConsistencyVerdict::NotApplicable { reason }) => Err(Error::NotApplicable(reason)),
        Err(_) => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sft(n: usize, edges: &[(usize, usize)]) -> System {
        SftSystem::new(n, edges.iter().copied()).unwrap().into()
    }

    fn values(p: &PropertyProfile) -> Vec<Option<bool>> {
        p.fields().iter().map(|(_, f)| f.value()).collect()
    }

    #[test]
    fn sft_profiles() {
        let t = Some(true);
        let f = Some(false);
        let full = classify(&SftSystem::full_shift(2).unwrap().into());
        assert_eq!(values(&full), vec![t, t, f, t, t, f, t]);
        assert_eq!(full.devaney, t);
        assert_eq!(full.constants.sensitivity, Some(1.0));
        let cyc = classify(&SftSystem::cycle(3).unwrap().into());
        assert_eq!(values(&cyc), vec![t, t, t, f, f, t, f]);
        assert_eq!(cyc.devaney, f);
        let ab = classify(&sft(2, &[(0, 1), (1, 1)]));
        assert_eq!(values(&ab), vec![f, f, f, f, f, t, f]);
        assert!(ab.is_exact());
    }

    #[test]
    fn consistency_on_named_systems() {
        let full = classify(&SftSystem::full_shift(2).unwrap().into());
        let cyc = classify(&SftSystem::cycle(3).unwrap().into());
        let ab = classify(&sft(2, &[(0, 1), (1, 1)]));
        for p in [&full, &cyc, &ab] {
            assert_eq!(check_main_theorem(p), ConsistencyVerdict::Consistent);
        }
        assert_eq!(check_dichotomy(&full), ConsistencyVerdict::Consistent);
        assert_eq!(check_dichotomy(&cyc), ConsistencyVerdict::Consistent);
        assert!(matches!(check_dichotomy(&ab), ConsistencyVerdict::NotApplicable { .. }));
        assert!(is_devaney_chaotic(&full).unwrap());
        assert!(!is_devaney_chaotic(&cyc).unwrap());
        assert!(!is_devaney_chaotic(&ab).unwrap());
    }

    #[test]
    fn tampered_profile_is_a_counterexample() {
        let mut p = classify(&SftSystem::full_shift(2).unwrap().into());
        p.sensitive = Field::Exact(false);
        match check_main_theorem(&p) {
            ConsistencyVerdict::Counterexample { deciders, .. } => assert!(deciders.iter().any(|d| d.contains("sensitive"))),
            other => panic!("{other:?}"),
        }
        p.eventually_sensitive = Field::Exact(false);
        assert!(check_dichotomy(&p).is_counterexample());
    }

    #[test]
    fn finite_profiles() {
        let cyc = classify(&FiniteSemiflow::cascade(vec![1, 2, 0]).unwrap().into());
        assert_eq!(cyc.tt, Field::Exact(true));
        assert_eq!(cyc.min, Field::Exact(true));
        assert_eq!(cyc.dpp, Field::Exact(true));
        assert_eq!(check_dichotomy(&cyc), ConsistencyVerdict::Consistent);
        let tail = classify(&FiniteSemiflow::cascade(vec![1, 1]).unwrap().into());
        assert_eq!(tail.dpp, Field::Exact(false));
        assert_eq!(tail.tt, Field::Exact(false));
    }

    #[test]
    fn numeric_profiles_need_opt_in() {
        let b = ClassifyBudget { samples: SampleSpec::with_count(16), transitivity_horizon: 1 << 14, ..Default::default() };
        let d = classify_with(&NumericCascade::doubling().into(), &b);
        assert!(matches!(check_main_theorem(&d), ConsistencyVerdict::NotApplicable { .. }));
        assert_eq!(check_main_theorem_with(&d, true), ConsistencyVerdict::Consistent);
        assert_eq!(check_dichotomy_with(&d, true), ConsistencyVerdict::Consistent);
        assert_eq!(d.devaney, Some(true));
        assert!(is_devaney_chaotic(&d).is_err());
        assert!(is_devaney_chaotic_with(&d, true).unwrap());

        let r = classify_with(&NumericCascade::rotation((5f64.sqrt() - 1.0) / 2.0).unwrap().into(), &b);
        assert_eq!(r.sensitive.value(), Some(false));
        assert_eq!(r.ueq.value(), Some(true));
        assert_eq!(check_main_theorem_with(&r, true), ConsistencyVerdict::Consistent);
    }
}
