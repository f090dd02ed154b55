use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context};
use rayon::prelude::*;

use semiflow::corpus::{self, CorpusSpec};
use semiflow::probe::{
    self, equicontinuity_verdict, eventual_sensitivity_report, gms_sensitivity_report, revalidate, sensitivity_report, Cover, CoverSet,
    Status,
};
use semiflow::sft_decide::first_periodic_orbits;
use semiflow::systems::{Point, System, SystemSpec};
use semiflow::theorems::{
    check_dichotomy_with, check_main_theorem_with, classify_with, is_devaney_chaotic_with, sensitivity_constant_from_orbits_with,
    ClassifyBudget, ConsistencyVerdict, Field, PropertyProfile,
};

use crate::args::{AnalyzeArgs, BudgetArgs, CorpusArgs, Property, TheoremCheckArgs, WitnessArgs};
use crate::report::{self, AnalyzeReport, Counts, DevaneyVerdict, Input, OrbitCheck, Summary, SystemRow, TheoremReport, Verdicts, WitnessReport, TOOL};
use crate::Code;

/// Period bound used to look for the two periodic orbits behind the 8c constant.
const ORBIT_PERIOD_BOUND: usize = 8;

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn load(path: &Path) -> anyhow::Result<(Input, System)> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let text = String::from_utf8(bytes.clone()).with_context(|| format!("{} is not UTF-8", path.display()))?;
    let spec = SystemSpec::parse(&text).with_context(|| format!("{}", path.display()))?;
    let system = spec.build().with_context(|| format!("{}", path.display()))?;
    Ok((Input { path: path.display().to_string(), sha256: report::sha256_hex(&bytes), spec }, system))
}

fn branch(p: &PropertyProfile, v: &ConsistencyVerdict) -> Option<&'static str> {
    if *v != ConsistencyVerdict::Consistent {
        return None;
    }
    match (p.ueq.value(), p.eventually_sensitive.value()) {
        (Some(true), _) => Some("ueq"),
        (_, Some(true)) => Some("es"),
        _ => None,
    }
}

pub fn analyze(a: AnalyzeArgs) -> anyhow::Result<Code> {
    let t = Instant::now();
    let (input, system) = load(&a.system)?;
    let t_load = ms(t);
    let budgets = a.budget.classify();
    let t = Instant::now();
    let profile = classify_with(&system, &budgets);
    let t_classify = ms(t);
    let main_theorem = check_main_theorem_with(&profile, a.allow_evidence);
    let dichotomy = check_dichotomy_with(&profile, a.allow_evidence);
    let devaney_chaotic = match is_devaney_chaotic_with(&profile, a.allow_evidence) {
        Ok(value) => DevaneyVerdict::Decided { value },
        Err(e) => DevaneyVerdict::NotApplicable { reason: e.to_string() },
    };
    let code = if main_theorem.is_counterexample() || dichotomy.is_counterexample() { Code::Fails } else { Code::Ok };
    let witnesses = profile
        .fields()
        .into_iter()
        .filter_map(|(name, f)| match f {
            Field::Evidence(v) => Some((name.to_string(), v.clone())),
            Field::Exact(_) => None,
        })
        .collect();
    let doc = AnalyzeReport {
        tool: TOOL,
        command: "analyze",
        input,
        allow_evidence: a.allow_evidence,
        budgets,
        verdicts: Verdicts { dichotomy_branch: branch(&profile, &dichotomy), main_theorem, dichotomy, devaney_chaotic },
        profile,
        witnesses,
        timings_ms: BTreeMap::from([("load", t_load), ("classify", t_classify)]),
        exit_code: code as u8,
    };
    report::write(&a.report, &doc)?;
    println!(
        "{}: devaney {}, main theorem {}, dichotomy {}",
        doc.input.path,
        serde_json::to_string(&doc.verdicts.devaney_chaotic)?,
        verdict_name(&doc.verdicts.main_theorem),
        verdict_name(&doc.verdicts.dichotomy)
    );
    Ok(code)
}

fn verdict_name(v: &ConsistencyVerdict) -> &'static str {
    match v {
        ConsistencyVerdict::Consistent => "consistent",
        ConsistencyVerdict::Counterexample { .. } => "COUNTEREXAMPLE",
        ConsistencyVerdict::NotApplicable { .. } => "not applicable",
    }
}

/// Loads every spec file of a corpus directory, in name order.
fn load_dir(dir: &Path) -> anyhow::Result<Vec<(String, Input, System)>> {
    if !dir.is_dir() {
        bail!("corpus directory {} does not exist", dir.display());
    }
    let mut names: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".json") && n != corpus::MANIFEST)
        .collect();
    names.sort();
    names
        .into_iter()
        .map(|n| {
            let (input, system) = load(&dir.join(&n))?;
            Ok((n.trim_end_matches(".json").to_string(), input, system))
        })
        .collect()
}

fn from_spec(spec: &CorpusSpec) -> anyhow::Result<Vec<(String, Input, System)>> {
    Ok(spec
        .generate()?
        .into_iter()
        .map(|(id, system)| {
            let spec = SystemSpec::from_system(&system);
            let sha256 = report::sha256_hex(spec.to_json().as_bytes());
            (id.clone(), Input { path: id, sha256, spec }, system)
        })
        .collect())
}

fn check_one(id: String, input: Input, system: &System, budgets: &ClassifyBudget, allow_evidence: bool, seed: u64) -> SystemRow {
    let profile = classify_with(system, budgets);
    let main_theorem = check_main_theorem_with(&profile, allow_evidence);
    let dichotomy = check_dichotomy_with(&profile, allow_evidence);
    let devaney_chaotic = is_devaney_chaotic_with(&profile, allow_evidence).ok();
    let mut error = None;
    let orbit_constant = match system {
        System::Sft(s) if devaney_chaotic == Some(true) => {
            let qs = first_periodic_orbits(s, ORBIT_PERIOD_BOUND, 2);
            if qs.len() < 2 {
                None
            } else {
                let (q1, q2) = (Point::Sft(qs[0].clone()), Point::Sft(qs[1].clone()));
                match sensitivity_constant_from_orbits_with(system, &q1, &q2, seed) {
                    Ok(r) => Some(OrbitCheck {
                        distance: r.distance,
                        c: r.c,
                        passed: r.passed(),
                        sensitivity_status: r.sensitivity.status,
                        claim: r.claim_check,
                    }),
                    Err(e) => {
                        error = Some(e.to_string());
                        None
                    }
                }
            }
        }
        _ => None,
    };
    SystemRow { id, sha256: input.sha256, spec: input.spec, profile, main_theorem, dichotomy, devaney_chaotic, orbit_constant, error }
}

pub fn theorem_check(a: TheoremCheckArgs) -> anyhow::Result<Code> {
    let t = Instant::now();
    let (source, systems) = match (&a.corpus, a.gen.spec()?) {
        (Some(dir), _) => (serde_json::json!({ "corpus": dir.display().to_string() }), load_dir(dir)?),
        (None, Some(spec)) => (serde_json::json!({ "generator": spec }), from_spec(&spec)?),
        (None, None) => bail!("give --corpus DIR or --generator"),
    };
    if systems.is_empty() {
        bail!("corpus is empty");
    }
    let t_load = ms(t);
    let budgets = a.budget.classify();
    let t = Instant::now();
    let rows: Vec<SystemRow> = systems
        .into_par_iter()
        .enumerate()
        .map(|(i, (id, input, system))| check_one(id, input, &system, &budgets, a.allow_evidence, probe::mix_seed(a.budget.seed, i as u64)))
        .collect();
    let t_check = ms(t);

    let mut summary = Summary { systems: rows.len(), ..Default::default() };
    let (mut main, mut dich) = (Counts::default(), Counts::default());
    for r in &rows {
        main.add(&r.main_theorem);
        dich.add(&r.dichotomy);
        summary.devaney_chaotic += (r.devaney_chaotic == Some(true)) as usize;
        if let Some(o) = &r.orbit_constant {
            summary.orbit_checks += 1;
            summary.orbit_checks_passed += o.passed as usize;
        }
        summary.errors += r.error.is_some() as usize;
    }
    summary.main_theorem = main;
    summary.dichotomy = dich;
    let failed = summary.main_theorem.counterexample > 0
        || summary.dichotomy.counterexample > 0
        || summary.orbit_checks_passed < summary.orbit_checks
        || summary.errors > 0;
    let code = if failed { Code::Fails } else { Code::Ok };
    println!(
        "{} systems: main theorem {} consistent / {} counterexamples / {} n.a.; dichotomy {} / {} / {}; orbit constant {}/{}",
        summary.systems,
        summary.main_theorem.consistent,
        summary.main_theorem.counterexample,
        summary.main_theorem.not_applicable,
        summary.dichotomy.consistent,
        summary.dichotomy.counterexample,
        summary.dichotomy.not_applicable,
        summary.orbit_checks_passed,
        summary.orbit_checks
    );
    let doc = TheoremReport {
        tool: TOOL,
        command: "theorem-check",
        source,
        allow_evidence: a.allow_evidence,
        budgets,
        summary,
        systems: rows,
        timings_ms: BTreeMap::from([("load", t_load), ("check", t_check)]),
        exit_code: code as u8,
    };
    report::write(&a.report, &doc)?;
    Ok(code)
}

fn horizon(system: &System, b: &BudgetArgs) -> u64 {
    b.horizon.unwrap_or(match system {
        System::Sft(s) => probe::sft_horizon(s.alphabet_size()),
        _ => probe::NUMERIC_HORIZON,
    })
}

fn default_cover(system: &System, radius: Option<f64>) -> anyhow::Result<Cover> {
    Ok(match system {
        System::Sft(s) => Cover::letters(s),
        System::Finite(f) => {
            let r = f.min_positive_distance().map_or(1.0, |d| d.to_f64());
            Cover::singletons(f.len(), r)
        }
        System::Numeric(_) => {
            let r = radius.context("a numeric GMS cover needs --constant (ball radius) or --cover")?;
            if !(r > 0.0 && r <= 1.0) {
                bail!("ball radius must lie in (0, 1], got {r}");
            }
            let m = (1.0 / r).ceil() as usize;
            Cover { sets: (0..=m).map(|i| CoverSet::Ball { center: Point::Real((i as f64 * r).min(1.0)), radius: r }).collect() }
        }
    })
}

pub fn witness(a: WitnessArgs) -> anyhow::Result<Code> {
    let (input, system) = load(&a.system)?;
    let samples = a.budget.samples();
    let h = horizon(&system, &a.budget);
    let constant = || -> anyhow::Result<f64> {
        match a.constant {
            Some(c) if c > 0.0 && c.is_finite() => Ok(c),
            Some(c) => bail!("--constant must be positive, got {c}"),
            None => bail!("{:?} needs --constant", a.property),
        }
    };
    let t = Instant::now();
    let verdict = match a.property {
        Property::S => sensitivity_report(&system, constant()?, &samples, h)?,
        Property::Es => eventual_sensitivity_report(&system, constant()?, &samples, h, a.budget.t0_horizon)?,
        Property::Eq => equicontinuity_verdict(&system, constant()?, h)?,
        Property::Gms => {
            let cover = match &a.cover {
                Some(p) => {
                    let text = std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
                    serde_json::from_str(&text).with_context(|| format!("{}", p.display()))?
                }
                None => default_cover(&system, a.constant)?,
            };
            gms_sensitivity_report(&system, &cover, &samples, h)?
        }
    };
    let t_search = ms(t);
    let t = Instant::now();
    // Recheck from the embedded spec, as a reader of the report would.
    let rebuilt = input.spec.build()?;
    revalidate(&rebuilt, &verdict).context("internal error: a witness failed revalidation")?;
    let t_validate = ms(t);
    let code = match verdict.status {
        Status::Holds => Code::Ok,
        Status::Fails => Code::Fails,
        Status::Inconclusive => Code::Inconclusive,
    };
    let doc = WitnessReport {
        tool: TOOL,
        command: "witness",
        input,
        property: a.property,
        verdict,
        revalidated: true,
        timings_ms: BTreeMap::from([("search", t_search), ("revalidate", t_validate)]),
        exit_code: code as u8,
    };
    let text = serde_json::to_string_pretty(&doc)?;
    println!("{text}");
    if let Some(path) = &a.report {
        report::write(path, &doc)?;
    }
    Ok(code)
}

pub fn corpus(a: CorpusArgs) -> anyhow::Result<Code> {
    let spec = a.gen.spec()?.context("give --generator")?;
    let manifest = corpus::write_corpus(&spec, &a.out)?;
    println!("wrote {} systems to {}", manifest.count, a.out.display());
    Ok(Code::Ok)
}
