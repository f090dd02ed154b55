//! Acceptance run: one PASS/FAIL line per criterion; exits non-zero on any FAIL.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use semiflow::corpus::{exhaustive_sft, CorpusSpec, Generator};
use semiflow::monoid::FiniteSubset;
use semiflow::probe::{self, periodic_density_evidence, revalidate, sensitivity_report, Claim, SampleSpec, Status};
use semiflow::sft_decide::{self, brute_force_profile, first_periodic_orbits};
use semiflow::systems::{NumericCascade, Point, SftSystem, System, SystemSpec};
use semiflow::theorems::{
    self, check_compact_equicontinuity, check_dichotomy, check_main_theorem, classify, gms_probe, sensitivity_constant_from_orbits_with,
    verify_orbit_structure, ConsistencyVerdict,
};

// Pinned budgets and tolerances.
const BASE_SEED: u64 = 20_240_601;
const ORACLE_DEPTH: usize = 12;
const ORACLE_PERIODS: usize = 12;
const ORACLE_RANDOM: usize = 1000;
const ORACLE_LIMIT: Duration = Duration::from_secs(60);
const FUZZ_COUNT: usize = 10_000;
const FUZZ_LIMIT: Duration = Duration::from_secs(300);
const ORBIT_PERIOD: usize = 8;
const FINITE_COUNT: usize = 1000;
const ISOMETRY_PAIRS: usize = 10_000;
const ISOMETRY_TIMES: u64 = 1000;
const ISOMETRY_TOL: f64 = 1e-12;
const DOUBLING_C: f64 = 0.25;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn sft_fuzz_corpus() -> Vec<(String, SftSystem)> {
    let spec = CorpusSpec {
        generator: Generator::RandomSft { sizes: (1..=8).collect(), edge_probs: vec![0.2, 0.3, 0.45, 0.6], count: FUZZ_COUNT },
        seed: BASE_SEED,
    };
    spec.generate()
        .expect("fuzz corpus generates")
        .into_iter()
        .map(|(id, s)| match s {
            System::Sft(s) => (id, s),
            _ => unreachable!(),
        })
        .collect()
}

fn dump(s: &SftSystem) -> String {
    serde_json::to_string(&SystemSpec::from_system(&System::Sft(s.clone()))).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut corpus: Vec<SftSystem> = (1..=3).flat_map(|v| exhaustive_sft(v).unwrap()).collect();
    let exhaustive = corpus.len();
    let random = CorpusSpec {
        generator: Generator::RandomSft { sizes: (1..=6).collect(), edge_probs: vec![0.2, 0.35, 0.5, 0.7], count: ORACLE_RANDOM },
        seed: BASE_SEED ^ 1,
    };
    corpus.extend(random.generate().unwrap().into_iter().map(|(_, s)| match s {
        System::Sft(s) => s,
        _ => unreachable!(),
    }));
    let disagreements: Vec<String> = corpus
        .par_iter()
        .filter_map(|s| {
            let b = brute_force_profile(s, ORACLE_DEPTH, ORACLE_PERIODS).expect("oracle runs");
            let exact = [
                sft_decide::is_transitive_exact(s),
                sft_decide::has_dense_periodic_points_exact(s),
                sft_decide::is_minimal_exact(s),
                sft_decide::is_sensitive_exact(s).sensitive,
                sft_decide::is_infinite_exact(s),
            ];
            let oracle = [b.tt, b.dpp, b.min, b.sensitive, b.infinite];
            (exact.iter().zip(&oracle).any(|(e, o)| Some(*e) != *o)).then(|| format!("{} exact={exact:?} oracle={oracle:?}", dump(s)))
        })
        .collect();
    let elapsed = start.elapsed();
    for d in disagreements.iter().take(5) {
        eprintln!("  disagreement: {d}");
    }
    outcome(
        disagreements.is_empty() && elapsed < ORACLE_LIMIT,
        format!(
            "{} systems ({exhaustive} exhaustive, {ORACLE_RANDOM} random), {} disagreements, {:.1}s (limit {}s)",
            corpus.len(),
            disagreements.len(),
            elapsed.as_secs_f64(),
            ORACLE_LIMIT.as_secs()
        ),
    )
}

fn criteria_2_3(corpus: &[(String, SftSystem)]) -> (Outcome, Outcome) {
    let start = Instant::now();
    let results: Vec<(ConsistencyVerdict, ConsistencyVerdict)> = corpus
        .par_iter()
        .map(|(_, s)| {
            let p = classify(&System::Sft(s.clone()));
            (check_main_theorem(&p), check_dichotomy(&p))
        })
        .collect();
    let elapsed = start.elapsed();
    let mut main_bad = 0;
    let mut dich_bad = 0;
    let mut hypothesis = 0;
    for ((id, s), (m, d)) in corpus.iter().zip(&results) {
        if *m != ConsistencyVerdict::Consistent {
            main_bad += 1;
            eprintln!("  main theorem {id}: {m:?} {}", dump(s));
        }
        match d {
            ConsistencyVerdict::Consistent => hypothesis += 1,
            ConsistencyVerdict::NotApplicable { .. } if !(sft_decide::is_transitive_exact(s) && sft_decide::has_dense_periodic_points_exact(s)) => {}
            other => {
                dich_bad += 1;
                eprintln!("  dichotomy {id}: {other:?} {}", dump(s));
            }
        }
    }
    (
        outcome(
            main_bad == 0 && elapsed < FUZZ_LIMIT,
            format!("{} systems, {main_bad} non-consistent verdicts, {:.1}s (limit {}s)", corpus.len(), elapsed.as_secs_f64(), FUZZ_LIMIT.as_secs()),
        ),
        outcome(dich_bad == 0, format!("{hypothesis} systems with tt ∧ dpp, {dich_bad} violations")),
    )
}

fn criterion_4(corpus: &[(String, SftSystem)]) -> Outcome {
    let checked: Vec<Result<(), String>> = corpus
        .par_iter()
        .enumerate()
        .filter_map(|(i, (id, s))| {
            let sys = System::Sft(s.clone());
            let p = classify(&sys);
            if p.devaney != Some(true) {
                return None;
            }
            let qs = first_periodic_orbits(s, ORBIT_PERIOD, 2);
            if qs.len() < 2 {
                return None;
            }
            let (q1, q2) = (Point::Sft(qs[0].clone()), Point::Sft(qs[1].clone()));
            let r = sensitivity_constant_from_orbits_with(&sys, &q1, &q2, probe::mix_seed(BASE_SEED, i as u64));
            Some(match r {
                Ok(r) => {
                    let samples_ok = r.claim_check.witnesses.len() >= 100;
                    let valid = revalidate(&sys, &r.claim_check).and_then(|_| revalidate(&sys, &r.sensitivity));
                    if r.claim_check.holds() && r.sensitivity.holds() && samples_ok && valid.is_ok() {
                        Ok(())
                    } else {
                        Err(format!("{id}: claim {:?}, sensitivity {:?}, revalidation {valid:?} {}", r.claim_check.status, r.sensitivity.status, dump(s)))
                    }
                }
                Err(e) => Err(format!("{id}: {e} {}", dump(s))),
            })
        })
        .collect();
    let failures: Vec<&String> = checked.iter().filter_map(|r| r.as_ref().err()).collect();
    for f in failures.iter().take(5) {
        eprintln!("  {f}");
    }
    outcome(
        !checked.is_empty() && failures.is_empty(),
        format!("{} devaney-chaotic systems with two periodic orbits, {} failures", checked.len(), failures.len()),
    )
}

fn criterion_5() -> Outcome {
    let spec = CorpusSpec {
        generator: Generator::RandomFinite { sizes: (1..=12).collect(), ranks: vec![1, 2], count: FINITE_COUNT, random_metric: false },
        seed: BASE_SEED ^ 5,
    };
    let corpus = spec.generate().unwrap();
    let per_system: Vec<(usize, usize, Vec<String>)> = corpus
        .par_iter()
        .map(|(id, sys)| {
            let System::Finite(f) = sys else { unreachable!() };
            let (mut points, mut whole, mut bad) = (0, 0, Vec::new());
            for x in (0..f.len()).filter(|&x| f.is_periodic(x).unwrap()) {
                points += 1;
                match verify_orbit_structure(sys, &Point::Finite(x)) {
                    Ok(r) => {
                        let single = r.orbit.len() == f.len();
                        whole += single as usize;
                        let ad = r.orbit_equality && r.equal_or_disjoint && r.fixers_constant && r.compact_orbit;
                        let e_ok = if single { r.minimal_equicontinuous == Some(true) } else { r.minimal_equicontinuous.is_none() };
                        if !(ad && e_ok) {
                            bad.push(format!("{id} x={x}: {r:?}"));
                        }
                    }
                    Err(e) => bad.push(format!("{id} x={x}: {e}")),
                }
            }
            (points, whole, bad)
        })
        .collect();
    let points: usize = per_system.iter().map(|r| r.0).sum();
    let whole: usize = per_system.iter().map(|r| r.1).sum();
    let bad: Vec<&String> = per_system.iter().flat_map(|r| &r.2).collect();
    for b in bad.iter().take(5) {
        eprintln!("  {b}");
    }
    outcome(
        bad.is_empty(),
        format!("{FINITE_COUNT} systems, {points} periodic points checked for (a)-(d), {whole} single-orbit checks for (e), {} failures", bad.len()),
    )
}

fn criterion_6() -> Outcome {
    let s = System::Sft(SftSystem::full_shift(2).unwrap());
    let mut passes = 0;
    for k in 1..=6 {
        let eps = 2f64.powi(-k);
        for m in 1..=6u64 {
            let v = check_compact_equicontinuity(&s, &FiniteSubset::range(m), eps, &SampleSpec::default()).unwrap();
            let Claim::CompactEquicontinuity { delta, .. } = v.claim else { unreachable!() };
            let ok = v.status == Status::Holds && v.exact && delta == eps * 2f64.powi(-(m as i32)) && revalidate(&s, &v).is_ok();
            if ok {
                passes += 1;
            } else {
                eprintln!("  eps=2^-{k} m={m}: {:?} delta={delta}", v.status);
            }
        }
    }
    outcome(passes == 36, format!("{passes}/36 exact passes"))
}

fn criterion_7() -> Outcome {
    let doubling = System::Numeric(NumericCascade::doubling());
    let v = sensitivity_report(&doubling, DOUBLING_C, &SampleSpec::with_count(64), 64).unwrap();
    let grid: Vec<Point> = probe::sample_points(&doubling, &SampleSpec::with_count(64));
    let covered = grid.iter().filter(|x| v.witnesses.iter().any(|w| w.x == **x)).count();
    let sens_ok = v.holds() && covered == 64 && revalidate(&doubling, &v).is_ok();

    let rot = NumericCascade::rotation((5f64.sqrt() - 1.0) / 2.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(BASE_SEED ^ 7);
    let mut worst: f64 = 0.0;
    for _ in 0..ISOMETRY_PAIRS {
        let (mut x, mut y) = (rng.gen::<f64>(), rng.gen::<f64>());
        let d0 = rot.distance(x, y);
        for _ in 0..ISOMETRY_TIMES {
            x = rot.step(0, x);
            y = rot.step(0, y);
            worst = worst.max((rot.distance(x, y) - d0).abs());
        }
    }
    let iso_ok = worst <= ISOMETRY_TOL;

    let dpp = periodic_density_evidence(&NumericCascade::doubling(), 1.0 / 16.0, 8).unwrap();
    let dpp_ok = dpp.holds() && revalidate(&doubling, &dpp).is_ok();
    outcome(
        sens_ok && iso_ok && dpp_ok,
        format!(
            "doubling S at c=1/4: {:?}, {covered}/64 grid points witnessed; rotation max |Δd| = {worst:.2e} over {ISOMETRY_PAIRS} pairs, t ≤ {ISOMETRY_TIMES}; doubling periodic density: {:?} ({} balls)",
            v.status,
            dpp.status,
            dpp.witnesses.len()
        ),
    )
}

fn criterion_8(fuzz: &[(String, SftSystem)]) -> Outcome {
    let mut corpus: Vec<(String, SftSystem)> =
        (1..=3).flat_map(|v| exhaustive_sft(v).unwrap().enumerate().map(move |(i, s)| (format!("exhaustive-{v}-{i:05}"), s))).collect();
    corpus.extend(fuzz.iter().take(ORACLE_RANDOM).cloned());
    let rows: Vec<_> = corpus
        .par_chunks(64)
        .map(|chunk| gms_probe(chunk).expect("probe runs").rows)
        .flatten()
        .collect();
    let report = theorems::assemble_probe(rows);
    let table = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("gms_probe.tsv");
    let _ = std::fs::write(&table, report.table());
    for c in &report.candidates {
        eprintln!("  candidate for manual review: {c}");
    }
    let note = if report.fails == 0 && report.inconclusive == 0 {
        "every devaney-chaotic system holds".to_string()
    } else {
        format!("OBSERVATION: {} fails, {} inconclusive (not a build failure)", report.fails, report.inconclusive)
    };
    outcome(
        true,
        format!("{} systems, {} devaney-chaotic, {} gms holds; {note}; table at {}", report.rows.len(), report.devaney, report.holds, table.display()),
    )
}

fn main() {
    let t = Instant::now();
    let fuzz = sft_fuzz_corpus();
    let (c2, c3) = criteria_2_3(&fuzz);
    let results = [
        ("decider-oracle agreement", criterion_1()),
        ("main equivalence fuzz", c2),
        ("dichotomy fuzz", c3),
        ("proof constant 8c/4c", criterion_4(&fuzz)),
        ("periodic orbit structure", criterion_5()),
        ("compact-set equicontinuity", criterion_6()),
        ("numeric demonstrations", criterion_7()),
        ("gms probe", criterion_8(&fuzz)),
    ];
    let mut failed = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        println!("criterion {} ({name}): {} - {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += !o.pass as usize;
    }
    println!("acceptance: {}/{} passed in {:.1}s", results.len() - failed, results.len(), t.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
