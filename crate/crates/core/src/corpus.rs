//! Deterministic generators of test systems and a catalog of named examples.
//!
//! All randomness comes from ChaCha8 seeded with `mix_seed(seed, index)`, so
//! a [`CorpusSpec`] always produces the same systems on every platform.

use std::fs;
use std::path::Path;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::probe::{mix_seed, rng_for};
use crate::systems::{FiniteMetric, FiniteSemiflow, NumericCascade, SftSystem, System, SystemSpec};

/// Attempts before [`random_sft`] gives up on graphs that trim to nothing.
pub const SFT_RETRIES: u64 = 64;
/// Rejection attempts for a commuting second generator.
pub const COMMUTANT_ATTEMPTS: usize = 200;
pub const GENERATOR_VERSION: &str = concat!("semiflow-corpus/", env!("CARGO_PKG_VERSION"));
pub const PRNG: &str = "ChaCha8 (rand_chacha 0.3); system i uses splitmix64(seed ^ (i + 1)·0x9E3779B97F4A7C15)";
pub const MANIFEST: &str = "manifest.json";

pub fn random_sft(vertices: usize, edge_prob: f64, seed: u64) -> Result<SftSystem> {
    if !(1..=16).contains(&vertices) {
        return Err(Error::InvalidParameter(format!("vertices = {vertices} outside 1..=16")));
    }
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::InvalidParameter(format!("edge probability {edge_prob} outside [0, 1]")));
    }
    for attempt in 0..SFT_RETRIES {
        let mut rng = rng_for(seed, attempt);
        let edges: Vec<(usize, usize)> = (0..vertices)
            .flat_map(|a| (0..vertices).map(move |b| (a, b)))
            .filter(|_| rng.gen::<f64>() < edge_prob)
            .collect();
        match SftSystem::new(vertices, edges) {
            Ok(s) => return Ok(s),
            Err(Error::EmptyShift) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::GenerationFailed(format!("{SFT_RETRIES} graphs on {vertices} vertices all trimmed to nothing")))
}

/// Every edge set on `vertices` vertices with a nonempty trim, ordered by
/// the bitmask whose bit `a·vertices + b` encodes the edge `a → b`.
pub fn exhaustive_sft(vertices: usize) -> Result<impl Iterator<Item = SftSystem>> {
    if !(1..=4).contains(&vertices) {
        return Err(Error::InvalidParameter(format!("exhaustive enumeration needs 1..=4 vertices, got {vertices}")));
    }
    let bits = vertices * vertices;
    Ok((0u64..1 << bits).filter_map(move |mask| {
        let edges = (0..bits).filter(|i| mask >> i & 1 == 1).map(|i| (i / vertices, i % vertices));
        SftSystem::new(vertices, edges).ok()
    }))
}

pub fn random_finite(n: usize, k: usize, seed: u64) -> Result<FiniteSemiflow> {
    random_finite_with_metric(n, k, seed, false)
}

/// With `random_metric`, points are distinct cells of a 17×17 grid and
/// distances are ℓ¹ distances scaled by 1/32, which keeps them rational.
pub fn random_finite_with_metric(n: usize, k: usize, seed: u64, random_metric: bool) -> Result<FiniteSemiflow> {
    if !(1..=32).contains(&n) {
        return Err(Error::InvalidParameter(format!("n = {n} outside 1..=32")));
    }
    if !(1..=2).contains(&k) {
        return Err(Error::InvalidParameter(format!("rank {k} must be 1 or 2")));
    }
    let mut rng = rng_for(seed, 0);
    let random_map = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<usize> { (0..n).map(|_| rng.gen_range(0..n)).collect() };
    let f = random_map(&mut rng);
    let mut generators = vec![f.clone()];
    if k == 2 {
        let commutes = |g: &[usize]| (0..n).all(|x| f[g[x]] == g[f[x]]);
        let g = (0..COMMUTANT_ATTEMPTS).map(|_| random_map(&mut rng)).find(|g| commutes(g)).unwrap_or_else(|| {
            let j = rng.gen_range(0..=n);
            let mut g: Vec<usize> = (0..n).collect();
            for _ in 0..j {
                g = g.iter().map(|&x| f[x]).collect();
            }
            g
        });
        generators.push(g);
    }
    let metric = if random_metric {
        let mut cells: Vec<(i64, i64)> = (0..17).flat_map(|a| (0..17).map(move |b| (a, b))).collect();
        cells.shuffle(&mut rng);
        let pts = &cells[..n];
        let d = |i: usize, j: usize| ((pts[i].0 - pts[j].0).abs() + (pts[i].1 - pts[j].1).abs()) as u64;
        FiniteMetric::Matrix((0..n * n).map(|ij| Ratio::new(d(ij / n, ij % n), 32)).collect())
    } else {
        FiniteMetric::Discrete
    };
    FiniteSemiflow::new(n, metric, generators)
}

fn sft(n: usize, edges: &[(usize, usize)]) -> System {
    SftSystem::new(n, edges.iter().copied()).expect("catalog graph").into()
}

/// The classic named examples.
pub fn catalog() -> Vec<(String, System)> {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let out: Vec<(&str, System)> = vec![
        ("full-2-shift", SftSystem::full_shift(2).unwrap().into()),
        ("golden-mean", sft(2, &[(0, 0), (0, 1), (1, 0)])),
        ("cycle-1", SftSystem::cycle(1).unwrap().into()),
        ("cycle-2", SftSystem::cycle(2).unwrap().into()),
        ("cycle-3", SftSystem::cycle(3).unwrap().into()),
        ("two-loops", sft(2, &[(0, 0), (1, 1)])),
        ("a-to-b-loop", sft(2, &[(0, 1), (1, 1)])),
        ("doubling", NumericCascade::doubling().into()),
        ("tent-2", NumericCascade::tent(2.0).unwrap().into()),
        ("logistic-4", NumericCascade::logistic(4.0).unwrap().into()),
        ("rotation-golden", NumericCascade::rotation(golden).unwrap().into()),
        ("rotation-1-3", NumericCascade::rotation(1.0 / 3.0).unwrap().into()),
        ("commuting-mult-2-3", NumericCascade::commuting_mult(2, 3).unwrap().into()),
        ("finite-3-cycle", FiniteSemiflow::cascade(vec![1, 2, 0]).unwrap().into()),
    ];
    out.into_iter().map(|(n, s)| (n.to_string(), s)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case")]
pub enum Generator {
    /// System `i` has `sizes[i % len]` vertices and edge probability
    /// `edge_probs[(i / sizes.len()) % len]`.
    RandomSft { sizes: Vec<usize>, edge_probs: Vec<f64>, count: usize },
    /// System `i` has `sizes[i % len]` points and rank `ranks[(i / sizes.len()) % len]`.
    RandomFinite {
        sizes: Vec<usize>,
        ranks: Vec<usize>,
        count: usize,
        #[serde(default)]
        random_metric: bool,
    },
    ExhaustiveSft { vertices: usize },
    Catalog,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    #[serde(flatten)]
    pub generator: Generator,
    pub seed: u64,
}

fn cycled<T: Copy>(v: &[T], i: usize, field: &str) -> Result<T> {
    if v.is_empty() {
        return Err(Error::InvalidParameter(format!("`{field}` must be nonempty")));
    }
    Ok(v[i % v.len()])
}

impl CorpusSpec {
    /// Systems with stable identifiers, in order.
    pub fn generate(&self) -> Result<Vec<(String, System)>> {
        match &self.generator {
            Generator::RandomSft { sizes, edge_probs, count } => (0..*count)
                .map(|i| {
                    let v = cycled(sizes, i, "sizes")?;
                    let p = cycled(edge_probs, i / sizes.len().max(1), "edge_probs")?;
                    Ok((format!("random-sft-{i:05}"), random_sft(v, p, mix_seed(self.seed, i as u64))?.into()))
                })
                .collect(),
            Generator::RandomFinite { sizes, ranks, count, random_metric } => (0..*count)
                .map(|i| {
                    let n = cycled(sizes, i, "sizes")?;
                    let k = cycled(ranks, i / sizes.len().max(1), "ranks")?;
                    Ok((format!("random-finite-{i:05}"), random_finite_with_metric(n, k, mix_seed(self.seed, i as u64), *random_metric)?.into()))
                })
                .collect(),
            Generator::ExhaustiveSft { vertices } => {
                Ok(exhaustive_sft(*vertices)?.enumerate().map(|(i, s)| (format!("exhaustive-{vertices}-{i:05}"), s.into())).collect())
            }
            Generator::Catalog => Ok(catalog()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub spec: CorpusSpec,
    pub seed: u64,
    pub count: usize,
    pub generator_version: String,
    pub prng: String,
    pub files: Vec<String>,
}

/// Writes one spec document per system plus the manifest. Each file is
/// written to a temporary name and renamed into place.
pub fn write_corpus(spec: &CorpusSpec, dir: &Path) -> Result<Manifest> {
    let systems = spec.generate()?;
    fs::create_dir_all(dir)?;
    let mut files = Vec::with_capacity(systems.len());
    for (id, s) in &systems {
        let name = format!("{id}.json");
        write_atomic(&dir.join(&name), &SystemSpec::from_system(s).to_json())?;
        files.push(name);
    }
    let manifest = Manifest {
        spec: spec.clone(),
        seed: spec.seed,
        count: systems.len(),
        generator_version: GENERATOR_VERSION.into(),
        prng: PRNG.into(),
        files,
    };
    write_atomic(&dir.join(MANIFEST), &serde_json::to_string_pretty(&manifest).expect("manifest serializes"))?;
    Ok(manifest)
}

pub fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, format!("{text}\n"))?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Reads every spec document in `dir` (the manifest excluded), sorted by file name.
pub fn load_corpus(dir: &Path) -> Result<Vec<(String, System)>> {
    let mut names: Vec<String> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".json") && n != MANIFEST)
        .collect();
    names.sort();
    names
        .into_iter()
        .map(|n| {
            let text = fs::read_to_string(dir.join(&n))?;
            let sys = SystemSpec::parse(&text)?.build().map_err(|e| Error::spec(n.clone(), e.to_string()))?;
            Ok((n.trim_end_matches(".json").to_string(), sys))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theorems::classify;

    #[test]
    fn random_sft_examples() {
        assert_eq!(random_sft(4, 0.5, 1).unwrap(), random_sft(4, 0.5, 1).unwrap());
        let one = random_sft(1, 1.0, 99).unwrap();
        assert_eq!(one.edges().iter().copied().collect::<Vec<_>>(), vec![(0, 0)]);
        assert!(matches!(random_sft(6, 0.0, 3), Err(Error::GenerationFailed(_))));
        assert!(random_sft(17, 0.5, 0).is_err());
        assert!(random_sft(3, 1.5, 0).is_err());
    }

    #[test]
    fn exhaustive_counts() {
        assert_eq!(exhaustive_sft(1).unwrap().count(), 1);
        assert_eq!(exhaustive_sft(2).unwrap().count(), 13);
        assert_eq!(exhaustive_sft(3).unwrap().count(), 487);
        assert!(exhaustive_sft(5).is_err());
    }

    #[test]
    fn random_finite_examples() {
        assert_eq!(random_finite(7, 1, 5).unwrap(), random_finite(7, 1, 5).unwrap());
        for seed in 0..50 {
            let f = random_finite(6, 2, seed).unwrap();
            assert_eq!(f.rank(), 2);
        }
        let m = random_finite_with_metric(10, 1, 2, true).unwrap();
        assert!(matches!(m.metric(), FiniteMetric::Matrix(_)));
        // Some seed yields a 3-cycle; its profile is transitive and minimal.
        let cyc = (0..1000).map(|s| random_finite(3, 1, s).unwrap()).find(|f| f.orbit(0).len() == 3 && f.iterate(0, 0, 3) == 0).unwrap();
        let p = classify(&cyc.into());
        assert_eq!([p.tt.value(), p.dpp.value(), p.min.value()], [Some(true); 3]);
    }

    #[test]
    fn catalog_entries() {
        let c = catalog();
        let get = |n: &str| c.iter().find(|(m, _)| m == n).map(|(_, s)| s.clone()).unwrap();
        match get("full-2-shift") {
            System::Sft(s) => assert_eq!((s.alphabet_size(), s.edges().len()), (2, 4)),
            _ => panic!(),
        }
        assert_eq!(get("commuting-mult-2-3").rank(), 2);
        for name in ["golden-mean", "cycle-1", "cycle-2", "cycle-3", "two-loops", "a-to-b-loop", "doubling", "tent-2", "logistic-4", "rotation-golden", "rotation-1-3"] {
            get(name);
        }
    }

    #[test]
    fn corpus_files_are_reproducible() {
        let spec = CorpusSpec { generator: Generator::RandomSft { sizes: vec![3, 5], edge_probs: vec![0.4], count: 6 }, seed: 7 };
        let base = std::env::temp_dir().join(format!("semiflow-corpus-test-{}", std::process::id()));
        let (a, b) = (base.join("a"), base.join("b"));
        let ma = write_corpus(&spec, &a).unwrap();
        write_corpus(&spec, &b).unwrap();
        assert_eq!(ma.count, 6);
        for f in ma.files.iter().chain([&MANIFEST.to_string()]) {
            assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap());
        }
        let loaded = load_corpus(&a).unwrap();
        assert_eq!(loaded.len(), 6);
        assert_eq!(loaded, spec.generate().unwrap());
        fs::remove_dir_all(&base).unwrap();
    }
}
