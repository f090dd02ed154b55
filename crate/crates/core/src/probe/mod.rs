//! Property checkers that return [`Verdict`]s carrying re-checkable witnesses.
//!
//! Finite systems and subshifts are searched exactly; numeric maps get
//! sampled, horizon-bounded evidence. Every Holds or Fails verdict carries at
//! least one [`WitnessRecord`], and [`revalidate`] re-derives each of them from
//! the system alone.

mod cover;
mod equicontinuity;
mod numeric;
mod search;
mod validate;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::monoid::{FiniteSubset, MonoidElement};
use crate::systems::{Point, System};

pub use cover::{Cover, CoverSet};
pub use equicontinuity::{check_compact_equicontinuity, equicontinuity_report, equicontinuity_verdict, EquicontinuityMode, EquicontinuityOutcome};
pub use numeric::{minimality_evidence, periodic_density_evidence, transitivity_evidence, DyadicSeed};
pub use search::{eventual_sensitivity_report, gms_sensitivity_report, sensitivity_report};
pub use validate::revalidate;

/// Comparison tolerance for numeric verdicts.
pub const VERDICT_TOLERANCE: f64 = 1e-9;
/// Tolerance for the isometry signature of numeric maps.
pub const ISOMETRY_TOLERANCE: f64 = 1e-12;
/// Default horizon for numeric maps.
pub const NUMERIC_HORIZON: u64 = 64;
/// Default number of orbit bins for transitivity evidence.
pub const DEFAULT_GRID: usize = 64;
/// Default horizon for transitivity evidence.
pub const TRANSITIVITY_HORIZON: u64 = 1 << 16;

/// Default subshift horizon: `8 + |vertices|`.
pub fn sft_horizon(vertices: usize) -> u64 {
    8 + vertices as u64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Fails,
    Inconclusive,
}

/// The statement a verdict is about; witnesses are checked against it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "property", rename_all = "snake_case")]
pub enum Claim {
    Sensitivity { c: f64 },
    EventualSensitivity { c: f64 },
    Gms { cover: Cover },
    Equicontinuity { eps: f64 },
    CompactEquicontinuity { compact: FiniteSubset, eps: f64, delta: f64 },
    Transitivity { grid: usize },
    PeriodicDensity { eps: f64 },
    Minimality { grid: usize },
    OrbitSeparation { q1: Point, q2: Point, bound: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// `d(b, y) < ε` and `d(t·b, t·y) = separation`, where `b = t₀·x` (or `x`).
    Separation,
    /// Every point within `ε` of `b` shares its forward orbit.
    Isolation,
    /// All `y` within `ε` of `b` and all times in the eventual-periodicity box
    /// were searched; the largest separation found is recorded.
    Exhaustive,
    /// `d(s·b, s·y)` stayed within the isometry tolerance of `d(b, y)` for all
    /// `s ≤ t`; the largest value is recorded.
    Isometric,
    /// No cover member contains both `t·b` and `t·y`.
    CoverSeparation,
    /// `|tx − x| = separation`, with `x` within `ε` of the ball centre `y`.
    PeriodicRoot,
    /// A scan for roots of `f^n(x) = x`, `n ≤ t`, found none; the smallest
    /// residual seen is recorded at `x`.
    NoRoot,
    /// The orbit of `x` visits every bin of width `ε` by time `t`.
    DenseOrbit,
    /// The orbit of `x` returns to within `separation` of `t₀·x` at time `t`
    /// before visiting every bin.
    PeriodicReturn,
    /// `y` is the nearest point of the farther orbit and `separation = d(x, y)`.
    OrbitDistance,
    /// `d(x, y) < ε` and every recorded time keeps the pair within the claim.
    Stable,
    /// `d(x, y) < ε` and `d(t·x, t·y) = separation` reaches the claim bound.
    Violation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub kind: WitnessKind,
    pub x: Point,
    pub epsilon: f64,
    pub y: Point,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<MonoidElement>,
    pub t: MonoidElement,
    pub separation: f64,
    /// Exact starting point for orbits evaluated in dyadic arithmetic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<DyadicSeed>,
}

/// Sampling and search limits actually used for a verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub samples: usize,
    pub eps_ladder: Vec<f64>,
    pub horizon: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0_horizon: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period_bound: Option<usize>,
    pub seed: u64,
    pub tolerance: f64,
    pub isometry_tolerance: f64,
}

impl Budget {
    pub(crate) fn new(samples: &SampleSpec, horizon: u64) -> Self {
        Budget {
            samples: samples.count,
            eps_ladder: samples.eps_ladder.clone(),
            horizon,
            t0_horizon: None,
            grid: None,
            period_bound: None,
            seed: samples.seed,
            tolerance: VERDICT_TOLERANCE,
            isometry_tolerance: ISOMETRY_TOLERANCE,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub claim: Claim,
    pub status: Status,
    /// True for exact refutations on finite systems and exact subshift
    /// searches; false marks sampled evidence, which is not a proof.
    pub exact: bool,
    pub witnesses: Vec<WitnessRecord>,
    pub budget: Budget,
}

impl Verdict {
    pub(crate) fn inconclusive(claim: Claim, budget: Budget) -> Self {
        Verdict { claim, status: Status::Inconclusive, exact: false, witnesses: Vec::new(), budget }
    }

    pub fn holds(&self) -> bool {
        self.status == Status::Holds
    }

    pub fn fails(&self) -> bool {
        self.status == Status::Fails
    }

    /// `Some(true)` for Holds, `Some(false)` for Fails.
    pub fn value(&self) -> Option<bool> {
        match self.status {
            Status::Holds => Some(true),
            Status::Fails => Some(false),
            Status::Inconclusive => None,
        }
    }
}

/// Which points to probe and at which scales.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub count: usize,
    pub eps_ladder: Vec<f64>,
    pub seed: u64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec { count: 64, eps_ladder: dyadic_ladder(1, 10), seed: 0 }
    }
}

impl SampleSpec {
    pub fn with_count(count: usize) -> Self {
        SampleSpec { count, ..Default::default() }
    }
}

/// `[2^-lo, …, 2^-hi]`.
pub fn dyadic_ladder(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|k| 2f64.powi(-k)).collect()
}

/// SplitMix64 finaliser, used to derive independent sub-seeds.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix_seed(seed, index))
}

/// The sampled points: every point of a small finite system; seeded random
/// walks on a subshift; a midpoint grid on numeric phase spaces.
pub fn sample_points(system: &System, spec: &SampleSpec) -> Vec<Point> {
    use rand::seq::SliceRandom;
    use rand::Rng;
    match system {
        System::Finite(s) => {
            let mut all: Vec<usize> = (0..s.len()).collect();
            if all.len() > spec.count {
                all.shuffle(&mut rng_for(spec.seed, 0));
                all.truncate(spec.count);
                all.sort_unstable();
            }
            all.into_iter().map(Point::Finite).collect()
        }
        System::Sft(s) => {
            let verts = s.trimmed_vertices();
            let mut rng = rng_for(spec.seed, 0);
            (0..spec.count)
                .map(|_| {
                    let start = verts[rng.gen_range(0..verts.len())];
                    let prefix = rng.gen_range(0..8);
                    Point::Sft(s.random_point(&mut rng, start, prefix))
                })
                .collect()
        }
        System::Numeric(_) => (0..spec.count).map(|j| Point::Real((j as f64 + 0.5) / spec.count as f64)).collect(),
    }
}
