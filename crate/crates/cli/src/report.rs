//! Report documents. Field names here are frozen; see the README.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use semiflow::probe::Verdict;
use semiflow::systems::SystemSpec;
use semiflow::theorems::{ClassifyBudget, ConsistencyVerdict, PropertyProfile};

#[derive(Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

pub const TOOL: Tool = Tool { name: "semiflow", version: env!("CARGO_PKG_VERSION") };

/// The input system, embedded so that every witness can be rechecked from the report alone.
#[derive(Serialize)]
pub struct Input {
    pub path: String,
    pub sha256: String,
    pub spec: SystemSpec,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Serialize)]
#[serde(rename_all = "snake_case", tag = "result")]
pub enum DevaneyVerdict {
    Decided { value: bool },
    NotApplicable { reason: String },
}

#[derive(Serialize)]
pub struct Verdicts {
    pub main_theorem: ConsistencyVerdict,
    pub dichotomy: ConsistencyVerdict,
    /// `"ueq"` or `"es"` when the dichotomy applies.
    pub dichotomy_branch: Option<&'static str>,
    pub devaney_chaotic: DevaneyVerdict,
}

#[derive(Serialize)]
pub struct AnalyzeReport {
    pub tool: Tool,
    pub command: &'static str,
    pub input: Input,
    pub allow_evidence: bool,
    pub budgets: ClassifyBudget,
    pub profile: PropertyProfile,
    pub verdicts: Verdicts,
    /// Sampled verdicts behind evidence fields, keyed by property.
    pub witnesses: BTreeMap<String, Verdict>,
    pub timings_ms: BTreeMap<&'static str, f64>,
    pub exit_code: u8,
}

#[derive(Serialize)]
pub struct WitnessReport {
    pub tool: Tool,
    pub command: &'static str,
    pub input: Input,
    pub property: crate::args::Property,
    pub verdict: Verdict,
    /// Every witness was rechecked against the embedded spec.
    pub revalidated: bool,
    pub timings_ms: BTreeMap<&'static str, f64>,
    pub exit_code: u8,
}

#[derive(Serialize)]
pub struct OrbitCheck {
    pub distance: f64,
    pub c: f64,
    pub claim: Verdict,
    pub sensitivity_status: semiflow::probe::Status,
    pub passed: bool,
}

#[derive(Serialize)]
pub struct SystemRow {
    pub id: String,
    pub sha256: String,
    pub spec: SystemSpec,
    pub profile: PropertyProfile,
    pub main_theorem: ConsistencyVerdict,
    pub dichotomy: ConsistencyVerdict,
    pub devaney_chaotic: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit_constant: Option<OrbitCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Default, Serialize)]
pub struct Counts {
    pub consistent: usize,
    pub counterexample: usize,
    pub not_applicable: usize,
}

impl Counts {
    pub fn add(&mut self, v: &ConsistencyVerdict) {
        match v {
            ConsistencyVerdict::Consistent => self.consistent += 1,
            ConsistencyVerdict::Counterexample { .. } => self.counterexample += 1,
            ConsistencyVerdict::NotApplicable { .. } => self.not_applicable += 1,
        }
    }
}

#[derive(Default, Serialize)]
pub struct Summary {
    pub systems: usize,
    pub devaney_chaotic: usize,
    pub main_theorem: Counts,
    pub dichotomy: Counts,
    pub orbit_checks: usize,
    pub orbit_checks_passed: usize,
    pub errors: usize,
}

#[derive(Serialize)]
pub struct TheoremReport {
    pub tool: Tool,
    pub command: &'static str,
    /// A corpus directory, or the generator spec used in place of one.
    pub source: serde_json::Value,
    pub allow_evidence: bool,
    pub budgets: ClassifyBudget,
    pub summary: Summary,
    pub systems: Vec<SystemRow>,
    pub timings_ms: BTreeMap<&'static str, f64>,
    pub exit_code: u8,
}

pub fn write<T: Serialize>(path: &Path, doc: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    semiflow::corpus::write_atomic(path, &text)?;
    Ok(())
}
