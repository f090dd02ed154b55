use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use semiflow::corpus::{CorpusSpec, Generator};
use semiflow::probe::{self, SampleSpec};
use semiflow::theorems::ClassifyBudget;

#[derive(Parser, Debug)]
#[command(name = "semiflow", version, about = "Classify semiflows, check the chaos equivalences and search for witnesses")]
pub struct Cli {
    /// Worker threads for per-system work (defaults to all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify one system and check the equivalences on its profile.
    Analyze(AnalyzeArgs),
    /// Run the consistency checks across a corpus.
    TheoremCheck(TheoremCheckArgs),
    /// Search for witnesses of one property.
    Witness(WitnessArgs),
    /// Generate a corpus of system spec files.
    Corpus(CorpusArgs),
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// System spec file.
    #[arg(long)]
    pub system: PathBuf,
    /// Where to write the report.
    #[arg(long)]
    pub report: PathBuf,
    /// Let sampled evidence take part in consistency checks.
    #[arg(long)]
    pub allow_evidence: bool,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Args, Debug)]
pub struct TheoremCheckArgs {
    /// Directory of system spec files (as written by `corpus`).
    #[arg(long, conflicts_with = "generator")]
    pub corpus: Option<PathBuf>,
    #[command(flatten)]
    pub gen: GeneratorArgs,
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long)]
    pub allow_evidence: bool,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Property {
    #[value(name = "S")]
    S,
    #[value(name = "ES")]
    Es,
    #[value(name = "GMS")]
    Gms,
    #[value(name = "EQ")]
    Eq,
}

#[derive(Args, Debug)]
pub struct WitnessArgs {
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long, value_enum)]
    pub property: Property,
    /// Sensitivity constant for S and ES, ε for EQ, ball radius for a numeric GMS cover.
    #[arg(long)]
    pub constant: Option<f64>,
    /// JSON cover file for GMS; defaults to letters, singletons or a ball grid.
    #[arg(long)]
    pub cover: Option<PathBuf>,
    /// Also write the document here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Args, Debug)]
pub struct CorpusArgs {
    #[command(flatten)]
    pub gen: GeneratorArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GeneratorKind {
    RandomSft,
    RandomFinite,
    ExhaustiveSft,
    Catalog,
}

#[derive(Args, Debug)]
pub struct GeneratorArgs {
    #[arg(long, value_enum)]
    pub generator: Option<GeneratorKind>,
    /// Vertex counts (random-sft) or point counts (random-finite), cycled.
    #[arg(long, value_delimiter = ',', default_values_t = [4usize])]
    pub sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.5f64])]
    pub edge_probs: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [1usize])]
    pub ranks: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// Vertex count for exhaustive-sft.
    #[arg(long, default_value_t = 3)]
    pub vertices: usize,
    #[arg(long)]
    pub random_metric: bool,
    #[arg(long, default_value_t = 0)]
    pub corpus_seed: u64,
    /// Allow exhaustive enumeration on 4 vertices.
    #[arg(long)]
    pub long_running: bool,
}

impl GeneratorArgs {
    pub fn spec(&self) -> anyhow::Result<Option<CorpusSpec>> {
        let Some(kind) = self.generator else { return Ok(None) };
        let generator = match kind {
            GeneratorKind::RandomSft => {
                Generator::RandomSft { sizes: self.sizes.clone(), edge_probs: self.edge_probs.clone(), count: self.count }
            }
            GeneratorKind::RandomFinite => Generator::RandomFinite {
                sizes: self.sizes.clone(),
                ranks: self.ranks.clone(),
                count: self.count,
                random_metric: self.random_metric,
            },
            GeneratorKind::ExhaustiveSft => {
                if self.vertices > 3 && !self.long_running {
                    anyhow::bail!("exhaustive enumeration above 3 vertices needs --long-running");
                }
                Generator::ExhaustiveSft { vertices: self.vertices }
            }
            GeneratorKind::Catalog => Generator::Catalog,
        };
        Ok(Some(CorpusSpec { generator, seed: self.corpus_seed }))
    }
}

#[derive(Args, Clone, Debug)]
pub struct BudgetArgs {
    /// Sample points per probe.
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    /// ε values tried at each sample, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = probe::dyadic_ladder(1, 10))]
    pub eps_ladder: Vec<f64>,
    /// Time horizon; subshifts default to 8 + |vertices| past the resolution, numeric maps to 64.
    #[arg(long)]
    pub horizon: Option<u64>,
    #[arg(long, default_value_t = 16)]
    pub t0_horizon: u64,
    /// Constants tried when classifying numeric maps.
    #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.125, 0.0625])]
    pub c_ladder: Vec<f64>,
    #[arg(long, default_value_t = probe::DEFAULT_GRID)]
    pub grid: usize,
    #[arg(long, default_value_t = probe::TRANSITIVITY_HORIZON)]
    pub transitivity_horizon: u64,
    #[arg(long, default_value_t = 8)]
    pub period_bound: usize,
    #[arg(long, default_value_t = 1.0 / 16.0)]
    pub dpp_eps: f64,
    #[arg(long, default_value_t = 0.1)]
    pub ueq_eps: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl BudgetArgs {
    pub fn samples(&self) -> SampleSpec {
        SampleSpec { count: self.samples, eps_ladder: self.eps_ladder.clone(), seed: self.seed }
    }

    pub fn classify(&self) -> ClassifyBudget {
        ClassifyBudget {
            samples: self.samples(),
            horizon: self.horizon.unwrap_or(probe::NUMERIC_HORIZON),
            t0_horizon: self.t0_horizon,
            c_ladder: self.c_ladder.clone(),
            grid: self.grid,
            transitivity_horizon: self.transitivity_horizon,
            period_bound: self.period_bound,
            dpp_eps: self.dpp_eps,
            ueq_eps: self.ueq_eps,
        }
    }
}
