use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use epiq_core::qubit::ChshMode;

#[derive(Debug, Parser)]
#[command(name = "epiq", version, about = "Finite epistemic experiment models: validation, Hilbert space, Born rule, simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the model assumptions.
    Validate(ModelOnly),
    /// Build the Hilbert space and the representation W.
    Build(ModelOnly),
    /// State vectors |a,k> and observables T^a.
    States(ModelOnly),
    /// Transition probabilities |<a,k|b,i>|^2.
    Born(BornArgs),
    /// Monte Carlo run of a measurement sequence.
    Simulate(SimulateArgs),
    /// Recover random states from effect probabilities.
    GleasonCheck(GleasonArgs),
    /// CHSH correlations for the singlet or the classical sign model.
    Bell(BellArgs),
    /// Orbit reduction of one experiment.
    Reduce(ReduceArgs),
    /// Coherent states generated from one state vector.
    Gcs(GcsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ModelSource {
    /// Bundled model name (spin3, triangle6) or path to a model file.
    pub name: Option<String>,
    /// Path to a model file.
    #[arg(long, conflicts_with = "name")]
    pub model: Option<PathBuf>,
    /// Structural tolerance for representation checks.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ModelOnly {
    #[command(flatten)]
    pub source: ModelSource,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct BornArgs {
    #[command(flatten)]
    pub source: ModelSource,
    /// Experiment of the prepared state; all pairs when omitted.
    #[arg(long, requires = "to")]
    pub from: Option<String>,
    #[arg(long, requires = "from")]
    pub to: Option<String>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub source: ModelSource,
    /// Experiment the prior refers to; defaults to the reference experiment.
    #[arg(long)]
    pub from: Option<String>,
    /// Experiments measured in order, comma separated; defaults to `--from`.
    #[arg(long, value_delimiter = ',')]
    pub to: Vec<String>,
    /// Prior weights over the values of `--from`; uniform when omitted.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub prior: Vec<f64>,
    /// Readout error: the true value is reported with probability 1 - noise.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 10_000)]
    pub runs: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct GleasonArgs {
    #[command(flatten)]
    pub source: ModelSource,
    /// Number of random density matrices.
    #[arg(long, default_value_t = 20)]
    pub runs: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct BellArgs {
    /// Planar angles in degrees of a, a', b, b'.
    #[arg(long, value_delimiter = ',', num_args = 1, default_value = "0,90,45,135", allow_negative_numbers = true)]
    pub angles: Vec<f64>,
    #[arg(long, value_enum, default_value_t = BellMode::QuantumAnalytic)]
    pub mode: BellMode,
    /// Samples per setting pair in the sampled modes.
    #[arg(long, default_value_t = 100_000)]
    pub runs: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BellMode {
    QuantumAnalytic,
    QuantumSampled,
    Classical,
}

impl From<BellMode> for ChshMode {
    fn from(m: BellMode) -> Self {
        match m {
            BellMode::QuantumAnalytic => ChshMode::QuantumAnalytic,
            BellMode::QuantumSampled => ChshMode::QuantumSampled,
            BellMode::Classical => ChshMode::Classical,
        }
    }
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub source: ModelSource,
    /// Experiment to reduce.
    #[arg(long)]
    pub from: String,
    /// Orbit indices to keep, comma separated; orbits are only listed when omitted.
    #[arg(long, value_delimiter = ',')]
    pub orbits: Vec<usize>,
    /// Write the reduced model file here.
    #[arg(long)]
    pub emit_model: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct GcsArgs {
    #[command(flatten)]
    pub source: ModelSource,
    /// Experiment of the seed state; defaults to the reference experiment.
    #[arg(long)]
    pub from: Option<String>,
    /// Value of the seed state; defaults to the first value.
    #[arg(long)]
    pub value: Option<String>,
    #[command(flatten)]
    pub output: Output,
}
