use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rsbm::graphgen::Pairing;
use rsbm::{RecoveryMethod, SamplerKind};

#[derive(Debug, Parser)]
#[command(name = "rsbm", version, about = "Regular stochastic block models: sample, recover, verify")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a planted instance and write its edge list and labels.
    Generate(GenerateArgs),
    /// Recover the planted partition of a graph and print a JSON report.
    Recover(RecoverArgs),
    /// Run a batch of seeded trials described by a JSON config.
    Experiment(ExperimentArgs),
    /// Run an exhaustive oracle on a small graph.
    Verify(VerifyArgs),
    /// Print thresholds, roots, z_k, lambda1 and decay rates for (d1, d2).
    Formulas(FormulasArgs),
    /// Leading eigenvalues of the adjacency or self-avoiding-walk matrix.
    Spectrum(SpectrumArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplerArg {
    Configuration,
    Permutation,
}

impl From<SamplerArg> for SamplerKind {
    fn from(s: SamplerArg) -> Self {
        match s {
            SamplerArg::Configuration => SamplerKind::Configuration,
            SamplerArg::Permutation => SamplerKind::Permutation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PairingArg {
    Auto,
    Rejection,
    Incremental,
}

impl From<PairingArg> for Pairing {
    fn from(p: PairingArg) -> Self {
        match p {
            PairingArg::Auto => Pairing::Auto,
            PairingArg::Rejection => Pairing::Rejection,
            PairingArg::Incremental => Pairing::Incremental,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    #[value(name = "spectral_adjacency", alias = "adjacency")]
    SpectralAdjacency,
    #[value(name = "spectral_saw", alias = "saw")]
    SpectralSaw,
    #[value(name = "majority_only", alias = "majority")]
    MajorityOnly,
}

impl From<MethodArg> for RecoveryMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::SpectralAdjacency => RecoveryMethod::SpectralAdjacency,
            MethodArg::SpectralSaw => RecoveryMethod::SpectralSaw,
            MethodArg::MajorityOnly => RecoveryMethod::MajorityOnly,
        }
    }
}

#[derive(Debug, Args)]
pub struct EigenArgs {
    /// Seed of the eigensolver's start vectors.
    #[arg(long, default_value_t = 0)]
    pub eigen_seed: u64,
    /// Residual tolerance of power iteration.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iter: usize,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d1: usize,
    #[arg(long)]
    pub d2: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = SamplerArg::Configuration)]
    pub sampler: SamplerArg,
    #[arg(long, value_enum, default_value_t = PairingArg::Auto)]
    pub pairing: PairingArg,
    /// Rejections or restarts allowed per component.
    #[arg(long, default_value_t = rsbm::graphgen::DEFAULT_MAX_REJECTS)]
    pub max_rejects: usize,
    /// Edge-list output path.
    #[arg(long)]
    pub out: PathBuf,
    /// Labels output path.
    #[arg(long)]
    pub labels: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RecoverArgs {
    /// Edge-list file.
    #[arg(long)]
    pub graph: PathBuf,
    /// Planted labels; enables agreement and per-round error reporting.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = MethodArg::SpectralAdjacency)]
    pub method: MethodArg,
    /// Walk length for spectral_saw; defaults to the model's depth rule.
    #[arg(long)]
    pub l: Option<usize>,
    /// Initial labels for majority_only.
    #[arg(long)]
    pub init: Option<PathBuf>,
    /// For majority_only without --init: start from the planted labels with
    /// this fraction of each side flipped.
    #[arg(long)]
    pub error_injection: Option<f64>,
    /// Seed of the error injection.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub max_rounds: Option<usize>,
    /// Round the top half of the eigenvector to +1 instead of using signs.
    #[arg(long)]
    pub balanced: bool,
    /// Where to write the recovered labels (default: next to the graph).
    #[arg(long)]
    pub labels_out: Option<PathBuf>,
    #[command(flatten)]
    pub eigen: EigenArgs,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// JSON experiment config.
    pub config: PathBuf,
    /// Worker threads (default: available parallelism, or the config's value).
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Uniqueness,
    Minbisect,
    Membership,
    Tanglefree,
    Expansion,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub check: Check,
    #[arg(long)]
    pub graph: PathBuf,
    /// Planted labels (uniqueness, minbisect).
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Defaults to the edge-list header.
    #[arg(long)]
    pub d1: Option<usize>,
    /// Defaults to the edge-list header.
    #[arg(long)]
    pub d2: Option<usize>,
    /// Ball radius for tanglefree.
    #[arg(long)]
    pub l: Option<usize>,
    /// Spectral gap for expansion; measured when omitted.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[command(flatten)]
    pub eigen: EigenArgs,
}

#[derive(Debug, Args)]
pub struct FormulasArgs {
    #[arg(long)]
    pub d1: usize,
    #[arg(long)]
    pub d2: usize,
    /// Number of z_k terms and the walk length of lambda1.
    #[arg(long, default_value_t = 4)]
    pub l: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Number of eigenpairs (by descending |lambda|).
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Use the self-avoiding-walk matrix of this length instead of A.
    #[arg(long)]
    pub l: Option<usize>,
    #[command(flatten)]
    pub eigen: EigenArgs,
}
