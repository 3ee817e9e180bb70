use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Spectral gaps, average-distortion embeddings and their certificates.
///
/// Every subcommand writes one JSON report that embeds the full invocation,
/// so a report can always be regenerated from itself.
#[derive(Debug, Parser, Serialize)]
#[command(name = "avgjohn", version, about)]
pub struct Cli {
    /// Seed for every random choice (searches, random starts, random graphs).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Numerical tolerance for iterative solvers.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Work budget: search starts or solver iterations, depending on the command.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Constant K of the dimension certificate, or C of the SL_k embedding scale.
    #[arg(long = "constant", global = true, default_value_t = 1.0)]
    pub constant: f64,
    #[command(subcommand)]
    #[serde(flatten)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "subcommand", content = "args", rename_all = "kebab-case")]
pub enum Command {
    /// Build a graph from a named family.
    GenGraph(GraphArgs),
    /// Eigenvalues of a reversible kernel.
    Spectrum(KernelArgs),
    /// Rayleigh-quotient search for a lower bound on the nonlinear gap.
    GammaEst(GammaEstArgs),
    /// Markov-type ratio of one configuration.
    Mtype(MtypeArgs),
    /// Scalar or vector extrapolation check.
    Extrapolate(ExtrapolateArgs),
    /// Center a configuration and check the boosted extrapolation inequality.
    Boost(BoostArgs),
    /// Snowflake self-embedding of a configuration.
    SelfEmbed(SelfEmbedArgs),
    /// Transfer an average-distortion embedding to a snowflake.
    Transfer(TransferArgs),
    /// Embed a metric space into the real line.
    LineEmbed(LineEmbedArgs),
    /// Dimension lower bound from a Rayleigh quotient.
    CertifyDim(CertifyDimArgs),
    /// Average-distortion lower bound for a snowflaked graph.
    ExpanderBound(ExpanderBoundArgs),
    /// Enflo check on the Hamming cube and the (k/2)^ε bound.
    HypercubeEnflo(EnfloArgs),
    /// Cayley graph of SL_k(F_q) and its character embedding.
    Slk(SlkArgs),
    /// Fixed battery of reference experiments.
    Report,
    /// Lower Hölder constant η(p, ω) of the normalization map.
    Eta(EtaArgs),
    /// Three-piece function ψ_ω(ρ).
    Psi(PsiArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyName {
    Hypercube,
    Cycle,
    Complete,
    RandomRegular,
    CayleySl,
}

/// A graph, either from a JSON file or from a family (random graphs use `--seed`).
#[derive(Clone, Debug, Default, Args, Serialize)]
pub struct GraphArgs {
    /// Graph JSON `{"n", "edges"}` or a builder `{"family", ...}`.
    #[arg(long, conflicts_with = "family")]
    pub graph: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub family: Option<FamilyName>,
    /// Hypercube dimension, or matrix size of SL_k.
    #[arg(long)]
    pub k: Option<u32>,
    /// Vertex count of cycles, complete and random regular graphs.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub degree: Option<usize>,
    /// Field size of SL_k(F_q).
    #[arg(long)]
    pub field: Option<u32>,
}

/// A kernel JSON `{"a", "pi"}`, or the walk on a graph.
#[derive(Clone, Debug, Args, Serialize)]
pub struct KernelArgs {
    #[arg(long, conflicts_with_all = ["graph", "family"])]
    pub kernel: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub graph: GraphArgs,
    /// Use the lazy walk (I + A)/2.
    #[arg(long)]
    pub lazy: bool,
}

/// A finite metric space, given directly or through a configuration.
#[derive(Clone, Debug, Args, Serialize)]
pub struct MetricArgs {
    /// Metric JSON `{"n", "d"}`.
    #[arg(long, conflicts_with = "config")]
    pub metric: Option<PathBuf>,
    /// Configuration JSON `{"host", "points"}`.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Probability weights JSON array; uniform when absent.
    #[arg(long)]
    pub weights: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct GammaEstArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub kernel: KernelArgs,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Exponent of the ℓp host, or `inf`.
    #[arg(long, default_value = "2")]
    pub host: String,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct MtypeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub kernel: KernelArgs,
    /// Metric or configuration; the graph metric when absent.
    #[command(flatten)]
    #[serde(flatten)]
    pub metric: MetricArgs,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 2)]
    pub steps: u32,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct ExtrapolateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub kernel: KernelArgs,
    /// Configuration for the vector inequality.
    #[arg(long, conflicts_with = "values", required_unless_present = "values")]
    pub config: Option<PathBuf>,
    /// JSON array of reals for the scalar inequality.
    #[arg(long)]
    pub values: Option<PathBuf>,
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    #[arg(long, default_value_t = 2.0)]
    pub beta: f64,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct BoostArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub kernel: KernelArgs,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct SelfEmbedArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub weights: Option<PathBuf>,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 0.5)]
    pub omega: f64,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct TransferArgs {
    /// Embedding JSON `{"domain", "weights", "image"}`; the Fréchet map of
    /// `--metric`/`--config` when absent.
    #[arg(long = "map", conflicts_with_all = ["metric", "config"])]
    pub map: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub metric: MetricArgs,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    #[arg(long, default_value_t = 0.5)]
    pub omega: f64,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct LineEmbedArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub metric: MetricArgs,
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct CertifyDimArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub kernel: KernelArgs,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HypothesisName {
    #[default]
    Holder,
    Sobolev,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct ExpanderBoundArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub graph: GraphArgs,
    #[arg(long)]
    pub omega: f64,
    #[arg(long, value_enum, default_value_t = HypothesisName::Holder)]
    pub hypothesis: HypothesisName,
    /// Source exponent of the general-target estimate (needs `--q` too).
    #[arg(long, requires = "q")]
    pub p: Option<f64>,
    /// Target exponent of the general-target estimate.
    #[arg(long, requires = "p")]
    pub q: Option<f64>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct EnfloArgs {
    #[arg(long)]
    pub k: u32,
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    /// Map of the cube into ℓ2 to check; the identity when absent.
    #[arg(long = "map")]
    pub map: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct SlkArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub q: u32,
    /// Include the full embedding (points and distances) in the report.
    #[arg(long)]
    pub full: bool,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct EtaArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub omega: f64,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct PsiArgs {
    #[arg(long)]
    pub rho: f64,
    #[arg(long)]
    pub omega: f64,
}
