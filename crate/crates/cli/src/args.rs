use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::ParamsFile;

#[derive(Debug, Parser)]
#[command(name = "resokam", version, about = "Resonance geometry of convex nearly-integrable Hamiltonians")]
pub struct Cli {
    /// Worker threads for the parallel kernels; results do not depend on it.
    #[arg(long, global = true, env = "RESOKAM_THREADS")]
    pub threads: Option<usize>,

    /// Directory receiving reports and side files.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generator enumeration and unimodular frames.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Model spec checks.
    #[command(subcommand)]
    Model(ModelCmd),
    /// Zone covering: classification, measures, planar scans.
    #[command(subcommand)]
    Cover(CoverCmd),
    /// Resonance graphs, non-resonance reports and contraction certificates.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Same as `graph nonres`.
    Nonres(NonresArgs),
    /// First-order secular data and standard form along a resonance.
    Secular(SecularArgs),
    /// Runs every module check on one model and writes a suite report.
    VerifyAll(VerifyArgs),
}

#[derive(Debug, Subcommand)]
pub enum LatticeCmd {
    Enumerate(EnumerateArgs),
    Complete(CompleteArgs),
}

#[derive(Debug, Subcommand)]
pub enum ModelCmd {
    Validate(ValidateArgs),
}

#[derive(Debug, Subcommand)]
pub enum CoverCmd {
    Classify(ClassifyArgs),
    Measure(MeasureArgs),
    Scan2d(ScanArgs),
}

#[derive(Debug, Subcommand)]
pub enum GraphCmd {
    Build(BuildArgs),
    Nonres(NonresArgs),
    Certify(CertifyArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpecArg {
    /// Model spec (TOML).
    #[arg(long)]
    pub spec: PathBuf,
}

/// `--params` file plus per-field overrides.
#[derive(Debug, Clone, Args, Serialize)]
pub struct ParamArgs {
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long = "K")]
    pub k_cut: Option<f64>,
    #[arg(long = "K0")]
    pub k0_cut: Option<f64>,
    /// Derive K and K0 from eps.
    #[arg(long = "K-from-eps")]
    pub k_from_eps: bool,
}

impl ParamArgs {
    pub fn overrides(&self) -> ParamsFile {
        ParamsFile {
            eps: self.eps,
            k: self.k_cut,
            k0: self.k0_cut,
            k_from_eps: self.k_from_eps,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long = "K")]
    pub k_cut: f64,
    /// Angle widths for the weighted norm `sum s_i |k_i|`.
    #[arg(long)]
    pub s: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CompleteArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub k: String,
    /// Model spec supplying gamma, L and r for the frame radii.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long, default_value = "euclid")]
    pub strategy: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub spec: SpecArg,
    #[arg(long, default_value_t = 4096)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub spec: SpecArg,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub y: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub spec: SpecArg,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScanArgs {
    #[command(flatten)]
    pub spec: SpecArg,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Zero-based coordinate indices spanning the plane.
    #[arg(long, default_value = "0,1")]
    pub axis: String,
    #[arg(long, default_value_t = 128)]
    pub grid: usize,
    /// Also write a heat map (n = 2 only).
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BuildArgs {
    #[command(flatten)]
    pub spec: SpecArg,
    #[arg(long, allow_hyphen_values = true)]
    pub k: String,
    #[arg(long, default_value_t = 9)]
    pub nvarpi: usize,
    #[arg(long, default_value_t = 3)]
    pub percube: usize,
    /// Also write a plot of the graph (n = 2 only).
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct NonresArgs {
    #[command(flatten)]
    pub spec: SpecArg,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub k: String,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub spec: SpecArg,
    #[arg(long, allow_hyphen_values = true)]
    pub k: String,
    /// Base point; `y0 = (eta(0, yhat), yhat)`. Defaults to the cube centroid.
    #[arg(long, allow_hyphen_values = true)]
    pub yhat: Option<String>,
    #[arg(long, default_value_t = resokam_core::resgraph::DEFAULT_GRID)]
    pub grid: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SecularArgs {
    #[command(flatten)]
    pub spec: SpecArg,
    /// Fourier modes, one `m1,...,mn, re, im` per line.
    #[arg(long)]
    pub potential: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub k: String,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub yhat: Option<String>,
    /// Also write plots of G0 and the pendulum level sets.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub spec: SpecArg,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo samples for the measure and validation checks; the
    /// non-resonance check uses a tenth of them per resonance.
    #[arg(long, default_value_t = 20_000)]
    pub samples: usize,
    /// Resonances checked are the generators with `|k|_1` up to this.
    #[arg(long, default_value_t = 2)]
    pub kmax: i64,
}
