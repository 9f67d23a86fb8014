use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

macro_rules! notice {
    () => {
        "normalization: hypergroup convolution weights are m_k q_ij^k / (m_i m_j), \
without an extra 1/n factor, so every convolution slice is a probability vector"
    };
}

pub const NORMALIZATION_NOTICE: &str = notice!();

#[derive(Debug, Parser)]
#[command(name = "bmq", about = "Association schemes, hypergroup walks, quantum Markov chains and anyons")]
#[command(version = concat!(env!("CARGO_PKG_VERSION"), "\n", notice!()))]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build, check and analyse association schemes.
    #[command(subcommand)]
    Scheme(SchemeCommand),
    /// Random walks.
    #[command(subcommand)]
    Walk(WalkCommand),
    /// Quantum Markov chain tools.
    #[command(subcommand)]
    Qmc(QmcCommand),
    /// Szegedy walk operator of a stochastic matrix.
    Szegedy(SzegedyArgs),
    /// Fusion systems and the scheme bridge.
    Anyon(AnyonArgs),
}

#[derive(Debug, Subcommand)]
pub enum SchemeCommand {
    /// Build a scheme from a named family.
    Build(BuildArgs),
    /// Check the scheme axioms.
    Verify { path: PathBuf },
    /// Idempotents, multiplicities and eigenmatrices.
    Spectrum {
        path: PathBuf,
        /// Write the full decomposition here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Intersection numbers and Krein parameters.
    Params {
        path: PathBuf,
        #[arg(long)]
        out_p: Option<PathBuf>,
        #[arg(long)]
        out_q: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Johnson,
    Grassmann,
    Group,
    Conjugacy,
    Orbit,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long)]
    pub v: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Subspace dimension for Grassmann schemes.
    #[arg(long)]
    pub d: Option<usize>,
    /// Field order for Grassmann schemes.
    #[arg(long)]
    pub q: Option<usize>,
    /// Built-in group name (Z<n>, S<n>, D<n>, Q8).
    #[arg(long)]
    pub group: Option<String>,
    /// Cayley-table JSON file, instead of --group.
    #[arg(long)]
    pub cayley: Option<PathBuf>,
    /// Permutation generators as a JSON list of lists, for orbit schemes.
    #[arg(long)]
    pub generators: Option<String>,
    /// Number of points acted on, for orbit schemes.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = bose_mesner::scheme::DEFAULT_VERTEX_CAP)]
    pub cap: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct CoinArgs {
    /// Idempotent index used as the coin.
    #[arg(long, conflicts_with = "coin_weights")]
    pub coin: Option<usize>,
    /// Convex weights over idempotent indices (inline JSON or file).
    #[arg(long)]
    pub coin_weights: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum WalkCommand {
    /// Hypergroup walk on the idempotent indices of a scheme.
    Hypergroup {
        #[arg(long)]
        scheme: PathBuf,
        #[command(flatten)]
        coin: CoinArgs,
        /// Starting index (a point mass).
        #[arg(long, default_value_t = 0, conflicts_with = "start_dist")]
        start: usize,
        /// Starting distribution (inline JSON or file).
        #[arg(long)]
        start_dist: Option<String>,
        #[arg(long)]
        steps: usize,
        /// Write the trajectory as CSV to stdout.
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scaling {
    /// Multiplier Σ c_i E_i / m_i.
    Idempotent,
    /// Multiplier Σ c_i (n / m_i) E_i (unit diagonal, trace preserving).
    Unit,
}

#[derive(Debug, Subcommand)]
pub enum QmcCommand {
    /// Orthogonal matrix whose first row is √p.
    Dilate {
        /// Distribution (inline JSON or file).
        #[arg(long)]
        dist: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Entangled transition expectation V†(M⊗N)V.
    Entangled {
        /// Row-stochastic transition matrix.
        #[arg(long)]
        transition: PathBuf,
        #[arg(long = "M")]
        m: PathBuf,
        #[arg(long = "N")]
        n: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Iterate a Schur-multiplier channel built from a scheme idempotent.
    Schur {
        #[arg(long)]
        scheme: PathBuf,
        #[command(flatten)]
        coin: CoinArgs,
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Scaling::Idempotent)]
        scaling: Scaling,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    Column,
    Row,
}

#[derive(Debug, Args)]
pub struct SzegedyArgs {
    #[arg(long)]
    pub transition: PathBuf,
    #[arg(long, value_enum, default_value_t = Convention::Column)]
    pub convention: Convention,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnyonOp {
    Fuse,
    Dims,
    Braid,
    Pentagon,
    Hexagon,
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true)]
pub struct AnyonArgs {
    #[command(subcommand)]
    pub bridge: Option<AnyonCommand>,
    /// Built-in name (ising, fibonacci, Z<n>) or a fusion-system JSON file.
    #[arg(long)]
    pub system: Option<String>,
    #[arg(long, value_enum)]
    pub op: Option<AnyonOp>,
    /// Labels for `fuse`.
    pub labels: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum AnyonCommand {
    /// Compare a scheme's Krein tensor with a fusion system.
    Bridge {
        #[arg(long)]
        scheme: PathBuf,
        #[arg(long)]
        system: String,
    },
}
