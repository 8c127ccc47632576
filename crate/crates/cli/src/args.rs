use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "permuton",
    version,
    about = "Pattern densities, permuton models and pattern removal"
)]
pub struct Cli {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    /// Seed for every randomized step
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Count occurrences of a pattern in a permutation
    Count(PatternPerm),
    /// Check whether a permutation avoids a pattern (exit 1 if not)
    Avoid(PatternPerm),
    /// Exact density in a permutation, or a Monte Carlo estimate in a model
    Density(DensityArgs),
    /// Certify that a track model avoids a pattern (exit 1 with a witness if not)
    Certify(CertifyArgs),
    /// Snap a permutation onto a model, or run the removal experiment
    Removal(RemovalArgs),
    /// Sample a permutation of order n from a model
    Sample(SampleArgs),
    /// Rectangular distance between two models
    Distance(DistanceArgs),
    /// Lévy–Prokhorov distance between two fibers, or the fiber profile of a model
    Lp(LpArgs),
    /// Count the distinct permutations generated by the atoms of a model
    Swbound(SwboundArgs),
    /// Exhaustive checks of the base-4 digit-swap map
    DigitswapCheck(DigitswapArgs),
    /// Atom counts of the fibers of a track model
    Molecules(MoleculesArgs),
    /// Check that a track model has uniform marginals (exit 1 if not)
    Marginals(ModelArg),
    /// Print the zigzag model built from a pattern
    Zigzag(ZigzagArgs),
}

#[derive(Args, Debug)]
pub struct PatternPerm {
    /// Pattern literal, e.g. 132 or 1,3,2
    #[arg(long)]
    pub pattern: String,
    /// File holding the permutation ("-" for stdin)
    #[arg(long)]
    pub perm: PathBuf,
}

#[derive(Args, Debug)]
pub struct DensityArgs {
    #[arg(long)]
    pub pattern: String,
    #[arg(long, conflicts_with = "model", required_unless_present = "model")]
    pub perm: Option<PathBuf>,
    /// Model JSON file
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    #[arg(long)]
    pub pattern: String,
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TieArg {
    Lower,
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum XModeArg {
    Midpoint,
    Random,
}

#[derive(Args, Debug)]
pub struct RemovalArgs {
    #[arg(long)]
    pub pattern: String,
    #[arg(long)]
    pub model: PathBuf,
    /// Snap this single permutation instead of running the experiment
    #[arg(long)]
    pub perm: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = TieArg::Lower)]
    pub tie: TieArg,
    #[arg(long, value_enum, default_value_t = XModeArg::Midpoint)]
    pub x_mode: XModeArg,
    /// Orders, comma separated
    #[arg(long, value_delimiter = ',', required_unless_present = "perm")]
    pub n: Vec<usize>,
    /// Perturbation rates as decimals or p/q, comma separated
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub rho: Vec<String>,
    /// Number of seeds, starting at --seed
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DistanceMethod {
    Interval,
    Cut,
}

#[derive(Args, Debug)]
pub struct DistanceArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, value_enum, default_value_t = DistanceMethod::Interval)]
    pub method: DistanceMethod,
}

#[derive(Args, Debug)]
pub struct LpArgs {
    /// Fiber as y:w pairs, e.g. 1/4:1/2,3/4:1/2
    #[arg(long, requires = "beta", conflicts_with = "model")]
    pub alpha: Option<String>,
    #[arg(long)]
    pub beta: Option<String>,
    /// Track model for a fiber profile
    #[arg(long, required_unless_present = "alpha")]
    pub model: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    pub grid: usize,
    /// Threshold for grouping neighbouring fibers
    #[arg(long, default_value = "1/10")]
    pub delta: String,
}

#[derive(Args, Debug)]
pub struct SwboundArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub n: usize,
    /// Pattern every generated permutation is checked against
    #[arg(long)]
    pub pattern: Option<String>,
    /// Random choice vectors instead of all of them
    #[arg(long)]
    pub trials: Option<u64>,
}

#[derive(Args, Debug)]
pub struct DigitswapArgs {
    /// Depth of the exhaustive pattern scan
    #[arg(long, default_value_t = 3)]
    pub depth: u32,
    #[arg(long, default_value = "3142")]
    pub pattern: String,
    /// Largest depth for difference quotients
    #[arg(long, default_value_t = 5)]
    pub quotient_depth: u32,
    #[arg(long, default_value_t = 6)]
    pub involution_depth: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Vertical,
    Horizontal,
}

#[derive(Args, Debug)]
pub struct MoleculesArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, value_enum, default_value_t = DirectionArg::Vertical)]
    pub direction: DirectionArg,
}

#[derive(Args, Debug)]
pub struct ModelArg {
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(Args, Debug)]
pub struct ZigzagArgs {
    #[arg(long)]
    pub pattern: String,
    /// Print the transposed model instead
    #[arg(long)]
    pub transpose: bool,
}
