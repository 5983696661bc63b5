use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use scatlen::verify::Suite;
use scatlen::{Beta, Dimension};

/// Scattering lengths and positive-temperature scattering energies of radial
/// potentials.
///
/// All lengths are dimensionless; the inverse temperature β carries units of
/// length squared, so √β is the thermal length.
#[derive(Debug, Parser)]
#[command(name = "scatlen", version, about)]
pub struct Cli {
    /// Worker threads for Monte Carlo runs (default: all cores).
    #[arg(long, global = true, env = "SCATLEN_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Finite-radius scattering length a_R, or the limit a = lim a_R.
    Scatter(ScatterArgs),
    /// Numeric e(β) from the Euler-Lagrange equation.
    Ebeta(EbetaArgs),
    /// Analytic upper bound, trial-state energy and numeric e(β) side by side.
    Bounds(BoundsArgs),
    /// Feynman-Kac Monte Carlo estimate of g(β).
    Mc(McArgs),
    /// Run verification suites; exits 1 if any check fails.
    Verify(VerifyArgs),
    /// Closed-form e(β) for a hard core.
    Hardcore(HardcoreArgs),
}

#[derive(Debug, Args)]
pub struct SpecArg {
    /// Potential specification (TOML).
    #[arg(long)]
    pub spec: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScatterArgs {
    #[command(flatten)]
    pub spec: SpecArg,
    /// Radius of the ball; reports a_R and λ(R).
    #[arg(long = "R", alias = "r", conflicts_with = "limit")]
    pub radius: Option<f64>,
    /// Report the limit a with a certified bracket (the default without --R).
    #[arg(long)]
    pub limit: bool,
    /// Relative bracket width for --limit.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Write the profile w = 1 - ψ_R (columns r, w, w_prime); needs --R.
    #[arg(long, requires = "radius")]
    pub profile: Option<PathBuf>,
    /// Approximate number of mesh nodes for the profile.
    #[arg(long, default_value_t = 2000)]
    pub mesh: usize,
}

#[derive(Debug, Args)]
pub struct EbetaArgs {
    #[command(flatten)]
    pub spec: SpecArg,
    #[arg(long, value_parser = parse_beta)]
    pub beta: Beta,
    /// Approximate number of mesh nodes before refinement.
    #[arg(long, default_value_t = 2000)]
    pub mesh: usize,
    /// Write the minimiser (columns r, phi).
    #[arg(long)]
    pub profile: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub spec: SpecArg,
    #[arg(long, value_parser = parse_beta)]
    pub beta: Beta,
    #[arg(long, default_value_t = 2000)]
    pub mesh: usize,
    /// Also run the Monte Carlo estimate of g(β).
    #[arg(long)]
    pub mc: bool,
    #[command(flatten)]
    pub sampling: Sampling,
    /// Print a table instead of the JSON record.
    #[arg(long)]
    pub table: bool,
}

#[derive(Debug, Clone, Args)]
pub struct Sampling {
    #[arg(long, default_value_t = 100_000)]
    pub paths: u64,
    #[arg(long, default_value_t = 2000)]
    pub steps: u32,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
    /// Paths per independent random stream.
    #[arg(long, default_value_t = 1024)]
    pub chunk: u64,
    /// Radius of the ball of starting points (default: range + 6√β).
    #[arg(long)]
    pub sample_radius: Option<f64>,
    /// Correct hard-core hits between time steps with a Brownian bridge.
    #[arg(long)]
    pub bridge: bool,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub spec: SpecArg,
    #[arg(long, value_parser = parse_beta)]
    pub beta: Beta,
    #[command(flatten)]
    pub sampling: Sampling,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite to run: hardcore3d, hardcore2d, shells, tails, sandwich or all.
    #[arg(long, value_parser = parse_suites, default_value = "all")]
    pub suite: SuiteList,
    #[command(flatten)]
    pub sampling: Sampling,
    /// Perturb every reference value by this relative amount (tests the harness).
    #[arg(long, default_value_t = 0.0, hide = true)]
    pub inject_fault: f64,
}

#[derive(Debug, Args)]
pub struct HardcoreArgs {
    /// Core radius.
    #[arg(long)]
    pub a: f64,
    #[arg(long, value_parser = parse_beta)]
    pub beta: Beta,
    #[arg(long, value_parser = parse_dimension)]
    pub dim: Dimension,
}

#[derive(Debug, Clone)]
pub struct SuiteList(pub Vec<Suite>);

fn parse_beta(s: &str) -> Result<Beta, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    Beta::new(v).map_err(|e| e.to_string())
}

fn parse_dimension(s: &str) -> Result<Dimension, String> {
    let v: i64 = s.parse().map_err(|e| format!("{e}"))?;
    Dimension::try_from(v).map_err(|e| e.to_string())
}

fn parse_suites(s: &str) -> Result<SuiteList, String> {
    if s == "all" {
        return Ok(SuiteList(Suite::ALL.to_vec()));
    }
    s.split(',')
        .map(|name| name.trim().parse::<Suite>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()
        .map(SuiteList)
}
