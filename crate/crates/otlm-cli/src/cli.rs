//! Command-line surface.

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "otlm",
    about = "Transport linear models: fit non-negative dictionary weights jointly with an entropic transport plan",
    long_about = "Fits non-negative weights over a dictionary basis together with an \
entropy-regularized transport plan, using alternating scaling iterations with a \
multiplicative weight update. The environment variable OTLM_THREADS caps internal \
parallelism.",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Fit weights and a transport plan to a target described by a config file.
    Fit(FitArgs),
    /// Generate a synthetic problem (dictionary, target, grid, truth) on disk.
    Gen(GenArgs),
    /// Run the built-in misaligned-peaks demonstration end to end.
    Demo(DemoArgs),
    /// Time solves over a ladder of problem sizes and write a CSV table.
    Bench(BenchArgs),
    /// Evaluate a datafit proximal operator next to its bisection oracle.
    Prox(ProxArgs),
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// Run configuration (JSON).
    #[arg(long)]
    pub config: std::path::PathBuf,
    /// Output directory; overrides the config's output paths.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    #[command(flatten)]
    pub overrides: SolverOverrides,
    /// Include the top-K plan entries per row in the report.
    #[arg(long, value_name = "K", num_args = 0..=1, default_missing_value = "5")]
    pub emit_plan: Option<usize>,
    /// Write the full plan as CSV (guarded against very large plans).
    #[arg(long)]
    pub emit_plan_full: bool,
}

/// Flag-level overrides of the config's solver section.
#[derive(Args, Debug, Default, Clone)]
pub struct SolverOverrides {
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// equality | kl | tv | l2 | poisson
    #[arg(long)]
    pub datafit: Option<String>,
    /// none | l1 | l2_squared | elastic_net
    #[arg(long)]
    pub penalty: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<u64>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// demo | scaling
    pub kind: String,
    /// Output directory for dictionary.csv, target.csv, grid.csv, truth.json.
    #[arg(long)]
    pub out: std::path::PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Grid size (scaling kind; demo uses its built-in grid).
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Atom count (scaling kind; defaults to n/10).
    #[arg(long)]
    pub m: Option<usize>,
}

#[derive(Args, Debug)]
pub struct DemoArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write problem files and the fit report here.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Ascending problem sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "400,800,1600,3200")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    /// Fixed iteration count per solve.
    #[arg(long, default_value_t = 200)]
    pub iters: usize,
    #[arg(long, default_value = "tv")]
    pub datafit: String,
    #[arg(long, default_value = "l1")]
    pub penalty: String,
    #[arg(long, default_value_t = 0.001)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.001)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV path.
    #[arg(long)]
    pub out: std::path::PathBuf,
}

#[derive(Args, Debug)]
pub struct ProxArgs {
    /// equality | kl | tv | l2 | poisson
    #[arg(long)]
    pub datafit: String,
    /// Scalar or @path to a one-column CSV.
    #[arg(long)]
    pub s: String,
    /// Scalar or @path to a one-column CSV.
    #[arg(long)]
    pub y: String,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
}
