//! Command-line front end for Dhillon lifetime inference.
//!
//! Commands: `fit`, `sample`, `simulate`, `compare` and `predict`. Every
//! command honours the global `--seed`, writes its reports to `--out-dir`
//! when given, and prints the report on stdout in the chosen `--format`.

pub mod commands;
pub mod data;
pub mod error;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use error::{CliError, Result, EXIT_IMPROPER, EXIT_INPUT, EXIT_NOT_CONVERGED, EXIT_OK};
use output::Format;

#[derive(Debug, Parser)]
#[command(name = "dhillon", version, about = "Likelihood and objective-Bayesian inference for the Dhillon lifetime distribution")]
pub struct Cli {
    /// Root seed for every random stream.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Directory receiving report files and CSV artifacts.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,

    /// Format of the report printed on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the parameters of a dataset.
    Fit(FitArgs),
    /// Draw a sample by inverse transform.
    Sample(SampleArgs),
    /// Run a replicated simulation study of the estimators.
    Simulate(SimulateArgs),
    /// Compare Dhillon, Weibull and Gamma fits by information criteria.
    Compare(CompareArgs),
    /// Summarize the posterior predictive distribution.
    Predict(PredictArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mle,
    Bayes,
    Mom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PriorArg {
    /// Jeffreys / reference prior, proportional to 1/(beta theta).
    Jeffreys,
    /// Maximal data information prior; its posterior is never proper.
    Mdip,
}

impl From<PriorArg> for dhillon::bayes::Prior {
    fn from(p: PriorArg) -> Self {
        match p {
            PriorArg::Jeffreys => dhillon::bayes::Prior::JeffreysReference,
            PriorArg::Mdip => dhillon::bayes::Prior::Mdip,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DataArgs {
    /// Built-in dataset name (diesel_engine, line_divider) or CSV path.
    #[arg(long)]
    pub data: String,

    /// Time unit echoed in reports.
    #[arg(long)]
    pub unit: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct McmcArgs {
    /// Total Metropolis-Hastings iterations.
    #[arg(long, default_value_t = 5500)]
    pub iterations: usize,

    #[arg(long, default_value_t = 500)]
    pub burn_in: usize,

    #[arg(long, default_value_t = 5)]
    pub thin: usize,

    /// Initial shape of the Gamma proposals for both parameters.
    #[arg(long, default_value_t = 50.0)]
    pub proposal_shape: f64,
}

impl McmcArgs {
    pub fn config(&self, seed: u64) -> dhillon::bayes::McmcConfig {
        dhillon::bayes::McmcConfig {
            iterations: self.iterations,
            burn_in: self.burn_in,
            thin: self.thin,
            a_beta: self.proposal_shape,
            a_theta: self.proposal_shape,
            seed,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,

    #[arg(long, value_enum, default_value_t = Method::Mle)]
    pub method: Method,

    #[arg(long, value_enum, default_value_t = PriorArg::Jeffreys)]
    pub prior: PriorArg,

    /// Confidence or credible level.
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,

    #[command(flatten)]
    pub mcmc: McmcArgs,

    /// Write the retained chain (iter,beta,theta) to this CSV file.
    #[arg(long)]
    pub chain: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SampleArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub beta: f64,

    #[arg(long, allow_negative_numbers = true)]
    pub theta: f64,

    /// Number of draws.
    #[arg(long)]
    pub n: usize,

    /// Write the draws to this CSV file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    pub beta: f64,

    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub theta: f64,

    /// Sample sizes.
    #[arg(long = "n", value_delimiter = ',', default_value = "20,30,40,50,60,70,80,90,100,110,120")]
    pub n_values: Vec<usize>,

    #[arg(long, default_value_t = 1000)]
    pub replicates: usize,

    #[arg(long, default_value_t = 0.95)]
    pub level: f64,

    #[command(flatten)]
    pub mcmc: McmcArgs,

    /// Worker threads (defaults to all cores). Results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CompareArgs {
    #[command(flatten)]
    pub data: DataArgs,

    /// Grid points per parametric survival curve.
    #[arg(long, default_value_t = 200)]
    pub points: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PredictArgs {
    /// Dataset to fit; not needed with --chain.
    #[arg(long)]
    pub data: Option<String>,

    #[arg(long)]
    pub unit: Option<String>,

    #[arg(long, value_enum, default_value_t = PriorArg::Jeffreys)]
    pub prior: PriorArg,

    #[arg(long, default_value_t = 0.95)]
    pub level: f64,

    #[command(flatten)]
    pub mcmc: McmcArgs,

    /// Use the draws of a chain CSV (iter,beta,theta) instead of sampling.
    #[arg(long)]
    pub chain: Option<PathBuf>,
}

/// Runs the parsed command and returns the rendered report.
pub fn execute(cli: &Cli) -> Result<output::Rendered> {
    match &cli.command {
        Command::Fit(a) => commands::fit::run(a, cli.seed),
        Command::Sample(a) => commands::sample::run(a, cli.seed),
        Command::Simulate(a) => commands::simulate::run(a, cli.seed),
        Command::Compare(a) => commands::compare::run(a, cli.seed),
        Command::Predict(a) => commands::predict::run(a, cli.seed),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_to(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

/// [`main_with`] with explicit output streams.
pub fn run_to<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(&cli).and_then(|r| r.emit(cli.format, cli.out_dir.as_deref(), out)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
