//! File formats and the batch command line for `valkit-core`.

pub mod commands;
pub mod output;
pub mod schema;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use commands::run;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Subcommand)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Intrinsic volumes V_0..V_n of a polytope.
    Intrinsic,
    /// Kubota projection estimates with a convergence series.
    Crofton,
    /// Exact Radon inversion check on RP^n.
    RadonCheck,
    /// Fourier transform of a planar 1-homogeneous density.
    Fourier2d,
    /// Euler integral of a constructible function.
    Euler,
    /// Least-squares fit of a valuation against V_0..V_n.
    HadwigerFit,
    /// Mixed volume of n polytopes in R^n.
    MixedVolume,
}

#[derive(Clone, Debug, Parser, Serialize)]
#[command(name = "valkit", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Input file; repeat for commands taking several bodies.
    #[arg(long, global = true)]
    pub input: Vec<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, global = true, default_value_t = 1)]
    pub shards: usize,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub k: Option<usize>,
    #[arg(long, global = true)]
    pub i: Option<usize>,
    #[arg(long, global = true, default_value_t = 100)]
    pub points: usize,
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tolerance: f64,
}

/// Failure classes, mapped to process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 1,
        }
    }
}

impl From<valkit_core::Error> for CliError {
    fn from(e: valkit_core::Error) -> Self {
        use valkit_core::Error as E;
        match e {
            E::SingularSystem | E::IllConditioned(_) | E::NonGeneric => CliError::Numeric(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

/// Rendered output of a command; `breach` is set when a tolerance check failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rendered {
    pub text: String,
    pub breach: Option<String>,
}

pub(crate) fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: schema error: {e}", path.display())))
}
