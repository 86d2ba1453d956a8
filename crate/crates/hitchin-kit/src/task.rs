//! Task file schema and option resolution.

use serde::Deserialize;
use std::fmt;
use std::path::PathBuf;

/// Schema version this binary understands; bump together with
/// `docs/schemas.md`.
pub const SCHEMA_VERSION: &str = "1";

/// Environment variable overriding the built-in default tolerance.
pub const TOL_ENV_VAR: &str = "HITCHIN_KIT_TOL";

pub const DEFAULT_SEED: u64 = 0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Formulas,
    Higgs,
    Spectral,
    Parabolic,
    Wild,
    Quiver,
    Branes,
    Isogeny,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Command::Formulas => "formulas",
            Command::Higgs => "higgs",
            Command::Spectral => "spectral",
            Command::Parabolic => "parabolic",
            Command::Wild => "wild",
            Command::Quiver => "quiver",
            Command::Branes => "branes",
            Command::Isogeny => "isogeny",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskFile {
    pub version: String,
    pub command: Command,
    pub payload: serde_json::Value,
    #[serde(default)]
    pub options: TaskOptions,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskOptions {
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
}

/// Knobs a handler may consult; everything already resolved to a value.
#[derive(Clone, Copy, Debug)]
pub struct Settings {
    pub tolerance: f64,
    pub seed: u64,
}

/// Precedence: command line, then the task file, then the environment
/// variable (tolerance only), then the library default.
pub fn resolve_settings(
    cli_tol: Option<f64>,
    cli_seed: Option<u64>,
    options: &TaskOptions,
) -> Settings {
    let env_tol = std::env::var(TOL_ENV_VAR)
        .ok()
        .and_then(|s| s.parse::<f64>().ok())
        .filter(|t| t.is_finite() && *t > 0.0);
    let tolerance = cli_tol
        .or(options.tolerance)
        .or(env_tol)
        .unwrap_or(hitchin_core::exact::numeric::DEFAULT_TOL);
    let seed = cli_seed.or(options.seed).unwrap_or(DEFAULT_SEED);
    Settings { tolerance, seed }
}
