//! Command-line front end: configuration, subcommands and CSV output.

pub mod commands;
pub mod config;
pub mod output;
pub mod validate;

pub use config::{parse_config, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error at line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("unknown configuration keys: {}", .0.join(", "))]
    UnknownKeys(Vec<String>),
    #[error("bad argument: {0}")]
    Argument(String),
    #[error(transparent)]
    Model(#[from] srbm_green::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Parses comma-separated reals, requiring exactly `n` of them.
pub fn parse_reals(s: &str, n: usize) -> Result<Vec<f64>, CliError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Argument(format!("`{t}` is not a number"))))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(CliError::Argument(format!("expected {n} comma-separated values, got `{s}`")));
    }
    Ok(v)
}
