use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("cannot read {}: {source}", path.display())]
    ReadConfig {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("invalid config {}: {message}", path.display())]
    Config { path: PathBuf, message: String },

    #[error("cannot write {}: {source}", path.display())]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Core(#[from] catguard::Error),

    #[error("{failed} of {total} validation checks failed")]
    Validation { failed: usize, total: usize },
}

impl CliError {
    /// 0 is success; everything here maps onto 1, 2 or 3.
    pub fn exit_code(&self) -> u8 {
        use catguard::Error as E;
        match self {
            CliError::Validation { .. } => 1,
            CliError::Usage(_) | CliError::ReadConfig { .. } | CliError::Config { .. } => 2,
            CliError::Write { .. } | CliError::Csv(_) => 3,
            CliError::Core(e) => match e {
                E::DimensionOverflow { .. }
                | E::Truncation { .. }
                | E::IntegrationDiverged { .. }
                | E::NumericalDegeneracy { .. } => 3,
                E::DegenerateState(_) | E::ShapeMismatch { .. } | E::InvalidArgument(_) => 2,
            },
        }
    }
}
