use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flag, config value or input file content.
    #[error("invalid parameter: {0}")]
    Invalid(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A computation failed for valid inputs (e.g. quadrature did not
    /// converge).
    #[error("{0}")]
    Numeric(stochcell::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Numeric(_) => 1,
        }
    }
}

impl From<stochcell::Error> for CliError {
    fn from(e: stochcell::Error) -> Self {
        use stochcell::Error as E;
        match e {
            E::InvalidParam(_) | E::Divergence { .. } | E::Contract(_) | E::Parse { .. } => {
                CliError::Invalid(e.to_string())
            }
            other => CliError::Numeric(other),
        }
    }
}
