use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, bad problem file or a parameter outside its constraints.
    #[error("{0}")]
    Config(String),

    /// A numerical routine failed; `module` names the library module.
    #[error("[{module}] {source}")]
    Numeric {
        module: &'static str,
        #[source]
        source: delayheat::Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric { .. } => 1,
            CliError::Io { .. } => 3,
        }
    }

    pub(crate) fn numeric(module: &'static str) -> impl FnOnce(delayheat::Error) -> Self {
        move |source| CliError::Numeric { module, source }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}
