use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("solver {solver} does not support `{command}`")]
    Unsupported { solver: &'static str, command: &'static str },
    #[error("{failed} self-check(s) failed")]
    Selfcheck { failed: usize },
    #[error(transparent)]
    Core(#[from] kerr_core::Error),
}

impl CliError {
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Unsupported { .. } => "unsupported",
            CliError::Selfcheck { .. } => "selfcheck",
            CliError::Core(e) => e.category(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Unsupported { .. } => 2,
            _ => 1,
        }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }
}

macro_rules! core_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Core(e.into())
            }
        }
    )*};
}

core_from!(
    kerr_core::model::ModelError,
    kerr_core::semiclassical::SemiclassicalError,
    kerr_core::lindblad::LindbladError,
    kerr_core::exact_steady::ExactError,
    kerr_core::chain_map::ChainError,
    kerr_core::tebd::TebdError,
    kerr_core::spectra::SpectraError,
    kerr_core::wigner::WignerError,
    kerr_core::linalg::LinalgError
);

pub type Result<T> = std::result::Result<T, CliError>;
