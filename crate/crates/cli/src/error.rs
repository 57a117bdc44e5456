use thiserror::Error;

/// Process exit codes.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) | CliError::Io(_) => EXIT_NUMERICAL,
        }
    }

    /// Classifies a library error raised while handling `field`.
    pub fn from_core(field: &str, e: fockflux::Error) -> Self {
        use fockflux::Error as E;
        match e {
            E::AmplitudeOverflow { .. } | E::NonFinite { .. } | E::Pole { .. } | E::PoleProximity { .. } => {
                CliError::Numerical(format!("{field}: {e}"))
            }
            _ => CliError::Config(format!("{field}: {e}")),
        }
    }
}
