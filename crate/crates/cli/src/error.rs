use spectra_core::SpectraError;

/// Process exit codes.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_VERDICT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("numerical failure after retry: {0}")]
    RetryExhausted(SpectraError),
    #[error("{0}")]
    Core(#[from] SpectraError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => EXIT_USAGE,
            CliError::RetryExhausted(_) => EXIT_NUMERICAL,
            CliError::Core(e) => match e {
                SpectraError::WindingMismatch { .. } | SpectraError::Numerical(_) | SpectraError::SingularFactor(_) => {
                    EXIT_NUMERICAL
                }
                SpectraError::NotASpectrum(_) | SpectraError::NotPTile(_) | SpectraError::InconsistencyDetected(_) => {
                    EXIT_VERDICT_FAIL
                }
                _ => EXIT_USAGE,
            },
        }
    }
}
