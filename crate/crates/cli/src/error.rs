use stcq_core::Error as CoreError;

/// Process exit status for validation failures.
pub const EXIT_VALIDATION: u8 = 2;
/// Process exit status for numerical or output failures.
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug)]
pub enum CliError {
    /// The configuration could not be read or parsed.
    Config(String),
    Validation {
        section: &'static str,
        error: CoreError,
    },
    MissingSection(&'static str),
    Stage {
        stage: &'static str,
        error: CoreError,
    },
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Validation { .. } | CliError::MissingSection(_) => EXIT_VALIDATION,
            CliError::Stage { error, .. } if error.is_validation() => EXIT_VALIDATION,
            CliError::Stage { .. } | CliError::Io(_) => EXIT_NUMERICAL,
        }
    }

    pub fn stage(stage: &'static str) -> impl FnOnce(CoreError) -> CliError {
        move |error| CliError::Stage { stage, error }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "configuration: {e}"),
            CliError::Validation { section, error } => write!(f, "invalid `{section}` section: {error}"),
            CliError::MissingSection(s) => write!(f, "configuration lacks the `{s}` section"),
            CliError::Stage { stage, error } => write!(f, "stage `{stage}` failed: {error}"),
            CliError::Io(e) => write!(f, "output: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
