use std::fmt;

/// Failure of a CLI run, carrying its exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Malformed flags or polytope file (exit 2).
    Input(String),
    /// A damped sum did not converge under the requested schedule (exit 3).
    NonConvergent(String),
    /// `verify` found failing checks (exit 1).
    Verification(Vec<String>),
    /// Any other computation or IO failure (exit 1).
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::NonConvergent(_) => 3,
            CliError::Verification(_) | CliError::Failed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::NonConvergent(m) => write!(f, "not converged: {m}"),
            CliError::Verification(failed) => write!(f, "verification failed: {}", failed.join(", ")),
            CliError::Failed(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<solidsum_core::Error> for CliError {
    fn from(e: solidsum_core::Error) -> Self {
        use solidsum_core::Error as E;
        match e {
            E::NonConvergent { .. } => CliError::NonConvergent(e.to_string()),
            E::Empty | E::DimensionMismatch { .. } | E::NotFullDimensional { .. } | E::InvalidRational(_) => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Failed(e.to_string()),
        }
    }
}
