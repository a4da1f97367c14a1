use hmorph_core::Error;
use thiserror::Error;

/// Everything that ends the process with a non-zero code other than a
/// failed verification.
#[derive(Debug, Error)]
pub enum CliFailure {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Solver(String),
    #[error("{0}")]
    Output(String),
}

impl CliFailure {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliFailure::Input(_) => 2,
            CliFailure::Solver(_) => 3,
            CliFailure::Output(_) => 4,
        }
    }
}

impl From<Error> for CliFailure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        if e.is_solver_failure() || matches!(e, Error::EmptySample | Error::SingularMatrix { .. }) {
            CliFailure::Solver(msg)
        } else {
            CliFailure::Input(msg)
        }
    }
}
