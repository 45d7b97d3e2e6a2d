use std::fmt;

use secrecy_core::sim::SimError;
use secrecy_core::theorems::TheoremError;

/// Exit status 1: the inputs are well formed but the computation cannot
/// proceed. Exit status 2: the inputs themselves are wrong.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Infeasible(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Infeasible(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Infeasible(m) => f.write_str(m),
        }
    }
}

impl From<TheoremError> for CliError {
    fn from(e: TheoremError) -> Self {
        match e {
            // the channel does not fit the requested mode
            TheoremError::NotDeterministic(_) | TheoremError::WrongOrder { .. } | TheoremError::Dimension(_) => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Infeasible(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Theorem(t) => t.into(),
            other => CliError::Infeasible(other.to_string()),
        }
    }
}
