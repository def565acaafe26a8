use std::fmt;
use std::process::ExitCode;

use semiclassical_core::Error;

/// A failed run, mapped onto the exit-code contract.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Verification(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Failure::Io(_) => 1,
            Failure::Config(_) => 2,
            Failure::Verification(_) => 3,
            Failure::Numerical(_) => 4,
        })
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Verification(m) => write!(f, "verification failed: {m}"),
            Failure::Numerical(m) => write!(f, "numerical accuracy failure: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Singular(_) => Failure::Config(e.to_string()),
            Error::Accuracy(_) | Error::Integration(_) | Error::ImaginaryResidue(_) => {
                Failure::Numerical(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}
