use gls_core::exactmat::ExactMatError;
use gls_core::modgroup::ModGroupError;
use gls_core::sieve::SieveError;
use gls_core::spectral::SpectralError;
use gls_core::walker::WalkError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("resource budget exceeded: {0}")]
    Budget(String),
    #[error("{0}")]
    Compute(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Budget(_) => exit::BUDGET,
            CliError::Compute(_) | CliError::Io(_) => exit::FAILURE,
        }
    }
}

pub mod exit {
    pub const OK: i32 = 0;
    /// Computation error or failed sieve conditions.
    pub const FAILURE: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const BOUND_VIOLATED: i32 = 3;
    pub const BUDGET: i32 = 4;
}

impl From<ModGroupError> for CliError {
    fn from(e: ModGroupError) -> Self {
        match e {
            ModGroupError::SizeLimit { .. } | ModGroupError::KeyOverflow { .. } => {
                CliError::Budget(e.to_string())
            }
            ModGroupError::ModulusTooSmall(_)
            | ModGroupError::NotPrime(_)
            | ModGroupError::Shape { .. }
            | ModGroupError::Mismatch
            | ModGroupError::NotInvertible { .. }
            | ModGroupError::BadPrimePair(..)
            | ModGroupError::BadFactorization(_) => CliError::Config(e.to_string()),
            _ => CliError::Compute(e.to_string()),
        }
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::EmptyGenerators
            | SpectralError::NotSymmetric
            | SpectralError::GeneratorNotInGroup { .. } => CliError::Config(e.to_string()),
            _ => CliError::Compute(e.to_string()),
        }
    }
}

impl From<ExactMatError> for CliError {
    fn from(e: ExactMatError) -> Self {
        CliError::Compute(e.to_string())
    }
}

impl From<WalkError> for CliError {
    fn from(e: WalkError) -> Self {
        match e {
            WalkError::ModGroup(inner) => inner.into(),
            WalkError::ExactMat(inner) => inner.into(),
            WalkError::NotAdmissible(_) | WalkError::NoSamples | WalkError::UnknownEvent(_) => {
                CliError::Config(e.to_string())
            }
            WalkError::TooFewPoints(_) => CliError::Compute(e.to_string()),
        }
    }
}

impl From<SieveError> for CliError {
    fn from(e: SieveError) -> Self {
        match e {
            SieveError::ModGroup(inner) => inner.into(),
            SieveError::Spectral(inner) => inner.into(),
            SieveError::Walk(inner) => inner.into(),
            SieveError::ZeroMass | SieveError::Shape => CliError::Compute(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}
