//! Prime families in arithmetic progressions, the second-moment estimator,
//! and the certification report that measures the sieve hypotheses on a
//! finite family of primes.
//!
//! For a family `p_2, p_3, ...` and an exponent `m`, event `A_i` is "the
//! walk's shadow modulo `p_i` is not an `m`-th power in the quotient". The
//! walk's exact state can only be an `m`-th power when no `A_i` occurs, so
//! `(L + L^2 Delta) / M^2` bounds `P(w_k is an m-th power)` from above.

mod certify;
mod chebyshev;
mod primes;

use thiserror::Error;

use crate::modgroup::ModGroupError;
use crate::spectral::SpectralError;
use crate::walker::WalkError;

pub use certify::{
    gls_certify, gls_certify_with, ChebyshevPoint, Comparison, Condition, CurvePoint,
    EmpiricalPoint, PairData, PairMethod, PrimeData, SieveConfig, SieveReport, Status,
};
pub use chebyshev::{chebyshev_bound, ChebyshevStats};
pub use primes::{
    ap_for_lie_type, default_family, density_check, density_threshold, primes_in_ap, APPrimeFamily,
    DensityCheck, FIRST_INDEX,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SieveError {
    #[error("progression parameters a={a}, b={b} must be positive and coprime")]
    NotCoprime { a: u64, b: u64 },
    #[error("search limit {0} is below 2")]
    LimitTooSmall(u64),
    #[error("excluded modulus must be positive")]
    ZeroExcludedModulus,
    #[error("lie-type parameters must be at least 1 (d={d}, l={l}, m={m})")]
    LieParameter { d: u64, l: u64, m: u64 },
    #[error("arithmetic overflow")]
    Overflow,
    #[error("event probabilities sum to zero")]
    ZeroMass,
    #[error("probability matrix shape does not match the event count")]
    Shape,
    #[error("prime family is empty")]
    EmptyFamily,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    ModGroup(#[from] ModGroupError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Walk(#[from] WalkError),
}
