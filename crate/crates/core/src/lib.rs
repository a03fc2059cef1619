//! Group large sieve toolkit for finitely generated subgroups of SL2(Z).
//!
//! The crate is organized around five layers:
//!
//! * [`exactmat`]: exact big-integer matrices, characteristic polynomials and
//!   the proper-power decision procedure in SL2(Z).
//! * [`modgroup`]: finite quotients modulo `q`, enumeration, power censuses,
//!   CRT checks and brute-force torus analysis.
//! * [`spectral`]: Cayley graphs of finite quotients, their normalized
//!   adjacency spectra and exact walk distributions.
//! * [`walker`]: seeded random walks with exact state and modular shadows,
//!   Monte Carlo event estimation and exponential-decay fitting.
//! * [`sieve`]: primes in arithmetic progressions, the second-moment
//!   (Chebyshev) estimator and the end-to-end sieve certification report.

mod arith;
pub mod exactmat;
pub mod modgroup;
pub mod sieve;
pub mod spectral;
pub mod walker;

pub use exactmat::{BigMatrix, CharPoly, PowerCutoff, PowerWitness};
pub use modgroup::{ModMatrix, QuotientGroup, Reduction, Subgroup};
pub use spectral::{CayleyGraph, SpectralReport};
pub use walker::{DecayEstimate, Event, GenSet, WalkState};
