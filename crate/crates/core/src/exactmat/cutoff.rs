use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use super::{BigMatrix, ExactMatError};
use crate::walker::GenSet;

/// Smallest dominant-eigenvalue modulus of a hyperbolic element of SL2(Z),
/// `(3 + sqrt 5) / 2`, attained at trace 3.
pub const TRACE_GAP: f64 = 2.618_033_988_749_895;

/// Constants bounding the prime exponent of a walk-generated proper power.
///
/// If `w_k = g^m` is not virtually unipotent then
/// `TRACE_GAP^m <= |lambda_max(w_k)| <= ||w_k|| <= c^k`, so `m <= s k`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PowerCutoff {
    /// Upper bound on the operator norm of every generator (max Frobenius norm).
    pub gen_norm_bound: f64,
    pub trace_gap: f64,
    /// `log c / log trace_gap`
    pub s: f64,
}

impl PowerCutoff {
    pub fn for_generators(gens: &[BigMatrix]) -> Result<Self, ExactMatError> {
        let max_sq = gens
            .iter()
            .map(BigMatrix::frobenius_norm_sq)
            .max()
            .ok_or(ExactMatError::EmptyGenerators)?;
        let c = max_sq.to_f64().unwrap_or(f64::INFINITY).sqrt();
        // Walks over central generators only ever visit +-I.
        let central = gens
            .iter()
            .all(|g| g.is_scalar_multiple(&BigInt::one()) || g.is_scalar_multiple(&-BigInt::one()));
        let s = if central {
            0.0
        } else {
            c.ln() / TRACE_GAP.ln()
        };
        Ok(Self {
            gen_norm_bound: c,
            trace_gap: TRACE_GAP,
            s,
        })
    }

    /// `floor(s k)`, nudged up by a hair so floating rounding never loses an
    /// integral boundary.
    pub fn prime_bound(&self, k: u64) -> u64 {
        if self.s <= 0.0 {
            return 0;
        }
        (self.s * k as f64 + 1e-9).floor() as u64
    }
}

pub fn power_cutoff(sigma: &GenSet, k: u64) -> Result<u64, ExactMatError> {
    Ok(PowerCutoff::for_generators(sigma.generators())?.prime_bound(k))
}
