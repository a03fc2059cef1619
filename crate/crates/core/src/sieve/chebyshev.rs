use num_traits::{FromPrimitive, Signed};
use serde::Serialize;

use super::SieveError;

/// Second-moment data for events `A_1..A_L`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChebyshevStats<T> {
    pub l: usize,
    /// `M = sum_i P(A_i)`
    pub m: T,
    /// `W(i, j) = P(A_i and A_j) - P(A_i) P(A_j)`
    pub w: Vec<Vec<T>>,
    /// `max_{i != j} |W(i, j)|`
    pub delta: T,
}

impl<T> ChebyshevStats<T>
where
    T: Clone + PartialOrd + Signed + FromPrimitive,
{
    /// `p[i] = P(A_i)` and `joint[i][j] = P(A_i and A_j)`.
    pub fn from_probabilities(p: &[T], joint: &[Vec<T>]) -> Result<Self, SieveError> {
        let l = p.len();
        if joint.len() != l || joint.iter().any(|r| r.len() != l) {
            return Err(SieveError::Shape);
        }
        let w: Vec<Vec<T>> = (0..l)
            .map(|i| {
                (0..l)
                    .map(|j| joint[i][j].clone() - p[i].clone() * p[j].clone())
                    .collect()
            })
            .collect();
        let mut delta = T::zero();
        for (i, row) in w.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if i != j && x.abs() > delta {
                    delta = x.abs();
                }
            }
        }
        let m = p.iter().cloned().fold(T::zero(), |a, b| a + b);
        Ok(Self { l, m, w, delta })
    }

    /// Uses a caller-supplied `delta`, for example an upper confidence bound
    /// when some joint probabilities are estimated.
    pub fn with_delta(mut self, delta: T) -> Self {
        self.delta = delta;
        self
    }

    /// `(L + L^2 Delta) / M^2`, an upper bound on `P(no A_i occurs)`.
    pub fn bound(&self) -> Result<T, SieveError> {
        chebyshev_bound(self)
    }
}

pub fn chebyshev_bound<T>(stats: &ChebyshevStats<T>) -> Result<T, SieveError>
where
    T: Clone + PartialOrd + Signed + FromPrimitive,
{
    if stats.m.is_zero() {
        return Err(SieveError::ZeroMass);
    }
    let l = T::from_usize(stats.l).ok_or(SieveError::Overflow)?;
    let num = l.clone() + l.clone() * l * stats.delta.clone();
    Ok(num / (stats.m.clone() * stats.m.clone()))
}
