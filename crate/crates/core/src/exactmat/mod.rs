//! Exact arbitrary-precision matrix arithmetic over the integers.
//!
//! [`BigMatrix`] is the exact state of a random walk. On top of it this module
//! provides characteristic polynomials (Faddeev–LeVerrier, exact over Z), the
//! virtually-unipotent test, the prime-exponent cutoff for walk-generated
//! elements and the exact m-th root / proper-power decision in SL2(Z).

mod charpoly;
mod cutoff;
mod roots;

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use charpoly::{char_poly, is_virtually_unipotent, unipotence_exponent, CharPoly};
pub use cutoff::{power_cutoff, PowerCutoff, TRACE_GAP};
pub use roots::{
    dickson, intrinsic_prime_bound, is_mth_power_sl2z, is_proper_power_sl2z, mth_power_witness,
    mth_root_sl2, proper_power_witness, PowerWitness,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactMatError {
    #[error("expected {expected} entries for a {dim}x{dim} matrix, got {got}")]
    Shape {
        dim: usize,
        expected: usize,
        got: usize,
    },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is not in SL_{dim}(Z): determinant is {det}")]
    NotSpecialLinear { dim: usize, det: BigInt },
    #[error("element is not hyperbolic (trace {trace}); roots of such elements are decided by the proper-power case split")]
    NotHyperbolic { trace: BigInt },
    #[error("exponent must be at least 1")]
    ZeroExponent,
    #[error("generating set is empty")]
    EmptyGenerators,
}

/// Square matrix with arbitrary-precision integer entries, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BigMatrix {
    n: usize,
    entries: Vec<BigInt>,
}

impl BigMatrix {
    pub fn new(n: usize, entries: Vec<BigInt>) -> Result<Self, ExactMatError> {
        if n == 0 || entries.len() != n * n {
            return Err(ExactMatError::Shape {
                dim: n,
                expected: n * n,
                got: entries.len(),
            });
        }
        Ok(Self { n, entries })
    }

    /// Builds a group element, rejecting anything with determinant other than 1.
    pub fn special_linear(n: usize, entries: Vec<BigInt>) -> Result<Self, ExactMatError> {
        let m = Self::new(n, entries)?;
        let det = m.det();
        if !det.is_one() {
            return Err(ExactMatError::NotSpecialLinear { dim: n, det });
        }
        Ok(m)
    }

    /// Convenience constructor from machine integers.
    ///
    /// Panics if `values.len() != n * n`.
    pub fn from_i64(n: usize, values: &[i64]) -> Self {
        assert_eq!(values.len(), n * n, "wrong number of entries");
        Self {
            n,
            entries: values.iter().map(|&v| BigInt::from(v)).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, BigInt::one())
    }

    pub fn scalar(n: usize, s: BigInt) -> Self {
        let mut entries = vec![BigInt::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = s.clone();
        }
        Self { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.n + j]
    }

    pub fn trace(&self) -> BigInt {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn is_identity(&self) -> bool {
        self.is_scalar_multiple(&BigInt::one())
    }

    /// True when the matrix equals `s * I`.
    pub fn is_scalar_multiple(&self, s: &BigInt) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| {
                let e = self.get(i, j);
                if i == j {
                    e == s
                } else {
                    e.is_zero()
                }
            })
        })
    }

    pub fn neg(&self) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|e| -e).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|e| e * s).collect(),
        }
    }

    /// Exact entrywise division; `None` if some entry is not divisible.
    pub fn div_exact(&self, d: &BigInt) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        let mut entries = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            let (q, r) = e.div_rem(d);
            if !r.is_zero() {
                return None;
            }
            entries.push(q);
        }
        Some(Self { n: self.n, entries })
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch in product");
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = BigInt::zero();
                for k in 0..n {
                    acc += &self.entries[i * n + k] * &other.entries[k * n + j];
                }
                entries.push(acc);
            }
        }
        Self { n, entries }
    }

    /// Square-and-multiply power.
    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }

    /// Fraction-free (Bareiss) determinant.
    pub fn det(&self) -> BigInt {
        let n = self.n;
        if n == 1 {
            return self.entries[0].clone();
        }
        if n == 2 {
            return &self.entries[0] * &self.entries[3] - &self.entries[1] * &self.entries[2];
        }
        let mut a = self.entries.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&r| !a[r * n + k].is_zero()) else {
                    return BigInt::zero();
                };
                for c in 0..n {
                    a.swap(k * n + c, swap * n + c);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                    a[i * n + j] = v / &prev;
                }
            }
            prev = a[k * n + k].clone();
        }
        sign * &a[n * n - 1]
    }

    /// Adjugate (classical adjoint), so that `m * adj(m) = det(m) * I`.
    pub fn adjugate(&self) -> Self {
        charpoly::faddeev_leverrier(self).1
    }

    /// Inverse of a determinant-one matrix; `None` if `det != 1`.
    pub fn inverse_sl(&self) -> Option<Self> {
        if !self.det().is_one() {
            return None;
        }
        Some(self.adjugate())
    }

    /// Squared Frobenius norm, an exact integer.
    pub fn frobenius_norm_sq(&self) -> BigInt {
        self.entries.iter().map(|e| e * e).sum()
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.entries
            .iter()
            .map(|e| e.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

impl Mul for &BigMatrix {
    type Output = BigMatrix;

    fn mul(self, rhs: &BigMatrix) -> BigMatrix {
        self.mul_ref(rhs)
    }
}

impl fmt::Debug for BigMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for BigMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// The standard generators of SL2(Z).
pub mod presets {
    use super::BigMatrix;

    /// `T = [[1,1],[0,1]]`
    pub fn t() -> BigMatrix {
        BigMatrix::from_i64(2, &[1, 1, 0, 1])
    }

    pub fn t_inv() -> BigMatrix {
        BigMatrix::from_i64(2, &[1, -1, 0, 1])
    }

    /// `S = [[0,-1],[1,0]]`, of order 4.
    pub fn s() -> BigMatrix {
        BigMatrix::from_i64(2, &[0, -1, 1, 0])
    }

    pub fn s_inv() -> BigMatrix {
        BigMatrix::from_i64(2, &[0, 1, -1, 0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        let m = BigMatrix::from_i64(3, &[2, -1, 0, 4, 3, 1, -2, 5, 7]);
        // 2*(21-5) - (-1)*(28+2) + 0 = 32 + 30
        assert_eq!(m.det(), BigInt::from(62));
        let z = BigMatrix::from_i64(3, &[0, 1, 2, 0, 3, 4, 0, 5, 6]);
        assert!(z.det().is_zero());
        let p = BigMatrix::from_i64(3, &[0, 1, 0, 1, 0, 0, 0, 0, 1]);
        assert_eq!(p.det(), BigInt::from(-1));
    }

    #[test]
    fn adjugate_gives_inverse() {
        let m = BigMatrix::from_i64(3, &[2, -1, 0, 4, 3, 1, -2, 5, 7]);
        let prod = &m * &m.adjugate();
        assert!(prod.is_scalar_multiple(&m.det()));
        let s = presets::s();
        assert!((&s * &s.inverse_sl().unwrap()).is_identity());
        assert_eq!(BigMatrix::from_i64(2, &[2, 0, 0, 1]).inverse_sl(), None);
    }

    #[test]
    fn special_linear_rejects_bad_det() {
        let err = BigMatrix::special_linear(2, vec![2.into(), 0.into(), 0.into(), 1.into()]);
        assert!(matches!(err, Err(ExactMatError::NotSpecialLinear { .. })));
        assert!(BigMatrix::new(2, vec![BigInt::one()]).is_err());
    }

    #[test]
    fn pow_matches_repeated_product() {
        let m = BigMatrix::from_i64(2, &[2, 1, 1, 1]);
        let mut acc = BigMatrix::identity(2);
        for e in 0..12 {
            assert_eq!(m.pow(e), acc);
            acc = &acc * &m;
        }
    }
}
