//! Finite quotients of integer matrix groups.
//!
//! [`ModMatrix`] is a matrix over `Z/qZ`; [`QuotientGroup`] is a fully
//! materialized finite group of such matrices (linear, or projective modulo
//! scalars) with an exact index lookup. On top of these sit power censuses
//! over groups and cosets, CRT product checks, low-order coset
//! representatives and a brute-force torus analysis of twisted conjugation.

mod census;
mod crt;
mod group;
mod subgroup;
mod torus;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::arith::mod_inv;
use crate::exactmat::BigMatrix;

pub use census::{coset_low_order_rep, coset_power_census, power_census, power_image_mask};
pub use crt::{crt_injective, crt_order_check, CrtCheck};
pub use group::{QuotientGroup, Reduction, DEFAULT_BUDGET};
pub use subgroup::{lie_pair, Subgroup};
pub use torus::{
    certify_coset, maximal_tori, torus_analysis, torus_analysis_for, CosetCertificate,
    LSubgroupCheck, TorusReport,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModGroupError {
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("expected {expected} entries, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("dimension or modulus mismatch")]
    Mismatch,
    #[error("matrix is not invertible modulo {q}")]
    NotInvertible { q: u64 },
    #[error("group would exceed the element budget of {budget}")]
    SizeLimit { budget: usize },
    #[error("modulus {q} is too large to encode {n}x{n} matrices as 128-bit keys")]
    KeyOverflow { n: usize, q: u64 },
    #[error("element is not in the group")]
    NotInGroup,
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("moduli {0} and {1} must be distinct odd primes")]
    BadPrimePair(u64, u64),
    #[error("moduli do not form a coprime factorization of {0}")]
    BadFactorization(u64),
    #[error("conjugating element does not normalize the subgroup")]
    NotNormalizing,
    #[error("conjugation has order {actual} on the subgroup, not {claimed}")]
    AutomorphismOrder { claimed: u64, actual: u64 },
    #[error("no element with an abelian semisimple centralizer stable under the automorphism")]
    NoRegularElement,
    #[error("set is not a {0}-stable maximal abelian subgroup")]
    NotATorus(&'static str),
}

/// `n x n` matrix over `Z/qZ`, row-major residues in `[0, q)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModMatrix {
    n: usize,
    q: u64,
    entries: Vec<u64>,
}

pub(crate) fn matmul_into(n: usize, q: u64, a: &[u64], b: &[u64], out: &mut [u64]) {
    let qq = q as u128;
    for i in 0..n {
        for j in 0..n {
            let mut acc: u128 = 0;
            for k in 0..n {
                acc += a[i * n + k] as u128 * b[k * n + j] as u128;
            }
            out[i * n + j] = (acc % qq) as u64;
        }
    }
}

pub(crate) fn matpow(n: usize, q: u64, a: &[u64], mut e: u64) -> Vec<u64> {
    let mut acc = vec![0u64; n * n];
    for i in 0..n {
        acc[i * n + i] = 1 % q;
    }
    let mut base = a.to_vec();
    let mut tmp = vec![0u64; n * n];
    while e > 0 {
        if e & 1 == 1 {
            matmul_into(n, q, &acc, &base, &mut tmp);
            std::mem::swap(&mut acc, &mut tmp);
        }
        e >>= 1;
        if e > 0 {
            matmul_into(n, q, &base, &base, &mut tmp);
            std::mem::swap(&mut base, &mut tmp);
        }
    }
    acc
}

impl ModMatrix {
    /// Entries are reduced into `[0, q)`.
    pub fn new(n: usize, q: u64, entries: Vec<u64>) -> Result<Self, ModGroupError> {
        if q < 2 {
            return Err(ModGroupError::ModulusTooSmall(q));
        }
        if n == 0 || entries.len() != n * n {
            return Err(ModGroupError::Shape {
                expected: n * n,
                got: entries.len(),
            });
        }
        Ok(Self {
            n,
            q,
            entries: entries.into_iter().map(|e| e % q).collect(),
        })
    }

    /// Panics on a shape mismatch or `q < 2`.
    pub fn from_i64(n: usize, q: u64, values: &[i64]) -> Self {
        assert!(q >= 2 && values.len() == n * n);
        Self {
            n,
            q,
            entries: values
                .iter()
                .map(|&v| v.rem_euclid(q as i64) as u64)
                .collect(),
        }
    }

    pub fn identity(n: usize, q: u64) -> Self {
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1 % q;
        }
        Self { n, q, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n + j]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n, self.q)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert!(
            self.n == other.n && self.q == other.q,
            "mismatched operands"
        );
        let mut out = vec![0; self.n * self.n];
        matmul_into(self.n, self.q, &self.entries, &other.entries, &mut out);
        Self {
            n: self.n,
            q: self.q,
            entries: out,
        }
    }

    pub fn pow(&self, e: u64) -> Self {
        Self {
            n: self.n,
            q: self.q,
            entries: matpow(self.n, self.q, &self.entries, e),
        }
    }

    pub fn scale(&self, s: u64) -> Self {
        let q = self.q as u128;
        Self {
            n: self.n,
            q: self.q,
            entries: self
                .entries
                .iter()
                .map(|&e| (e as u128 * s as u128 % q) as u64)
                .collect(),
        }
    }

    fn lift(&self) -> BigMatrix {
        BigMatrix::new(
            self.n,
            self.entries.iter().map(|&e| BigInt::from(e)).collect(),
        )
        .expect("shape is valid")
    }

    pub fn det(&self) -> u64 {
        let q = self.q;
        if self.n == 2 {
            let e = &self.entries;
            let ad = e[0] as u128 * e[3] as u128 % q as u128;
            let bc = e[1] as u128 * e[2] as u128 % q as u128;
            return ((ad + q as u128 - bc) % q as u128) as u64;
        }
        self.lift()
            .det()
            .mod_floor(&BigInt::from(q))
            .to_u64()
            .expect("residue fits")
    }

    pub fn adjugate(&self) -> Self {
        let q = self.q;
        if self.n == 2 {
            let e = &self.entries;
            return Self {
                n: 2,
                q,
                entries: vec![e[3], (q - e[1]) % q, (q - e[2]) % q, e[0]],
            };
        }
        reduce(&self.lift().adjugate(), q)
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = mod_inv(self.det(), self.q)?;
        Some(self.adjugate().scale(d))
    }

    /// Residues modulo each factor of a coprime factorization of `q`.
    pub fn crt_split(&self, moduli: &[u64]) -> Result<Vec<ModMatrix>, ModGroupError> {
        check_factorization(self.q, moduli)?;
        Ok(moduli
            .iter()
            .map(|&m| Self {
                n: self.n,
                q: m,
                entries: self.entries.iter().map(|&e| e % m).collect(),
            })
            .collect())
    }

    /// Inverse of [`ModMatrix::crt_split`].
    pub fn crt_combine(parts: &[ModMatrix]) -> Result<ModMatrix, ModGroupError> {
        let first = parts.first().ok_or(ModGroupError::Mismatch)?;
        let n = first.n;
        if parts.iter().any(|p| p.n != n) {
            return Err(ModGroupError::Mismatch);
        }
        let moduli: Vec<u64> = parts.iter().map(|p| p.q).collect();
        let q = moduli
            .iter()
            .try_fold(1u64, |acc, &m| acc.checked_mul(m))
            .ok_or(ModGroupError::BadFactorization(0))?;
        check_factorization(q, &moduli)?;
        let mut entries = vec![0u64; n * n];
        for part in parts {
            let cofactor = q / part.q;
            let inv = mod_inv(cofactor % part.q, part.q).expect("coprime factors");
            let basis = cofactor as u128 * inv as u128 % q as u128;
            for (acc, &r) in entries.iter_mut().zip(&part.entries) {
                *acc = ((*acc as u128 + basis * r as u128) % q as u128) as u64;
            }
        }
        Ok(Self { n, q, entries })
    }
}

fn check_factorization(q: u64, moduli: &[u64]) -> Result<(), ModGroupError> {
    let bad = || ModGroupError::BadFactorization(q);
    let mut prod = 1u64;
    for (i, &a) in moduli.iter().enumerate() {
        if a < 2 {
            return Err(bad());
        }
        for &b in &moduli[i + 1..] {
            if a.gcd(&b) != 1 {
                return Err(bad());
            }
        }
        prod = prod.checked_mul(a).ok_or_else(bad)?;
    }
    if prod != q {
        return Err(bad());
    }
    Ok(())
}

/// Entrywise residue of an integer matrix.
pub fn reduce(m: &BigMatrix, q: u64) -> ModMatrix {
    assert!(q >= 2, "modulus must be at least 2");
    let qb = BigInt::from(q);
    ModMatrix {
        n: m.dim(),
        q,
        entries: m
            .entries()
            .iter()
            .map(|e| e.mod_floor(&qb).to_u64().expect("residue fits"))
            .collect(),
    }
}
