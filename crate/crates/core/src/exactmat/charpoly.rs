use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::BigMatrix;

/// Monic characteristic polynomial `det(xI - M)` with coefficients in
/// ascending degree order (`coeffs[n] == 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharPoly {
    coeffs: Vec<BigInt>,
}

impl CharPoly {
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        assert!(
            coeffs.last().is_some_and(One::is_one),
            "characteristic polynomials are monic"
        );
        Self { coeffs }
    }

    /// Horner evaluation at a square matrix.
    pub fn eval_matrix(&self, m: &BigMatrix) -> BigMatrix {
        let n = m.dim();
        let mut acc = BigMatrix::scalar(n, BigInt::zero());
        for c in self.coeffs.iter().rev() {
            acc = (&acc * m).add(&BigMatrix::scalar(n, c.clone()));
        }
        acc
    }

    /// True when the polynomial is `(x - 1)^n`.
    pub fn is_unipotent(&self) -> bool {
        let n = self.degree();
        let mut binom = BigInt::one();
        for k in 0..=n {
            // coefficient of x^k in (x-1)^n is C(n,k) (-1)^(n-k)
            let expected = if (n - k).is_multiple_of(2) {
                binom.clone()
            } else {
                -binom.clone()
            };
            if self.coeffs[k] != expected {
                return false;
            }
            binom = binom * BigInt::from(n - k) / BigInt::from(k + 1);
        }
        true
    }
}

/// Faddeev–LeVerrier recursion. Returns the characteristic polynomial and the
/// adjugate; every division by `k` is exact over Z.
pub(super) fn faddeev_leverrier(a: &BigMatrix) -> (CharPoly, BigMatrix) {
    let n = a.dim();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut m_k = BigMatrix::identity(n);
    for k in 1..=n {
        if k > 1 {
            m_k = (a * &m_k).add(&BigMatrix::scalar(n, coeffs[n - k + 1].clone()));
        }
        let am = a * &m_k;
        let tr = am.trace();
        let (q, r) = tr.div_rem(&BigInt::from(k));
        debug_assert!(r.is_zero(), "Faddeev-LeVerrier division must be exact");
        coeffs[n - k] = -q;
    }
    let adj = if n % 2 == 1 { m_k } else { m_k.neg() };
    (CharPoly { coeffs }, adj)
}

pub fn char_poly(m: &BigMatrix) -> CharPoly {
    faddeev_leverrier(m).0
}

fn totient(mut d: u64) -> u64 {
    let mut result = d;
    let mut p = 2;
    while p * p <= d {
        if d.is_multiple_of(p) {
            while d.is_multiple_of(p) {
                d /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if d > 1 {
        result -= result / d;
    }
    result
}

/// Least common multiple of all `d` with `phi(d) <= n`: the exponent that
/// turns every virtually unipotent element of dimension `n` into a unipotent
/// one.
pub fn unipotence_exponent(n: usize) -> u64 {
    let n = n as u64;
    // phi(d) >= sqrt(d / 2), so d <= 2 n^2 covers every candidate
    (1..=2 * n * n + 2)
        .filter(|&d| totient(d) <= n)
        .fold(1u64, |acc, d| acc.lcm(&d))
}

/// Remainder of `a` modulo the monic polynomial `f` (ascending coefficients).
fn poly_rem(mut a: Vec<BigInt>, f: &[BigInt]) -> Vec<BigInt> {
    let df = f.len() - 1;
    while a.len() > df {
        let lead = a.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let shift = a.len() - df;
        for (i, c) in f[..df].iter().enumerate() {
            a[shift + i] -= &lead * c;
        }
    }
    a
}

fn poly_mulmod(a: &[BigInt], b: &[BigInt], f: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    poly_rem(out, f)
}

/// All eigenvalues of `m` are roots of unity.
///
/// Equivalent to `char_poly(m)` dividing `(x^L - 1)^n` with
/// `L = unipotence_exponent(n)`; checked by exact modular exponentiation in
/// `Z[x] / (char_poly)`.
pub fn is_virtually_unipotent(m: &BigMatrix) -> bool {
    let n = m.dim();
    let f = char_poly(m);
    let f = f.coeffs();
    let exponent = unipotence_exponent(n);

    // x^L mod f by square-and-multiply
    let mut base = poly_rem(vec![BigInt::zero(), BigInt::one()], f);
    let mut acc = poly_rem(vec![BigInt::one()], f);
    let mut e = exponent;
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &base, f);
        }
        e >>= 1;
        if e > 0 {
            base = poly_mulmod(&base, &base, f);
        }
    }
    if acc.is_empty() {
        acc.push(BigInt::zero());
    }
    acc[0] -= BigInt::one();
    let r = poly_rem(acc, f);

    let mut pow = vec![BigInt::one()];
    for _ in 0..n {
        pow = poly_mulmod(&pow, &r, f);
    }
    pow.iter().all(Zero::is_zero)
}
