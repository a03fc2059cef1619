//! Exact m-th roots and the proper-power case split in SL2(Z).
//!
//! Traces of powers in SL2 are governed by the Dickson polynomials
//! `D_m(u)`, `D_m(mu + 1/mu) = mu^m + mu^-m`. A hyperbolic `a` has an m-th
//! root `B` only if `D_m(tr B) = tr a`, and then Cayley–Hamilton pins `B`
//! down: `B^m = c_{m-1}(u) B - c_{m-2}(u) I` with `c_0 = 1`, `c_1 = u`,
//! `c_{j+1} = u c_j - c_{j-1}`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::cutoff::TRACE_GAP;
use super::{BigMatrix, ExactMatError};

/// A verified decomposition `root^exponent == a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerWitness {
    pub root: BigMatrix,
    pub exponent: u64,
}

impl PowerWitness {
    pub fn verify(&self, a: &BigMatrix) -> bool {
        self.exponent >= 1 && self.root.pow(self.exponent) == *a
    }
}

/// `D_m(u)` via `D_0 = 2`, `D_1 = u`, `D_{j+1} = u D_j - D_{j-1}`.
pub fn dickson(m: u64, u: &BigInt) -> BigInt {
    let mut prev = BigInt::from(2);
    if m == 0 {
        return prev;
    }
    let mut cur = u.clone();
    for _ in 1..m {
        let next = u * &cur - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `(c_{m-2}(u), c_{m-1}(u))` with `c_{-1} = 0`, `c_0 = 1`.
fn chebyshev_pair(m: u64, u: &BigInt) -> (BigInt, BigInt) {
    let mut prev = BigInt::zero();
    let mut cur = BigInt::one();
    for _ in 1..m {
        let next = u * &cur - &prev;
        prev = cur;
        cur = next;
    }
    (prev, cur)
}

fn check_sl2(a: &BigMatrix) -> Result<(), ExactMatError> {
    if a.dim() != 2 {
        return Err(ExactMatError::DimensionMismatch(a.dim(), 2));
    }
    let det = a.det();
    if !det.is_one() {
        return Err(ExactMatError::NotSpecialLinear { dim: 2, det });
    }
    Ok(())
}

/// Solves `D_m(u) = target` for an integer `u >= 3` by bisection on the
/// monotone branch. `target > 2`.
fn solve_dickson(m: u64, target: &BigInt) -> Option<BigInt> {
    let m32 = u32::try_from(m).ok()?;
    let mut lo = BigInt::from(3);
    let mut hi = target.nth_root(m32) + BigInt::one();
    while lo <= hi {
        let mid: BigInt = (&lo + &hi) >> 1;
        match dickson(m, &mid).cmp(target) {
            std::cmp::Ordering::Equal => return Some(mid),
            std::cmp::Ordering::Less => lo = mid + BigInt::one(),
            std::cmp::Ordering::Greater => hi = mid - BigInt::one(),
        }
    }
    None
}

/// m-th root of a hyperbolic (`|tr a| > 2`) element of SL2(Z).
///
/// Returns `Ok(None)` when no integral root exists and an error when the
/// input violates the preconditions.
pub fn mth_root_sl2(a: &BigMatrix, m: u64) -> Result<Option<BigMatrix>, ExactMatError> {
    check_sl2(a)?;
    if m == 0 {
        return Err(ExactMatError::ZeroExponent);
    }
    let t = a.trace();
    if t.abs() <= BigInt::from(2) {
        return Err(ExactMatError::NotHyperbolic { trace: t });
    }
    if m == 1 {
        return Ok(Some(a.clone()));
    }
    if t.is_negative() && m.is_multiple_of(2) {
        // D_m(u) > 2 for even m and |u| > 2
        return Ok(None);
    }
    let Some(u0) = solve_dickson(m, &t.abs()) else {
        return Ok(None);
    };
    let candidates = if t.is_negative() {
        vec![-u0]
    } else if m.is_multiple_of(2) {
        vec![u0.clone(), -u0]
    } else {
        vec![u0]
    };
    for u in candidates {
        let (c_prev, c_last) = chebyshev_pair(m, &u);
        let shifted = a.add(&BigMatrix::scalar(2, c_prev));
        let Some(b) = shifted.div_exact(&c_last) else {
            continue;
        };
        if b.det().is_one() && b.pow(m) == *a {
            return Ok(Some(b));
        }
    }
    Ok(None)
}

/// Largest exponent any root of a hyperbolic `a` could carry:
/// `TRACE_GAP^m <= lambda(a) < |tr a|`.
pub fn intrinsic_prime_bound(a: &BigMatrix) -> u64 {
    let t = a.trace().abs();
    if t <= BigInt::from(2) {
        return 0;
    }
    let ln = ln_bigint(&t);
    (ln / TRACE_GAP.ln() + 1e-9).floor() as u64
}

fn ln_bigint(x: &BigInt) -> f64 {
    match x.to_f64() {
        Some(v) if v.is_finite() => v.ln(),
        _ => {
            let bits = x.bits();
            let shifted: BigInt = x >> (bits - 53);
            shifted.to_f64().unwrap().ln() + (bits - 53) as f64 * std::f64::consts::LN_2
        }
    }
}

fn smallest_prime_factor(n: &BigInt, skip_two: bool) -> Option<u64> {
    let mut n = n.abs();
    if skip_two {
        while n.is_even() && !n.is_zero() {
            n >>= 1;
        }
    }
    if n <= BigInt::one() {
        return None;
    }
    let mut p = if skip_two { 3u64 } else { 2u64 };
    loop {
        let pb = BigInt::from(p);
        if &pb * &pb > n {
            return n.to_u64();
        }
        if (&n % &pb).is_zero() {
            return Some(p);
        }
        p += if p == 2 { 1 } else { 2 };
    }
}

fn entry_gcd(m: &BigMatrix) -> BigInt {
    m.entries().iter().fold(BigInt::zero(), |acc, e| acc.gcd(e))
}

fn primes_up_to(bound: u64) -> impl Iterator<Item = u64> {
    (2..=bound).filter(|&k| (2..k).take_while(|d| d * d <= k).all(|d| k % d != 0))
}

/// `[[0,-1],[1,1]]`, trace 1 and order 6.
fn order_six() -> BigMatrix {
    BigMatrix::from_i64(2, &[0, -1, 1, 1])
}

/// Order of a torsion element of SL2(Z); `None` if it has infinite order.
fn torsion_order(a: &BigMatrix) -> Option<u64> {
    if a.is_identity() {
        return Some(1);
    }
    if a.is_scalar_multiple(&-BigInt::one()) {
        return Some(2);
    }
    match a.trace().to_i64() {
        Some(-1) => Some(3),
        Some(0) => Some(4),
        Some(1) => Some(6),
        _ => None,
    }
}

/// Decides `a in SL2(Z)^m` for `m >= 2` with a verified root.
///
/// Case split: hyperbolic elements go through the Dickson solver; central,
/// elliptic and +-unipotent elements use closed forms (their roots are
/// confined to a finite cyclic centralizer or to +-unipotents).
pub fn mth_power_witness(a: &BigMatrix, m: u64) -> Result<Option<PowerWitness>, ExactMatError> {
    check_sl2(a)?;
    if m == 0 {
        return Err(ExactMatError::ZeroExponent);
    }
    let wrap = |root: BigMatrix| {
        let w = PowerWitness { root, exponent: m };
        debug_assert!(w.verify(a));
        Some(w)
    };
    let t = a.trace();
    let two = BigInt::from(2);
    if t.abs() > two {
        return Ok(mth_root_sl2(a, m)?.and_then(wrap));
    }
    if m == 1 {
        return Ok(wrap(a.clone()));
    }
    if let Some(order) = torsion_order(a) {
        let reduced = m % 12;
        let candidates: Vec<BigMatrix> = match order {
            1 => vec![BigMatrix::identity(2)],
            2 => {
                let s = super::presets::s();
                let u = order_six();
                vec![BigMatrix::identity(2).neg(), s, u.clone(), u.pow(2)]
            }
            3 | 6 => {
                let g = if order == 6 { a.clone() } else { a.neg() };
                (0..6).map(|e| g.pow(e)).collect()
            }
            _ => (0..4).map(|e| a.pow(e)).collect(),
        };
        return Ok(candidates
            .into_iter()
            .find(|b| b.pow(reduced) == *a)
            .and_then(wrap));
    }
    // +-unipotent, a = eps (I + N) with N != 0 nilpotent
    let eps = if t == two {
        BigInt::one()
    } else {
        -BigInt::one()
    };
    let n = a.scale(&eps).add(&BigMatrix::identity(2).neg());
    if eps.is_negative() && m.is_multiple_of(2) {
        return Ok(None);
    }
    let g = entry_gcd(&n);
    if !(&g % BigInt::from(m)).is_zero() {
        return Ok(None);
    }
    let root = BigMatrix::identity(2)
        .add(&n.div_exact(&BigInt::from(m)).expect("divisibility checked"))
        .scale(&eps);
    Ok(wrap(root))
}

pub fn is_mth_power_sl2z(a: &BigMatrix, m: u64) -> Result<bool, ExactMatError> {
    Ok(mth_power_witness(a, m)?.is_some())
}

/// Exact decision of `a in union_{m>=2} SL2(Z)^m` with a witness.
///
/// `prime_bound` limits the primes tried for hyperbolic elements; for walk
/// outputs it comes from [`super::power_cutoff`]. Torsion and +-unipotent
/// elements are decided in closed form regardless of the bound.
pub fn proper_power_witness(
    a: &BigMatrix,
    prime_bound: u64,
) -> Result<Option<PowerWitness>, ExactMatError> {
    check_sl2(a)?;
    let t = a.trace();
    let two = BigInt::from(2);
    let witness = if t.abs() > two {
        let mut found = None;
        for m in primes_up_to(prime_bound) {
            if let Some(root) = mth_root_sl2(a, m)? {
                found = Some(PowerWitness { root, exponent: m });
                break;
            }
        }
        found
    } else if let Some(order) = torsion_order(a) {
        // g = (g^(m^-1 mod d))^m for any prime m not dividing d = ord(g)
        let (root, m) = match order {
            1 => (BigMatrix::identity(2), 2),
            2 => (super::presets::s(), 2),
            d => {
                let m = [2u64, 3, 5].into_iter().find(|p| d % p != 0).unwrap();
                let inv = (1..d).find(|r| (r * m) % d == 1).unwrap();
                (a.pow(inv), m)
            }
        };
        Some(PowerWitness { root, exponent: m })
    } else {
        let eps = if t == two {
            BigInt::one()
        } else {
            -BigInt::one()
        };
        let n = a.scale(&eps).add(&BigMatrix::identity(2).neg());
        let g = entry_gcd(&n);
        smallest_prime_factor(&g, eps.is_negative()).map(|m| PowerWitness {
            root: BigMatrix::identity(2)
                .add(&n.div_exact(&BigInt::from(m)).expect("prime divides gcd"))
                .scale(&eps),
            exponent: m,
        })
    };
    if let Some(w) = &witness {
        assert!(w.verify(a), "unverified proper-power witness for {a}");
    }
    Ok(witness)
}

pub fn is_proper_power_sl2z(a: &BigMatrix, prime_bound: u64) -> Result<bool, ExactMatError> {
    Ok(proper_power_witness(a, prime_bound)?.is_some())
}
