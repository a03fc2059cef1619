use num_integer::Integer;
use serde::Serialize;

use super::SieveError;
use crate::arith::prime_sieve;

/// Primes `p = a + b j` with `j >= 1`, `p <= limit`, coprime to the excluded
/// modulus. The first listed prime has family index 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct APPrimeFamily {
    pub a: u64,
    pub b: u64,
    pub limit: u64,
    pub excluded_modulus: u64,
    /// Primes below this are dropped from the list.
    pub min_prime: u64,
    pub primes: Vec<u64>,
}

/// Index of the first family member.
pub const FIRST_INDEX: usize = 2;

impl APPrimeFamily {
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// `(index, prime)` pairs, indices starting at [`FIRST_INDEX`].
    pub fn indexed(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.primes
            .iter()
            .enumerate()
            .map(|(i, &p)| (i + FIRST_INDEX, p))
    }

    /// Same progression restricted to primes `>= min_prime`.
    pub fn starting_at(mut self, min_prime: u64) -> Self {
        self.primes.retain(|&p| p >= min_prime);
        self.min_prime = self.min_prime.max(min_prime);
        self
    }
}

pub fn primes_in_ap(
    a: u64,
    b: u64,
    limit: u64,
    excluded_modulus: u64,
) -> Result<APPrimeFamily, SieveError> {
    if a == 0 || b == 0 || a.gcd(&b) != 1 {
        return Err(SieveError::NotCoprime { a, b });
    }
    if limit < 2 {
        return Err(SieveError::LimitTooSmall(limit));
    }
    if excluded_modulus == 0 {
        return Err(SieveError::ZeroExcludedModulus);
    }
    let sieve = prime_sieve(limit);
    let primes = (1u64..)
        .map_while(|j| b.checked_mul(j).and_then(|bj| bj.checked_add(a)))
        .take_while(|&p| p <= limit)
        .filter(|&p| sieve[p as usize] && !excluded_modulus.is_multiple_of(p))
        .collect();
    Ok(APPrimeFamily {
        a,
        b,
        limit,
        excluded_modulus,
        min_prime: 0,
        primes,
    })
}

/// Primes `p <= limit` with `p = 1 (mod m)` and `p >= 3 C(n, 2) + 1`,
/// `p > m`.
pub fn default_family(n: usize, m: u64, limit: u64) -> Result<APPrimeFamily, SieveError> {
    let floor = (3 * (n as u64) * (n as u64 - 1) / 2 + 1).max(m + 1);
    Ok(primes_in_ap(1, m.max(1), limit, 1)?.starting_at(floor))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityCheck {
    pub holds: bool,
    pub from_index: usize,
    /// `(index, prime)` pairs with `p_i > i^2`.
    pub violations: Vec<(usize, u64)>,
}

impl DensityCheck {
    pub fn first_violation(&self) -> Option<(usize, u64)> {
        self.violations.first().copied()
    }
}

/// Checks `p_i <= i^2` for every family index `i >= from_index`.
pub fn density_check(fam: &APPrimeFamily, from_index: usize) -> DensityCheck {
    let violations: Vec<_> = fam
        .indexed()
        .filter(|&(i, p)| i >= from_index && (p as u128) > (i as u128).pow(2))
        .collect();
    DensityCheck {
        holds: violations.is_empty(),
        from_index,
        violations,
    }
}

/// Smallest index from which the family satisfies `p_i <= i^2`, if any
/// index within the family does.
pub fn density_threshold(fam: &APPrimeFamily) -> Option<usize> {
    let last_bad = fam
        .indexed()
        .filter(|&(i, p)| (p as u128) > (i as u128).pow(2))
        .map(|(i, _)| i)
        .max();
    let start = last_bad.map_or(FIRST_INDEX, |i| i + 1);
    (start < FIRST_INDEX + fam.len()).then_some(start)
}

/// Progression `(1 + 6 m (l+1)^2 d!^2, 36 m^2 (l+1)^4 d!^4)`.
pub fn ap_for_lie_type(d: u64, l: u64, m: u64) -> Result<(u128, u128), SieveError> {
    if d == 0 || l == 0 || m == 0 {
        return Err(SieveError::LieParameter { d, l, m });
    }
    let overflow = SieveError::Overflow;
    let fact = (1..=d as u128).try_fold(1u128, |acc, i| acc.checked_mul(i));
    let fact = fact.ok_or(overflow.clone())?;
    let core = (l as u128 + 1)
        .checked_pow(2)
        .and_then(|x| x.checked_mul(fact.checked_mul(fact)?))
        .ok_or(overflow.clone())?;
    let half = (6 * m as u128).checked_mul(core).ok_or(overflow.clone())?;
    let a = half.checked_add(1).ok_or(overflow.clone())?;
    let b = half.checked_mul(half).ok_or(overflow)?;
    // a = 1 + h and b = h^2 share no prime factor
    debug_assert_eq!(a.gcd(&b), 1);
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_progressions() {
        let f = primes_in_ap(1, 2, 20, 1).unwrap();
        assert_eq!(f.primes, vec![3, 5, 7, 11, 13, 17, 19]);
        let f = primes_in_ap(1, 2, 20, 15).unwrap();
        assert_eq!(f.primes, vec![7, 11, 13, 17, 19]);
        let f = primes_in_ap(1, 4, 30, 1).unwrap();
        assert_eq!(f.primes, vec![5, 13, 17, 29]);
        assert_eq!(
            primes_in_ap(2, 4, 30, 1),
            Err(SieveError::NotCoprime { a: 2, b: 4 })
        );
    }

    #[test]
    fn default_families() {
        assert_eq!(default_family(2, 2, 14).unwrap().primes, vec![5, 7, 11, 13]);
        assert_eq!(default_family(2, 3, 14).unwrap().primes, vec![7, 13]);
    }

    #[test]
    fn density() {
        let f = primes_in_ap(1, 2, 100, 1).unwrap();
        assert!(density_check(&f, 2).holds);
        assert!(density_check(&f, 1000).holds);
        let f = primes_in_ap(1, 210, 2_000_000, 1).unwrap();
        let c = density_check(&f, 2);
        assert_eq!(c.first_violation(), Some((2, 211)));
        let t = density_threshold(&f).unwrap();
        assert!(density_check(&f, t).holds);
        assert!(!density_check(&f, t - 1).holds);
    }

    #[test]
    fn lie_type_progressions() {
        assert_eq!(ap_for_lie_type(1, 1, 2).unwrap(), (49, 2304));
        assert_eq!(ap_for_lie_type(1, 1, 3).unwrap(), (73, 5184));
        assert_eq!(ap_for_lie_type(1, 1, 1).unwrap(), (25, 576));
        assert_eq!(ap_for_lie_type(40, 1, 1), Err(SieveError::Overflow));
    }
}
