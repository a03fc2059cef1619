//! Small machine-integer number theory shared by the finite-group and sieve
//! layers.

use num_integer::Integer;

/// Deterministic trial division; inputs here are desk-scale moduli.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Sieve of Eratosthenes over `[0, limit]`.
pub fn prime_sieve(limit: u64) -> Vec<bool> {
    let len = limit as usize + 1;
    let mut is = vec![true; len];
    is[0] = false;
    if len > 1 {
        is[1] = false;
    }
    let mut i = 2usize;
    while i * i < len {
        if is[i] {
            let mut j = i * i;
            while j < len {
                is[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    is
}

/// Inverse of `a` modulo `q`, if `gcd(a, q) = 1`.
pub fn mod_inv(a: u64, q: u64) -> Option<u64> {
    if q == 1 {
        return Some(0);
    }
    let e = (a as i128 % q as i128).extended_gcd(&(q as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(q as i128) as u64)
}

/// Prime factorization as `(prime, exponent)` pairs in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_agrees_with_sieve() {
        let sieve = prime_sieve(2000);
        for n in 0..=2000u64 {
            assert_eq!(is_prime(n), sieve[n as usize], "{n}");
        }
    }

    #[test]
    fn inverses() {
        for q in [2u64, 7, 13, 35, 143] {
            for a in 0..q {
                match mod_inv(a, q) {
                    Some(b) => assert_eq!(a * b % q, 1 % q),
                    None => assert_ne!(a.gcd(&q), 1),
                }
            }
        }
    }

    #[test]
    fn factorization_round_trip() {
        for n in 1..500u64 {
            let f = factorize(n);
            assert_eq!(f.iter().map(|&(p, e)| p.pow(e)).product::<u64>(), n);
            assert!(f.iter().all(|&(p, _)| is_prime(p)));
        }
    }
}
