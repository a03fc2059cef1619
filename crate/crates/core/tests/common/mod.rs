//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use gls_core::modgroup::{ModMatrix, QuotientGroup, Reduction};
use gls_core::BigMatrix;

pub type M2 = [i64; 4];

pub fn mul2(a: &M2, b: &M2) -> M2 {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

pub fn checked_mul2(a: &[i128; 4], b: &[i128; 4]) -> Option<[i128; 4]> {
    let dot = |x: i128, y: i128, z: i128, w: i128| x.checked_mul(y)?.checked_add(z.checked_mul(w)?);
    Some([
        dot(a[0], b[0], a[1], b[2])?,
        dot(a[0], b[1], a[1], b[3])?,
        dot(a[2], b[0], a[3], b[2])?,
        dot(a[2], b[1], a[3], b[3])?,
    ])
}

/// `{T, T^-1, S, S^-1, I}`
pub fn standard_sigma() -> Vec<M2> {
    vec![
        [1, 1, 0, 1],
        [1, -1, 0, 1],
        [0, -1, 1, 0],
        [0, 1, -1, 0],
        [1, 0, 0, 1],
    ]
}

/// Every product of exactly `radius` letters; with `I` among the letters this
/// is the full ball.
pub fn ball(sigma: &[M2], radius: usize) -> BTreeSet<M2> {
    let mut layer: BTreeSet<M2> = BTreeSet::from([[1, 0, 0, 1]]);
    for _ in 0..radius {
        layer = layer
            .iter()
            .flat_map(|w| sigma.iter().map(move |s| mul2(w, s)))
            .collect();
    }
    layer
}

pub fn big(m: &M2) -> BigMatrix {
    BigMatrix::from_i64(2, m)
}

/// All `B in SL2(Z)` with entries bounded by `bound` in absolute value.
pub fn sl2_box(bound: i64) -> Vec<M2> {
    let mut out = Vec::new();
    for a in -bound..=bound {
        for b in -bound..=bound {
            for c in -bound..=bound {
                // a d - b c = 1
                if a == 0 {
                    if b * c == -1 {
                        for d in -bound..=bound {
                            out.push([a, b, c, d]);
                        }
                    }
                } else if (1 + b * c) % a == 0 {
                    let d = (1 + b * c) / a;
                    if d.abs() <= bound {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

/// Proper powers by exhaustive root search: every `B^m` with `B` in the box
/// of half-width `bound` and `m` prime up to `max_exp`, using checked `i128`
/// powers.
pub fn brute_force_powers(bound: i64, max_exp: u64) -> HashSet<M2> {
    let primes: Vec<u64> = (2..=max_exp)
        .filter(|&m| (2..m).all(|d| m % d != 0))
        .collect();
    let mut out = HashSet::new();
    for b in sl2_box(bound) {
        let b128 = b.map(i128::from);
        for &m in &primes {
            let mut acc = [1i128, 0, 0, 1];
            let mut ok = true;
            for _ in 0..m {
                match checked_mul2(&acc, &b128) {
                    Some(x) => acc = x,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok && acc.iter().all(|&e| e.abs() <= i64::MAX as i128) {
                out.insert(acc.map(|e| e as i64));
            }
        }
    }
    out
}

fn pow_mod(mut b: u64, mut e: u64, q: u64) -> u64 {
    let mut acc = 1 % q;
    b %= q;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % q;
        }
        b = b * b % q;
        e >>= 1;
    }
    acc
}

/// Entries of `x^m`, scaled so the first nonzero entry is 1 when `G` is
/// projective (prime modulus).
fn power_key(g: &QuotientGroup, i: usize, m: u64) -> Vec<u64> {
    let x = g.element(i).pow(m);
    let mut e = x.entries().to_vec();
    if g.reduction() == Reduction::Projective {
        let q = g.modulus();
        let lead = *e.iter().find(|&&v| v != 0).unwrap();
        let inv = pow_mod(lead, q - 2, q);
        e.iter_mut().for_each(|v| *v = *v * inv % q);
    }
    e
}

/// `|{x^m : x in G}|` by hashing the entries of every power.
pub fn naive_census(g: &QuotientGroup, m: u64) -> usize {
    let all: Vec<usize> = (0..g.order()).collect();
    naive_set_census(g, &all, m)
}

/// `|{x^m : x in members}|` by hashing entries.
pub fn naive_set_census(g: &QuotientGroup, members: &[usize], m: u64) -> usize {
    members
        .iter()
        .map(|&i| power_key(g, i, m))
        .collect::<HashSet<_>>()
        .len()
}

/// All of `SL2(Z/p)` as entry vectors, by direct search.
pub fn sl2_entries(p: u64) -> BTreeSet<Vec<u64>> {
    let mut out = BTreeSet::new();
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                for d in 0..p {
                    if (a * d + p * p - b * c) % p == 1 % p {
                        out.insert(vec![a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

pub fn mod_matrix(m: &M2, q: u64) -> ModMatrix {
    ModMatrix::from_i64(2, q, m)
}
