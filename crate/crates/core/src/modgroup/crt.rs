use serde::Serialize;

use super::{reduce, ModGroupError, QuotientGroup};
use crate::arith::is_prime;
use crate::exactmat::BigMatrix;

/// Orders of the images modulo `p`, `q` and `pq`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CrtCheck {
    pub p: u64,
    pub q: u64,
    pub order_p: usize,
    pub order_q: usize,
    pub order_pq: usize,
    /// `order_pq == order_p * order_q`
    pub holds: bool,
}

/// Compares the image modulo `pq` with the product of the images modulo `p`
/// and `q`, each obtained by breadth-first generation.
pub fn crt_order_check(
    gens: &[BigMatrix],
    p: u64,
    q: u64,
    budget: usize,
) -> Result<CrtCheck, ModGroupError> {
    if p == q || p.is_multiple_of(2) || q.is_multiple_of(2) || !is_prime(p) || !is_prime(q) {
        return Err(ModGroupError::BadPrimePair(p, q));
    }
    let image = |modulus: u64| {
        let reduced: Vec<_> = gens.iter().map(|g| reduce(g, modulus)).collect();
        QuotientGroup::generate(&reduced, modulus, budget).map(|g| g.order())
    };
    let order_p = image(p)?;
    let order_q = image(q)?;
    let order_pq = image(p * q)?;
    Ok(CrtCheck {
        p,
        q,
        order_p,
        order_q,
        order_pq,
        holds: order_pq == order_p * order_q,
    })
}

/// The map `G mod pq -> (G mod p) x (G mod q)` is injective on the stored
/// elements of `group_pq`.
pub fn crt_injective(group_pq: &QuotientGroup, p: u64, q: u64) -> bool {
    let mut seen = std::collections::HashSet::new();
    (0..group_pq.order()).all(|i| {
        let parts = group_pq
            .element(i)
            .crt_split(&[p, q])
            .expect("p q factorization");
        seen.insert(parts)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::presets;
    use crate::modgroup::DEFAULT_BUDGET;

    fn standard() -> Vec<BigMatrix> {
        vec![
            presets::s(),
            presets::s_inv(),
            presets::t(),
            presets::t_inv(),
        ]
    }

    #[test]
    fn five_seven() {
        let c = crt_order_check(&standard(), 5, 7, DEFAULT_BUDGET).unwrap();
        assert_eq!((c.order_p, c.order_q, c.order_pq), (120, 336, 40320));
        assert!(c.holds);
    }

    #[test]
    fn rejects_equal_or_even() {
        assert!(crt_order_check(&standard(), 5, 5, DEFAULT_BUDGET).is_err());
        assert!(crt_order_check(&standard(), 2, 5, DEFAULT_BUDGET).is_err());
    }

    #[test]
    fn injective_on_image() {
        let gens: Vec<_> = standard().iter().map(|g| reduce(g, 15)).collect();
        let g = QuotientGroup::generate(&gens, 15, DEFAULT_BUDGET).unwrap();
        assert_eq!(g.order(), 24 * 120);
        assert!(crt_injective(&g, 3, 5));
    }
}
