use rayon::prelude::*;

use super::{ModGroupError, QuotientGroup, Subgroup};
use crate::arith::factorize;

/// `mask[i]` is true iff element `i` equals `x^m` for some `x` in the group.
pub fn power_image_mask(g: &QuotientGroup, m: u64) -> Vec<bool> {
    let images: Vec<usize> = (0..g.order())
        .into_par_iter()
        .map(|i| g.pow(i, m))
        .collect();
    let mut mask = vec![false; g.order()];
    for i in images {
        mask[i] = true;
    }
    mask
}

/// `|{x^m : x in G}|`
pub fn power_census(g: &QuotientGroup, m: u64) -> usize {
    power_image_mask(g, m).into_iter().filter(|&b| b).count()
}

/// `|{x^m : x in G h}|` for a normal subgroup `G` of `h_group`.
pub fn coset_power_census(
    h_group: &QuotientGroup,
    normal: &Subgroup,
    coset_rep: usize,
    m: u64,
) -> Result<usize, ModGroupError> {
    if coset_rep >= h_group.order() {
        return Err(ModGroupError::NotInGroup);
    }
    normal.require_normal(h_group)?;
    let images: Vec<usize> = normal
        .members()
        .par_iter()
        .map(|&x| h_group.pow(h_group.mul(x, coset_rep), m))
        .collect();
    let mut seen = vec![false; h_group.order()];
    let mut count = 0;
    for i in images {
        if !seen[i] {
            seen[i] = true;
            count += 1;
        }
    }
    Ok(count)
}

/// A representative of the coset `G x` whose order has only prime divisors
/// of the index `[H:G]`.
///
/// With `r` the product of the full prime-power parts of `|H|` for primes not
/// dividing the index, `y -> y^r` permutes `H/G`, so some `y^r` lands in the
/// coset, and `y^r` has order free of those primes. Among all such elements
/// the one of least order (then least index) is returned.
pub fn coset_low_order_rep(
    h_group: &QuotientGroup,
    normal: &Subgroup,
    coset: usize,
) -> Result<usize, ModGroupError> {
    if coset >= h_group.order() {
        return Err(ModGroupError::NotInGroup);
    }
    normal.require_normal(h_group)?;
    let order = h_group.order() as u64;
    let index = order / normal.len() as u64;
    let r: u64 = factorize(order)
        .into_iter()
        .filter(|&(p, _)| !index.is_multiple_of(p))
        .map(|(p, e)| p.pow(e))
        .product();
    let x_inv = h_group.inverse(coset);
    let best = (0..h_group.order())
        .into_par_iter()
        .filter_map(|y| {
            let z = h_group.pow(y, r);
            normal
                .contains(h_group.mul(z, x_inv))
                .then(|| (h_group.element_order(z), z))
        })
        .min()
        .expect("the r-th power map is onto the quotient");
    Ok(best.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modgroup::subgroup::lie_pair;
    use crate::modgroup::DEFAULT_BUDGET;

    #[test]
    fn census_m_one_is_order() {
        let g = QuotientGroup::enumerate_sl2(7, DEFAULT_BUDGET).unwrap();
        assert_eq!(power_census(&g, 1), 336);
    }

    #[test]
    fn coprime_exponent_is_bijective() {
        // exponent of SL2(F_5) is 60
        let g = QuotientGroup::enumerate_sl2(5, DEFAULT_BUDGET).unwrap();
        assert_eq!(power_census(&g, 7), 120);
    }

    #[test]
    fn census_matches_hash_set_oracle() {
        let g = QuotientGroup::enumerate_sl2(13, DEFAULT_BUDGET).unwrap();
        for m in [2u64, 3] {
            let set: std::collections::HashSet<Vec<u64>> = (0..g.order())
                .map(|i| g.element(i).pow(m).entries().to_vec())
                .collect();
            assert_eq!(power_census(&g, m), set.len());
            assert!(set.len() as u64 * 12 <= 11 * 2184);
        }
    }

    #[test]
    fn trivial_coset_census() {
        let (gl, sl) = lie_pair(5, false, DEFAULT_BUDGET).unwrap();
        assert_eq!(coset_power_census(&gl, &sl, gl.identity(), 1).unwrap(), 120);
        let direct = power_census(&QuotientGroup::enumerate_sl2(5, DEFAULT_BUDGET).unwrap(), 2);
        assert_eq!(
            coset_power_census(&gl, &sl, gl.identity(), 2).unwrap(),
            direct
        );
    }

    #[test]
    fn non_normal_rejected() {
        let sl = QuotientGroup::enumerate_sl2(5, DEFAULT_BUDGET).unwrap();
        let borel = Subgroup::from_predicate(&sl, |m| m.get(1, 0) == 0);
        assert_eq!(
            coset_power_census(&sl, &borel, sl.identity(), 2),
            Err(ModGroupError::NotNormal)
        );
    }

    #[test]
    fn psl13_nontrivial_coset_loses_squares() {
        let (pgl, psl) = lie_pair(13, true, DEFAULT_BUDGET).unwrap();
        let h = (0..pgl.order()).find(|&i| !psl.contains(i)).unwrap();
        let count = coset_power_census(&pgl, &psl, h, 2).unwrap();
        assert!(count < psl.len());
    }

    #[test]
    fn low_order_reps() {
        let (gl, sl) = lie_pair(5, false, DEFAULT_BUDGET).unwrap();
        assert_eq!(
            coset_low_order_rep(&gl, &sl, gl.identity()).unwrap(),
            gl.identity()
        );
        for x in 0..gl.order() {
            if x % 37 != 0 {
                continue;
            }
            let r = coset_low_order_rep(&gl, &sl, x).unwrap();
            assert!(sl.same_coset(&gl, x, r));
            assert!(gl.element_order(r).is_power_of_two());
        }
        let (pgl, psl) = lie_pair(7, true, DEFAULT_BUDGET).unwrap();
        let x = (0..pgl.order()).find(|&i| !psl.contains(i)).unwrap();
        let r = coset_low_order_rep(&pgl, &psl, x).unwrap();
        assert!(!psl.contains(r));
        assert!(pgl.element_order(r).is_power_of_two());
    }
}
