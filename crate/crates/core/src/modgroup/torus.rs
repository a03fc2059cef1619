//! Brute-force maximal tori and twisted conjugation.
//!
//! For a normal subgroup `G` of `H`, an element `h in H` acts on `G` by
//! `mu(g) = h g h^-1`, an automorphism of order `n`. A torus `T` is a maximal
//! abelian subgroup of `G` of the form `C_G(x)` for a semisimple `x`. The
//! analysis measures `T_mu` (fixed points of `mu` in `T`), `T_{mu,n}` (those
//! `t` with `C_G(t^n) = T`), `c` (elements of `T` of order dividing `n`) and
//! `[N_G(T) : T]`, and checks the structural facts that drive the coset
//! power bound `1 - 1/(4 c [N:T])` element by element.

use std::collections::HashMap;

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use super::group::greedy_generators;
use super::{coset_power_census, ModGroupError, QuotientGroup, Subgroup};

/// Outcome of the check on `L = {g : exists s in T_{mu,n}, g s mu(g)^-1 in T_{mu,n}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LSubgroupCheck {
    pub size: usize,
    pub is_subgroup: bool,
    pub contains_fixed: bool,
    /// `|L| / |T_mu|`
    pub index_over_fixed: usize,
    /// `c [N:T]`
    pub index_bound: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TorusReport {
    /// Ambient indices of `T`, sorted.
    pub torus: Vec<usize>,
    pub conjugator: usize,
    /// `mu[i]` is the ambient index of `h g_i h^-1` for the i-th member of `G`.
    #[serde(skip)]
    pub mu: Vec<usize>,
    pub n_ord: u64,
    /// `T_mu`
    pub fixed: Vec<usize>,
    /// `T_{mu,n}`
    pub regular_fixed: Vec<usize>,
    pub c: usize,
    pub normalizer_order: usize,
    pub normalizer_index: usize,
    /// `T` is abelian and equals its own centralizer in `G`.
    pub maximal_abelian: bool,
    /// Every `g` conjugating a regular `t in T` into `T` normalizes `T`.
    pub normalizer_lemma: bool,
    /// For every `t in T_{mu,n}`: `{g : g t mu(g)^-1 = t} = T_mu`.
    /// `None` when `T_{mu,n}` is empty.
    pub centralizer_lemma: Option<bool>,
    /// Present when `2 |T_{mu,n}| > |T_mu|`.
    pub l_check: Option<LSubgroupCheck>,
}

impl TorusReport {
    /// `m | |T_mu|` and `4 |T_{mu,n}| >= 3 |T_mu|`.
    pub fn hypotheses_hold(&self, m: u64) -> bool {
        let f = self.fixed.len();
        (f as u64).is_multiple_of(m) && 4 * self.regular_fixed.len() >= 3 * f
    }

    /// `4 c [N:T]`; the bound is `1 - 1/weight`.
    pub fn bound_weight(&self) -> u64 {
        4 * (self.c * self.normalizer_index) as u64
    }

    /// `(numerator, denominator)` of `1 - 1/(4 c [N:T])`.
    pub fn bound(&self) -> (u64, u64) {
        let w = self.bound_weight();
        (w - 1, w)
    }

    /// Exact integer comparison `count <= (1 - 1/(4c[N:T])) |G|`.
    pub fn within_bound(&self, count: usize, group_order: usize) -> bool {
        let w = self.bound_weight() as u128;
        count as u128 * w <= (w - 1) * group_order as u128
    }

    /// Every brute-force check that was applicable passed.
    pub fn checks_pass(&self) -> bool {
        self.maximal_abelian
            && self.normalizer_lemma
            && self.centralizer_lemma != Some(false)
            && self.l_check.as_ref().is_none_or(|l| l.holds)
    }
}

struct Ctx<'a> {
    amb: &'a QuotientGroup,
    g: &'a Subgroup,
    g_gens: Vec<usize>,
    cent_sizes: HashMap<usize, usize>,
}

impl<'a> Ctx<'a> {
    fn new(amb: &'a QuotientGroup, g: &'a Subgroup) -> Self {
        Self {
            amb,
            g,
            g_gens: g.generating_set(amb),
            cent_sizes: HashMap::new(),
        }
    }

    fn centralizer(&self, x: usize) -> Vec<usize> {
        self.g
            .members()
            .par_iter()
            .copied()
            .filter(|&y| self.amb.commute(x, y))
            .collect()
    }

    fn centralizer_size(&mut self, x: usize) -> usize {
        if let Some(&s) = self.cent_sizes.get(&x) {
            return s;
        }
        let s = self.centralizer(x).len();
        self.cent_sizes.insert(x, s);
        s
    }

    fn normalizes_g(&self, h: usize) -> bool {
        self.g_gens
            .iter()
            .all(|&s| self.g.contains(self.amb.conjugate(h, s)))
    }

    /// Order of conjugation by `h` as an automorphism of `G`.
    fn automorphism_order(&self, h: usize) -> u64 {
        let mut k = 1;
        let mut x = h;
        while !self.g_gens.iter().all(|&s| self.amb.commute(x, s)) {
            x = self.amb.mul(x, h);
            k += 1;
        }
        k
    }

    fn is_semisimple(&self, x: usize) -> bool {
        let q = self.amb.modulus();
        self.amb.element_order(x).gcd(&q) == 1
    }
}

struct Torus {
    members: Vec<usize>,
    mask: Vec<bool>,
    gens: Vec<usize>,
}

impl Torus {
    fn new(amb: &QuotientGroup, mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        let mut mask = vec![false; amb.order()];
        for &t in &members {
            mask[t] = true;
        }
        let gens = greedy_generators(amb, members.iter().copied());
        Self {
            members,
            mask,
            gens,
        }
    }

    fn is_abelian(&self, amb: &QuotientGroup) -> bool {
        self.gens
            .iter()
            .all(|&a| self.gens.iter().all(|&b| amb.commute(a, b)))
    }

    fn stable_under(&self, amb: &QuotientGroup, h: usize) -> bool {
        self.gens.iter().all(|&t| self.mask[amb.conjugate(h, t)])
    }
}

/// Cheap part of the analysis: `T_mu` and `T_{mu,n}`.
fn fixed_sets(ctx: &mut Ctx, torus: &Torus, h: usize, n: u64) -> (Vec<usize>, Vec<usize>) {
    let amb = ctx.amb;
    let t_order = torus.members.len();
    let fixed: Vec<usize> = torus
        .members
        .iter()
        .copied()
        .filter(|&t| amb.conjugate(h, t) == t)
        .collect();
    let regular_fixed = fixed
        .iter()
        .copied()
        .filter(|&t| ctx.centralizer_size(amb.pow(t, n)) == t_order)
        .collect();
    (fixed, regular_fixed)
}

fn full_report(ctx: &mut Ctx, torus: &Torus, h: usize, n: u64) -> TorusReport {
    let amb = ctx.amb;
    let g = ctx.g;
    let h_inv = amb.inverse(h);
    let mu: Vec<usize> = g
        .members()
        .par_iter()
        .map(|&x| amb.mul(amb.mul(h, x), h_inv))
        .collect();
    let mu_of = |x: usize| mu[g.position(x).expect("member of G")];
    let (fixed, regular_fixed) = fixed_sets(ctx, torus, h, n);
    let t_order = torus.members.len();

    let c = torus
        .members
        .iter()
        .filter(|&&t| n.is_multiple_of(amb.element_order(t)))
        .count();
    let normalizer: Vec<usize> = g
        .members()
        .par_iter()
        .copied()
        .filter(|&x| torus.stable_under(amb, x))
        .collect();
    let mut n_mask = vec![false; amb.order()];
    for &x in &normalizer {
        n_mask[x] = true;
    }

    let self_centralizing = g
        .members()
        .par_iter()
        .filter(|&&x| torus.gens.iter().all(|&t| amb.commute(x, t)))
        .count()
        == t_order;
    let maximal_abelian = torus.is_abelian(amb) && self_centralizing;

    let regular: Vec<usize> = torus
        .members
        .iter()
        .copied()
        .filter(|&t| ctx.centralizer_size(t) == t_order)
        .collect();
    let normalizer_lemma = regular.iter().all(|&t| {
        g.members().par_iter().all(|&x| {
            let y = amb.conjugate(x, t);
            !torus.mask[y] || n_mask[x]
        })
    });

    let fixed_mask = {
        let mut m = vec![false; amb.order()];
        for &t in &fixed {
            m[t] = true;
        }
        m
    };
    let twisted = |x: usize, t: usize| amb.mul(amb.mul(x, t), amb.inverse(mu_of(x)));
    let centralizer_lemma = (!regular_fixed.is_empty()).then(|| {
        regular_fixed.iter().all(|&t| {
            let stab: Vec<usize> = g
                .members()
                .par_iter()
                .copied()
                .filter(|&x| twisted(x, t) == t)
                .collect();
            stab.len() == fixed.len() && stab.iter().all(|&x| fixed_mask[x])
        })
    });

    let normalizer_index = normalizer.len() / t_order;
    let l_check = (2 * regular_fixed.len() > fixed.len()).then(|| {
        let mut reg_mask = vec![false; amb.order()];
        for &t in &regular_fixed {
            reg_mask[t] = true;
        }
        let l: Vec<usize> = g
            .members()
            .par_iter()
            .copied()
            .filter(|&x| regular_fixed.iter().any(|&s| reg_mask[twisted(x, s)]))
            .collect();
        let l_sub = Subgroup::from_members(amb, l.iter().copied()).expect("members of G");
        let is_subgroup = l_sub.is_subgroup(amb);
        let contains_fixed = fixed.iter().all(|&t| l_sub.contains(t));
        let index_bound = c * normalizer_index;
        let index_over_fixed = l.len() / fixed.len().max(1);
        let holds = is_subgroup
            && contains_fixed
            && l.len().is_multiple_of(fixed.len().max(1))
            && index_over_fixed <= index_bound;
        LSubgroupCheck {
            size: l.len(),
            is_subgroup,
            contains_fixed,
            index_over_fixed,
            index_bound,
            holds,
        }
    });

    TorusReport {
        torus: torus.members.clone(),
        conjugator: h,
        mu,
        n_ord: n,
        fixed,
        regular_fixed,
        c,
        normalizer_order: normalizer.len(),
        normalizer_index,
        maximal_abelian,
        normalizer_lemma,
        centralizer_lemma,
        l_check,
    }
}

fn prepare<'a>(
    amb: &'a QuotientGroup,
    g: &'a Subgroup,
    h: usize,
    n_ord: Option<u64>,
) -> Result<(Ctx<'a>, u64), ModGroupError> {
    if h >= amb.order() {
        return Err(ModGroupError::NotInGroup);
    }
    let ctx = Ctx::new(amb, g);
    if !ctx.normalizes_g(h) {
        return Err(ModGroupError::NotNormalizing);
    }
    let actual = ctx.automorphism_order(h);
    if let Some(claimed) = n_ord {
        if claimed != actual {
            return Err(ModGroupError::AutomorphismOrder { claimed, actual });
        }
    }
    Ok((ctx, actual))
}

/// Analysis with the default torus: the centralizer of the first member of
/// `G` (in index order) that is semisimple, has an abelian centralizer, and
/// whose centralizer is preserved by conjugation with `h`.
///
/// `n_ord`, when given, must equal the order of the automorphism.
pub fn torus_analysis(
    ambient: &QuotientGroup,
    g: &Subgroup,
    h: usize,
    n_ord: Option<u64>,
) -> Result<TorusReport, ModGroupError> {
    let (mut ctx, n) = prepare(ambient, g, h, n_ord)?;
    for &x in g.members() {
        if !ctx.is_semisimple(x) {
            continue;
        }
        let c = ctx.centralizer(x);
        if c.len() == g.len() {
            continue;
        }
        let torus = Torus::new(ambient, c);
        if torus.is_abelian(ambient) && torus.stable_under(ambient, h) {
            return Ok(full_report(&mut ctx, &torus, h, n));
        }
    }
    Err(ModGroupError::NoRegularElement)
}

/// Analysis for a caller-chosen torus, which must be a maximal abelian
/// subgroup of `G` preserved by conjugation with `h`.
pub fn torus_analysis_for(
    ambient: &QuotientGroup,
    g: &Subgroup,
    h: usize,
    n_ord: Option<u64>,
    torus: &[usize],
) -> Result<TorusReport, ModGroupError> {
    let (mut ctx, n) = prepare(ambient, g, h, n_ord)?;
    if torus.iter().any(|&t| !g.contains(t)) {
        return Err(ModGroupError::NotATorus("G-contained"));
    }
    let torus = Torus::new(ambient, torus.to_vec());
    if !torus.stable_under(ambient, h) {
        return Err(ModGroupError::NotATorus("mu"));
    }
    let report = full_report(&mut ctx, &torus, h, n);
    if !report.maximal_abelian {
        return Err(ModGroupError::NotATorus("mu"));
    }
    Ok(report)
}

/// Every distinct torus `C_G(x)` (x semisimple, centralizer abelian), one per
/// `G`-conjugacy class when `up_to_conjugacy` is set.
pub fn maximal_tori(
    ambient: &QuotientGroup,
    g: &Subgroup,
    up_to_conjugacy: bool,
) -> Vec<Vec<usize>> {
    let ctx = Ctx::new(ambient, g);
    let mut covered = vec![false; ambient.order()];
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for &x in g.members() {
        if covered[x] || !ctx.is_semisimple(x) {
            continue;
        }
        let c = ctx.centralizer(x);
        if c.len() == g.len() {
            continue;
        }
        let torus = Torus::new(ambient, c);
        if !torus.is_abelian(ambient) {
            continue;
        }
        if up_to_conjugacy {
            for &y in g.members() {
                for &t in &torus.members {
                    covered[ambient.conjugate(y, t)] = true;
                }
            }
        } else {
            for &t in &torus.members {
                // a torus is the centralizer of each of its regular elements
                if ctx.centralizer(t).len() == torus.members.len() {
                    covered[t] = true;
                }
            }
        }
        if seen.insert(torus.members.clone()) {
            out.push(torus.members);
        }
    }
    out
}

/// A torus analysis that establishes the coset bound hypotheses, together
/// with the exact coset census it bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CosetCertificate {
    pub m: u64,
    pub report: TorusReport,
    pub census: usize,
    pub group_order: usize,
    pub within_bound: bool,
}

/// Searches tori (one per conjugacy class) and conjugators `h` in the coset
/// `G x` normalizing them for one satisfying `m | |T_mu|` and
/// `4 |T_{mu,n}| >= 3 |T_mu|`; keeps the tightest resulting bound. Returns
/// `None` when no pair certifies.
pub fn certify_coset(
    ambient: &QuotientGroup,
    g: &Subgroup,
    coset_rep: usize,
    m: u64,
) -> Result<Option<CosetCertificate>, ModGroupError> {
    if coset_rep >= ambient.order() {
        return Err(ModGroupError::NotInGroup);
    }
    g.require_normal(ambient)?;
    let mut ctx = Ctx::new(ambient, g);
    let x_inv = ambient.inverse(coset_rep);
    let coset: Vec<usize> = (0..ambient.order())
        .into_par_iter()
        .filter(|&y| g.contains(ambient.mul(y, x_inv)))
        .collect();
    let mut best: Option<(u64, Torus, usize, u64)> = None;
    for members in maximal_tori(ambient, g, true) {
        let torus = Torus::new(ambient, members);
        let t_order = torus.members.len();
        for &h in &coset {
            if !torus.stable_under(ambient, h) {
                continue;
            }
            let n = ctx.automorphism_order(h);
            let (fixed, regular_fixed) = fixed_sets(&mut ctx, &torus, h, n);
            if !(fixed.len() as u64).is_multiple_of(m) || 4 * regular_fixed.len() < 3 * fixed.len()
            {
                continue;
            }
            let c = torus
                .members
                .iter()
                .filter(|&&t| n.is_multiple_of(ambient.element_order(t)))
                .count() as u64;
            let normalizer = g
                .members()
                .par_iter()
                .filter(|&&y| torus.stable_under(ambient, y))
                .count();
            let weight = c * (normalizer / t_order) as u64;
            if best.as_ref().is_none_or(|b| weight < b.0) {
                best = Some((weight, Torus::new(ambient, torus.members.clone()), h, n));
            }
        }
    }
    let Some((_, torus, h, n)) = best else {
        return Ok(None);
    };
    let report = full_report(&mut ctx, &torus, h, n);
    let census = coset_power_census(ambient, g, coset_rep, m)?;
    let within_bound = report.within_bound(census, g.len());
    Ok(Some(CosetCertificate {
        m,
        report,
        census,
        group_order: g.len(),
        within_bound,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modgroup::subgroup::lie_pair;
    use crate::modgroup::{ModMatrix, DEFAULT_BUDGET};

    #[test]
    fn split_torus_of_sl2_13() {
        let sl = QuotientGroup::enumerate_sl2(13, DEFAULT_BUDGET).unwrap();
        let whole = Subgroup::whole(&sl);
        let r = torus_analysis(&sl, &whole, sl.identity(), Some(1)).unwrap();
        assert_eq!(r.torus.len(), 12);
        assert_eq!(r.normalizer_index, 2);
        // identity automorphism fixes the whole torus
        assert_eq!(r.fixed, r.torus);
        assert_eq!(r.c, 1);
        // regular elements: everything but +-I
        assert_eq!(r.regular_fixed.len(), 10);
        assert!(r.checks_pass());
        assert!(r.hypotheses_hold(2));
        assert_eq!(r.bound(), (7, 8));
    }

    #[test]
    fn automorphism_order_validated() {
        let (gl, sl) = lie_pair(5, false, DEFAULT_BUDGET).unwrap();
        let h = gl
            .index_of(&ModMatrix::from_i64(2, 5, &[2, 0, 0, 1]))
            .unwrap();
        assert_eq!(
            torus_analysis(&gl, &sl, h, Some(2)).unwrap_err(),
            ModGroupError::AutomorphismOrder {
                claimed: 2,
                actual: 4
            }
        );
        let r = torus_analysis(&gl, &sl, h, Some(4)).unwrap();
        // only the diagonal torus is preserved; every element has t^4 = 1,
        // so no element of it is regular after raising to the 4th power
        assert_eq!(r.torus.len(), 4);
        assert_eq!(r.fixed.len(), 4);
        assert!(r.regular_fixed.is_empty());
        assert_eq!(r.centralizer_lemma, None);
        assert!(r.l_check.is_none());
        assert!(r.checks_pass());
    }

    #[test]
    fn twisted_subgroup_check_sl2_13() {
        let (gl, sl) = lie_pair(13, false, DEFAULT_BUDGET).unwrap();
        let h = gl
            .index_of(&ModMatrix::from_i64(2, 13, &[12, 0, 0, 1]))
            .unwrap();
        let diagonal: Vec<usize> = sl
            .members()
            .iter()
            .copied()
            .filter(|&i| {
                let m = gl.element(i);
                m.get(0, 1) == 0 && m.get(1, 0) == 0
            })
            .collect();
        let r = torus_analysis_for(&gl, &sl, h, Some(2), &diagonal).unwrap();
        assert_eq!(r.torus.len(), 12);
        assert_eq!(r.fixed.len(), 12);
        // t^2 is regular unless the order of t divides 4
        assert_eq!(r.regular_fixed.len(), 8);
        assert_eq!(r.centralizer_lemma, Some(true));
        let l = r.l_check.as_ref().expect("8 > 12/2");
        assert!(l.holds, "{l:?}");
        assert!(r.checks_pass());
    }

    #[test]
    fn rejects_non_normalizing() {
        let sl = QuotientGroup::enumerate_sl2(5, DEFAULT_BUDGET).unwrap();
        let borel = Subgroup::from_predicate(&sl, |m| m.get(1, 0) == 0);
        let s = sl
            .index_of(&ModMatrix::from_i64(2, 5, &[0, 4, 1, 0]))
            .unwrap();
        assert_eq!(
            torus_analysis(&sl, &borel, s, None).unwrap_err(),
            ModGroupError::NotNormalizing
        );
    }

    #[test]
    fn torus_classes_of_sl2() {
        let sl = QuotientGroup::enumerate_sl2(7, DEFAULT_BUDGET).unwrap();
        let whole = Subgroup::whole(&sl);
        let mut sizes: Vec<usize> = maximal_tori(&sl, &whole, true)
            .iter()
            .map(Vec::len)
            .collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![6, 8]);
        // p(p+1)/2 split and p(p-1)/2 nonsplit tori
        assert_eq!(maximal_tori(&sl, &whole, false).len(), 28 + 21);
    }

    #[test]
    fn certified_coset_respects_bound() {
        let (gl, sl) = lie_pair(13, false, DEFAULT_BUDGET).unwrap();
        let cert = certify_coset(&gl, &sl, gl.identity(), 2)
            .unwrap()
            .expect("split torus certifies the trivial coset");
        assert!(cert.within_bound);
        assert!(cert.report.checks_pass());
    }
}
