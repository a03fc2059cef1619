use std::collections::{HashMap, VecDeque};
use std::sync::OnceLock;

use super::{matmul_into, matpow, ModGroupError, ModMatrix};
use crate::arith::{is_prime, mod_inv};

/// Default cap on the number of materialized group elements.
pub const DEFAULT_BUDGET: usize = 5_000_000;

/// How matrices are identified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    /// Plain matrices modulo `q`.
    Linear,
    /// Matrices modulo nonzero scalars (prime `q` only). The stored
    /// representative has its first nonzero entry equal to 1, which is the
    /// lexicographically first scalar multiple.
    Projective,
}

/// A finite matrix group with every element stored and indexed.
///
/// Elements are addressed by `usize` indices into a flat row-major buffer.
/// Products are formed by matrix multiplication followed by a hash lookup.
#[derive(Debug)]
pub struct QuotientGroup {
    n: usize,
    q: u64,
    reduction: Reduction,
    data: Vec<u64>,
    index: HashMap<u128, u32>,
    gens: Option<Vec<usize>>,
    identity: usize,
    generating_set: OnceLock<Vec<usize>>,
}

fn check_key_capacity(n: usize, q: u64) -> Result<(), ModGroupError> {
    let bits = 64 - (q - 1).leading_zeros();
    if bits as usize * n * n > 128 {
        return Err(ModGroupError::KeyOverflow { n, q });
    }
    Ok(())
}

pub(crate) fn pack(q: u64, entries: &[u64]) -> u128 {
    entries
        .iter()
        .fold(0u128, |acc, &e| acc * q as u128 + e as u128)
}

/// Scales `m` so that its first nonzero entry is 1 (projective mode only).
pub(crate) fn canonicalize(reduction: Reduction, q: u64, m: &mut [u64]) {
    if reduction == Reduction::Linear {
        return;
    }
    if let Some(&lead) = m.iter().find(|&&e| e != 0) {
        if lead != 1 {
            let inv = mod_inv(lead, q).expect("projective groups use a prime modulus") as u128;
            for e in m.iter_mut() {
                *e = (*e as u128 * inv % q as u128) as u64;
            }
        }
    }
}

struct Builder {
    n: usize,
    q: u64,
    reduction: Reduction,
    data: Vec<u64>,
    index: HashMap<u128, u32>,
    budget: usize,
}

impl Builder {
    fn new(n: usize, q: u64, reduction: Reduction, budget: usize) -> Result<Self, ModGroupError> {
        if q < 2 {
            return Err(ModGroupError::ModulusTooSmall(q));
        }
        if reduction == Reduction::Projective && !is_prime(q) {
            return Err(ModGroupError::NotPrime(q));
        }
        check_key_capacity(n, q)?;
        Ok(Self {
            n,
            q,
            reduction,
            data: Vec::new(),
            index: HashMap::new(),
            budget,
        })
    }

    /// Inserts a canonical matrix; returns its index and whether it was new.
    fn insert(&mut self, m: &[u64]) -> Result<(usize, bool), ModGroupError> {
        let key = pack(self.q, m);
        if let Some(&i) = self.index.get(&key) {
            return Ok((i as usize, false));
        }
        let i = self.index.len();
        if i >= self.budget {
            return Err(ModGroupError::SizeLimit {
                budget: self.budget,
            });
        }
        self.index.insert(key, i as u32);
        self.data.extend_from_slice(m);
        Ok((i, true))
    }

    fn finish(self, gens: Option<Vec<usize>>) -> QuotientGroup {
        let mut id = vec![0u64; self.n * self.n];
        for i in 0..self.n {
            id[i * self.n + i] = 1;
        }
        let identity = self.index[&pack(self.q, &id)] as usize;
        QuotientGroup {
            n: self.n,
            q: self.q,
            reduction: self.reduction,
            data: self.data,
            index: self.index,
            gens,
            identity,
            generating_set: OnceLock::new(),
        }
    }
}

impl QuotientGroup {
    /// Closure of `gens` under right multiplication, starting at the identity.
    pub fn generate(gens: &[ModMatrix], q: u64, budget: usize) -> Result<Self, ModGroupError> {
        Self::generate_with(gens, q, Reduction::Linear, budget)
    }

    pub fn generate_with(
        gens: &[ModMatrix],
        q: u64,
        reduction: Reduction,
        budget: usize,
    ) -> Result<Self, ModGroupError> {
        let n = gens.first().map_or(2, ModMatrix::dim);
        let mut b = Builder::new(n, q, reduction, budget)?;
        let mut canon = Vec::with_capacity(gens.len());
        for g in gens {
            if g.dim() != n || g.modulus() != q {
                return Err(ModGroupError::Mismatch);
            }
            if mod_inv(g.det(), q).is_none() {
                return Err(ModGroupError::NotInvertible { q });
            }
            let mut e = g.entries().to_vec();
            canonicalize(reduction, q, &mut e);
            canon.push(e);
        }
        let id = ModMatrix::identity(n, q);
        b.insert(id.entries())?;
        let mut queue = VecDeque::from([0usize]);
        let mut x = vec![0u64; n * n];
        let mut prod = vec![0u64; n * n];
        while let Some(i) = queue.pop_front() {
            x.copy_from_slice(&b.data[i * n * n..(i + 1) * n * n]);
            for s in &canon {
                matmul_into(n, q, &x, s, &mut prod);
                canonicalize(reduction, q, &mut prod);
                let (j, fresh) = b.insert(&prod)?;
                if fresh {
                    queue.push_back(j);
                }
            }
        }
        let gen_idx = canon
            .iter()
            .map(|s| b.index[&pack(q, s)] as usize)
            .collect();
        Ok(b.finish(Some(gen_idx)))
    }

    fn enumerate_2x2(
        p: u64,
        reduction: Reduction,
        expected: u64,
        budget: usize,
        keep: impl Fn(&[u64; 4], u64) -> bool,
    ) -> Result<Self, ModGroupError> {
        if !is_prime(p) {
            return Err(ModGroupError::NotPrime(p));
        }
        if expected > budget as u64 {
            return Err(ModGroupError::SizeLimit { budget });
        }
        let mut b = Builder::new(2, p, reduction, budget)?;
        let pp = p as u128;
        for a in 0..p {
            for bb in 0..p {
                for c in 0..p {
                    for d in 0..p {
                        let m = [a, bb, c, d];
                        let det = ((a as u128 * d as u128 + pp * pp - bb as u128 * c as u128) % pp)
                            as u64;
                        if keep(&m, det) {
                            b.insert(&m)?;
                        }
                    }
                }
            }
        }
        debug_assert_eq!(b.data.len() as u64, 4 * expected);
        Ok(b.finish(None))
    }

    /// All of SL2(F_p) in lexicographic order of entries.
    pub fn enumerate_sl2(p: u64, budget: usize) -> Result<Self, ModGroupError> {
        Self::enumerate_2x2(p, Reduction::Linear, p * (p * p - 1), budget, |_, det| {
            det == 1
        })
    }

    pub fn enumerate_gl2(p: u64, budget: usize) -> Result<Self, ModGroupError> {
        let order = (p * p - 1) * (p * p - p);
        Self::enumerate_2x2(p, Reduction::Linear, order, budget, |_, det| det != 0)
    }

    pub fn enumerate_pgl2(p: u64, budget: usize) -> Result<Self, ModGroupError> {
        Self::enumerate_2x2(
            p,
            Reduction::Projective,
            p * (p * p - 1),
            budget,
            |m, det| det != 0 && m.iter().find(|&&e| e != 0) == Some(&1),
        )
    }

    /// PSL2(F_p) realized inside PGL2(F_p): classes with square determinant.
    pub fn enumerate_psl2(p: u64, budget: usize) -> Result<Self, ModGroupError> {
        let order = if p == 2 { 6 } else { p * (p * p - 1) / 2 };
        let squares = square_mask(p);
        Self::enumerate_2x2(p, Reduction::Projective, order, budget, move |m, det| {
            det != 0 && squares[det as usize] && m.iter().find(|&&e| e != 0) == Some(&1)
        })
    }

    pub fn order(&self) -> usize {
        self.index.len()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn reduction(&self) -> Reduction {
        self.reduction
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    /// Generator indices when the group was built by [`QuotientGroup::generate`].
    pub fn gens(&self) -> Option<&[usize]> {
        self.gens.as_deref()
    }

    pub fn entries(&self, i: usize) -> &[u64] {
        let nn = self.n * self.n;
        &self.data[i * nn..(i + 1) * nn]
    }

    pub fn element(&self, i: usize) -> ModMatrix {
        ModMatrix::new(self.n, self.q, self.entries(i).to_vec()).expect("valid element")
    }

    /// Looks up a matrix after canonicalizing it.
    pub fn index_of(&self, m: &ModMatrix) -> Option<usize> {
        if m.dim() != self.n || m.modulus() != self.q {
            return None;
        }
        let mut e = m.entries().to_vec();
        canonicalize(self.reduction, self.q, &mut e);
        self.lookup(&e)
    }

    pub(crate) fn lookup(&self, canonical: &[u64]) -> Option<usize> {
        self.index
            .get(&pack(self.q, canonical))
            .map(|&i| i as usize)
    }

    pub(crate) fn lookup_raw(&self, m: &mut [u64]) -> usize {
        canonicalize(self.reduction, self.q, m);
        self.lookup(m).expect("closed under the group operation")
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        let mut out = vec![0u64; self.n * self.n];
        matmul_into(self.n, self.q, self.entries(a), self.entries(b), &mut out);
        self.lookup_raw(&mut out)
    }

    pub fn pow(&self, a: usize, e: u64) -> usize {
        let mut out = matpow(self.n, self.q, self.entries(a), e);
        self.lookup_raw(&mut out)
    }

    pub fn inverse(&self, a: usize) -> usize {
        let m = self.element(a);
        let inv = match self.reduction {
            Reduction::Linear => m.inverse().expect("group elements are invertible"),
            Reduction::Projective => m.adjugate(),
        };
        self.index_of(&inv).expect("closed under inverses")
    }

    /// `h x h^-1`
    pub fn conjugate(&self, h: usize, x: usize) -> usize {
        self.mul(self.mul(h, x), self.inverse(h))
    }

    pub fn commute(&self, a: usize, b: usize) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    pub fn element_order(&self, a: usize) -> u64 {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// A small generating set: the stored generators if known, otherwise
    /// greedily chosen elements in index order.
    pub fn generating_set(&self) -> &[usize] {
        self.generating_set.get_or_init(|| match &self.gens {
            Some(g) => g.clone(),
            None => greedy_generators(self, 0..self.order()),
        })
    }
}

/// Greedy generating set for the subgroup spanned by `elements`: an element
/// is added whenever it lies outside the closure of those chosen so far.
pub(crate) fn greedy_generators(
    g: &QuotientGroup,
    elements: impl IntoIterator<Item = usize>,
) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut inside = vec![false; g.order()];
    let mut members = vec![g.identity()];
    inside[g.identity()] = true;
    for x in elements {
        if inside[x] {
            continue;
        }
        gens.push(x);
        // extend the closure: every member times every generator, to fixpoint
        let mut queue: VecDeque<usize> = members.iter().copied().collect();
        while let Some(y) = queue.pop_front() {
            for &s in &gens {
                let z = g.mul(y, s);
                if !inside[z] {
                    inside[z] = true;
                    members.push(z);
                    queue.push_back(z);
                }
            }
        }
    }
    gens
}

pub(crate) fn square_mask(p: u64) -> Vec<bool> {
    let mut sq = vec![false; p as usize];
    for x in 1..p {
        sq[(x * x % p) as usize] = true;
    }
    sq
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::BigMatrix;
    use crate::modgroup::reduce;

    fn elementary(q: u64, step: i64) -> Vec<ModMatrix> {
        vec![
            ModMatrix::from_i64(2, q, &[1, step, 0, 1]),
            ModMatrix::from_i64(2, q, &[1, 0, step, 1]),
        ]
    }

    #[test]
    fn enumeration_orders() {
        // oracle: direct count of determinant-one quadruples
        for p in [2u64, 3, 5, 7] {
            let brute = (0..p.pow(4))
                .filter(|x| {
                    let (a, b, c, d) = (x % p, x / p % p, x / p / p % p, x / p / p / p);
                    (a * d + p * p - b * c) % p == 1
                })
                .count();
            assert_eq!(
                QuotientGroup::enumerate_sl2(p, DEFAULT_BUDGET)
                    .unwrap()
                    .order(),
                brute
            );
        }
        assert_eq!(
            QuotientGroup::enumerate_sl2(13, DEFAULT_BUDGET)
                .unwrap()
                .order(),
            2184
        );
        assert_eq!(
            QuotientGroup::enumerate_gl2(5, DEFAULT_BUDGET)
                .unwrap()
                .order(),
            480
        );
        assert_eq!(
            QuotientGroup::enumerate_pgl2(7, DEFAULT_BUDGET)
                .unwrap()
                .order(),
            336
        );
        assert_eq!(
            QuotientGroup::enumerate_psl2(7, DEFAULT_BUDGET)
                .unwrap()
                .order(),
            168
        );
    }

    #[test]
    fn generation_examples() {
        let g = QuotientGroup::generate(&elementary(5, 1), 5, DEFAULT_BUDGET).unwrap();
        assert_eq!(g.order(), 120);
        let g = QuotientGroup::generate(&[ModMatrix::identity(2, 7)], 7, DEFAULT_BUDGET).unwrap();
        assert_eq!(g.order(), 1);
        let g = QuotientGroup::generate(&elementary(7, 2), 7, DEFAULT_BUDGET).unwrap();
        assert_eq!(g.order(), 336);
    }

    #[test]
    fn budget_and_validation() {
        let err = QuotientGroup::generate(&elementary(13, 1), 13, 100).unwrap_err();
        assert_eq!(err, ModGroupError::SizeLimit { budget: 100 });
        assert!(QuotientGroup::enumerate_sl2(13, 1000).is_err());
        assert_eq!(
            QuotientGroup::enumerate_sl2(9, DEFAULT_BUDGET).unwrap_err(),
            ModGroupError::NotPrime(9)
        );
        let singular = ModMatrix::from_i64(2, 5, &[1, 0, 0, 0]);
        assert!(matches!(
            QuotientGroup::generate(&[singular], 5, DEFAULT_BUDGET),
            Err(ModGroupError::NotInvertible { .. })
        ));
    }

    #[test]
    fn group_operations() {
        let g = QuotientGroup::enumerate_sl2(7, DEFAULT_BUDGET).unwrap();
        for a in (0..g.order()).step_by(13) {
            let inv = g.inverse(a);
            assert_eq!(g.mul(a, inv), g.identity());
            let ord = g.element_order(a);
            assert_eq!(g.pow(a, ord), g.identity());
            assert_eq!(336 % ord, 0);
        }
        let gens = g.generating_set();
        assert!(gens.len() <= 3);
        let regen: Vec<ModMatrix> = gens.iter().map(|&i| g.element(i)).collect();
        assert_eq!(
            QuotientGroup::generate(&regen, 7, DEFAULT_BUDGET)
                .unwrap()
                .order(),
            336
        );
    }

    #[test]
    fn projective_identifies_scalars() {
        let g = QuotientGroup::enumerate_pgl2(5, DEFAULT_BUDGET).unwrap();
        let m = reduce(&BigMatrix::from_i64(2, &[2, 1, 1, 1]), 5);
        assert_eq!(g.index_of(&m), g.index_of(&m.scale(3)));
        assert_eq!(
            g.index_of(&ModMatrix::from_i64(2, 5, &[4, 0, 0, 4])),
            Some(g.identity())
        );
        let psl = QuotientGroup::enumerate_psl2(5, DEFAULT_BUDGET).unwrap();
        let gl = QuotientGroup::enumerate_sl2(5, DEFAULT_BUDGET).unwrap();
        // PSL is the image of SL
        let image = QuotientGroup::generate_with(
            &gl.generating_set()
                .iter()
                .map(|&i| gl.element(i))
                .collect::<Vec<_>>(),
            5,
            Reduction::Projective,
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert_eq!(image.order(), psl.order());
        for i in 0..image.order() {
            assert!(psl.index_of(&image.element(i)).is_some());
        }
    }
}
