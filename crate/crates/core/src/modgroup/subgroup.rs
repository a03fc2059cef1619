use super::group::{greedy_generators, square_mask};
use super::{ModGroupError, ModMatrix, QuotientGroup, Reduction};

/// A subset of an ambient [`QuotientGroup`], addressed by ambient indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    members: Vec<usize>,
    /// `pos[i]` is the rank of ambient element `i` in `members`, or `NONE`.
    pos: Vec<u32>,
}

const NONE: u32 = u32::MAX;

impl Subgroup {
    /// Sorted, deduplicated member set. Closure is not checked here; see
    /// [`Subgroup::is_subgroup`].
    pub fn from_members(
        ambient: &QuotientGroup,
        members: impl IntoIterator<Item = usize>,
    ) -> Result<Self, ModGroupError> {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if members.last().is_some_and(|&m| m >= ambient.order()) {
            return Err(ModGroupError::NotInGroup);
        }
        let mut pos = vec![NONE; ambient.order()];
        for (r, &m) in members.iter().enumerate() {
            pos[m] = r as u32;
        }
        Ok(Self { members, pos })
    }

    pub fn whole(ambient: &QuotientGroup) -> Self {
        Self::from_members(ambient, 0..ambient.order()).expect("indices in range")
    }

    pub fn from_predicate(ambient: &QuotientGroup, keep: impl Fn(&ModMatrix) -> bool) -> Self {
        Self::from_members(
            ambient,
            (0..ambient.order()).filter(|&i| keep(&ambient.element(i))),
        )
        .expect("indices in range")
    }

    /// Determinant-one elements (SL inside GL).
    pub fn special_linear(ambient: &QuotientGroup) -> Self {
        Self::from_predicate(ambient, |m| m.det() == 1)
    }

    /// Classes with square determinant (PSL inside PGL for prime `q`).
    pub fn square_determinant(ambient: &QuotientGroup) -> Self {
        let squares = square_mask(ambient.modulus());
        Self::from_predicate(ambient, |m| squares[m.det() as usize])
    }

    /// Image of every element of `sub` in `ambient` (same dimension and
    /// modulus, e.g. SL2 inside GL2).
    pub fn embed(ambient: &QuotientGroup, sub: &QuotientGroup) -> Result<Self, ModGroupError> {
        let members = (0..sub.order())
            .map(|i| {
                ambient
                    .index_of(&sub.element(i))
                    .ok_or(ModGroupError::NotInGroup)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_members(ambient, members)
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.pos.get(i).is_some_and(|&p| p != NONE)
    }

    pub fn position(&self, i: usize) -> Option<usize> {
        self.pos.get(i).filter(|&&p| p != NONE).map(|&p| p as usize)
    }

    pub fn generating_set(&self, ambient: &QuotientGroup) -> Vec<usize> {
        greedy_generators(ambient, self.members.iter().copied())
    }

    /// Exhaustive closure check.
    pub fn is_subgroup(&self, ambient: &QuotientGroup) -> bool {
        self.contains(ambient.identity())
            && self.members.iter().all(|&a| {
                self.members
                    .iter()
                    .all(|&b| self.contains(ambient.mul(a, b)))
            })
    }

    /// Conjugation by every ambient generator maps every subgroup generator
    /// back into the subgroup.
    pub fn is_normal_in(&self, ambient: &QuotientGroup) -> bool {
        let sub_gens = self.generating_set(ambient);
        ambient.generating_set().iter().all(|&s| {
            sub_gens
                .iter()
                .all(|&h| self.contains(ambient.conjugate(s, h)))
        })
    }

    /// `Err(NotNormal)` unless normal.
    pub fn require_normal(&self, ambient: &QuotientGroup) -> Result<(), ModGroupError> {
        if self.is_normal_in(ambient) {
            Ok(())
        } else {
            Err(ModGroupError::NotNormal)
        }
    }

    /// Ambient index of the coset `G x` containing `x`, as a sorted list.
    pub fn coset(&self, ambient: &QuotientGroup, x: usize) -> Vec<usize> {
        let mut c: Vec<usize> = self.members.iter().map(|&g| ambient.mul(g, x)).collect();
        c.sort_unstable();
        c
    }

    /// `x` and `y` lie in the same right coset `G x = G y`.
    pub fn same_coset(&self, ambient: &QuotientGroup, x: usize, y: usize) -> bool {
        self.contains(ambient.mul(y, ambient.inverse(x)))
    }
}

/// `(GL2(F_p), SL2(F_p))`, or `(PGL2(F_p), PSL2(F_p))` when `projective`.
pub fn lie_pair(
    p: u64,
    projective: bool,
    budget: usize,
) -> Result<(QuotientGroup, Subgroup), ModGroupError> {
    let ambient = if projective {
        QuotientGroup::enumerate_pgl2(p, budget)?
    } else {
        QuotientGroup::enumerate_gl2(p, budget)?
    };
    let g = match ambient.reduction() {
        Reduction::Projective => Subgroup::square_determinant(&ambient),
        Reduction::Linear => Subgroup::special_linear(&ambient),
    };
    Ok((ambient, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modgroup::DEFAULT_BUDGET;

    #[test]
    fn sl_in_gl_is_normal() {
        let (gl, sl) = lie_pair(5, false, DEFAULT_BUDGET).unwrap();
        assert_eq!(sl.len(), 120);
        assert!(sl.is_subgroup(&gl));
        assert!(sl.is_normal_in(&gl));
        let embedded = Subgroup::embed(
            &gl,
            &QuotientGroup::enumerate_sl2(5, DEFAULT_BUDGET).unwrap(),
        )
        .unwrap();
        assert_eq!(embedded, sl);
    }

    #[test]
    fn psl_in_pgl_is_normal() {
        let (pgl, psl) = lie_pair(7, true, DEFAULT_BUDGET).unwrap();
        assert_eq!(psl.len(), 168);
        assert!(psl.is_subgroup(&pgl));
        assert!(psl.is_normal_in(&pgl));
    }

    #[test]
    fn borel_is_not_normal() {
        let sl = QuotientGroup::enumerate_sl2(5, DEFAULT_BUDGET).unwrap();
        let b = Subgroup::from_predicate(&sl, |m| m.get(1, 0) == 0);
        assert_eq!(b.len(), 20);
        assert!(b.is_subgroup(&sl));
        assert!(!b.is_normal_in(&sl));
    }
}
