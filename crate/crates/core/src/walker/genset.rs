use serde::Serialize;

use crate::exactmat::{presets, BigMatrix};

/// Symmetric generating multiset `Sigma` with an optional odd-cycle witness.
///
/// Walks choose one of the `len()` slots uniformly, so repeated generators
/// carry proportionally more weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSet {
    generators: Vec<BigMatrix>,
    odd_cycle_witness: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Admissibility {
    /// Symmetric, with a verified odd closed walk of the given length.
    Admissible {
        witness_len: usize,
    },
    Inadmissible {
        offending: usize,
        reason: String,
    },
    /// Symmetric but no odd relation is known.
    Unknown,
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Admissibility::Admissible { .. })
    }
}

impl GenSet {
    pub fn new(generators: Vec<BigMatrix>) -> Self {
        Self {
            generators,
            odd_cycle_witness: None,
        }
    }

    /// Attaches a word (indices into the multiset) of odd length claimed to
    /// evaluate to the identity. It is verified by [`GenSet::admissibility`].
    pub fn with_witness(mut self, word: Vec<usize>) -> Self {
        self.odd_cycle_witness = Some(word);
        self
    }

    /// `[S, S^-1, T, T^-1, I]`
    pub fn sl2z_standard() -> Self {
        Self::new(vec![
            presets::s(),
            presets::s_inv(),
            presets::t(),
            presets::t_inv(),
            BigMatrix::identity(2),
        ])
    }

    /// `[[1,2],[0,1]]^+-1`, `[[1,0],[2,1]]^+-1` and the identity; the first
    /// four generate a free subgroup of index 12 in SL2(Z).
    pub fn sanov() -> Self {
        Self::new(vec![
            BigMatrix::from_i64(2, &[1, 2, 0, 1]),
            BigMatrix::from_i64(2, &[1, -2, 0, 1]),
            BigMatrix::from_i64(2, &[1, 0, 2, 1]),
            BigMatrix::from_i64(2, &[1, 0, -2, 1]),
            BigMatrix::identity(2),
        ])
    }

    /// The same multiset with every identity slot removed.
    pub fn without_identity(&self) -> Self {
        Self::new(
            self.generators
                .iter()
                .filter(|g| !g.is_identity())
                .cloned()
                .collect(),
        )
    }

    pub fn generators(&self) -> &[BigMatrix] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.generators.first().map_or(0, BigMatrix::dim)
    }

    pub fn odd_cycle_witness(&self) -> Option<&[usize]> {
        self.odd_cycle_witness.as_deref()
    }

    pub fn contains_identity(&self) -> bool {
        self.generators.iter().any(BigMatrix::is_identity)
    }

    /// Exact multiset symmetry: `Err(i)` names a slot whose inverse is missing
    /// (or under-represented, or that is not invertible over Z).
    pub fn check_symmetric(&self) -> Result<(), usize> {
        for (i, g) in self.generators.iter().enumerate() {
            let Some(inv) = g.inverse_sl() else {
                return Err(i);
            };
            let count = self.generators.iter().filter(|h| *h == g).count();
            let inv_count = self.generators.iter().filter(|h| **h == inv).count();
            if count != inv_count {
                return Err(i);
            }
        }
        Ok(())
    }

    pub fn is_symmetric(&self) -> bool {
        self.check_symmetric().is_ok()
    }

    /// Symmetry plus a verified odd relation (the identity itself counts as a
    /// length-one witness).
    pub fn admissibility(&self) -> Admissibility {
        if self.generators.is_empty() {
            return Admissibility::Inadmissible {
                offending: 0,
                reason: "empty generating multiset".into(),
            };
        }
        if let Err(i) = self.check_symmetric() {
            return Admissibility::Inadmissible {
                offending: i,
                reason: format!(
                    "inverse of {} is missing or has a different multiplicity",
                    self.generators[i]
                ),
            };
        }
        if self.contains_identity() {
            return Admissibility::Admissible { witness_len: 1 };
        }
        match &self.odd_cycle_witness {
            Some(word) if word.len() % 2 == 1 && word.iter().all(|&i| i < self.len()) => {
                let prod = word
                    .iter()
                    .fold(BigMatrix::identity(self.dim()), |acc, &i| {
                        &acc * &self.generators[i]
                    });
                if prod.is_identity() {
                    Admissibility::Admissible {
                        witness_len: word.len(),
                    }
                } else {
                    Admissibility::Unknown
                }
            }
            _ => Admissibility::Unknown,
        }
    }
}

/// Free-function form of [`GenSet::admissibility`].
pub fn admissibility_check(sigma: &GenSet) -> Admissibility {
    sigma.admissibility()
}
