use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GenSet, WalkError};
use crate::exactmat::BigMatrix;
use crate::modgroup::{reduce, ModGroupError, ModMatrix};

/// Generator for sample `sample` of an experiment seeded with `seed`.
pub fn sample_rng(seed: u64, sample: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample);
    rng
}

/// The walk after `k` steps: exact state plus one shadow per modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkState {
    pub k: u64,
    pub exact: BigMatrix,
    pub moduli: Vec<u64>,
    pub shadows: Vec<ModMatrix>,
}

impl WalkState {
    pub fn shadow(&self, q: u64) -> Option<&ModMatrix> {
        self.moduli
            .iter()
            .position(|&m| m == q)
            .map(|i| &self.shadows[i])
    }

    /// `reduce(exact, q) == shadow(q)` for every tracked modulus.
    pub fn shadows_consistent(&self) -> bool {
        self.moduli
            .iter()
            .zip(&self.shadows)
            .all(|(&q, s)| reduce(&self.exact, q) == *s)
    }
}

/// A generating multiset together with its generator shadows.
#[derive(Debug, Clone)]
pub struct Walker {
    sigma: GenSet,
    moduli: Vec<u64>,
    /// `gen_shadows[slot][modulus index]`
    gen_shadows: Vec<Vec<ModMatrix>>,
}

impl Walker {
    pub fn new(sigma: &GenSet, moduli: &[u64]) -> Result<Self, WalkError> {
        if sigma.is_empty() {
            return Err(crate::exactmat::ExactMatError::EmptyGenerators.into());
        }
        if let Some(&q) = moduli.iter().find(|&&q| q < 2) {
            return Err(ModGroupError::ModulusTooSmall(q).into());
        }
        let gen_shadows = sigma
            .generators()
            .iter()
            .map(|g| moduli.iter().map(|&q| reduce(g, q)).collect())
            .collect();
        Ok(Self {
            sigma: sigma.clone(),
            moduli: moduli.to_vec(),
            gen_shadows,
        })
    }

    pub fn start(&self) -> WalkState {
        WalkState {
            k: 0,
            exact: BigMatrix::identity(self.sigma.dim()),
            moduli: self.moduli.clone(),
            shadows: self
                .moduli
                .iter()
                .map(|&q| ModMatrix::identity(self.sigma.dim(), q))
                .collect(),
        }
    }

    /// Right-multiplies by a uniformly chosen slot. Shadows are advanced by
    /// modular multiplication only.
    pub fn step(&self, state: &mut WalkState, rng: &mut impl Rng) {
        let slot = rng.gen_range(0..self.sigma.len());
        state.exact = &state.exact * &self.sigma.generators()[slot];
        for (s, g) in state.shadows.iter_mut().zip(&self.gen_shadows[slot]) {
            *s = s.mul(g);
        }
        state.k += 1;
    }

    /// Walks `k` steps, calling `observe` on the start state and after every
    /// step.
    pub fn run(
        &self,
        k: u64,
        rng: &mut impl Rng,
        mut observe: impl FnMut(&WalkState),
    ) -> WalkState {
        let mut state = self.start();
        observe(&state);
        for _ in 0..k {
            self.step(&mut state, rng);
            observe(&state);
        }
        state
    }
}

/// One walk of `k` steps from the identity, drawn from stream 0 of `seed`.
pub fn run_walk(sigma: &GenSet, k: u64, seed: u64, moduli: &[u64]) -> Result<WalkState, WalkError> {
    let walker = Walker::new(sigma, moduli)?;
    Ok(walker.run(k, &mut sample_rng(seed, 0), |_| {}))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_steps_is_identity() {
        let s = run_walk(&GenSet::sl2z_standard(), 0, 7, &[5, 7]).unwrap();
        assert!(s.exact.is_identity());
        assert!(s.shadows.iter().all(ModMatrix::is_identity));
    }

    #[test]
    fn identity_only_stays_put() {
        let sigma = GenSet::new(vec![BigMatrix::identity(2); 3]);
        let s = run_walk(&sigma, 40, 1, &[11]).unwrap();
        assert!(s.exact.is_identity());
    }

    #[test]
    fn deterministic_trajectories() {
        let sigma = GenSet::sl2z_standard();
        let mut a = Vec::new();
        let mut b = Vec::new();
        let w = Walker::new(&sigma, &[13]).unwrap();
        w.run(60, &mut sample_rng(42, 3), |s| a.push(s.exact.clone()));
        w.run(60, &mut sample_rng(42, 3), |s| b.push(s.exact.clone()));
        assert_eq!(a, b);
        let mut c = Vec::new();
        w.run(60, &mut sample_rng(42, 4), |s| c.push(s.exact.clone()));
        assert_ne!(a, c);
    }

    #[test]
    fn shadows_track_exact_state() {
        let w = Walker::new(&GenSet::sl2z_standard(), &[5, 7, 35, 1_000_003]).unwrap();
        for sample in 0..20 {
            w.run(120, &mut sample_rng(9, sample), |s| {
                if s.k % 10 == 0 {
                    assert!(s.shadows_consistent(), "step {}", s.k);
                }
            });
        }
    }

    #[test]
    fn rejects_bad_modulus() {
        assert!(Walker::new(&GenSet::sl2z_standard(), &[1]).is_err());
        assert!(Walker::new(&GenSet::new(vec![]), &[5]).is_err());
    }
}
