//! Cayley graphs of finite quotients and their normalized adjacency spectra.
//!
//! Vertices are group elements; every slot `s` of the generating multiset
//! contributes the edge `v -> v s`, so repeated generators give multi-edges
//! and the identity gives self-loops. The normalized adjacency operator is
//! `A = (1/|Sigma|) * (edge counts)`.

mod distribution;
mod eigen;

use std::collections::VecDeque;

use thiserror::Error;

use crate::modgroup::{reduce, QuotientGroup};
use crate::walker::GenSet;

pub use distribution::{
    equidistribution_check, exact_walk_distribution, Distribution, EquiRow, EquidistributionTable,
    WalkEvolution, WalkMode, EQUI_SLACK,
};
pub use eigen::{
    min_eig_floor, spectrum, spectrum_with, SpectralReport, SpectrumMethod, SpectrumOptions,
    DENSE_LIMIT,
};

/// Default search depth for the shortest odd closed walk.
pub const ODD_GIRTH_CAP: usize = 9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("generator in slot {slot} does not reduce into the group")]
    GeneratorNotInGroup { slot: usize },
    #[error("generating multiset is empty")]
    EmptyGenerators,
    #[error("generating multiset is not closed under inverses")]
    NotSymmetric,
    #[error("neighbor table is malformed")]
    BadTable,
    #[error("factor graphs have different degrees ({0} vs {1})")]
    DegreeMismatch(usize, usize),
    #[error("power iteration did not reach residual {tol:e} in {iterations} iterations (lambda2 ~ {lambda2}, lambda_min ~ {lambda_min}, residual {residual:e})")]
    NotConverged {
        lambda2: f64,
        lambda_min: f64,
        residual: f64,
        tol: f64,
        iterations: usize,
    },
}

/// Regular directed multigraph with a flat neighbor table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyGraph {
    order: usize,
    degree: usize,
    /// `table[v * degree + s]` is the `s`-th out-neighbor of `v`.
    table: Vec<u32>,
    identity: usize,
    odd_girth: Option<usize>,
    symmetric: bool,
}

impl CayleyGraph {
    pub fn build(g: &QuotientGroup, sigma: &GenSet) -> Result<Self, SpectralError> {
        Self::build_with_cap(g, sigma, ODD_GIRTH_CAP)
    }

    pub fn build_with_cap(
        g: &QuotientGroup,
        sigma: &GenSet,
        girth_cap: usize,
    ) -> Result<Self, SpectralError> {
        if sigma.is_empty() {
            return Err(SpectralError::EmptyGenerators);
        }
        let slots = sigma
            .generators()
            .iter()
            .enumerate()
            .map(|(slot, m)| {
                if m.dim() != g.dim() {
                    return Err(SpectralError::GeneratorNotInGroup { slot });
                }
                g.index_of(&reduce(m, g.modulus()))
                    .ok_or(SpectralError::GeneratorNotInGroup { slot })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let degree = slots.len();
        let mut table = vec![0u32; g.order() * degree];
        use rayon::prelude::*;
        table
            .par_chunks_mut(degree)
            .enumerate()
            .for_each(|(v, row)| {
                for (cell, &s) in row.iter_mut().zip(&slots) {
                    *cell = g.mul(v, s) as u32;
                }
            });
        Self::from_table(g.order(), degree, table, g.identity(), girth_cap)
    }

    /// Wraps a precomputed table; `identity` is the walk's start vertex.
    pub fn from_table(
        order: usize,
        degree: usize,
        table: Vec<u32>,
        identity: usize,
        girth_cap: usize,
    ) -> Result<Self, SpectralError> {
        if degree == 0
            || order == 0
            || table.len() != order * degree
            || identity >= order
            || table.iter().any(|&u| u as usize >= order)
        {
            return Err(SpectralError::BadTable);
        }
        let mut graph = Self {
            order,
            degree,
            table,
            identity,
            odd_girth: None,
            symmetric: false,
        };
        graph.symmetric = graph.check_symmetric();
        graph.odd_girth = graph.shortest_odd_closed_walk(girth_cap);
        Ok(graph)
    }

    /// Graph of the diagonal action on the product group: slot `s` sends
    /// `(u, v)` to `(u s, v s)`. Vertex `(u, v)` has index `u * |b| + v`.
    pub fn diagonal_product(a: &Self, b: &Self, girth_cap: usize) -> Result<Self, SpectralError> {
        if a.degree != b.degree {
            return Err(SpectralError::DegreeMismatch(a.degree, b.degree));
        }
        let d = a.degree;
        let nb = b.order;
        let order = a.order * nb;
        let mut table = vec![0u32; order * d];
        use rayon::prelude::*;
        table.par_chunks_mut(d).enumerate().for_each(|(x, row)| {
            let (u, v) = (x / nb, x % nb);
            for (s, cell) in row.iter_mut().enumerate() {
                *cell = (a.neighbor(u, s) * nb + b.neighbor(v, s)) as u32;
            }
        });
        Self::from_table(order, d, table, a.identity * nb + b.identity, girth_cap)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    /// Shortest odd closed walk through the identity, if one exists within
    /// the search cap.
    pub fn odd_girth(&self) -> Option<usize> {
        self.odd_girth
    }

    /// `u -> v` and `v -> u` occur with equal multiplicity for all pairs.
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.table[v * self.degree..(v + 1) * self.degree]
    }

    pub fn neighbor(&self, v: usize, slot: usize) -> usize {
        self.table[v * self.degree + slot] as usize
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.order];
        seen[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &u in self.neighbors(v) {
                if !seen[u as usize] {
                    seen[u as usize] = true;
                    count += 1;
                    queue.push_back(u as usize);
                }
            }
        }
        count == self.order
    }

    fn check_symmetric(&self) -> bool {
        let mut forward: Vec<(u32, u32)> = Vec::with_capacity(self.table.len());
        for v in 0..self.order {
            for &u in self.neighbors(v) {
                forward.push((v as u32, u));
            }
        }
        let mut backward: Vec<(u32, u32)> = forward.iter().map(|&(a, b)| (b, a)).collect();
        forward.sort_unstable();
        backward.sort_unstable();
        forward == backward
    }

    /// Breadth-first search over (vertex, parity of walk length).
    fn shortest_odd_closed_walk(&self, cap: usize) -> Option<usize> {
        let mut seen = vec![[false; 2]; self.order];
        seen[self.identity][0] = true;
        let mut frontier = vec![(self.identity, 0usize)];
        for len in 1..=cap {
            let mut next = Vec::new();
            for &(v, parity) in &frontier {
                for &u in self.neighbors(v) {
                    let u = u as usize;
                    let p = parity ^ 1;
                    if u == self.identity && p == 1 {
                        return Some(len);
                    }
                    if !seen[u][p] {
                        seen[u][p] = true;
                        next.push((u, p));
                    }
                }
            }
            if next.is_empty() {
                return None;
            }
            frontier = next;
        }
        None
    }
}

/// Free-function form of [`CayleyGraph::build`].
pub fn build_cayley(g: &QuotientGroup, sigma: &GenSet) -> Result<CayleyGraph, SpectralError> {
    CayleyGraph::build(g, sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::{presets, BigMatrix};
    use crate::modgroup::{ModMatrix, DEFAULT_BUDGET};

    #[test]
    fn sl2_3_graph() {
        let g = QuotientGroup::enumerate_sl2(3, DEFAULT_BUDGET).unwrap();
        let x = build_cayley(&g, &GenSet::sl2z_standard()).unwrap();
        assert_eq!((x.order(), x.degree()), (24, 5));
        assert_eq!(x.odd_girth(), Some(1));
        assert!(x.is_symmetric());
        assert!(x.is_connected());
    }

    #[test]
    fn trivial_group_has_loops() {
        let g = QuotientGroup::generate(&[ModMatrix::identity(2, 5)], 5, DEFAULT_BUDGET).unwrap();
        let x = build_cayley(&g, &GenSet::new(vec![BigMatrix::identity(2); 3])).unwrap();
        assert_eq!(x.order(), 1);
        assert_eq!(x.neighbors(0), &[0, 0, 0]);
    }

    #[test]
    fn generator_outside_group() {
        let g = QuotientGroup::generate(
            &[ModMatrix::from_i64(2, 5, &[1, 1, 0, 1])],
            5,
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert_eq!(
            build_cayley(&g, &GenSet::sl2z_standard()).unwrap_err(),
            SpectralError::GeneratorNotInGroup { slot: 0 }
        );
    }

    #[test]
    fn odd_girth_without_identity() {
        // oracle: reachable sets of words of each length
        let g = QuotientGroup::enumerate_sl2(5, DEFAULT_BUDGET).unwrap();
        let sigma = GenSet::new(vec![
            presets::s(),
            presets::s_inv(),
            presets::t(),
            presets::t_inv(),
        ]);
        let x = build_cayley(&g, &sigma).unwrap();
        let mut brute = None;
        let mut layer = vec![g.identity()];
        'outer: for len in 1..=9 {
            let mut next = Vec::new();
            for &v in &layer {
                next.extend(x.neighbors(v).iter().map(|&u| u as usize));
            }
            next.sort_unstable();
            next.dedup();
            if len % 2 == 1 && next.contains(&g.identity()) {
                brute = Some(len);
                break 'outer;
            }
            layer = next;
        }
        assert_eq!(x.odd_girth(), brute);
    }

    #[test]
    fn diagonal_product_matches_composite_modulus() {
        let g5 = QuotientGroup::enumerate_sl2(5, DEFAULT_BUDGET).unwrap();
        let g3 = QuotientGroup::enumerate_sl2(3, DEFAULT_BUDGET).unwrap();
        let sigma = GenSet::sl2z_standard();
        let a = build_cayley(&g3, &sigma).unwrap();
        let b = build_cayley(&g5, &sigma).unwrap();
        let prod = CayleyGraph::diagonal_product(&a, &b, ODD_GIRTH_CAP).unwrap();
        let gens: Vec<_> = sigma.generators().iter().map(|m| reduce(m, 15)).collect();
        let g15 = QuotientGroup::generate(&gens, 15, DEFAULT_BUDGET).unwrap();
        assert_eq!(prod.order(), g15.order());
        assert!(prod.is_connected());
        assert!(prod.is_symmetric());
    }
}
