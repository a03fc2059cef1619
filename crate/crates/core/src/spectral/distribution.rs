use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::CayleyGraph;

/// Additive slack on the bound side of double-precision equidistribution
/// checks.
pub const EQUI_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkMode {
    Float,
    /// Path counts as big integers over the common denominator `|Sigma|^k`.
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    Float(Vec<f64>),
    Exact {
        counts: Vec<BigUint>,
        total: BigUint,
    },
}

impl Distribution {
    pub fn len(&self) -> usize {
        match self {
            Distribution::Float(p) => p.len(),
            Distribution::Exact { counts, .. } => counts.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn probability(&self, v: usize) -> f64 {
        match self {
            Distribution::Float(p) => p[v],
            Distribution::Exact { counts, total } => ratio(&counts[v], total),
        }
    }

    /// `P(w_k in subset)`; exact mode sums counts before dividing.
    pub fn mass(&self, subset: &[usize]) -> f64 {
        match self {
            Distribution::Float(p) => subset.iter().map(|&v| p[v]).sum(),
            Distribution::Exact { counts, total } => {
                let hits: BigUint = subset.iter().map(|&v| &counts[v]).sum();
                ratio(&hits, total)
            }
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        (0..self.len()).map(|v| self.probability(v)).collect()
    }

    /// Exact mode: counts sum to the denominator. Float mode: total within
    /// `1e-12` of one.
    pub fn is_stochastic(&self) -> bool {
        match self {
            Distribution::Float(p) => (p.iter().sum::<f64>() - 1.0).abs() <= 1e-12,
            Distribution::Exact { counts, total } => counts.iter().sum::<BigUint>() == *total,
        }
    }
}

fn ratio(num: &BigUint, den: &BigUint) -> f64 {
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
        .to_f64()
        .unwrap_or(f64::NAN)
}

/// Distribution of `w_k` for the walk started at the identity vertex.
pub fn exact_walk_distribution(x: &CayleyGraph, k: u64, mode: WalkMode) -> Distribution {
    match mode {
        WalkMode::Float => {
            let mut evo = WalkEvolution::new(x);
            for _ in 0..k {
                evo.step();
            }
            Distribution::Float(evo.current)
        }
        WalkMode::Exact => {
            let n = x.order();
            let mut counts = vec![BigUint::zero(); n];
            counts[x.identity()] = BigUint::one();
            let mut total = BigUint::one();
            let d = BigUint::from(x.degree());
            for _ in 0..k {
                let mut next = vec![BigUint::zero(); n];
                for (v, c) in counts.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    for &u in x.neighbors(v) {
                        next[u as usize] += c;
                    }
                }
                counts = next;
                total *= &d;
            }
            Distribution::Exact { counts, total }
        }
    }
}

/// Double-precision distribution advanced one step at a time.
#[derive(Debug, Clone)]
pub struct WalkEvolution<'a> {
    graph: &'a CayleyGraph,
    current: Vec<f64>,
    scratch: Vec<f64>,
    k: u64,
}

impl<'a> WalkEvolution<'a> {
    pub fn new(graph: &'a CayleyGraph) -> Self {
        let mut current = vec![0.0; graph.order()];
        current[graph.identity()] = 1.0;
        Self {
            graph,
            scratch: vec![0.0; graph.order()],
            current,
            k: 0,
        }
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.current
    }

    pub fn mass(&self, subset: &[usize]) -> f64 {
        subset.iter().map(|&v| self.current[v]).sum()
    }

    pub fn step(&mut self) {
        let w = 1.0 / self.graph.degree() as f64;
        self.scratch.iter_mut().for_each(|e| *e = 0.0);
        for (v, &p) in self.current.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for &u in self.graph.neighbors(v) {
                self.scratch[u as usize] += p * w;
            }
        }
        std::mem::swap(&mut self.current, &mut self.scratch);
        self.k += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquiRow {
    pub k: u64,
    pub probability: f64,
    pub target: f64,
    /// `|probability - target|`
    pub residual: f64,
    /// `sqrt(|V|) * alpha^k`, before slack
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquidistributionTable {
    pub rows: Vec<EquiRow>,
    pub first_violation: Option<u64>,
}

impl EquidistributionTable {
    pub fn holds(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Compares `P(w_k in subset)` against `|subset| / |V|` for `k = 0..=k_max`
/// with the bound `sqrt(|V|) * alpha^k + EQUI_SLACK`.
pub fn equidistribution_check(
    x: &CayleyGraph,
    subset: &[usize],
    k_max: u64,
    alpha: f64,
) -> EquidistributionTable {
    let n = x.order() as f64;
    let target = subset.len() as f64 / n;
    let mut evo = WalkEvolution::new(x);
    let mut rows = Vec::with_capacity(k_max as usize + 1);
    let mut first_violation = None;
    loop {
        let k = evo.k();
        let probability = evo.mass(subset);
        let residual = (probability - target).abs();
        let bound = n.sqrt() * alpha.powi(k as i32);
        let holds = residual <= bound + EQUI_SLACK;
        if !holds && first_violation.is_none() {
            first_violation = Some(k);
        }
        rows.push(EquiRow {
            k,
            probability,
            target,
            residual,
            bound,
            holds,
        });
        if k == k_max {
            break;
        }
        evo.step();
    }
    EquidistributionTable {
        rows,
        first_violation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modgroup::{QuotientGroup, DEFAULT_BUDGET};
    use crate::spectral::{build_cayley, spectrum};
    use crate::walker::GenSet;

    fn sl2_graph(p: u64) -> (QuotientGroup, CayleyGraph) {
        let g = QuotientGroup::enumerate_sl2(p, DEFAULT_BUDGET).unwrap();
        let x = build_cayley(&g, &GenSet::sl2z_standard()).unwrap();
        (g, x)
    }

    #[test]
    fn step_zero_point_mass() {
        let (g, x) = sl2_graph(3);
        for mode in [WalkMode::Float, WalkMode::Exact] {
            let d = exact_walk_distribution(&x, 0, mode);
            assert_eq!(d.probability(g.identity()), 1.0);
            assert!(d.is_stochastic());
        }
    }

    #[test]
    fn two_steps_match_path_enumeration() {
        let (_, x) = sl2_graph(3);
        let mut counts = vec![0u32; x.order()];
        for a in 0..5 {
            for b in 0..5 {
                counts[x.neighbor(x.neighbor(x.identity(), a), b)] += 1;
            }
        }
        let d = exact_walk_distribution(&x, 2, WalkMode::Exact);
        let Distribution::Exact { counts: c, total } = &d else {
            panic!()
        };
        assert_eq!(*total, BigUint::from(25u32));
        for (v, &n) in counts.iter().enumerate() {
            assert_eq!(c[v], BigUint::from(n));
        }
        let f = exact_walk_distribution(&x, 2, WalkMode::Float);
        for (v, &n) in counts.iter().enumerate() {
            assert!((f.probability(v) - n as f64 / 25.0).abs() < 1e-15);
        }
    }

    #[test]
    fn float_tracks_exact() {
        let (_, x) = sl2_graph(5);
        let e = exact_walk_distribution(&x, 30, WalkMode::Exact);
        let f = exact_walk_distribution(&x, 30, WalkMode::Float);
        assert!(e.is_stochastic() && f.is_stochastic());
        for v in 0..x.order() {
            assert!((e.probability(v) - f.probability(v)).abs() < 1e-14);
        }
    }

    #[test]
    fn trivial_subsets() {
        let (_, x) = sl2_graph(5);
        let all: Vec<usize> = (0..x.order()).collect();
        let t = equidistribution_check(&x, &all, 20, 0.0);
        assert!(t.rows.iter().all(|r| r.residual < 1e-12));
        let t = equidistribution_check(&x, &[], 20, 0.0);
        assert!(t.rows.iter().all(|r| r.residual == 0.0) && t.holds());
    }

    #[test]
    fn trace_two_subset_on_sl2_7() {
        let (g, x) = sl2_graph(7);
        let subset: Vec<usize> = (0..g.order())
            .filter(|&i| {
                let e = g.entries(i);
                (e[0] + e[3]) % 7 == 2
            })
            .collect();
        let alpha = spectrum(&x).unwrap().alpha;
        let t = equidistribution_check(&x, &subset, 200, alpha);
        assert_eq!(t.rows.len(), 201);
        assert!(t.holds(), "{:?}", t.first_violation);
    }

    #[test]
    fn violation_reported() {
        let (g, x) = sl2_graph(5);
        let t = equidistribution_check(&x, &[g.identity()], 5, 0.0);
        assert_eq!(t.first_violation, Some(1));
    }
}
