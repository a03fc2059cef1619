use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{CayleyGraph, SpectralError};

/// Graphs up to this many vertices are diagonalized densely.
pub const DENSE_LIMIT: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMethod {
    Dense,
    Iterative,
}

impl std::fmt::Display for SpectrumMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SpectrumMethod::Dense => "dense",
            SpectrumMethod::Iterative => "iterative",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumOptions {
    pub dense_limit: usize,
    /// Residual `||M x - theta x||` at which power iteration stops.
    pub tol: f64,
    pub max_iter: usize,
    /// Seed of the power-iteration start vector.
    pub seed: u64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            dense_limit: DENSE_LIMIT,
            tol: 1e-8,
            max_iter: 50_000,
            seed: 0,
        }
    }
}

/// Extreme eigenvalues of the normalized adjacency operator.
///
/// `lambda2` is the largest eigenvalue after removing one copy of the
/// trivial eigenvalue `1`; a single vertex reports `lambda2 = lambda_min = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub vertices: usize,
    pub degree: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda_min: f64,
    /// `1 - lambda2`
    pub gap: f64,
    /// `max(|lambda2|, |lambda_min|)`
    pub alpha: f64,
    pub method: SpectrumMethod,
    /// Largest eigen-residual norm; `0` for the dense method.
    pub residual: f64,
    pub iterations: usize,
}

impl SpectralReport {
    fn new(
        x: &CayleyGraph,
        lambda2: f64,
        lambda_min: f64,
        method: SpectrumMethod,
        residual: f64,
        iterations: usize,
    ) -> Self {
        Self {
            vertices: x.order(),
            degree: x.degree(),
            lambda1: 1.0,
            lambda2,
            lambda_min,
            gap: 1.0 - lambda2,
            alpha: lambda2.abs().max(lambda_min.abs()),
            method,
            residual,
            iterations,
        }
    }

    pub const CSV_HEADER: &'static str =
        "p,vertices,degree,lambda2,lambda_min,gap,alpha,method,residual";

    /// One CSV row; `label` fills the `p` column.
    pub fn csv_row(&self, label: &str) -> String {
        format!(
            "{},{},{},{:.12},{:.12},{:.12},{:.12},{},{:e}",
            label,
            self.vertices,
            self.degree,
            self.lambda2,
            self.lambda_min,
            self.gap,
            self.alpha,
            self.method,
            self.residual
        )
    }
}

/// Real `l`-th root of `2 / |Sigma|^l - 1`, taken with its sign for odd `l`.
///
/// When the identity-free multiset has a closed walk of odd length `l`
/// through the identity, every eigenvalue is at least this value.
pub fn min_eig_floor(sigma_len: usize, l: u32) -> f64 {
    let x = 2.0 / (sigma_len as f64).powi(l as i32) - 1.0;
    x.signum() * x.abs().powf(1.0 / l as f64)
}

pub fn spectrum(x: &CayleyGraph) -> Result<SpectralReport, SpectralError> {
    spectrum_with(x, &SpectrumOptions::default())
}

pub fn spectrum_with(
    x: &CayleyGraph,
    opts: &SpectrumOptions,
) -> Result<SpectralReport, SpectralError> {
    if !x.is_symmetric() {
        return Err(SpectralError::NotSymmetric);
    }
    if x.order() == 1 {
        return Ok(SpectralReport::new(
            x,
            1.0,
            1.0,
            SpectrumMethod::Dense,
            0.0,
            0,
        ));
    }
    if x.order() <= opts.dense_limit {
        Ok(dense(x))
    } else {
        iterative(x, opts)
    }
}

fn dense(x: &CayleyGraph) -> SpectralReport {
    let n = x.order();
    let w = 1.0 / x.degree() as f64;
    let mut a = DMatrix::<f64>::zeros(n, n);
    for v in 0..n {
        for &u in x.neighbors(v) {
            a[(v, u as usize)] += w;
        }
    }
    let mut eig: Vec<f64> = a.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|p, q| q.total_cmp(p));
    SpectralReport::new(x, eig[1], eig[n - 1], SpectrumMethod::Dense, 0.0, 0)
}

/// `y = A x` in pull form; valid because the operator is symmetric.
fn apply(x: &CayleyGraph, v: &[f64], out: &mut [f64]) {
    let w = 1.0 / x.degree() as f64;
    for (i, o) in out.iter_mut().enumerate() {
        *o = x.neighbors(i).iter().map(|&u| v[u as usize]).sum::<f64>() * w;
    }
}

fn remove_mean(v: &mut [f64]) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|e| *e -= mean);
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|e| e * e).sum::<f64>().sqrt()
}

struct TopEig {
    theta: f64,
    residual: f64,
    iterations: usize,
    converged: bool,
}

/// Largest eigenvalue of `(I + sign * A) / 2` on the complement of the
/// constant vector. Both shifted operators are positive semidefinite, so
/// their top eigenvalue dominates in absolute value.
fn top_eigen(x: &CayleyGraph, sign: f64, opts: &SpectrumOptions) -> TopEig {
    let n = x.order();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    remove_mean(&mut v);
    let nv = norm(&v);
    v.iter_mut().for_each(|e| *e /= nv);
    let mut av = vec![0.0; n];
    let mut best = TopEig {
        theta: 0.0,
        residual: f64::INFINITY,
        iterations: 0,
        converged: false,
    };
    for it in 1..=opts.max_iter {
        apply(x, &v, &mut av);
        let mut y: Vec<f64> = v
            .iter()
            .zip(&av)
            .map(|(a, b)| 0.5 * (a + sign * b))
            .collect();
        remove_mean(&mut y);
        let theta: f64 = v.iter().zip(&y).map(|(a, b)| a * b).sum();
        let residual = norm(
            &y.iter()
                .zip(&v)
                .map(|(a, b)| a - theta * b)
                .collect::<Vec<_>>(),
        );
        best = TopEig {
            theta,
            residual,
            iterations: it,
            converged: residual < opts.tol,
        };
        let ny = norm(&y);
        if best.converged || ny == 0.0 {
            best.converged = true;
            break;
        }
        y.iter_mut().for_each(|e| *e /= ny);
        v = y;
    }
    best
}

fn iterative(x: &CayleyGraph, opts: &SpectrumOptions) -> Result<SpectralReport, SpectralError> {
    let hi = top_eigen(x, 1.0, opts);
    let lo = top_eigen(x, -1.0, opts);
    let lambda2 = 2.0 * hi.theta - 1.0;
    let lambda_min = 1.0 - 2.0 * lo.theta;
    // residuals of the shifted operators scale by 2 back on A
    let residual = 2.0 * hi.residual.max(lo.residual);
    if !(hi.converged && lo.converged) {
        return Err(SpectralError::NotConverged {
            lambda2,
            lambda_min,
            residual,
            tol: opts.tol,
            iterations: hi.iterations.max(lo.iterations),
        });
    }
    Ok(SpectralReport::new(
        x,
        lambda2,
        lambda_min,
        SpectrumMethod::Iterative,
        residual,
        hi.iterations + lo.iterations,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::presets;
    use crate::modgroup::{QuotientGroup, DEFAULT_BUDGET};
    use crate::spectral::build_cayley;
    use crate::walker::GenSet;

    #[test]
    fn floor_values() {
        assert!((min_eig_floor(5, 1) + 0.6).abs() < 1e-15);
        assert_eq!(min_eig_floor(1, 1), 1.0);
        let f = min_eig_floor(3, 3);
        assert!((f.powi(3) - (2.0 / 27.0 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn cycle_graph_spectrum() {
        // Z/7 with steps +1, -1: eigenvalues cos(2 pi j / 7)
        let n = 7;
        let table: Vec<u32> = (0..n)
            .flat_map(|v| [(v + 1) % n, (v + n - 1) % n])
            .collect();
        let x = CayleyGraph::from_table(n as usize, 2, table, 0, 9).unwrap();
        assert_eq!(x.odd_girth(), Some(7));
        let r = spectrum(&x).unwrap();
        let t = std::f64::consts::TAU / 7.0;
        assert!((r.lambda2 - t.cos()).abs() < 1e-12);
        assert!((r.lambda_min - (3.0 * t).cos()).abs() < 1e-12);
    }

    #[test]
    fn iterative_agrees_with_dense() {
        let g = QuotientGroup::enumerate_sl2(7, DEFAULT_BUDGET).unwrap();
        let x = build_cayley(&g, &GenSet::sl2z_standard()).unwrap();
        let d = spectrum(&x).unwrap();
        let opts = SpectrumOptions {
            dense_limit: 0,
            ..SpectrumOptions::default()
        };
        let it = spectrum_with(&x, &opts).unwrap();
        assert_eq!(it.method, SpectrumMethod::Iterative);
        assert!((d.lambda2 - it.lambda2).abs() < 1e-7, "{d:?} {it:?}");
        assert!((d.lambda_min - it.lambda_min).abs() < 1e-7, "{d:?} {it:?}");
    }

    #[test]
    fn iteration_cap_reports_estimate() {
        let g = QuotientGroup::enumerate_sl2(7, DEFAULT_BUDGET).unwrap();
        let x = build_cayley(&g, &GenSet::sl2z_standard()).unwrap();
        let opts = SpectrumOptions {
            dense_limit: 0,
            max_iter: 2,
            ..SpectrumOptions::default()
        };
        assert!(matches!(
            spectrum_with(&x, &opts),
            Err(SpectralError::NotConverged { iterations: 2, .. })
        ));
    }

    #[test]
    fn floor_holds_for_standard_set() {
        let sigma = GenSet::new(vec![
            presets::s(),
            presets::s_inv(),
            presets::t(),
            presets::t_inv(),
        ]);
        for p in [3, 5, 7] {
            let g = QuotientGroup::enumerate_sl2(p, DEFAULT_BUDGET).unwrap();
            let x = build_cayley(&g, &sigma).unwrap();
            if let Some(l) = x.odd_girth() {
                let r = spectrum(&x).unwrap();
                assert!(r.lambda_min >= min_eig_floor(4, l as u32) - 1e-9);
            }
        }
    }

    #[test]
    fn tiny_graphs() {
        let one = CayleyGraph::from_table(1, 3, vec![0; 3], 0, 9).unwrap();
        let r = spectrum(&one).unwrap();
        assert_eq!((r.lambda1, r.lambda_min), (1.0, 1.0));
        let two = CayleyGraph::from_table(2, 1, vec![1, 0], 0, 9).unwrap();
        assert_eq!(two.odd_girth(), None);
        assert!((spectrum(&two).unwrap().lambda_min + 1.0).abs() < 1e-12);
    }

    #[test]
    fn directed_graph_rejected() {
        let table: Vec<u32> = (0..5).map(|v| (v + 1) % 5).collect();
        let x = CayleyGraph::from_table(5, 1, table, 0, 9).unwrap();
        assert_eq!(spectrum(&x), Err(SpectralError::NotSymmetric));
    }
}
