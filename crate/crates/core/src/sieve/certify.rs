use std::collections::VecDeque;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::chebyshev::ChebyshevStats;
use super::primes::{APPrimeFamily, FIRST_INDEX};
use super::SieveError;
use crate::modgroup::{power_image_mask, reduce, QuotientGroup, DEFAULT_BUDGET};
use crate::spectral::{
    spectrum, spectrum_with, CayleyGraph, SpectralError, SpectralReport, SpectrumOptions,
    WalkEvolution, ODD_GIRTH_CAP,
};
use crate::walker::{estimate_series, sample_rng, wilson_interval, Event, GenSet, WILSON_Z95};

/// Tunable parameters of [`gls_certify_with`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SieveConfig {
    pub m: u64,
    pub k_grid: Vec<u64>,
    /// Required census gap for every family prime.
    pub c_min: f64,
    /// Growth exponent to verify; the least admissible one when `None`.
    pub d: Option<u32>,
    /// Pairwise quotients up to this order get exact distributions.
    pub exact_pair_limit: usize,
    /// Monte Carlo walks for pairs above the exact limit.
    pub pair_samples: u64,
    /// Exact-state walks for the empirical `m`-th power curve; `0` skips it.
    pub empirical_samples: u64,
    pub seed: u64,
    /// Element budget for enumerating each single-prime quotient.
    pub budget: usize,
    /// Estimate `lambda2` of the smallest pairwise quotient by power
    /// iteration.
    pub pair_spectrum: bool,
    /// Largest pairwise quotient handed to power iteration.
    pub pair_spectrum_limit: usize,
}

impl SieveConfig {
    pub fn new(m: u64, k_grid: Vec<u64>) -> Self {
        Self {
            m,
            k_grid,
            ..Self::default()
        }
    }
}

impl Default for SieveConfig {
    fn default() -> Self {
        Self {
            m: 2,
            k_grid: (0..=10).map(|i| 10 * i).collect(),
            c_min: 1.0 / 12.0,
            d: None,
            exact_pair_limit: 1_000_000,
            pair_samples: 20_000,
            empirical_samples: 1_000,
            seed: 0,
            budget: DEFAULT_BUDGET,
            pair_spectrum: true,
            pair_spectrum_limit: 100_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Nothing to check, e.g. pair conditions on a one-prime family.
    Vacuous,
}

/// One claimed inequality together with both compared numbers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub subject: String,
    pub lhs: f64,
    pub relation: &'static str,
    pub rhs: f64,
    pub holds: bool,
}

impl Comparison {
    fn new(subject: String, lhs: f64, relation: &'static str, rhs: f64) -> Self {
        let holds = match relation {
            "<" => lhs < rhs,
            "<=" => lhs <= rhs,
            ">=" => lhs >= rhs,
            "==" => lhs == rhs,
            _ => unreachable!("unknown relation {relation}"),
        };
        Self {
            subject,
            lhs,
            relation,
            rhs,
            holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub id: u8,
    pub name: &'static str,
    pub status: Status,
    pub comparisons: Vec<Comparison>,
    pub note: String,
}

impl Condition {
    fn from_comparisons(
        id: u8,
        name: &'static str,
        comparisons: Vec<Comparison>,
        note: String,
    ) -> Self {
        let status = if comparisons.is_empty() {
            Status::Vacuous
        } else if comparisons.iter().all(|c| c.holds) {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            id,
            name,
            status,
            comparisons,
            note,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimeData {
    pub index: usize,
    pub p: u64,
    pub order: usize,
    /// `None` when the spectrum could not be computed; see `spectrum_error`.
    pub spectrum: Option<SpectralReport>,
    pub spectrum_error: Option<String>,
    pub census: usize,
    /// `1 - census / order`
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairMethod {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairData {
    pub p: u64,
    pub q: u64,
    /// `|Gamma_p| * |Gamma_q|`
    pub product_order: usize,
    /// Order of the image modulo `p q`, from reachability in the product
    /// graph; exact pairs only.
    pub image_order: Option<usize>,
    pub method: PairMethod,
    pub samples: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChebyshevPoint {
    pub k: u64,
    pub l: usize,
    /// Sum of `P(shadow mod p_i is not an m-th power)`.
    pub m_sum: f64,
    /// Largest off-diagonal covariance, conservative for Monte Carlo pairs.
    pub delta: f64,
    /// `None` when `m_sum` is zero.
    pub bound: Option<f64>,
    /// Smallest exactly computed probability that one or two shadows are all
    /// `m`-th powers; an upper bound on `P(w_k is an m-th power)`.
    pub measured: f64,
    pub measured_on: Vec<u64>,
    pub holds: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub k: u64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalPoint {
    pub k: u64,
    pub samples: u64,
    pub hits: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SieveReport {
    pub m: u64,
    /// `-ln(max alpha)` over the family.
    pub delta: f64,
    pub d: u32,
    /// Smallest census gap over the family.
    pub c: f64,
    /// Index of the first family prime.
    pub s: usize,
    pub family: APPrimeFamily,
    pub insufficient_family: bool,
    pub all_conditions_pass: bool,
    pub conditions: Vec<Condition>,
    pub primes: Vec<PrimeData>,
    pub pairs: Vec<PairData>,
    pub pair_spectrum: Option<SpectralReport>,
    pub chebyshev: Vec<ChebyshevPoint>,
    /// `k -> (20 / c^2) exp(-delta k / (d + 1))`
    pub bound_curve: Vec<CurvePoint>,
    pub empirical_curve: Vec<EmpiricalPoint>,
    pub notes: Vec<String>,
    pub config: SieveConfig,
}

struct PrimeJob {
    data: PrimeData,
    graph: CayleyGraph,
    /// `mask[v]`: vertex `v` is an `m`-th power.
    mask: Vec<bool>,
    /// `P(A_i)` at each grid step.
    miss: Vec<f64>,
}

struct PairJob {
    i: usize,
    j: usize,
    data: PairData,
    /// `P(A_i and A_j)` at each grid step.
    joint: Vec<f64>,
    /// Conservative `|W(i, j)|` at each grid step.
    w_abs: Vec<f64>,
    /// `P(both shadows are m-th powers)`, exact pairs only.
    both_powers: Option<Vec<f64>>,
}

/// [`gls_certify_with`] using defaults for everything but `m` and `k_grid`.
pub fn gls_certify(
    sigma: &GenSet,
    fam: &APPrimeFamily,
    m: u64,
    k_grid: &[u64],
) -> Result<SieveReport, SieveError> {
    gls_certify_with(sigma, fam, &SieveConfig::new(m, k_grid.to_vec()))
}

/// Measures the sieve hypotheses on the family and compares the second
/// moment bound against exactly computed probabilities on the grid.
///
/// Failing conditions are recorded in the report; errors are reserved for
/// unusable input.
pub fn gls_certify_with(
    sigma: &GenSet,
    fam: &APPrimeFamily,
    cfg: &SieveConfig,
) -> Result<SieveReport, SieveError> {
    let m = cfg.m;
    let n = sigma.dim();
    if m == 0 {
        return Err(SieveError::Precondition("m must be at least 1".into()));
    }
    if fam.is_empty() {
        return Err(SieveError::EmptyFamily);
    }
    let floor = 3 * (n as u64) * (n as u64).saturating_sub(1) / 2 + 1;
    if let Some(&p) = fam.primes.iter().find(|&&p| p % m != 1 % m || p < floor) {
        return Err(SieveError::Precondition(format!(
            "prime {p} must satisfy p = 1 (mod {m}) and p >= {floor}"
        )));
    }
    let mut grid = cfg.k_grid.clone();
    grid.sort_unstable();
    grid.dedup();
    if grid.is_empty() {
        return Err(SieveError::Precondition("k grid is empty".into()));
    }
    let mut notes = Vec::new();

    let jobs: Vec<PrimeJob> = fam
        .indexed()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(index, p)| prime_job(sigma, index, p, m, &grid, cfg.budget))
        .collect::<Result<_, _>>()?;
    let l = jobs.len();

    let pair_list: Vec<(usize, usize)> = (0..l)
        .flat_map(|i| (i + 1..l).map(move |j| (i, j)))
        .collect();
    let pairs: Vec<PairJob> = pair_list
        .par_iter()
        .enumerate()
        .map(|(slot, &(i, j))| pair_job(&jobs, i, j, slot as u64, &grid, cfg))
        .collect::<Result<_, _>>()?;

    let pair_spectrum = if cfg.pair_spectrum {
        smallest_pair_spectrum(&jobs, &pairs, cfg, &mut notes)?
    } else {
        None
    };

    // condition 1
    let mut c1 = Vec::new();
    let mut max_alpha: f64 = 0.0;
    for job in &jobs {
        match &job.data.spectrum {
            Some(r) => {
                max_alpha = max_alpha.max(r.alpha);
                c1.push(Comparison::new(
                    format!("alpha(p={})", job.data.p),
                    r.alpha,
                    "<",
                    1.0,
                ));
            }
            None => c1.push(Comparison::new(
                format!("alpha(p={}) unavailable", job.data.p),
                f64::NAN,
                "<",
                1.0,
            )),
        }
    }
    if let (Some(r), Some(pair)) = (&pair_spectrum, smallest_exact_pair(&pairs)) {
        c1.push(Comparison::new(
            format!("lambda2(p={}, q={}) iterative", pair.data.p, pair.data.q),
            r.lambda2,
            "<",
            1.0,
        ));
    }
    let delta = if max_alpha < 1.0 {
        -max_alpha.ln()
    } else {
        0.0
    };
    let cond1 = Condition::from_comparisons(
        1,
        "spectral_gap",
        c1,
        "evidence, not proof: uniform expansion over the infinite family cannot be certified from finitely many quotients".into(),
    );

    // condition 2
    let least_d = jobs
        .iter()
        .map(|j| least_exponent(j.data.index, j.data.order))
        .max()
        .unwrap_or(0);
    let d = cfg.d.unwrap_or(least_d);
    let c2: Vec<_> = jobs
        .iter()
        .map(|j| {
            Comparison::new(
                format!(
                    "|Gamma_{}| (p={}) vs {}^{}",
                    j.data.index, j.data.p, j.data.index, d
                ),
                j.data.order as f64,
                "<=",
                (j.data.index as f64).powi(d as i32),
            )
        })
        .collect();
    let cond2 = Condition::from_comparisons(
        2,
        "polynomial_growth",
        c2,
        format!("least exponent valid on the family: {least_d}"),
    );

    // condition 3
    let mut c3 = Vec::new();
    let mut untested = Vec::new();
    for pair in &pairs {
        match pair.data.image_order {
            Some(img) => c3.push(Comparison::new(
                format!(
                    "|Gamma mod {}*{}| vs |Gamma_p||Gamma_q|",
                    pair.data.p, pair.data.q
                ),
                img as f64,
                "==",
                pair.data.product_order as f64,
            )),
            None => untested.push(format!("{}*{}", pair.data.p, pair.data.q)),
        }
    }
    let note3 = if l < 2 {
        "insufficient family: pair conditions need at least two primes".to_string()
    } else if untested.is_empty() {
        String::new()
    } else {
        format!(
            "pairs above the exact limit not tested: {}",
            untested.join(", ")
        )
    };
    let cond3 = Condition::from_comparisons(3, "crt_product", c3, note3);

    // condition 4
    let c4: Vec<_> = jobs
        .iter()
        .map(|j| {
            Comparison::new(
                format!("census gap (p={})", j.data.p),
                j.data.gap,
                ">=",
                cfg.c_min,
            )
        })
        .collect();
    let c = jobs
        .iter()
        .map(|j| j.data.gap)
        .fold(f64::INFINITY, f64::min);
    let cond4 = Condition::from_comparisons(4, "census_gap", c4, String::new());

    let conditions = vec![cond1, cond2, cond3, cond4];
    let all_conditions_pass = conditions.iter().all(|c| c.status != Status::Fail);

    let chebyshev = chebyshev_points(&jobs, &pairs, &grid)?;

    let bound_curve = grid
        .iter()
        .map(|&k| CurvePoint {
            k,
            value: 20.0 / (c * c) * (-delta * k as f64 / (d as f64 + 1.0)).exp(),
        })
        .collect();

    let empirical_curve = if cfg.empirical_samples == 0 {
        Vec::new()
    } else if n != 2 || !sigma.admissibility().is_admissible() {
        notes.push("empirical curve skipped: needs an admissible 2x2 generating set".into());
        Vec::new()
    } else {
        estimate_series(
            sigma,
            Event::MPower(m),
            &grid,
            cfg.empirical_samples,
            cfg.seed,
        )?
        .into_iter()
        .map(|e| EmpiricalPoint {
            k: e.k,
            samples: e.valid_samples(),
            hits: e.hits,
            p_hat: e.p_hat,
            ci_low: e.ci_low,
            ci_high: e.ci_high,
        })
        .collect()
    };

    Ok(SieveReport {
        m,
        delta,
        d,
        c,
        s: FIRST_INDEX,
        family: fam.clone(),
        insufficient_family: l < 2,
        all_conditions_pass,
        conditions,
        primes: jobs.iter().map(|j| j.data.clone()).collect(),
        pairs: pairs.iter().map(|p| p.data.clone()).collect(),
        pair_spectrum,
        chebyshev,
        bound_curve,
        empirical_curve,
        notes,
        config: SieveConfig {
            k_grid: grid,
            ..cfg.clone()
        },
    })
}

fn prime_job(
    sigma: &GenSet,
    index: usize,
    p: u64,
    m: u64,
    grid: &[u64],
    budget: usize,
) -> Result<PrimeJob, SieveError> {
    let gens: Vec<_> = sigma.generators().iter().map(|g| reduce(g, p)).collect();
    let g = QuotientGroup::generate(&gens, p, budget)?;
    let graph = CayleyGraph::build(&g, sigma)?;
    let (spectrum, spectrum_error) = match spectrum(&graph) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let mask = power_image_mask(&g, m);
    let census = mask.iter().filter(|&&b| b).count();
    let miss_set: Vec<usize> = (0..g.order()).filter(|&v| !mask[v]).collect();
    let miss = on_grid(&graph, grid, |evo| evo.mass(&miss_set));
    Ok(PrimeJob {
        data: PrimeData {
            index,
            p,
            order: g.order(),
            spectrum,
            spectrum_error,
            census,
            gap: 1.0 - census as f64 / g.order() as f64,
        },
        graph,
        mask,
        miss,
    })
}

/// Evaluates `f` on the walk distribution at every grid step.
fn on_grid<T>(graph: &CayleyGraph, grid: &[u64], mut f: impl FnMut(&WalkEvolution) -> T) -> Vec<T> {
    let mut evo = WalkEvolution::new(graph);
    let mut out = Vec::with_capacity(grid.len());
    for &k in grid {
        while evo.k() < k {
            evo.step();
        }
        out.push(f(&evo));
    }
    out
}

fn pair_job(
    jobs: &[PrimeJob],
    i: usize,
    j: usize,
    slot: u64,
    grid: &[u64],
    cfg: &SieveConfig,
) -> Result<PairJob, SieveError> {
    let (a, b) = (&jobs[i], &jobs[j]);
    let product_order = a.data.order * b.data.order;
    let independent: Vec<f64> = a.miss.iter().zip(&b.miss).map(|(x, y)| x * y).collect();
    if product_order <= cfg.exact_pair_limit {
        let x = CayleyGraph::diagonal_product(&a.graph, &b.graph, ODD_GIRTH_CAP)?;
        let nb = b.data.order;
        let masses = on_grid(&x, grid, |evo| {
            let (mut joint, mut both) = (0.0, 0.0);
            for (v, &pr) in evo.probabilities().iter().enumerate() {
                if pr == 0.0 {
                    continue;
                }
                match (a.mask[v / nb], b.mask[v % nb]) {
                    (false, false) => joint += pr,
                    (true, true) => both += pr,
                    _ => {}
                }
            }
            (joint, both)
        });
        let joint: Vec<f64> = masses.iter().map(|m| m.0).collect();
        let w_abs = joint
            .iter()
            .zip(&independent)
            .map(|(j, p)| (j - p).abs())
            .collect();
        Ok(PairJob {
            i,
            j,
            data: PairData {
                p: a.data.p,
                q: b.data.p,
                product_order,
                image_order: Some(reachable(&x)),
                method: PairMethod::Exact,
                samples: None,
            },
            joint,
            w_abs,
            both_powers: Some(masses.iter().map(|m| m.1).collect()),
        })
    } else {
        let samples = cfg.pair_samples.max(1);
        let k_max = *grid.last().unwrap();
        let degree = a.graph.degree();
        let hits = (0..samples)
            .into_par_iter()
            .map(|s| {
                let mut rng = sample_rng(cfg.seed, (slot + 1) << 40 | s);
                let (mut u, mut v) = (a.graph.identity(), b.graph.identity());
                let mut out = vec![0u64; grid.len()];
                let mut g = 0;
                for k in 0..=k_max {
                    while g < grid.len() && grid[g] == k {
                        out[g] = u64::from(!a.mask[u] && !b.mask[v]);
                        g += 1;
                    }
                    let slot = rng.gen_range(0..degree);
                    u = a.graph.neighbor(u, slot);
                    v = b.graph.neighbor(v, slot);
                }
                out
            })
            .reduce(
                || vec![0; grid.len()],
                |x, y| x.iter().zip(&y).map(|(p, q)| p + q).collect(),
            );
        let joint: Vec<f64> = hits.iter().map(|&h| h as f64 / samples as f64).collect();
        let w_abs = hits
            .iter()
            .zip(&independent)
            .map(|(&h, &p)| {
                let (lo, hi) = wilson_interval(h, samples, WILSON_Z95);
                (lo - p).abs().max((hi - p).abs())
            })
            .collect();
        Ok(PairJob {
            i,
            j,
            data: PairData {
                p: a.data.p,
                q: b.data.p,
                product_order,
                image_order: None,
                method: PairMethod::MonteCarlo,
                samples: Some(samples),
            },
            joint,
            w_abs,
            both_powers: None,
        })
    }
}

fn reachable(x: &CayleyGraph) -> usize {
    let mut seen = vec![false; x.order()];
    seen[x.identity()] = true;
    let mut queue = VecDeque::from([x.identity()]);
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for &u in x.neighbors(v) {
            let u = u as usize;
            if !seen[u] {
                seen[u] = true;
                count += 1;
                queue.push_back(u);
            }
        }
    }
    count
}

fn smallest_exact_pair(pairs: &[PairJob]) -> Option<&PairJob> {
    pairs
        .iter()
        .filter(|p| p.data.method == PairMethod::Exact)
        .min_by_key(|p| p.data.product_order)
}

fn smallest_pair_spectrum(
    jobs: &[PrimeJob],
    pairs: &[PairJob],
    cfg: &SieveConfig,
    notes: &mut Vec<String>,
) -> Result<Option<SpectralReport>, SieveError> {
    let Some(pair) = smallest_exact_pair(pairs) else {
        return Ok(None);
    };
    if pair.data.product_order > cfg.pair_spectrum_limit {
        notes.push(format!(
            "pair spectrum skipped: smallest pair {}*{} has {} elements, above the limit {}",
            pair.data.p, pair.data.q, pair.data.product_order, cfg.pair_spectrum_limit
        ));
        return Ok(None);
    }
    let x = CayleyGraph::diagonal_product(&jobs[pair.i].graph, &jobs[pair.j].graph, ODD_GIRTH_CAP)?;
    let opts = SpectrumOptions {
        dense_limit: 0,
        seed: cfg.seed,
        ..SpectrumOptions::default()
    };
    match spectrum_with(&x, &opts) {
        Ok(r) => Ok(Some(r)),
        Err(SpectralError::NotConverged {
            lambda2, residual, ..
        }) => {
            notes.push(format!(
                "pair spectrum for {}*{} did not converge: lambda2 ~ {lambda2}, residual {residual:e}",
                pair.data.p, pair.data.q
            ));
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

/// Least `d` with `order <= index^d`.
fn least_exponent(index: usize, order: usize) -> u32 {
    let mut d = 0;
    let mut pow: u128 = 1;
    while pow < order as u128 {
        pow *= index as u128;
        d += 1;
    }
    d
}

fn chebyshev_points(
    jobs: &[PrimeJob],
    pairs: &[PairJob],
    grid: &[u64],
) -> Result<Vec<ChebyshevPoint>, SieveError> {
    let l = jobs.len();
    let mut out = Vec::with_capacity(grid.len());
    for (g, &k) in grid.iter().enumerate() {
        let p: Vec<f64> = jobs.iter().map(|j| j.miss[g]).collect();
        let mut joint: Vec<Vec<f64>> = (0..l)
            .map(|i| (0..l).map(|j| if i == j { p[i] } else { 0.0 }).collect())
            .collect();
        let mut delta: f64 = 0.0;
        for pair in pairs {
            joint[pair.i][pair.j] = pair.joint[g];
            joint[pair.j][pair.i] = pair.joint[g];
            delta = delta.max(pair.w_abs[g]);
        }
        let stats = ChebyshevStats::from_probabilities(&p, &joint)?;
        let delta = delta.max(stats.delta);
        let stats = stats.with_delta(delta);
        let bound = match stats.bound() {
            Ok(b) => Some(b),
            Err(SieveError::ZeroMass) => None,
            Err(e) => return Err(e),
        };
        let mut measured = 1.0;
        let mut measured_on = Vec::new();
        for job in jobs {
            let v = 1.0 - job.miss[g];
            if v < measured || measured_on.is_empty() {
                measured = v;
                measured_on = vec![job.data.p];
            }
        }
        for pair in pairs {
            if let Some(both) = &pair.both_powers {
                if both[g] < measured {
                    measured = both[g];
                    measured_on = vec![pair.data.p, pair.data.q];
                }
            }
        }
        out.push(ChebyshevPoint {
            k,
            l,
            m_sum: stats.m,
            delta,
            bound,
            measured,
            measured_on,
            holds: bound.map(|b| measured <= b + 1e-12),
        });
    }
    Ok(out)
}
