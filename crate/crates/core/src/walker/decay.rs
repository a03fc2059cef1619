use serde::Serialize;

use super::estimate::{wilson_upper, DecayEstimate, WILSON_Z95};
use super::WalkError;

/// One-sided 95% normal quantile used to censor zero-hit cells.
const ONE_SIDED_Z95: f64 = 1.644_853_626_951_472_2;

/// Weighted least-squares fit of `ln p_hat = intercept + slope * k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitDiagnostics {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error after inflation by `max(1, chi2 / dof)`.
    pub slope_se: f64,
    pub slope_ci_low: f64,
    pub slope_ci_high: f64,
    pub chi2: f64,
    pub dof: usize,
    pub points: usize,
    /// Zero-hit cells replaced by their one-sided upper confidence bound.
    pub censored: usize,
}

impl FitDiagnostics {
    /// The 95% interval for the slope lies strictly below zero.
    pub fn decays(&self) -> bool {
        self.slope_ci_high < 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DecayFit {
    Fitted(FitDiagnostics),
    /// Every cell had zero hits: the probabilities are below what the sample
    /// sizes can resolve.
    BelowResolution {
        points: usize,
    },
}

/// Fits `ln p_hat` against `k`.
///
/// Each cell has weight `n p / (1 - p)`, the inverse delta-method variance
/// of `ln p_hat`. Zero-hit cells enter at the one-sided 95% Wilson upper
/// bound. The slope interval is inflated by `sqrt(chi2 / dof)` when the
/// residual scatter exceeds the binomial model.
pub fn decay_fit(estimates: &[DecayEstimate]) -> Result<DecayFit, WalkError> {
    let cells: Vec<&DecayEstimate> = estimates.iter().filter(|e| e.valid_samples() > 0).collect();
    let mut ks: Vec<u64> = cells.iter().map(|e| e.k).collect();
    ks.sort_unstable();
    ks.dedup();
    if ks.len() < 4 {
        return Err(WalkError::TooFewPoints(ks.len()));
    }
    if cells.iter().all(|e| e.hits == 0) {
        return Ok(DecayFit::BelowResolution {
            points: cells.len(),
        });
    }

    let mut censored = 0;
    let pts: Vec<(f64, f64, f64)> = cells
        .iter()
        .map(|e| {
            let n = e.valid_samples() as f64;
            let p = if e.hits == 0 {
                censored += 1;
                wilson_upper(0, e.valid_samples(), ONE_SIDED_Z95)
            } else {
                e.hits as f64 / n
            };
            let p_var = p.min(1.0 - 0.5 / n);
            let var = (1.0 - p_var) / (n * p_var);
            (e.k as f64, p.ln(), 1.0 / var)
        })
        .collect();

    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let xbar = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let ybar = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - xbar).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - xbar) * (p.1 - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let chi2: f64 = pts
        .iter()
        .map(|p| p.2 * (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let dof = pts.len() - 2;
    let scale = (chi2 / dof as f64).max(1.0);
    let slope_se = (scale / sxx).sqrt();
    Ok(DecayFit::Fitted(FitDiagnostics {
        slope,
        intercept,
        slope_se,
        slope_ci_low: slope - WILSON_Z95 * slope_se,
        slope_ci_high: slope + WILSON_Z95 * slope_se,
        chi2,
        dof,
        points: pts.len(),
        censored,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walker::Event;

    fn cell(k: u64, hits: u64, n: u64) -> DecayEstimate {
        let p = hits as f64 / n as f64;
        DecayEstimate {
            event: Event::ProperPower,
            k,
            samples: n,
            hits,
            failures: 0,
            p_hat: p,
            ci_low: p,
            ci_high: p,
            seed: 0,
        }
    }

    fn fitted(f: DecayFit) -> FitDiagnostics {
        match f {
            DecayFit::Fitted(d) => d,
            other => panic!("expected a fit, got {other:?}"),
        }
    }

    #[test]
    fn exact_exponential() {
        let n = 100_000_000u64;
        let cells: Vec<_> = (1..=10)
            .map(|i| {
                let k = 2 * i;
                cell(k, ((-0.3 * k as f64).exp() * n as f64).round() as u64, n)
            })
            .collect();
        let d = fitted(decay_fit(&cells).unwrap());
        assert!((d.slope + 0.3).abs() < 0.01, "{d:?}");
        assert!(d.decays());
    }

    #[test]
    fn constant_probability() {
        let cells: Vec<_> = (0..8).map(|i| cell(5 * i, 5000, 10_000)).collect();
        let d = fitted(decay_fit(&cells).unwrap());
        assert!(d.slope_ci_low <= 0.0 && 0.0 <= d.slope_ci_high, "{d:?}");
    }

    #[test]
    fn all_zero_is_below_resolution() {
        let cells: Vec<_> = (0..5).map(|i| cell(i, 0, 1000)).collect();
        assert_eq!(
            decay_fit(&cells).unwrap(),
            DecayFit::BelowResolution { points: 5 }
        );
    }

    #[test]
    fn zero_cells_are_censored() {
        let cells = vec![
            cell(1, 400, 1000),
            cell(2, 150, 1000),
            cell(3, 60, 1000),
            cell(4, 20, 1000),
            cell(5, 0, 1000),
        ];
        let d = fitted(decay_fit(&cells).unwrap());
        assert_eq!(d.censored, 1);
        assert!(d.slope.is_finite() && d.decays());
    }

    #[test]
    fn needs_four_step_counts() {
        let cells: Vec<_> = (0..3).map(|i| cell(i, 10, 100)).collect();
        assert_eq!(decay_fit(&cells), Err(WalkError::TooFewPoints(3)));
    }
}
