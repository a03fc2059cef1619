use gls_core::sieve::{
    gls_certify_with, primes_in_ap, APPrimeFamily, SieveConfig, SieveReport, Status,
};
use serde::Serialize;

use super::Verdict;
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::write_json;

#[derive(Serialize)]
struct SieveOutput<'a> {
    family: &'a APPrimeFamily,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<&'a SieveReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

/// The configured progression, restricted to primes `>= 3 C(n,2) + 1` and
/// `> m`.
pub fn family(cfg: &ExperimentConfig) -> Result<APPrimeFamily, CliError> {
    let (a, b) = cfg.family.progression();
    let n = cfg.n as u64;
    let floor = (3 * n * (n - 1) / 2 + 1).max(cfg.m + 1);
    let fam = primes_in_ap(a, b, cfg.limit, cfg.excluded_modulus)?.starting_at(floor);
    if fam.is_empty() {
        return Err(CliError::config(format!(
            "no primes p = {a} (mod {b}) with {floor} <= p <= {}",
            cfg.limit
        )));
    }
    Ok(fam)
}

/// Refuses families whose quotients `SL2(F_p)` exceed the element budget.
fn check_budget(cfg: &ExperimentConfig, fam: &APPrimeFamily) -> Result<(), CliError> {
    for &p in &fam.primes {
        let order = (p as u128) * (p as u128 * p as u128 - 1);
        if order > cfg.budget as u128 {
            return Err(CliError::Budget(format!(
                "SL2(F_{p}) has {order} elements; the budget is {}",
                cfg.budget
            )));
        }
    }
    Ok(())
}

pub fn certify(cfg: &ExperimentConfig, fam: &APPrimeFamily) -> Result<SieveReport, CliError> {
    check_budget(cfg, fam)?;
    let sieve_cfg = SieveConfig {
        seed: cfg.seed,
        budget: cfg.budget,
        pair_samples: cfg.pair_samples,
        empirical_samples: cfg.empirical_samples,
        pair_spectrum: cfg.pair_spectrum,
        ..SieveConfig::new(cfg.m, cfg.k_grid.clone())
    };
    Ok(gls_certify_with(&cfg.genset(), fam, &sieve_cfg)?)
}

/// Violated second-moment bounds and failed hypotheses of a report.
pub fn judge(report: &SieveReport) -> Verdict {
    let mut verdict = Verdict::default();
    for c in report.chebyshev.iter().filter(|c| c.holds == Some(false)) {
        verdict.violation(format!(
            "k={}: measured {} exceeds bound {:?}",
            c.k, c.measured, c.bound
        ));
    }
    for c in report
        .conditions
        .iter()
        .filter(|c| c.status == Status::Fail)
    {
        verdict.failed_condition(c.name);
    }
    verdict
}

/// Full certification report as JSON. A family too large for the budget
/// still gets a JSON artifact recording the family and the error.
pub fn run(cfg: &ExperimentConfig) -> Result<Verdict, CliError> {
    let fam = family(cfg)?;
    if cfg.family_only {
        write_json(
            cfg,
            &SieveOutput {
                family: &fam,
                report: None,
                error: None,
            },
        )?;
        return Ok(Verdict::default());
    }
    match certify(cfg, &fam) {
        Ok(report) => {
            write_json(
                cfg,
                &SieveOutput {
                    family: &fam,
                    report: Some(&report),
                    error: None,
                },
            )?;
            Ok(judge(&report))
        }
        Err(e @ CliError::Budget(_)) => {
            let out = SieveOutput {
                family: &fam,
                report: None,
                error: Some(e.to_string()),
            };
            write_json(cfg, &out)?;
            Err(e)
        }
        Err(e) => Err(e),
    }
}
