use gls_core::modgroup::{reduce, QuotientGroup};
use gls_core::sieve::{SieveReport, Status};
use gls_core::spectral::{build_cayley, min_eig_floor};

use super::{sieve, Verdict};
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::CsvSink;

pub const HEADER: &str = "check,subject,value,relation,bound,pass";

/// Slack on the eigenvalue floor comparison.
const FLOOR_TOL: f64 = 1e-8;

/// Certifies the configured family and flattens every checked inequality
/// into one table: census gaps, eigenvalue floors, the sieve conditions and
/// the second-moment bound at each grid step.
pub fn run(cfg: &ExperimentConfig) -> Result<Verdict, CliError> {
    let fam = sieve::family(cfg)?;
    let report = sieve::certify(cfg, &fam)?;
    let mut verdict = sieve::judge(&report);
    let mut sink = CsvSink::create(cfg, HEADER)?;

    for p in &report.primes {
        let ratio = p.census as f64 / p.order as f64;
        let holds = 12 * p.census <= 11 * p.order;
        if !holds {
            verdict.violation(format!("p={}: census ratio {ratio} above 11/12", p.p));
        }
        sink.row(&format!(
            "census_ratio,p={},{ratio:.12},<=,{:.12},{holds}",
            p.p,
            11.0 / 12.0
        ))?;
    }
    for row in floor_rows(cfg, &report, &mut verdict)? {
        sink.row(&row)?;
    }
    for c in &report.conditions {
        if c.comparisons.is_empty() {
            sink.row(&format!("{},,,,,{}", c.name, status(c.status)))?;
        }
        for cmp in &c.comparisons {
            sink.row(&format!(
                "{},{},{:e},{},{:e},{}",
                c.name,
                cmp.subject.replace(',', ";"),
                cmp.lhs,
                cmp.relation,
                cmp.rhs,
                cmp.holds
            ))?;
        }
    }
    for c in &report.chebyshev {
        let (bound, pass) = match (c.bound, c.holds) {
            (Some(b), Some(h)) => (format!("{b:e}"), h.to_string()),
            _ => (String::new(), "vacuous".into()),
        };
        sink.row(&format!(
            "second_moment,k={},{:e},<=,{bound},{pass}",
            c.k, c.measured
        ))?;
    }
    sink.finish()?;
    Ok(verdict)
}

fn floor_rows(
    cfg: &ExperimentConfig,
    report: &SieveReport,
    verdict: &mut Verdict,
) -> Result<Vec<String>, CliError> {
    let sigma = cfg.genset();
    let mut rows = Vec::new();
    for p in &report.primes {
        let Some(spec) = &p.spectrum else {
            let reason = p.spectrum_error.as_deref().unwrap_or("no spectrum");
            rows.push(format!(
                "eigenvalue_floor,p={},,>=,,{}",
                p.p,
                reason.replace(',', ";")
            ));
            continue;
        };
        let gens: Vec<_> = sigma.generators().iter().map(|g| reduce(g, p.p)).collect();
        let g = QuotientGroup::generate(&gens, p.p, cfg.budget)?;
        let x = build_cayley(&g, &sigma)?;
        let row = match x.odd_girth() {
            Some(l) => {
                let floor = min_eig_floor(sigma.len(), l as u32);
                let holds = spec.lambda_min >= floor - FLOOR_TOL;
                if !holds {
                    verdict.violation(format!("p={}: lambda_min below {floor}", p.p));
                }
                format!(
                    "eigenvalue_floor,p={},{:.12},>=,{floor:.12},{holds}",
                    p.p, spec.lambda_min
                )
            }
            None => format!("eigenvalue_floor,p={},{:.12},>=,,na", p.p, spec.lambda_min),
        };
        rows.push(row);
    }
    Ok(rows)
}

fn status(s: Status) -> &'static str {
    match s {
        Status::Pass => "true",
        Status::Fail => "false",
        Status::Vacuous => "vacuous",
    }
}
