use gls_core::modgroup::{
    certify_coset, coset_low_order_rep, coset_power_census, lie_pair, power_census, QuotientGroup,
};

use super::Verdict;
use crate::config::{CosetPair, ExperimentConfig};
use crate::error::CliError;
use crate::output::CsvSink;

pub const HEADER: &str = "p,group,coset,group_order,m,census,ratio,bound,pass";

/// Exact fraction `num/den` with `census * den <= num * order` as the check.
struct Bound {
    num: u64,
    den: u64,
}

impl Bound {
    fn holds(&self, census: usize, order: usize) -> bool {
        census as u128 * self.den as u128 <= self.num as u128 * order as u128
    }
}

/// Power census of `SL2(F_p)` for every configured prime, or coset censuses
/// of `SL2` in `GL2` (`PSL2` in `PGL2`) with a torus-certified bound.
pub fn run(cfg: &ExperimentConfig) -> Result<Verdict, CliError> {
    let mut sink = CsvSink::create(cfg, HEADER)?;
    let mut verdict = Verdict::default();
    let m = cfg.m;
    for &p in &cfg.primes {
        match cfg.coset {
            None => {
                let g = QuotientGroup::enumerate_sl2(p, cfg.budget)?;
                let census = power_census(&g, m);
                // the gap holds for m >= 2 dividing p - 1; m = 1 is the trivial census
                let bound = match m {
                    1 => Some(Bound { num: 1, den: 1 }),
                    _ if p % m == 1 => Some(Bound { num: 11, den: 12 }),
                    _ => None,
                };
                let line = row(
                    p,
                    "sl2",
                    "",
                    g.order(),
                    m,
                    census,
                    bound.as_ref(),
                    &mut verdict,
                );
                sink.row(&line)?;
            }
            Some(pair) => coset_rows(cfg, p, pair, &mut sink, &mut verdict)?,
        }
    }
    sink.finish()?;
    Ok(verdict)
}

fn coset_rows(
    cfg: &ExperimentConfig,
    p: u64,
    pair: CosetPair,
    sink: &mut CsvSink,
    verdict: &mut Verdict,
) -> Result<(), CliError> {
    let m = cfg.m;
    let (amb, g) = lie_pair(p, pair == CosetPair::Projective, cfg.budget)?;
    let mut reps: Vec<usize> = Vec::new();
    for x in 0..amb.order() {
        if !reps.iter().any(|&r| g.same_coset(&amb, x, r)) {
            reps.push(x);
        }
    }
    for x in reps {
        let rep = coset_low_order_rep(&amb, &g, x)?;
        let label = amb
            .entries(rep)
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(" ");
        let (census, bound) = match certify_coset(&amb, &g, rep, m)? {
            Some(cert) => {
                let (num, den) = cert.report.bound();
                (cert.census, Some(Bound { num, den }))
            }
            None => (coset_power_census(&amb, &g, rep, m)?, None),
        };
        let line = row(
            p,
            pair.label(),
            &label,
            g.len(),
            m,
            census,
            bound.as_ref(),
            verdict,
        );
        sink.row(&line)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn row(
    p: u64,
    group: &str,
    coset: &str,
    order: usize,
    m: u64,
    census: usize,
    bound: Option<&Bound>,
    verdict: &mut Verdict,
) -> String {
    let ratio = census as f64 / order as f64;
    let (bound_text, pass) = match bound {
        Some(b) => {
            let holds = b.holds(census, order);
            if !holds {
                verdict.violation(format!(
                    "p={p} {group} {coset}: census {census} of {order} exceeds {}/{}",
                    b.num, b.den
                ));
            }
            (format!("{}/{}", b.num, b.den), holds.to_string())
        }
        // no torus certificate or no applicable bound
        None => (String::new(), "na".to_string()),
    };
    format!("{p},{group},{coset},{order},{m},{census},{ratio:.6},{bound_text},{pass}")
}
