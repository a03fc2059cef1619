use gls_core::walker::{decay_fit, estimate_series, DecayEstimate, Event, WalkError};
use serde_json::json;

use super::Verdict;
use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::CsvSink;

/// Monte Carlo estimates of the event probability along the step grid,
/// followed by a `# decay_fit` summary line with the log-linear fit.
pub fn run(cfg: &ExperimentConfig) -> Result<Verdict, CliError> {
    let event: Event = cfg.predicate.parse()?;
    let sigma = cfg.genset();
    let adm = sigma.admissibility();
    if !adm.is_admissible() {
        return Err(CliError::config(format!(
            "generating multiset is not admissible: {}",
            serde_json::to_string(&adm).expect("admissibility serializes")
        )));
    }
    let estimates = estimate_series(&sigma, event, &cfg.k_grid, cfg.samples, cfg.seed)?;
    let mut sink = CsvSink::create(cfg, DecayEstimate::CSV_HEADER)?;
    for e in &estimates {
        sink.row(&e.csv_row())?;
    }
    let summary = match decay_fit(&estimates) {
        Ok(fit) => serde_json::to_value(&fit).expect("fit serializes"),
        Err(WalkError::TooFewPoints(points)) => {
            json!({"status": "too_few_points", "points": points})
        }
        Err(e) => return Err(e.into()),
    };
    sink.comment(&format!("decay_fit {summary}"))?;
    sink.finish()?;
    Ok(Verdict::default())
}
