use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use super::walk::{sample_rng, Walker};
use super::{GenSet, WalkError};
use crate::exactmat::{
    is_mth_power_sl2z, is_proper_power_sl2z, is_virtually_unipotent, BigMatrix, ExactMatError,
    PowerCutoff,
};

/// Two-sided 95% normal quantile.
pub const WILSON_Z95: f64 = 1.959_963_984_540_054;

/// Named events evaluated on the exact walk state.
///
/// Power membership is decided in SL2(Z). For a generating set of a proper
/// subgroup such as the Sanov group this over-approximates the subgroup's
/// own powers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Event {
    /// `w in union_{m >= 2} SL2(Z)^m`
    ProperPower,
    /// `w in SL2(Z)^m`
    MPower(u64),
    VirtuallyUnipotent,
    TraceEquals(i64),
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::ProperPower => write!(f, "proper_power"),
            Event::MPower(m) => write!(f, "m_power:{m}"),
            Event::VirtuallyUnipotent => write!(f, "virtually_unipotent"),
            Event::TraceEquals(t) => write!(f, "trace_equals:{t}"),
        }
    }
}

impl FromStr for Event {
    type Err = WalkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || WalkError::UnknownEvent(s.to_string());
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a.trim())),
            None => (s, None),
        };
        match (name, arg) {
            ("proper_power", None) => Ok(Event::ProperPower),
            ("virtually_unipotent", None) => Ok(Event::VirtuallyUnipotent),
            ("m_power", Some(a)) => match a.parse::<u64>() {
                Ok(m) if m >= 1 => Ok(Event::MPower(m)),
                _ => Err(bad()),
            },
            ("trace_equals", Some(a)) => a.parse().map(Event::TraceEquals).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

impl Serialize for Event {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Exact evaluation at step `k`; `cutoff` bounds the prime exponents tried
/// for hyperbolic proper powers.
pub fn evaluate_event(
    event: Event,
    w: &BigMatrix,
    k: u64,
    cutoff: &PowerCutoff,
) -> Result<bool, ExactMatError> {
    match event {
        Event::ProperPower => is_proper_power_sl2z(w, cutoff.prime_bound(k)),
        Event::MPower(m) => is_mth_power_sl2z(w, m),
        Event::VirtuallyUnipotent => Ok(is_virtually_unipotent(w)),
        Event::TraceEquals(t) => Ok(w.trace() == BigInt::from(t)),
    }
}

/// Wilson score interval for `hits` successes out of `n`.
pub fn wilson_interval(hits: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if hits == 0 {
        0.0
    } else {
        (centre - half).max(0.0)
    };
    let hi = if hits as f64 == n {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (lo, hi)
}

/// Upper end of the Wilson interval at quantile `z`.
pub fn wilson_upper(hits: u64, n: u64, z: f64) -> f64 {
    wilson_interval(hits, n, z).1
}

/// Monte Carlo estimate of `P(event at step k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayEstimate {
    pub event: Event,
    pub k: u64,
    pub samples: u64,
    pub hits: u64,
    /// Samples whose state violated the event's precondition; they are
    /// excluded from `p_hat`.
    pub failures: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

impl DecayEstimate {
    fn new(event: Event, k: u64, samples: u64, hits: u64, failures: u64, seed: u64) -> Self {
        let valid = samples - failures;
        let p_hat = if valid == 0 {
            0.0
        } else {
            hits as f64 / valid as f64
        };
        let (lo, hi) = wilson_interval(hits, valid, WILSON_Z95);
        Self {
            event,
            k,
            samples,
            hits,
            failures,
            p_hat,
            // keep the ordering invariant exact despite rounding
            ci_low: lo.min(p_hat),
            ci_high: hi.max(p_hat),
            seed,
        }
    }

    pub fn valid_samples(&self) -> u64 {
        self.samples - self.failures
    }

    pub const CSV_HEADER: &'static str =
        "predicate,k,samples,hits,p_hat,ci_low,ci_high,seed,failures";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:e},{:e},{:e},{},{}",
            self.event,
            self.k,
            self.samples,
            self.hits,
            self.p_hat,
            self.ci_low,
            self.ci_high,
            self.seed,
            self.failures
        )
    }
}

/// Estimates for every step count in `ks` from the same `samples` walks:
/// sample `i` walks along stream `i` of `seed` up to `max(ks)`, and is
/// evaluated at each requested step. The estimate at `k` is therefore
/// identical to [`estimate_event`] at `k` alone.
pub fn estimate_series(
    sigma: &GenSet,
    event: Event,
    ks: &[u64],
    samples: u64,
    seed: u64,
) -> Result<Vec<DecayEstimate>, WalkError> {
    if samples == 0 {
        return Err(WalkError::NoSamples);
    }
    let adm = sigma.admissibility();
    if !adm.is_admissible() {
        return Err(WalkError::NotAdmissible(adm));
    }
    let cutoff = PowerCutoff::for_generators(sigma.generators())?;
    let walker = Walker::new(sigma, &[])?;
    let k_max = ks.iter().copied().max().unwrap_or(0);
    let tallies = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            let mut at_step = vec![(0u64, 0u64); ks.len()];
            walker.run(k_max, &mut rng, |s| {
                for (slot, _) in ks.iter().enumerate().filter(|(_, &k)| k == s.k) {
                    at_step[slot] = match evaluate_event(event, &s.exact, s.k, &cutoff) {
                        Ok(true) => (1, 0),
                        Ok(false) => (0, 0),
                        Err(_) => (0, 1),
                    };
                }
            });
            at_step
        })
        .reduce(
            || vec![(0, 0); ks.len()],
            |a, b| {
                a.iter()
                    .zip(&b)
                    .map(|(x, y)| (x.0 + y.0, x.1 + y.1))
                    .collect()
            },
        );
    Ok(ks
        .iter()
        .zip(tallies)
        .map(|(&k, (hits, failures))| DecayEstimate::new(event, k, samples, hits, failures, seed))
        .collect())
}

pub fn estimate_event(
    sigma: &GenSet,
    event: Event,
    k: u64,
    samples: u64,
    seed: u64,
) -> Result<DecayEstimate, WalkError> {
    Ok(estimate_series(sigma, event, &[k], samples, seed)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn event_names_round_trip() {
        for e in [
            Event::ProperPower,
            Event::MPower(3),
            Event::VirtuallyUnipotent,
            Event::TraceEquals(-2),
        ] {
            assert_eq!(e.to_string().parse::<Event>().unwrap(), e);
        }
        assert!("m_power:0".parse::<Event>().is_err());
        assert!("square".parse::<Event>().is_err());
    }

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(0, 100, WILSON_Z95);
        assert_eq!(lo, 0.0);
        // z^2 / (n + z^2)
        let z2 = WILSON_Z95 * WILSON_Z95;
        assert!((hi - z2 / (100.0 + z2)).abs() < 1e-12);
        let (lo, hi) = wilson_interval(50, 100, WILSON_Z95);
        assert!(lo < 0.5 && hi > 0.5 && ((lo + hi) / 2.0 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn step_zero_events() {
        let sigma = GenSet::sl2z_standard();
        let e = estimate_event(&sigma, Event::TraceEquals(2), 0, 50, 1).unwrap();
        assert_eq!(e.p_hat, 1.0);
        let e = estimate_event(&sigma, Event::MPower(2), 0, 50, 1).unwrap();
        assert_eq!(e.p_hat, 1.0);
        assert!(e.ci_low <= e.p_hat && e.p_hat <= e.ci_high);
    }

    #[test]
    fn series_matches_single_estimates() {
        let sigma = GenSet::sl2z_standard();
        let series = estimate_series(&sigma, Event::ProperPower, &[3, 8, 15], 300, 5).unwrap();
        for s in &series {
            let single = estimate_event(&sigma, Event::ProperPower, s.k, 300, 5).unwrap();
            assert_eq!(*s, single);
        }
    }

    #[test]
    fn inadmissible_rejected() {
        let sigma = GenSet::new(vec![crate::exactmat::presets::t()]);
        assert!(matches!(
            estimate_event(&sigma, Event::ProperPower, 5, 10, 0),
            Err(WalkError::NotAdmissible(_))
        ));
        assert_eq!(
            estimate_event(&GenSet::sl2z_standard(), Event::ProperPower, 5, 0, 0),
            Err(WalkError::NoSamples)
        );
    }

    #[test]
    fn precondition_failures_are_counted() {
        // 3x3 walks have no SL2 root oracle
        let g = BigMatrix::from_i64(3, &[1, 1, 0, 0, 1, 0, 0, 0, 1]);
        let sigma = GenSet::new(vec![
            g.clone(),
            g.inverse_sl().unwrap(),
            BigMatrix::identity(3),
        ]);
        let e = estimate_event(&sigma, Event::MPower(2), 4, 40, 2).unwrap();
        assert_eq!(e.failures, 40);
        assert_eq!(e.hits, 0);
    }
}
