//! Experiment configuration: a flat TOML file whose keys can all be
//! overridden by command-line flags.
//!
//! Resolution order for every key is flag, then file, then the subcommand's
//! default. The seed additionally consults `GLS_SEED` between the flag and
//! the file.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::Args;
use gls_core::exactmat::BigMatrix;
use gls_core::modgroup::DEFAULT_BUDGET;
use gls_core::sieve::ap_for_lie_type;
use gls_core::GenSet;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SEED_ENV: &str = "GLS_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Census,
    Spectral,
    Walk,
    Sieve,
    Certify,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Census => "census",
            Command::Spectral => "spectral",
            Command::Walk => "walk",
            Command::Sieve => "sieve",
            Command::Certify => "certify",
        })
    }
}

/// Flags shared by every subcommand. Keys a subcommand does not use are
/// accepted and echoed but otherwise ignored.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// TOML configuration file with flat keys named like the long flags
    /// (dashes become underscores).
    #[arg(long, short = 'c')]
    pub config: Option<PathBuf>,
    /// Generator preset: sl2z or sanov-free.
    #[arg(long)]
    pub group: Option<String>,
    /// Explicit 2x2 generators, row-major, e.g. "1,1,0,1;1,-1,0,1".
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<String>,
    /// Drop the identity from the generating multiset.
    #[arg(long)]
    pub no_identity: bool,
    /// Walk event: proper_power, m_power:<m>, virtually_unipotent or
    /// trace_equals:<t>.
    #[arg(long)]
    pub predicate: Option<String>,
    /// Step counts: "start:end:step", "start:end", or a comma list.
    #[arg(long = "k", visible_alias = "k-grid")]
    pub k_grid: Option<String>,
    #[arg(long)]
    pub samples: Option<u64>,
    /// Master seed; overrides GLS_SEED and the config file.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Matrix dimension; only 2 is supported.
    #[arg(long)]
    pub n: Option<usize>,
    /// Power exponent.
    #[arg(long)]
    pub m: Option<u64>,
    /// Moduli: comma list with optional inclusive ranges, e.g. "5..61" or
    /// "3,5,11..19". Ranges keep primes only.
    #[arg(long, visible_alias = "p")]
    pub primes: Option<String>,
    /// Coset census over gl2/sl2 or pgl2/psl2.
    #[arg(long)]
    pub coset: Option<String>,
    /// Progression "a mod b" (also "a,b").
    #[arg(long, num_args = 1..=3)]
    pub family: Option<Vec<String>>,
    /// Largest prime considered in the family.
    #[arg(long)]
    pub limit: Option<u64>,
    /// Primes dividing this modulus are skipped.
    #[arg(long)]
    pub excluded_modulus: Option<u64>,
    /// Lie-type triple "d,l,m" selecting the progression
    /// (1 + 6m(l+1)^2 d!^2) mod 36m^2(l+1)^4 d!^4.
    #[arg(long)]
    pub lie_type: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
    /// Element budget for each enumerated quotient group.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Monte Carlo walks per pair too large for exact distributions.
    #[arg(long)]
    pub pair_samples: Option<u64>,
    /// Exact-state walks per step for the empirical power curve.
    #[arg(long)]
    pub empirical_samples: Option<u64>,
    /// Skip the power-iteration spectrum of the smallest pair quotient.
    #[arg(long)]
    pub no_pair_spectrum: bool,
    /// Emit the prime family without certifying it.
    #[arg(long)]
    pub family_only: bool,
}

/// A list given either as a TOML array or as flag-style text.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ListSpec {
    One(u64),
    Items(Vec<u64>),
    Text(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum TripleSpec {
    Items([u64; 3]),
    Text(String),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    group: Option<String>,
    sigma: Option<Vec<[i64; 4]>>,
    identity: Option<bool>,
    predicate: Option<String>,
    k_grid: Option<ListSpec>,
    samples: Option<u64>,
    seed: Option<u64>,
    n: Option<usize>,
    m: Option<u64>,
    primes: Option<ListSpec>,
    coset: Option<String>,
    family: Option<String>,
    limit: Option<u64>,
    excluded_modulus: Option<u64>,
    lie_type: Option<TripleSpec>,
    output: Option<PathBuf>,
    budget: Option<usize>,
    pair_samples: Option<u64>,
    empirical_samples: Option<u64>,
    pair_spectrum: Option<bool>,
    family_only: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GroupPreset {
    #[serde(rename = "sl2z")]
    Sl2z,
    #[serde(rename = "sanov-free")]
    SanovFree,
}

impl GroupPreset {
    fn parse(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "sl2z" => Ok(GroupPreset::Sl2z),
            "sanov-free" | "sanov" => Ok(GroupPreset::SanovFree),
            other => Err(CliError::config(format!(
                "unknown group preset `{other}`; expected sl2z or sanov-free"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CosetPair {
    #[serde(rename = "gl2/sl2")]
    Linear,
    #[serde(rename = "pgl2/psl2")]
    Projective,
}

impl CosetPair {
    fn parse(s: &str) -> Result<Self, CliError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gl2/sl2" => Ok(CosetPair::Linear),
            "pgl2/psl2" => Ok(CosetPair::Projective),
            other => Err(CliError::config(format!(
                "unknown coset pair `{other}`; expected gl2/sl2 or pgl2/psl2"
            ))),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CosetPair::Linear => "gl2/sl2",
            CosetPair::Projective => "pgl2/psl2",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    Progression {
        a: u64,
        b: u64,
    },
    LieType {
        d: u64,
        l: u64,
        m: u64,
        a: u64,
        b: u64,
    },
}

impl FamilySpec {
    pub fn progression(&self) -> (u64, u64) {
        match *self {
            FamilySpec::Progression { a, b } | FamilySpec::LieType { a, b, .. } => (a, b),
        }
    }
}

/// Fully resolved configuration; serialized verbatim into every output.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub group: GroupPreset,
    pub sigma: Option<Vec<[i64; 4]>>,
    pub identity: bool,
    pub predicate: String,
    pub k_grid: Vec<u64>,
    pub samples: u64,
    pub seed: u64,
    pub n: usize,
    pub m: u64,
    pub primes: Vec<u64>,
    pub coset: Option<CosetPair>,
    pub family: FamilySpec,
    pub limit: u64,
    pub excluded_modulus: u64,
    pub budget: usize,
    pub pair_samples: u64,
    pub empirical_samples: u64,
    pub pair_spectrum: bool,
    pub family_only: bool,
    /// Where the artifact goes; not part of the experiment, so not echoed.
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

fn read_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

impl ExperimentConfig {
    /// Resolves flags over the config file over subcommand defaults.
    /// `env_seed` is the raw value of [`SEED_ENV`], if set.
    pub fn resolve(
        command: Command,
        flags: &Overrides,
        env_seed: Option<&str>,
    ) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => read_file(path)?,
            None => FileConfig::default(),
        };

        let group = match flags.group.as_deref().or(file.group.as_deref()) {
            Some(s) => GroupPreset::parse(s)?,
            None => GroupPreset::Sl2z,
        };
        let sigma = match (&flags.sigma, file.sigma) {
            (Some(text), _) => Some(parse_sigma(text)?),
            (None, s) => s,
        };
        if let Some(rows) = &sigma {
            validate_sigma(rows)?;
        }
        let identity = !flags.no_identity && file.identity.unwrap_or(true);
        let predicate = flags
            .predicate
            .clone()
            .or(file.predicate)
            .unwrap_or_else(|| "proper_power".into());

        let k_grid = match (&flags.k_grid, file.k_grid) {
            (Some(text), _) => parse_grid(text)?,
            (None, Some(spec)) => list_from_spec(spec, parse_grid)?,
            (None, None) => parse_grid(match command {
                Command::Walk => "5:50:5",
                _ => "0:100:10",
            })?,
        };
        let samples = flags.samples.or(file.samples).unwrap_or(10_000);
        let seed = match (flags.seed, env_seed) {
            (Some(s), _) => s,
            (None, Some(raw)) => raw.trim().parse().map_err(|_| {
                CliError::config(format!("{SEED_ENV}=`{raw}` is not an unsigned integer"))
            })?,
            (None, None) => file.seed.unwrap_or(0),
        };
        let n = flags.n.or(file.n).unwrap_or(2);
        if n != 2 {
            return Err(CliError::config(format!(
                "n = {n} is not supported; only 2x2 matrices are implemented"
            )));
        }

        let coset = match flags.coset.as_deref().or(file.coset.as_deref()) {
            Some(s) => Some(CosetPair::parse(s)?),
            None => None,
        };
        let primes = match (&flags.primes, file.primes) {
            (Some(text), _) => parse_primes(text)?,
            (None, Some(spec)) => list_from_spec(spec, parse_primes)?,
            (None, None) => parse_primes(match (command, coset) {
                (Command::Census, None) => "5..61",
                (Command::Census, Some(_)) => "5,13",
                _ => "3,5,7,11,13",
            })?,
        };
        if let Some(&q) = primes.iter().find(|&&q| q < 2) {
            return Err(CliError::config(format!("modulus {q} is below 2")));
        }

        let lie = match (&flags.lie_type, file.lie_type) {
            (Some(text), _) => Some(parse_triple(text)?),
            (None, Some(TripleSpec::Items(t))) => Some(t),
            (None, Some(TripleSpec::Text(text))) => Some(parse_triple(&text)?),
            (None, None) => None,
        };
        let explicit_m = flags.m.or(file.m);
        let family_text = flags.family.as_ref().map(|v| v.join(" ")).or(file.family);
        let (m, family) = match lie {
            Some([d, l, lm]) => {
                if family_text.is_some() {
                    return Err(CliError::config(
                        "family and lie_type are mutually exclusive",
                    ));
                }
                if let Some(m) = explicit_m.filter(|&m| m != lm) {
                    return Err(CliError::config(format!(
                        "m = {m} conflicts with the lie-type exponent {lm}"
                    )));
                }
                let (a, b) = ap_for_lie_type(d, l, lm)?;
                let narrow = |x: u128| {
                    u64::try_from(x).map_err(|_| {
                        CliError::config(format!(
                            "lie-type progression modulus {x} exceeds 64 bits"
                        ))
                    })
                };
                (
                    lm,
                    FamilySpec::LieType {
                        d,
                        l,
                        m: lm,
                        a: narrow(a)?,
                        b: narrow(b)?,
                    },
                )
            }
            None => {
                let m = explicit_m.unwrap_or(2);
                let (a, b) = match family_text {
                    Some(text) => parse_family(&text)?,
                    None => (1, m.max(1)),
                };
                (m, FamilySpec::Progression { a, b })
            }
        };
        if m == 0 {
            return Err(CliError::config("m must be at least 1"));
        }
        let limit = match (flags.limit.or(file.limit), &family) {
            (Some(limit), _) => limit,
            // room for about a hundred terms of the progression
            (None, FamilySpec::LieType { a, b, .. }) => a.saturating_add(b.saturating_mul(100)),
            (None, FamilySpec::Progression { .. }) => 14,
        };

        Ok(Self {
            command,
            group,
            sigma,
            identity,
            predicate,
            k_grid,
            samples,
            seed,
            n,
            m,
            primes,
            coset,
            family,
            limit,
            excluded_modulus: flags
                .excluded_modulus
                .or(file.excluded_modulus)
                .unwrap_or(2),
            budget: flags.budget.or(file.budget).unwrap_or(DEFAULT_BUDGET),
            pair_samples: flags.pair_samples.or(file.pair_samples).unwrap_or(20_000),
            empirical_samples: flags
                .empirical_samples
                .or(file.empirical_samples)
                .unwrap_or(1_000),
            pair_spectrum: !flags.no_pair_spectrum && file.pair_spectrum.unwrap_or(true),
            family_only: flags.family_only || file.family_only.unwrap_or(false),
            output: flags.output.clone().or(file.output),
        })
    }

    /// The generating multiset: explicit matrices or the preset, with the
    /// identity added or removed according to `identity`.
    pub fn genset(&self) -> GenSet {
        let base = match &self.sigma {
            Some(rows) => GenSet::new(rows.iter().map(|r| BigMatrix::from_i64(2, r)).collect()),
            None => match self.group {
                GroupPreset::Sl2z => GenSet::sl2z_standard(),
                GroupPreset::SanovFree => GenSet::sanov(),
            },
        };
        match (self.identity, base.contains_identity()) {
            (false, true) => base.without_identity(),
            (true, false) => {
                let mut gens = base.generators().to_vec();
                gens.push(BigMatrix::identity(2));
                GenSet::new(gens)
            }
            _ => base,
        }
    }
}

fn list_from_spec(
    spec: ListSpec,
    parse: fn(&str) -> Result<Vec<u64>, CliError>,
) -> Result<Vec<u64>, CliError> {
    match spec {
        ListSpec::One(x) => Ok(vec![x]),
        ListSpec::Items(v) => Ok(v),
        ListSpec::Text(t) => parse(&t),
    }
}

fn number(s: &str) -> Result<u64, CliError> {
    s.trim()
        .parse()
        .map_err(|_| CliError::config(format!("`{}` is not an unsigned integer", s.trim())))
}

/// `"a:b:s"` (inclusive), `"a:b"`, or a comma list.
pub fn parse_grid(text: &str) -> Result<Vec<u64>, CliError> {
    let text = text.trim();
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let (start, end, step) = match parts.as_slice() {
            [a, b] => (number(a)?, number(b)?, 1),
            [a, b, s] => (number(a)?, number(b)?, number(s)?),
            _ => return Err(CliError::config(format!("bad step grid `{text}`"))),
        };
        if step == 0 || start > end {
            return Err(CliError::config(format!("bad step grid `{text}`")));
        }
        return Ok((start..=end).step_by(step as usize).collect());
    }
    let grid = text.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
    if grid.is_empty() {
        return Err(CliError::config("step grid is empty"));
    }
    Ok(grid)
}

fn is_prime(n: u64) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

/// Comma list of moduli; `lo..hi` items expand to the primes in range.
pub fn parse_primes(text: &str) -> Result<Vec<u64>, CliError> {
    let mut out = Vec::new();
    for item in text.split(',') {
        match item.split_once("..") {
            Some((lo, hi)) => out.extend((number(lo)?..=number(hi)?).filter(|&q| is_prime(q))),
            None => out.push(number(item)?),
        }
    }
    if out.is_empty() {
        return Err(CliError::config(format!("no moduli in `{text}`")));
    }
    Ok(out)
}

/// `"a mod b"` or `"a,b"`.
pub fn parse_family(text: &str) -> Result<(u64, u64), CliError> {
    let bad = || CliError::config(format!("bad family `{text}`; expected \"a mod b\""));
    let (a, b) = text
        .split_once("mod")
        .or_else(|| text.split_once(','))
        .ok_or_else(bad)?;
    Ok((number(a)?, number(b)?))
}

fn parse_triple(text: &str) -> Result<[u64; 3], CliError> {
    let v = text.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
    v.try_into()
        .map_err(|_| CliError::config(format!("lie type `{text}` must be three integers d,l,m")))
}

fn parse_sigma(text: &str) -> Result<Vec<[i64; 4]>, CliError> {
    text.split(';')
        .map(|row| {
            let v = row
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<i64>()
                        .map_err(|_| CliError::config(format!("bad matrix entry `{}`", x.trim())))
                })
                .collect::<Result<Vec<_>, _>>()?;
            v.try_into()
                .map_err(|_| CliError::config(format!("matrix `{row}` needs exactly 4 entries")))
        })
        .collect()
}

fn validate_sigma(rows: &[[i64; 4]]) -> Result<(), CliError> {
    if rows.is_empty() {
        return Err(CliError::config("sigma is empty"));
    }
    for r in rows {
        let det = r[0] as i128 * r[3] as i128 - r[1] as i128 * r[2] as i128;
        if det != 1 {
            return Err(CliError::config(format!(
                "generator {r:?} has determinant {det}, not 1"
            )));
        }
    }
    Ok(())
}
