//! Experiment configuration: a flat `key = value` file overlaid by flags.
//!
//! Keys are the long flag names without dashes in front. Blank lines and
//! lines starting with `#` are ignored.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::CliError;

/// Every accepted key, in the order used for the reproducibility stamp.
pub const KEYS: &[&str] = &[
    "g", "gamma-s", "T", "N", "N-range", "g-range", "g-step", "samples", "depth", "nu", "seed",
    "n-seeds", "eta", "alpha-sq", "out",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Experiment {
    Fig3a,
    Fig3b,
    Fig3c,
    Fig3d,
    Reflectance,
    Protocol,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Fig3a,
        Experiment::Fig3b,
        Experiment::Fig3c,
        Experiment::Fig3d,
        Experiment::Reflectance,
        Experiment::Protocol,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Fig3a => "fig3a",
            Experiment::Fig3b => "fig3b",
            Experiment::Fig3c => "fig3c",
            Experiment::Fig3d => "fig3d",
            Experiment::Reflectance => "reflectance",
            Experiment::Protocol => "protocol",
        }
    }

    fn uses(self, key: &str) -> bool {
        use Experiment::*;
        match key {
            "g" | "gamma-s" | "out" => true,
            "samples" => true,
            "T" => self != Reflectance,
            "N" => matches!(self, Fig3a | Fig3d | Reflectance),
            "N-range" => matches!(self, Fig3b | Fig3c),
            "g-range" | "g-step" => matches!(self, Fig3c | Fig3d),
            "depth" | "nu" | "seed" | "n-seeds" => self == Fig3d,
            "eta" | "alpha-sq" => self == Protocol,
            _ => false,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| CliError::config("experiment", format!("unknown experiment `{s}`")))
    }
}

/// Raw `key → value` pairs before validation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut raw = RawConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::config(line, format!("line {}: expected `key = value`", lineno + 1))
            })?;
            raw.set(key.trim(), value.trim())?;
        }
        Ok(raw)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config("config", format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<(), CliError> {
        if !KEYS.contains(&key) {
            return Err(CliError::config(key, "unknown key"));
        }
        self.values.insert(key.to_string(), value.into());
        Ok(())
    }

    /// `other` wins where both define a key.
    pub fn overlay(mut self, other: RawConfig) -> Self {
        self.values.extend(other.values);
        self
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

/// A validated configuration with experiment defaults filled in. Fields an
/// experiment does not use are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub g: f64,
    pub gamma_s: f64,
    pub duration: Option<f64>,
    pub n_atoms: Option<usize>,
    pub n_range: Option<(usize, usize)>,
    pub g_range: Option<(f64, f64)>,
    pub g_step: Option<f64>,
    pub samples: usize,
    pub depth: Option<f64>,
    pub nu: Option<f64>,
    pub seed: Option<u64>,
    pub n_seeds: Option<usize>,
    pub eta: Option<f64>,
    pub alpha_sq: Option<f64>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Documented defaults for `experiment`.
    pub fn defaults(experiment: Experiment) -> Self {
        Self::resolve(experiment, &RawConfig::default()).unwrap_or_else(|_| {
            // fig3d needs a seed; everything else resolves from nothing
            let mut raw = RawConfig::default();
            raw.set("seed", "0").expect("known key");
            Self::resolve(experiment, &raw).expect("defaults are valid")
        })
    }

    pub fn resolve(experiment: Experiment, raw: &RawConfig) -> Result<Self, CliError> {
        use Experiment::*;
        for key in raw.values.keys() {
            if !experiment.uses(key) {
                return Err(CliError::config(key, format!("not used by {experiment}")));
            }
        }
        let n_max = cqed_gates::model::MAX_ATOMS;
        let cfg = ExperimentConfig {
            experiment,
            g: positive(raw, "g", 3.0)?,
            gamma_s: non_negative(raw, "gamma-s", 1.0)?,
            duration: (experiment != Reflectance)
                .then(|| positive(raw, "T", 210.0))
                .transpose()?,
            n_atoms: match experiment {
                Fig3a | Fig3d | Reflectance => Some(bounded(raw, "N", 2, 1, n_max)?),
                Fig3b | Fig3c | Protocol => None,
            },
            n_range: match experiment {
                Fig3b => Some(n_range(raw, (2, 5))?),
                Fig3c => Some(n_range(raw, (2, 4))?),
                _ => None,
            },
            g_range: match experiment {
                Fig3c => Some(g_range(raw, (1.0, 6.0))?),
                Fig3d => Some(g_range(raw, (1.0, 5.0))?),
                _ => None,
            },
            g_step: matches!(experiment, Fig3c | Fig3d)
                .then(|| positive(raw, "g-step", 0.5))
                .transpose()?,
            samples: if experiment == Reflectance {
                bounded(raw, "samples", 801, 2, 1 << 20)?
            } else {
                bounded(raw, "samples", 4096, 16, 1 << 20)?
            },
            depth: (experiment == Fig3d)
                .then(|| fraction(raw, "depth", 1.0 / 3.0))
                .transpose()?,
            nu: (experiment == Fig3d)
                .then(|| non_negative(raw, "nu", 1.0 / 6.0))
                .transpose()?,
            seed: if experiment == Fig3d {
                Some(parse::<u64>(raw, "seed")?.ok_or_else(|| {
                    CliError::config("seed", "required for fig3d")
                })?)
            } else {
                None
            },
            n_seeds: (experiment == Fig3d)
                .then(|| bounded(raw, "n-seeds", 8, 1, 10_000))
                .transpose()?,
            eta: (experiment == Protocol)
                .then(|| fraction(raw, "eta", 1.0))
                .transpose()?,
            alpha_sq: if experiment == Protocol {
                let a = non_negative(raw, "alpha-sq", 0.1)?;
                if a > cqed_gates::gates::WEAK_PULSE_LIMIT {
                    return Err(CliError::config(
                        "alpha-sq",
                        format!(
                            "{a} exceeds the weak-pulse limit {}",
                            cqed_gates::gates::WEAK_PULSE_LIMIT
                        ),
                    ));
                }
                Some(a)
            } else {
                None
            },
            out: raw.get("out").map(PathBuf::from),
        };
        Ok(cfg)
    }

    /// Atom numbers covered by the experiment.
    pub fn atom_numbers(&self) -> Vec<usize> {
        match (self.n_atoms, self.n_range) {
            (_, Some((a, b))) => (a..=b).collect(),
            (Some(n), None) => vec![n],
            (None, None) => Vec::new(),
        }
    }

    /// Coupling grid `a, a + step, …` up to `b` inclusive (within rounding).
    pub fn coupling_grid(&self) -> Vec<f64> {
        match (self.g_range, self.g_step) {
            (Some((a, b)), Some(step)) => {
                let n = ((b - a) / step + 1e-9).floor() as usize;
                (0..=n).map(|k| a + k as f64 * step).collect()
            }
            _ => vec![self.g],
        }
    }

    /// `# config: key=value …` stamp, every resolved key included.
    pub fn stamp(&self) -> String {
        let mut parts = vec![format!("experiment={}", self.experiment)];
        for key in KEYS {
            if let Some(v) = self.value_of(key) {
                parts.push(format!("{key}={v}"));
            }
        }
        format!("# config: {}", parts.join(" "))
    }

    fn value_of(&self, key: &str) -> Option<String> {
        let range = |(a, b): (f64, f64)| format!("{a}..{b}");
        match key {
            "g" => Some(self.g.to_string()),
            "gamma-s" => Some(self.gamma_s.to_string()),
            "T" => self.duration.map(|v| v.to_string()),
            "N" => self.n_atoms.map(|v| v.to_string()),
            "N-range" => self.n_range.map(|(a, b)| format!("{a}..{b}")),
            "g-range" => self.g_range.map(range),
            "g-step" => self.g_step.map(|v| v.to_string()),
            "samples" => Some(self.samples.to_string()),
            "depth" => self.depth.map(|v| v.to_string()),
            "nu" => self.nu.map(|v| v.to_string()),
            "seed" => self.seed.map(|v| v.to_string()),
            "n-seeds" => self.n_seeds.map(|v| v.to_string()),
            "eta" => self.eta.map(|v| v.to_string()),
            "alpha-sq" => self.alpha_sq.map(|v| v.to_string()),
            // the output path does not affect the numbers
            _ => None,
        }
    }
}

fn parse<T: FromStr>(raw: &RawConfig, key: &str) -> Result<Option<T>, CliError> {
    raw.get(key)
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| CliError::config(key, format!("cannot parse `{s}`")))
        })
        .transpose()
}

fn finite(raw: &RawConfig, key: &str, default: f64) -> Result<f64, CliError> {
    let v = parse::<f64>(raw, key)?.unwrap_or(default);
    if !v.is_finite() {
        return Err(CliError::config(key, format!("must be finite, got {v}")));
    }
    Ok(v)
}

fn positive(raw: &RawConfig, key: &str, default: f64) -> Result<f64, CliError> {
    let v = finite(raw, key, default)?;
    if v <= 0.0 {
        return Err(CliError::config(key, format!("must be positive, got {v}")));
    }
    Ok(v)
}

fn non_negative(raw: &RawConfig, key: &str, default: f64) -> Result<f64, CliError> {
    let v = finite(raw, key, default)?;
    if v < 0.0 {
        return Err(CliError::config(key, format!("must not be negative, got {v}")));
    }
    Ok(v)
}

fn fraction(raw: &RawConfig, key: &str, default: f64) -> Result<f64, CliError> {
    let v = non_negative(raw, key, default)?;
    if v > 1.0 {
        return Err(CliError::config(key, format!("must not exceed 1, got {v}")));
    }
    Ok(v)
}

fn bounded(raw: &RawConfig, key: &str, default: usize, lo: usize, hi: usize) -> Result<usize, CliError> {
    let v = parse::<usize>(raw, key)?.unwrap_or(default);
    if !(lo..=hi).contains(&v) {
        return Err(CliError::config(key, format!("must lie in {lo}..={hi}, got {v}")));
    }
    Ok(v)
}

fn split_range<'a>(key: &str, s: &'a str) -> Result<(&'a str, &'a str), CliError> {
    s.split_once("..")
        .ok_or_else(|| CliError::config(key, format!("expected `A..B`, got `{s}`")))
}

fn n_range(raw: &RawConfig, default: (usize, usize)) -> Result<(usize, usize), CliError> {
    const KEY: &str = "N-range";
    let Some(s) = raw.get(KEY) else {
        return Ok(default);
    };
    let (a, b) = split_range(KEY, s)?;
    let parse = |x: &str| {
        x.trim()
            .parse::<usize>()
            .map_err(|_| CliError::config(KEY, format!("cannot parse `{x}`")))
    };
    let (a, b) = (parse(a)?, parse(b)?);
    if a < 1 || b > cqed_gates::model::MAX_ATOMS || a > b {
        return Err(CliError::config(
            KEY,
            format!("need 1 <= A <= B <= {}, got {a}..{b}", cqed_gates::model::MAX_ATOMS),
        ));
    }
    Ok((a, b))
}

fn g_range(raw: &RawConfig, default: (f64, f64)) -> Result<(f64, f64), CliError> {
    const KEY: &str = "g-range";
    let Some(s) = raw.get(KEY) else {
        return Ok(default);
    };
    let (a, b) = split_range(KEY, s)?;
    let parse = |x: &str| {
        x.trim()
            .parse::<f64>()
            .map_err(|_| CliError::config(KEY, format!("cannot parse `{x}`")))
    };
    let (a, b) = (parse(a)?, parse(b)?);
    if !(a.is_finite() && b.is_finite() && a > 0.0 && a <= b) {
        return Err(CliError::config(KEY, format!("need 0 < A <= B, got {a}..{b}")));
    }
    Ok((a, b))
}
