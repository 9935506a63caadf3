//! Experiment configuration: a flat key=value file format with `#`
//! comments, merged with command-line overrides, validated up front
//! against the cost budget.

use crate::combin::{ball_volume, within_budget};
use crate::field::Field;
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("unknown key '{0}'")]
    UnknownKey(String),
    #[error("bad value for '{key}': {reason}")]
    BadValue { key: String, reason: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("estimated cost {estimate} exceeds the budget {budget}")]
    BudgetExceeded { estimate: BigUint, budget: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    LineGap,
    SpaceGap,
    SpaceCa,
    CurveCa,
    NoSlackDemo,
    ReduceDemo,
    Selftest,
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Mode, String> {
        match s {
            "line-gap" | "gap-line" => Ok(Mode::LineGap),
            "space-gap" | "gap-space" => Ok(Mode::SpaceGap),
            "space-ca" | "ca-space" => Ok(Mode::SpaceCa),
            "curve-ca" | "ca-curve" => Ok(Mode::CurveCa),
            "no-slack-demo" | "no-slack" => Ok(Mode::NoSlackDemo),
            "reduce-demo" => Ok(Mode::ReduceDemo),
            "selftest" => Ok(Mode::Selftest),
            other => Err(format!("unknown mode '{other}'")),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Mode::LineGap => "line-gap",
            Mode::SpaceGap => "space-gap",
            Mode::SpaceCa => "space-ca",
            Mode::CurveCa => "curve-ca",
            Mode::NoSlackDemo => "no-slack-demo",
            Mode::ReduceDemo => "reduce-demo",
            Mode::Selftest => "selftest",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Enumeration {
    Full,
    Sampled(u64),
}

impl FromStr for Enumeration {
    type Err = String;
    fn from_str(s: &str) -> Result<Enumeration, String> {
        if s == "full" {
            return Ok(Enumeration::Full);
        }
        if let Some(count) = s.strip_prefix("sampled:") {
            return count
                .parse::<u64>()
                .map(Enumeration::Sampled)
                .map_err(|e| e.to_string());
        }
        Err(format!("expected 'full' or 'sampled:COUNT', got '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<OutputFormat, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("expected 'csv' or 'json', got '{other}'")),
        }
    }
}

/// Witness family used by the reduce-demo mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObjectKind {
    Line,
    Space,
    Curve,
}

impl FromStr for ObjectKind {
    type Err = String;
    fn from_str(s: &str) -> Result<ObjectKind, String> {
        match s {
            "line" => Ok(ObjectKind::Line),
            "space" => Ok(ObjectKind::Space),
            "curve" => Ok(ObjectKind::Curve),
            other => Err(format!("expected line|space|curve, got '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub q: u64,
    pub n: usize,
    pub r: usize,
    pub e: usize,
    pub eplus: usize,
    /// affine-space dimension for space modes
    pub m: usize,
    /// curve degree for curve modes
    pub degree: usize,
    pub trials: u64,
    pub master_seed: u64,
    pub enumeration: Enumeration,
    /// abstract operation budget per validation formulas
    pub budget: u64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub jobs: usize,
    /// emit every record instead of only candidate violations
    pub record_all: bool,
    /// planner count threshold K to compare line counts against
    pub planner_k: Option<u64>,
    /// fold the explicit no-slack line into line-gap runs
    pub attach_no_slack: bool,
    /// witness family for reduce-demo
    pub object: ObjectKind,
    /// target witness rank for reduce-demo
    pub target_rank: usize,
    /// design points for reduce-demo
    pub points: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            mode: Mode::LineGap,
            q: 4,
            n: 8,
            r: 4,
            e: 1,
            eplus: 2,
            m: 2,
            degree: 2,
            trials: 10,
            master_seed: 1,
            enumeration: Enumeration::Full,
            budget: 200_000_000,
            out: None,
            format: OutputFormat::Csv,
            jobs: 1,
            record_all: false,
            planner_k: None,
            attach_no_slack: false,
            object: ObjectKind::Line,
            target_rank: 3,
            points: 6,
        }
    }
}

impl ExperimentConfig {
    /// Parses the flat key=value format; `#` starts a comment.
    pub fn parse_file(text: &str) -> Result<ExperimentConfig, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Invalid(format!(
                    "expected key=value, got '{line}'"
                )));
            };
            cfg.apply(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    /// Sets one key; command-line flags call this after file parsing,
    /// so flags override file values.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
        where
            T::Err: std::fmt::Display,
        {
            value.parse::<T>().map_err(|e| ConfigError::BadValue {
                key: key.to_string(),
                reason: e.to_string(),
            })
        }
        match key {
            "mode" => self.mode = parse(key, value)?,
            "q" => self.q = parse(key, value)?,
            "n" => self.n = parse(key, value)?,
            "r" => self.r = parse(key, value)?,
            // alternative to r: a rate R in (0,1) giving r = round((1−R)·n);
            // requires n to be set first
            "rate" => {
                let rate: f64 = parse(key, value)?;
                if !(0.0..1.0).contains(&rate) {
                    return Err(ConfigError::BadValue {
                        key: key.to_string(),
                        reason: "rate must be in [0, 1)".into(),
                    });
                }
                self.r = (((1.0 - rate) * self.n as f64).round() as usize).max(1);
            }
            "e" => self.e = parse(key, value)?,
            "eplus" => self.eplus = parse(key, value)?,
            "m" => self.m = parse(key, value)?,
            "degree" => self.degree = parse(key, value)?,
            "trials" => self.trials = parse(key, value)?,
            "seed" => self.master_seed = parse(key, value)?,
            "enumeration" => self.enumeration = parse(key, value)?,
            "budget" => self.budget = parse(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => self.format = parse(key, value)?,
            "jobs" => self.jobs = parse(key, value)?,
            "record_all" => self.record_all = parse(key, value)?,
            "planner_k" => self.planner_k = Some(parse(key, value)?),
            "attach_no_slack" => self.attach_no_slack = parse(key, value)?,
            "object" => self.object = parse(key, value)?,
            "target_rank" => self.target_rank = parse(key, value)?,
            "points" => self.points = parse(key, value)?,
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Parameter sanity plus an up-front cost estimate compared against
    /// the budget. Returns the estimate.
    pub fn validate(&self) -> Result<BigUint, ConfigError> {
        if Field::new(self.q).is_err() {
            return Err(ConfigError::Invalid(format!(
                "q = {} is not a supported prime power",
                self.q
            )));
        }
        if self.r < 1 || self.r > self.n {
            return Err(ConfigError::Invalid(format!(
                "need 1 <= r <= n, got r={}, n={}",
                self.r, self.n
            )));
        }
        if self.e > self.eplus || self.eplus > self.n {
            return Err(ConfigError::Invalid(format!(
                "need E <= E+ <= n, got E={}, E+={}, n={}",
                self.e, self.eplus, self.n
            )));
        }
        if self.jobs == 0 {
            return Err(ConfigError::Invalid("jobs must be at least 1".into()));
        }
        let q = self.q;
        let n = self.n as u64;
        let r = self.r as u64;
        // per-trial: coset-table walk to E+ (dominant), then per-object
        // membership scans
        let walk = ball_volume(n, q, self.eplus as u64) * BigUint::from(n);
        let objects: BigUint = match (self.mode, self.enumeration) {
            (Mode::LineGap, Enumeration::Full) => {
                crate::geometry::line_count(q, self.r) * BigUint::from(q)
            }
            (Mode::SpaceGap | Mode::SpaceCa, Enumeration::Full) => {
                crate::geometry::affine_space_count(q, self.r, self.m)
                    * crate::combin::power(q, self.m as u64)
            }
            (Mode::CurveCa, Enumeration::Full) => {
                // all coefficient tuples: q^{r(degree+1)} curves
                crate::combin::power(q, r * (self.degree as u64 + 1)) * BigUint::from(q)
            }
            (_, Enumeration::Sampled(count)) => {
                BigUint::from(count) * crate::combin::power(q, self.m.max(1) as u64)
            }
            (Mode::NoSlackDemo | Mode::ReduceDemo | Mode::Selftest, Enumeration::Full) => {
                BigUint::from(0u32)
            }
        };
        let estimate = (walk + objects) * BigUint::from(self.trials.max(1));
        if within_budget(&estimate, self.budget).is_none() {
            return Err(ConfigError::BudgetExceeded {
                estimate,
                budget: self.budget,
            });
        }
        Ok(estimate)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_parsing_with_comments_and_overrides() {
        let text = "\
# experiment setup
mode = line-gap
q = 8          # alphabet
n = 8
r = 4
e = 1
eplus = 2
trials = 20
seed = 99
enumeration = sampled:500
";
        let mut cfg = ExperimentConfig::parse_file(text).unwrap();
        assert_eq!(cfg.mode, Mode::LineGap);
        assert_eq!(cfg.q, 8);
        assert_eq!(cfg.master_seed, 99);
        assert_eq!(cfg.enumeration, Enumeration::Sampled(500));
        // flag override wins
        cfg.apply("seed", "7").unwrap();
        assert_eq!(cfg.master_seed, 7);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(
            ExperimentConfig::parse_file("bogus = 1"),
            Err(ConfigError::UnknownKey(_))
        ));
    }

    #[test]
    fn validation_rejects_bad_radii_and_budget() {
        let cfg = ExperimentConfig {
            e: 3,
            eplus: 2,
            ..ExperimentConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(ConfigError::Invalid(_))));

        let cfg = ExperimentConfig {
            q: 16,
            n: 16,
            r: 8,
            eplus: 8,
            e: 8,
            budget: 1000,
            ..ExperimentConfig::default()
        };
        assert!(matches!(
            cfg.validate(),
            Err(ConfigError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn default_config_is_valid() {
        assert!(ExperimentConfig::default().validate().is_ok());
    }

    #[test]
    fn rate_sets_r_from_n() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply("n", "12").unwrap();
        cfg.apply("rate", "0.5").unwrap();
        assert_eq!(cfg.r, 6);
        cfg.apply("rate", "0.75").unwrap();
        assert_eq!(cfg.r, 3);
        assert!(cfg.apply("rate", "1.5").is_err());
    }

    #[test]
    fn non_prime_power_rejected() {
        let cfg = ExperimentConfig {
            q: 6,
            ..ExperimentConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(ConfigError::Invalid(_))));
    }
}
