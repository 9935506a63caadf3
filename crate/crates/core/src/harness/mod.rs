//! Reproducible desk-scale experiments driving the other modules:
//! seeded code sampling, gap and correlated-agreement measurement
//! against planner thresholds, CSV/JSON record output, and the
//! deterministic verification suites.

pub mod config;
pub mod records;
pub mod runners;
pub mod selftest;

pub use config::{ConfigError, Enumeration, ExperimentConfig, Mode, ObjectKind, OutputFormat};
pub use records::{Summary, TrialRecord};
pub use runners::{run, HarnessError, RunOutput};
pub use selftest::{selftest, Level, SelftestReport, SuiteResult};
