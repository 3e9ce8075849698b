use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

/// One named check. `record` identifies what was measured.
#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub name: String,
    pub record: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

/// Collects assertions, tolerances and artifacts for one run.
#[derive(Debug, Default)]
pub struct Report {
    pub assertions: Vec<Assertion>,
    pub tolerances: serde_json::Map<String, Value>,
    pub artifacts: Vec<String>,
    pub results: serde_json::Map<String, Value>,
}

impl Report {
    /// Passes when `value <= limit` (NaN fails).
    pub fn at_most(&mut self, name: &str, record: impl Into<String>, value: f64, limit: f64) {
        self.push(name, record.into(), value, limit, value <= limit);
    }

    /// Passes when `value >= limit` (NaN fails).
    pub fn at_least(&mut self, name: &str, record: impl Into<String>, value: f64, limit: f64) {
        self.push(name, record.into(), value, limit, value >= limit);
    }

    /// Passes when `holds`; `value` is stored as 1 or 0.
    pub fn holds(&mut self, name: &str, record: impl Into<String>, holds: bool) {
        self.push(name, record.into(), if holds { 1.0 } else { 0.0 }, 1.0, holds);
    }

    fn push(&mut self, name: &str, record: String, value: f64, limit: f64, passed: bool) {
        self.assertions.push(Assertion { name: name.into(), record, value, limit, passed });
    }

    pub fn tolerance(&mut self, name: &str, value: f64) {
        self.tolerances.insert(name.into(), value.into());
    }

    pub fn result(&mut self, name: &str, value: impl Serialize) -> Result<()> {
        self.results.insert(name.into(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn first_failure(&self) -> Option<&Assertion> {
        self.assertions.iter().find(|a| !a.passed)
    }
}

/// Output directory for one run.
pub struct Artifacts {
    pub dir: PathBuf,
}

impl Artifacts {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Artifacts { dir: dir.to_path_buf() })
    }

    /// Writes `rows` as RFC 4180 CSV with a header taken from the field names.
    pub fn csv<T: Serialize>(&self, report: &mut Report, name: &str, rows: &[T]) -> Result<()> {
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        report.artifacts.push(name.into());
        Ok(())
    }
}

pub fn config_hash(config: &RunConfig) -> Result<String> {
    let bytes = serde_json::to_vec(config)?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

#[derive(Serialize)]
struct Summary<'a> {
    command: &'a str,
    status: &'a str,
    kerrkit_version: &'a str,
    config_sha256: Option<String>,
    config: Option<&'a RunConfig>,
    tolerances: &'a serde_json::Map<String, Value>,
    assertions: &'a [Assertion],
    first_failure: Option<&'a Assertion>,
    error: Option<&'a str>,
    artifacts: &'a [String],
    results: &'a serde_json::Map<String, Value>,
}

/// Writes `summary.json`. `config` is `None` when it could not be read.
pub fn write_summary(
    dir: &Path,
    command: &str,
    status: &str,
    config: Option<&RunConfig>,
    report: &Report,
    error: Option<&str>,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    let summary = Summary {
        command,
        status,
        kerrkit_version: kerrkit::VERSION,
        config_sha256: config.map(config_hash).transpose()?,
        config,
        tolerances: &report.tolerances,
        assertions: &report.assertions,
        first_failure: report.first_failure(),
        error,
        artifacts: &report.artifacts,
        results: &report.results,
    };
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    fs::write(dir.join("summary.json"), text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_fails_both_comparisons() {
        let mut r = Report::default();
        r.at_most("x", "a", f64::NAN, 1.0);
        r.at_least("y", "b", f64::NAN, 1.0);
        assert!(r.assertions.iter().all(|a| !a.passed));
        assert_eq!(r.first_failure().unwrap().name, "x");
    }

    #[test]
    fn hash_is_stable() {
        let c = RunConfig::default();
        assert_eq!(config_hash(&c).unwrap(), config_hash(&c.clone()).unwrap());
        assert_eq!(config_hash(&c).unwrap().len(), 64);
    }
}
