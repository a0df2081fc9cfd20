use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::Result;

use super::config::ExperimentConfig;

/// A checked property; a failed invariant makes the run fail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.to_string(), passed, detail: detail.into() }
    }
}

/// One CSV file of a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// Outcome of one experiment.
///
/// `invariants` decide the exit status; `expectations` record statistical
/// targets without affecting it. Everything but `timings` is a pure function
/// of the config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub library_version: String,
    pub config: ExperimentConfig,
    pub metrics: Map<String, Value>,
    pub invariants: Vec<Check>,
    pub expectations: Vec<Check>,
    #[serde(skip)]
    pub tables: Vec<Table>,
    /// Extra files as `(name, contents)`.
    #[serde(skip)]
    pub artifacts: Vec<(String, String)>,
    pub timings: BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct MetricsView<'a> {
    library_version: &'a str,
    config: &'a ExperimentConfig,
    metrics: &'a Map<String, Value>,
    invariants: &'a [Check],
    expectations: &'a [Check],
}

impl Report {
    pub fn new(config: ExperimentConfig) -> Self {
        Report {
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            metrics: Map::new(),
            invariants: Vec::new(),
            expectations: Vec::new(),
            tables: Vec::new(),
            artifacts: Vec::new(),
            timings: BTreeMap::new(),
        }
    }

    pub fn metric(&mut self, key: &str, value: impl Serialize) -> Result<()> {
        self.metrics.insert(key.to_string(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn invariant(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.invariants.push(Check::new(name, passed, detail));
    }

    pub fn expect(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.expectations.push(Check::new(name, passed, detail));
    }

    pub fn all_invariants_passed(&self) -> bool {
        self.invariants.iter().all(|c| c.passed)
    }

    /// The timing-free part of the report, as pretty JSON.
    pub fn metrics_json(&self) -> Result<String> {
        let view = MetricsView {
            library_version: &self.library_version,
            config: &self.config,
            metrics: &self.metrics,
            invariants: &self.invariants,
            expectations: &self.expectations,
        };
        Ok(serde_json::to_string_pretty(&view)?)
    }

    /// Writes `metrics.json`, `report.json`, one CSV per table and the
    /// artifacts into `dir`; returns the written paths.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let mut put = |name: &str, contents: &str| -> Result<()> {
            let path = dir.join(name);
            std::fs::write(&path, contents)?;
            written.push(path);
            Ok(())
        };
        put("metrics.json", &self.metrics_json()?)?;
        put("report.json", &serde_json::to_string_pretty(self)?)?;
        for (name, contents) in &self.artifacts {
            put(name, contents)?;
        }
        for table in &self.tables {
            let path = dir.join(format!("{}.csv", table.name));
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(&table.header)?;
            for row in &table.rows {
                w.write_record(row)?;
            }
            w.flush()?;
            written.push(path);
        }
        Ok(written)
    }
}
