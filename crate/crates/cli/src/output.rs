//! Machine-readable run artifacts: results.json with provenance-labelled
//! quantities, per-table CSV, and two-column plot-data series.

use serde::Serialize;
use serde_json::{json, Value};
use std::fs;
use std::path::{Path, PathBuf};

/// One emitted number with its provenance (computed quantity + module).
#[derive(Debug, Clone, Serialize)]
pub struct Quantity {
    pub name: String,
    pub module: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Default)]
pub struct RunOutput {
    pub quantities: Vec<Quantity>,
    pub assertions: Vec<Assertion>,
    pub tables: Vec<(String, String)>,
    pub series: Vec<(String, Vec<(f64, f64)>)>,
    pub extra: Vec<(String, Value)>,
}

impl RunOutput {
    pub fn quantity(&mut self, name: impl Into<String>, module: &str, value: f64) {
        self.quantities.push(Quantity {
            name: name.into(),
            module: module.into(),
            value,
        });
    }

    pub fn assert_that(&mut self, name: impl Into<String>, pass: bool, detail: String) {
        self.assertions.push(Assertion {
            name: name.into(),
            pass,
            detail,
        });
    }

    /// CSV table artifact (content is written as-is).
    pub fn table(&mut self, file_stem: impl Into<String>, csv: String) {
        self.tables.push((file_stem.into(), csv));
    }

    /// Two-column plot series (x, y).
    pub fn series(&mut self, file_stem: impl Into<String>, points: Vec<(f64, f64)>) {
        self.series.push((file_stem.into(), points));
    }

    pub fn extra(&mut self, key: impl Into<String>, value: Value) {
        self.extra.push((key.into(), value));
    }

    pub fn all_pass(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    /// Writes results.json, tables, series, and (on failure) the failure
    /// manifest. Returns the list of artifact file names.
    pub fn write(
        &self,
        dir: &Path,
        experiment: &str,
        parameters: &Value,
        seed: u64,
        formats: &[String],
    ) -> std::io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut artifacts = Vec::new();
        let csv_wanted = formats.iter().any(|f| f == "csv");
        if csv_wanted {
            for (stem, content) in &self.tables {
                let path = dir.join(format!("{stem}.csv"));
                fs::write(&path, content)?;
                artifacts.push(path);
            }
            for (stem, pts) in &self.series {
                let mut s = String::from("x,y\n");
                for (x, y) in pts {
                    s.push_str(&format!("{x:.12e},{y:.12e}\n"));
                }
                let path = dir.join(format!("{stem}.csv"));
                fs::write(&path, s)?;
                artifacts.push(path);
            }
        }
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let mut root = json!({
            "experiment": experiment,
            "parameters": parameters,
            "seed": seed,
            "quantities": self.quantities,
            "assertions": self.assertions,
            "artifacts": artifacts.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect::<Vec<_>>(),
            "all_pass": self.all_pass(),
        });
        for (k, v) in &self.extra {
            root[k] = v.clone();
        }
        // the timestamp is the one rerun-variable field
        root["timestamp_unix"] = json!(timestamp);
        let path = dir.join("results.json");
        fs::write(&path, serde_json::to_string_pretty(&root)?)?;
        artifacts.push(path);
        if !self.all_pass() {
            let failures: Vec<&Assertion> =
                self.assertions.iter().filter(|a| !a.pass).collect();
            let path = dir.join("failures.json");
            fs::write(&path, serde_json::to_string_pretty(&json!({ "failed": failures }))?)?;
            artifacts.push(path);
        }
        Ok(artifacts)
    }
}
