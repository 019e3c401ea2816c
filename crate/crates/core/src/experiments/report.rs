use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::Result;

/// One declared check and its outcome.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Verdict {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Parameters, per-trial records, summary statistics and verdicts of one
/// experiment run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub seed: u64,
    pub parameters: Map<String, Value>,
    pub records: Vec<Map<String, Value>>,
    pub summary: Map<String, Value>,
    pub verdicts: Vec<Verdict>,
}

impl ExperimentReport {
    pub fn new(name: &str, seed: u64, parameters: Value) -> Self {
        ExperimentReport {
            name: name.to_string(),
            seed,
            parameters: match parameters {
                Value::Object(m) => m,
                _ => Map::new(),
            },
            records: Vec::new(),
            summary: Map::new(),
            verdicts: Vec::new(),
        }
    }

    pub fn record(&mut self, row: Value) {
        if let Value::Object(m) = row {
            self.records.push(m);
        }
    }

    pub fn summarize(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }

    pub fn verdict(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn find(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    /// `{name}-{seed}`.
    pub fn file_stem(&self) -> String {
        format!("{}-{}", self.name, self.seed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Per-trial records as CSV; columns are the keys of the first record.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if let Some(first) = self.records.first() {
            let header: Vec<&String> = first.keys().collect();
            w.write_record(&header).map_err(std::io::Error::from)?;
            for row in &self.records {
                let cells: Vec<String> = header
                    .iter()
                    .map(|key| match row.get(*key) {
                        Some(Value::String(s)) => s.clone(),
                        Some(Value::Null) | None => String::new(),
                        Some(other) => other.to_string(),
                    })
                    .collect();
                w.write_record(&cells).map_err(std::io::Error::from)?;
            }
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("utf-8"))
    }

    /// Writes `{stem}.json` and `{stem}.csv` into `dir`; returns both paths.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let json = dir.join(format!("{}.json", self.file_stem()));
        let csv = dir.join(format!("{}.csv", self.file_stem()));
        std::fs::write(&json, self.to_json() + "\n")?;
        std::fs::write(&csv, self.to_csv()?)?;
        Ok((json, csv))
    }
}
