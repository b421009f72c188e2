// Copyright 2026 The afqw Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! CSV and manifest writing. Floats are printed with 17 significant digits
//! and rows end in LF, so identical runs give identical bytes.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{CliError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

/// A command's output directory and the manifest accumulated for it.
pub struct Output {
    dir: PathBuf,
    command: &'static str,
    files: Vec<Value>,
    results: Map<String, Value>,
    config: Value,
}

impl Output {
    pub fn new(dir: &Path, command: &'static str, config: &impl Serialize) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            command,
            files: Vec::new(),
            results: Map::new(),
            config: serde_json::to_value(config)?,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Write `name` with `header` and string rows; `meta` goes into the
    /// manifest entry of the file.
    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>], meta: Value) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(&path)?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush().map_err(|e| CliError::io(&path, e))?;
        self.files.push(json!({ "name": name, "columns": header, "rows": rows.len(), "meta": meta }));
        Ok(path)
    }

    /// Series file with columns `m, value`.
    pub fn series(&mut self, name: &str, points: impl Iterator<Item = (usize, f64)>, meta: Value) -> Result<PathBuf> {
        let rows: Vec<Vec<String>> = points.map(|(m, v)| vec![m.to_string(), real(v)]).collect();
        self.csv(name, &["m", "value"], &rows, meta)
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) -> Result<()> {
        self.results.insert(key.to_string(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn file_names(&self) -> Vec<String> {
        self.files.iter().filter_map(|f| f["name"].as_str().map(String::from)).collect()
    }

    /// Write `<command>.manifest.json` and return the paths of all files.
    pub fn finish(self) -> Result<Vec<PathBuf>> {
        let manifest = json!({
            "command": self.command,
            "version": VERSION,
            "config": self.config,
            "files": self.files,
            "results": self.results,
        });
        let path = self.dir.join(format!("{}.manifest.json", self.command));
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        let mut out: Vec<PathBuf> =
            manifest["files"].as_array().into_iter().flatten().filter_map(|f| f["name"].as_str()).map(|n| self.dir.join(n)).collect();
        out.push(path);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(real(0.1), "1.0000000000000001e-1");
        assert_eq!(real(-2.0), "-2.0000000000000000e0");
        assert_eq!(real(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn lf_rows_and_manifest_listing() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = Output::new(dir.path(), "demo", &json!({"a": 1})).unwrap();
        out.series("s.csv", [(0, 0.5), (1, 0.25)].into_iter(), json!({})).unwrap();
        let files = out.finish().unwrap();
        let text = fs::read_to_string(dir.path().join("s.csv")).unwrap();
        assert_eq!(text, "m,value\n0,5.0000000000000000e-1\n1,2.5000000000000000e-1\n");
        assert_eq!(files.len(), 2);
        let manifest: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("demo.manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["files"][0]["name"], "s.csv");
        assert_eq!(manifest["version"], VERSION);
    }
}
