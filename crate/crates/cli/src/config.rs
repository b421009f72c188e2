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

//! Run configuration: one JSON document, every field optional, with command
//! line flags applied on top.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use afqw_core::catalog::PointLabel;
use afqw_core::dynamics::SectorThresholds;
use afqw_core::lattice::LatticeSpec;
use afqw_core::spectra::EdgeSearch;
use afqw_core::{Frame, ModelParams};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Base parameters; `M` and `phi` are ignored wherever a labeled point is used.
    pub params: ModelParams,
    pub out: PathBuf,
    pub threads: Option<usize>,
    pub phase_map: PhaseMapConfig,
    pub open: OpenConfig,
    pub edge_dynamics: EdgeDynamicsConfig,
    pub bulk: BulkConfig,
    pub critical: CriticalConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: ModelParams::default(),
            out: PathBuf::from("out"),
            threads: None,
            phase_map: PhaseMapConfig::default(),
            open: OpenConfig::default(),
            edge_dynamics: EdgeDynamicsConfig::default(),
            bulk: BulkConfig::default(),
            critical: CriticalConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhaseMapConfig {
    pub m_range: (f64, f64),
    pub phi_range: (f64, f64),
    pub n_m: usize,
    pub n_phi: usize,
    pub n_k: usize,
}

impl Default for PhaseMapConfig {
    fn default() -> Self {
        Self { m_range: (-4.0, 2.0), phi_range: (0.0, PI / 2.0), n_m: 201, n_phi: 201, n_k: 4096 }
    }
}

/// Open chain used for the edge spectrum and edge dynamics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OpenConfig {
    pub point: PointLabel,
    pub cells: usize,
    pub edge_cells: usize,
    pub search: EdgeSearch,
}

impl Default for OpenConfig {
    fn default() -> Self {
        Self { point: PointLabel::P4, cells: 60, edge_cells: 5, search: EdgeSearch::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuperpositionMode {
    /// Evolve the optimized superposition wherever the edge pair exists.
    Auto,
    /// Fail with exit code 3 at any point lacking the edge pair.
    Required,
    Off,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EdgeDynamicsConfig {
    pub points: Vec<PointLabel>,
    pub m_max: usize,
    pub m_tail: usize,
    pub thresholds: SectorThresholds,
    pub superposition: SuperpositionMode,
    pub superposition_m_max: usize,
}

impl Default for EdgeDynamicsConfig {
    fn default() -> Self {
        Self {
            points: PointLabel::OPEN_BOUNDARY.to_vec(),
            m_max: 200,
            m_tail: 50,
            thresholds: SectorThresholds::default(),
            superposition: SuperpositionMode::Auto,
            superposition_m_max: 40,
        }
    }
}

/// Periodic ring used for the displacement and return probes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BulkConfig {
    pub cells: usize,
    pub points: Vec<PointLabel>,
    pub frames: Vec<Frame>,
    /// Periods per displacement run; the pre-reflection window when absent.
    pub m_max: Option<usize>,
}

impl Default for BulkConfig {
    fn default() -> Self {
        Self { cells: 401, points: PointLabel::BULK.to_vec(), frames: Frame::BOTH.to_vec(), m_max: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CriticalConfig {
    pub m_max: usize,
    pub m_lo: usize,
    pub m_hi: usize,
}

impl Default for CriticalConfig {
    fn default() -> Self {
        Self { m_max: 30, m_lo: 1, m_hi: 30 }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn open_spec(&self) -> Result<LatticeSpec> {
        LatticeSpec::open(self.open.cells)
            .and_then(|s| LatticeSpec::new(s.cells, s.boundary, self.open.edge_cells))
            .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn bulk_spec(&self) -> Result<LatticeSpec> {
        let spec = LatticeSpec::periodic(self.bulk.cells).map_err(|e| CliError::Config(e.to_string()))?;
        spec.center_cell().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate().map_err(|e| CliError::Config(e.to_string()))?;
        let pm = &self.phase_map;
        if !(pm.m_range.0 <= pm.m_range.1 && pm.phi_range.0 <= pm.phi_range.1) {
            return Err(CliError::Config("phase map ranges must satisfy lo <= hi".into()));
        }
        if ![pm.m_range.0, pm.m_range.1, pm.phi_range.0, pm.phi_range.1].iter().all(|v| v.is_finite()) {
            return Err(CliError::Config("phase map ranges must be finite".into()));
        }
        if pm.n_m == 0 || pm.n_phi == 0 || pm.n_k < 256 {
            return Err(CliError::Config("phase map needs n_m, n_phi >= 1 and n_k >= 256".into()));
        }
        self.open_spec()?;
        self.bulk_spec()?;
        let ed = &self.edge_dynamics;
        if ed.m_max < 1 || ed.m_tail < 2 || ed.m_max + 1 < 2 * ed.m_tail {
            return Err(CliError::Config(format!(
                "edge dynamics needs m_max + 1 >= 2·m_tail (m_max = {}, m_tail = {})",
                ed.m_max, ed.m_tail
            )));
        }
        if ed.superposition_m_max < 2 {
            return Err(CliError::Config("superposition_m_max must be at least 2".into()));
        }
        let c = &self.critical;
        if c.m_hi > c.m_max || c.m_hi < c.m_lo + 8 {
            return Err(CliError::Config("critical window needs m_lo + 8 <= m_hi <= m_max".into()));
        }
        if self.threads == Some(0) {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_the_default() {
        let cfg: RunConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg, RunConfig::default());
        cfg.validate().unwrap();
    }

    #[test]
    fn partial_sections_and_unknown_fields() {
        let cfg: RunConfig = serde_json::from_str(r#"{"open": {"point": "P2", "cells": 40}}"#).unwrap();
        assert_eq!(cfg.open.point, PointLabel::P2);
        assert_eq!(cfg.open.edge_cells, 5);
        assert!(serde_json::from_str::<RunConfig>(r#"{"opne": {}}"#).is_err());
    }

    #[test]
    fn invalid_values_are_config_errors() {
        let mut cfg = RunConfig::default();
        cfg.bulk.cells = 400;
        assert!(matches!(cfg.validate(), Err(CliError::Config(_))));
        let mut cfg = RunConfig::default();
        cfg.phase_map.m_range = (1.0, -1.0);
        assert_eq!(cfg.validate().unwrap_err().exit_code(), 2);
    }
}
