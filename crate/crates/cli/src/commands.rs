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

//! The data-export commands, one per exported data set.

use std::path::PathBuf;

use afqw_core::catalog::PointLabel;
use afqw_core::dynamics::{
    classify_sector, even_odd_split, evolve_series, mcd_from_substeps, pre_reflection_window, return_series,
    tail_statistics, EdgePresence, TimeSeries,
};
use afqw_core::lattice::{floquet_operator, static_operators, LatticeSpec, StateVector, Sublattice, Substeps};
use afqw_core::model::GapKind;
use afqw_core::par::{self, Execution};
use afqw_core::spectra::{
    cross_element, find_edge_mode, optimized_superposition, quasienergy_spectrum, EdgeMode, EdgeModePair, QuasienergySpectrum,
};
use afqw_core::topology::{geometric_mcd_integral, phase_map_with, winding_number, DEFAULT_K_POINTS};
use afqw_core::Frame;
use serde_json::{json, Value};

use crate::config::{RunConfig, SuperpositionMode};
use crate::error::{CliError, Result};
use crate::export::{real, Output};

fn frame_tag(f: Frame) -> &'static str {
    match f {
        Frame::Frame1 => "frame1",
        Frame::Frame2 => "frame2",
    }
}

fn blank_or<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn cmd_phase_map(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let pm = &cfg.phase_map;
    let map = phase_map_with(&cfg.params, pm.m_range, pm.phi_range, pm.n_m, pm.n_phi, pm.n_k, Execution::Parallel)?;
    let mut rows = Vec::with_capacity(map.cells.len());
    for (i, &m) in map.m_grid.iter().enumerate() {
        for (j, &phi) in map.phi_grid.iter().enumerate() {
            let t = map.cell(i, j).invariants();
            rows.push(vec![
                real(m),
                real(phi),
                blank_or(t.map(|t| t.w1)),
                blank_or(t.map(|t| t.w2)),
                blank_or(t.map(|t| t.nu0)),
                blank_or(t.map(|t| t.nupi)),
                u8::from(t.is_none()).to_string(),
            ]);
        }
    }
    let hits: Vec<Value> = PointLabel::ALL
        .iter()
        .filter_map(|&label| {
            let (m, phi) = label.coordinates();
            let (i, j) = map.nearest_cell(m, phi)?;
            let cell = map.cell(i, j);
            Some(json!({
                "label": label,
                "marker": label.marker(),
                "M": m,
                "phi": phi,
                "cell": [i, j],
                "cell_M": map.m_grid[i],
                "cell_phi": map.phi_grid[j],
                "invariants": cell.invariants(),
                "expected_gap_indices": label.expected_gap_indices(),
                "expected_windings": label.expected_windings(),
            }))
        })
        .collect();
    let mut out = Output::new(&cfg.out, "phase_map", cfg)?;
    out.csv(
        "phase_map.csv",
        &["M", "phi", "W1", "W2", "nu0", "nupi", "closed_flag"],
        &rows,
        json!({ "n_m": pm.n_m, "n_phi": pm.n_phi, "n_k": pm.n_k, "row_order": "M outer, phi inner" }),
    )?;
    out.result("closed_cells", map.closed_count())?;
    out.result("catalog_hit_count", hits.len())?;
    out.result("catalog_hits", hits)?;
    out.finish()
}

fn mode_summary(mode: &std::result::Result<EdgeMode, afqw_core::Error>) -> Value {
    match mode {
        Ok(m) => json!({ "found": true, "eps": m.eps, "weight": m.weight, "levels": m.levels }),
        Err(e) => json!({ "found": false, "reason": e.to_string() }),
    }
}

struct OpenRun {
    spec: LatticeSpec,
    u: afqw_core::lattice::LatticeOperator,
    spectrum: QuasienergySpectrum,
    zero: std::result::Result<EdgeMode, afqw_core::Error>,
    pi: std::result::Result<EdgeMode, afqw_core::Error>,
}

impl OpenRun {
    fn new(cfg: &RunConfig, label: PointLabel) -> Result<Self> {
        let spec = cfg.open_spec()?;
        let u = floquet_operator(&label.params(), spec)?;
        let spectrum = quasienergy_spectrum(&u)?;
        let zero = find_edge_mode(&spectrum, GapKind::Zero, &cfg.open.search);
        let pi = find_edge_mode(&spectrum, GapKind::Pi, &cfg.open.search);
        Ok(Self { spec, u, spectrum, zero, pi })
    }

    fn presence(&self) -> EdgePresence {
        EdgePresence { zero: self.zero.is_ok(), pi: self.pi.is_ok() }
    }

    fn pair(&self) -> Option<EdgeModePair> {
        match (&self.zero, &self.pi) {
            (Ok(z), Ok(p)) => Some(EdgeModePair::from_modes(z.clone(), p.clone())),
            _ => None,
        }
    }
}

pub fn cmd_obc_spectrum(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let label = cfg.open.point;
    let run = OpenRun::new(cfg, label)?;
    let mut out = Output::new(&cfg.out, "obc_spectrum", cfg)?;
    let rows: Vec<Vec<String>> = run
        .spectrum
        .levels
        .iter()
        .enumerate()
        .map(|(i, l)| vec![i.to_string(), real(l.eps), real(l.edge_weight_left)])
        .collect();
    let meta = json!({ "point": label, "params": label.params(), "spec": run.spec });
    out.csv(&format!("spectrum_{label}.csv"), &["index", "eps", "edge_weight_left"], &rows, meta.clone())?;
    let profile = |mode: &std::result::Result<EdgeMode, afqw_core::Error>, n: usize| {
        mode.as_ref().ok().map(|m| real(m.state.weight_in(n..=n))).unwrap_or_default()
    };
    let rows: Vec<Vec<String>> =
        (1..=run.spec.cells).map(|n| vec![n.to_string(), profile(&run.zero, n), profile(&run.pi, n)]).collect();
    out.csv(&format!("edge_profile_{label}.csv"), &["cell", "zero_mode", "pi_mode"], &rows, meta)?;
    out.result("zero_mode", mode_summary(&run.zero))?;
    out.result("pi_mode", mode_summary(&run.pi))?;
    out.finish()
}

struct PointDynamics {
    label: PointLabel,
    presence: EdgePresence,
    pi1: TimeSeries,
    pie: TimeSeries,
    sector: Value,
    superposition: Option<(TimeSeries, Value)>,
    zero: Value,
    pi: Value,
}

fn point_dynamics(cfg: &RunConfig, label: PointLabel) -> Result<PointDynamics> {
    let ed = &cfg.edge_dynamics;
    let run = OpenRun::new(cfg, label)?;
    let ops = static_operators(run.spec);
    let psi = StateVector::site(run.spec, 1, Sublattice::A)?;
    let pi1 = evolve_series(&run.u, &psi, &ops.pi1, ed.m_max)?;
    let pie = evolve_series(&run.u, &psi, &ops.pie, ed.m_max)?;
    let sector = match classify_sector(&pi1, ed.m_tail, &ed.thresholds, Some(run.presence())) {
        Ok(s) => serde_json::to_value(s)?,
        Err(afqw_core::Error::AmbiguousSector) => {
            let (dc, ac, tail_std) = tail_statistics(&pi1, ed.m_tail)?;
            json!({ "value": null, "dc": dc, "ac": ac, "tail_std": tail_std, "reason": "ambiguous" })
        }
        Err(e) => return Err(e.into()),
    };
    let superposition = match (ed.superposition, run.pair()) {
        (SuperpositionMode::Off, _) => None,
        (SuperpositionMode::Required, None) => {
            return Err(CliError::MissingEdgeMode(format!("{label} has no left-edge 0/π pair")));
        }
        (SuperpositionMode::Auto, None) => None,
        (_, Some(pair)) => {
            let state = optimized_superposition(&pair, &ops.pi1)?;
            let cross = cross_element(&pair, &ops.pi1)?;
            let ts = evolve_series(&run.u, &state, &ops.pi1, ed.superposition_m_max)?;
            Some((ts, json!({ "cross_element_abs": cross.norm(), "cross_element_arg": cross.arg() })))
        }
    };
    Ok(PointDynamics {
        label,
        presence: run.presence(),
        pi1,
        pie,
        sector,
        superposition,
        zero: mode_summary(&run.zero),
        pi: mode_summary(&run.pi),
    })
}

pub fn cmd_edge_dynamics(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let runs: Vec<Result<PointDynamics>> =
        par::map_slice(&cfg.edge_dynamics.points, Execution::Parallel, |&label| point_dynamics(cfg, label));
    let mut out = Output::new(&cfg.out, "edge_dynamics", cfg)?;
    let mut summary = serde_json::Map::new();
    for run in runs {
        let run = run?;
        let label = run.label;
        let meta = json!({ "point": label, "params": label.params(), "initial_state": "|1,A>" });
        out.series(&format!("edge_{label}_pi1.csv"), run.pi1.points(), json!({ "projector": "Pi_1", "meta": meta }))?;
        out.series(&format!("edge_{label}_pie.csv"), run.pie.points(), json!({ "projector": "Pi_e", "meta": meta }))?;
        let mut entry = json!({
            "sector": run.sector,
            "edge_presence": run.presence,
            "zero_mode": run.zero,
            "pi_mode": run.pi,
        });
        if let Some((ts, info)) = run.superposition {
            let name = format!("edge_{label}_superposition_pi1.csv");
            out.series(&name, ts.points(), json!({ "projector": "Pi_1", "initial_state": "optimized superposition" }))?;
            entry["superposition"] = info;
        }
        summary.insert(label.to_string(), entry);
    }
    out.result("points", summary)?;
    out.finish()
}

pub fn cmd_mcd(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let spec = cfg.bulk_spec()?;
    let frames = cfg.bulk.frames.clone();
    let runs = par::map_slice(&cfg.bulk.points, Execution::Parallel, |&label| -> Result<_> {
        let p = label.params();
        let window = pre_reflection_window(&p, spec)?;
        let m_max = cfg.bulk.m_max.unwrap_or(window);
        if m_max > window {
            return Err(afqw_core::Error::WindowExceeded { requested: m_max, window }.into());
        }
        let steps = Substeps::new(&p, spec)?;
        let mut per_frame = Vec::new();
        for &f in &frames {
            let run = mcd_from_substeps(&steps, f, m_max)?;
            let w = winding_number(&p, f, DEFAULT_K_POINTS)?.winding;
            let geo = -2.0 * geometric_mcd_integral(&p, f, 8192)?;
            per_frame.push((run, w, geo));
        }
        Ok((label, window, per_frame))
    });
    let mut out = Output::new(&cfg.out, "mcd", cfg)?;
    let mut summary = serde_json::Map::new();
    for run in runs {
        let (label, window, per_frame) = run?;
        let mut entry = serde_json::Map::new();
        for (run, w, geo) in per_frame {
            let tag = frame_tag(run.frame);
            let rows: Vec<Vec<String>> = run
                .averaged
                .points()
                .zip(&run.raw.values)
                .map(|((m, avg), raw)| vec![m.to_string(), real(avg), real(*raw)])
                .collect();
            let meta = json!({
                "point": label,
                "frame": run.frame,
                "params": label.params(),
                "spec": spec,
                "value": "-2 x running average of C(m)",
                "raw": "C(m)",
            });
            out.csv(&format!("mcd_{label}_{tag}.csv"), &["m", "value", "raw"], &rows, meta)?;
            entry.insert(
                tag.to_string(),
                json!({ "final": run.averaged.last(), "winding": w, "geometric": geo, "periods": run.averaged.len() - 1 }),
            );
        }
        entry.insert("window".into(), json!(window));
        summary.insert(label.to_string(), Value::Object(entry));
    }
    out.result("points", summary)?;
    out.finish()
}

pub fn cmd_critical_benchmark(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let spec = cfg.bulk_spec()?;
    let c = &cfg.critical;
    let labels = [PointLabel::C0, PointLabel::Cpi];
    let series = par::map_slice(&labels, Execution::Parallel, |&label| -> Result<TimeSeries> {
        let u = Substeps::new(&label.params(), spec)?.period_operator();
        Ok(return_series(&u, c.m_max)?)
    });
    let mut out = Output::new(&cfg.out, "critical_benchmark", cfg)?;
    let mut rows = Vec::new();
    let mut staggering = serde_json::Map::new();
    for (label, ts) in labels.iter().zip(series) {
        let ts = ts?;
        out.series(
            &format!("return_{label}.csv"),
            ts.points(),
            json!({ "point": label, "params": label.params(), "spec": spec, "projector": "Pi_n0" }),
        )?;
        let split = even_odd_split(&ts, c.m_lo, c.m_hi)?;
        for (parity, half) in [("even", &split.even), ("odd", &split.odd)] {
            for (m, v) in half.points() {
                rows.push(vec![label.to_string(), parity.to_string(), m.to_string(), real(v)]);
            }
        }
        staggering.insert(label.to_string(), json!(split.staggering));
    }
    out.csv("even_odd.csv", &["point", "parity", "m", "value"], &rows, json!({ "m_lo": c.m_lo, "m_hi": c.m_hi }))?;
    let ratio = staggering["Cpi"].as_f64().unwrap_or(f64::NAN) / staggering["C0"].as_f64().unwrap_or(f64::NAN);
    out.result("staggering", staggering)?;
    out.result("staggering_ratio", ratio)?;
    out.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(dir: &std::path::Path) -> RunConfig {
        RunConfig { out: dir.to_path_buf(), ..RunConfig::default() }
    }

    #[test]
    fn degenerate_phase_map_at_q4() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config(dir.path());
        let (m, phi) = PointLabel::Q4.coordinates();
        cfg.phase_map.m_range = (m, m);
        cfg.phase_map.phi_range = (phi, phi);
        cfg.phase_map.n_m = 1;
        cfg.phase_map.n_phi = 1;
        cmd_phase_map(&cfg).unwrap();
        let text = std::fs::read_to_string(dir.path().join("phase_map.csv")).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        let fields: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(&fields[2..], &["2", "0", "1", "1", "0"]);
    }

    #[test]
    fn phase_map_without_catalog_points() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config(dir.path());
        cfg.phase_map.m_range = (1.0, 2.0);
        cfg.phase_map.phi_range = (2.0, 3.0);
        cfg.phase_map.n_m = 4;
        cfg.phase_map.n_phi = 4;
        cfg.phase_map.n_k = 512;
        cmd_phase_map(&cfg).unwrap();
        let manifest: Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("phase_map.manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["results"]["catalog_hit_count"], 0);
        assert_eq!(manifest["files"][0]["rows"], 16);
    }

    #[test]
    fn required_superposition_without_pair_exits_with_3() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = config(dir.path());
        cfg.open.cells = 20;
        cfg.edge_dynamics.points = vec![PointLabel::P1];
        cfg.edge_dynamics.m_max = 20;
        cfg.edge_dynamics.m_tail = 10;
        cfg.edge_dynamics.superposition = SuperpositionMode::Required;
        assert_eq!(cmd_edge_dynamics(&cfg).unwrap_err().exit_code(), 3);
    }
}
