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

//! Winding numbers of the two symmetric time frames, the 0 and π gap
//! indices, the (M, φ) phase map, and the geometric integral that fixes the
//! long-time value of the mean chiral displacement.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{frame_vector, Frame, ModelParams};
use crate::par::{self, Execution};

/// Smallest allowed |n_x + i n_z| on the k contour.
pub const MODULUS_FLOOR: f64 = 1e-8;
/// Largest accepted distance of a raw winding integral from an integer.
pub const RESIDUAL_TOL: f64 = 1e-6;
pub const DEFAULT_K_POINTS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Winding {
    pub winding: i64,
    pub raw: f64,
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapIndices {
    pub nu0: i64,
    pub nupi: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopologicalInvariants {
    pub w1: i64,
    pub w2: i64,
    pub nu0: i64,
    pub nupi: i64,
    pub residual1: f64,
    pub residual2: f64,
}

fn k_grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |j| -PI + 2.0 * PI * j as f64 / n as f64)
}

fn planar_samples(p: &ModelParams, frame: Frame, n: usize) -> Result<Vec<(f64, f64)>> {
    if n < 256 {
        return Err(Error::InvalidParams(format!("k grid needs at least 256 points, got {n}")));
    }
    let samples: Vec<(f64, f64)> = k_grid(n)
        .map(|k| {
            let v = frame_vector(p, k, frame);
            (v.nx, v.nz)
        })
        .collect();
    let min_modulus = samples.iter().map(|(x, z)| x.hypot(*z)).fold(f64::MAX, f64::min);
    if min_modulus <= MODULUS_FLOOR {
        return Err(Error::GapClosedOnContour { frame, min_modulus });
    }
    Ok(samples)
}

/// Winding of `n_x + i n_z` over `n` uniform k points in `[−π, π)`.
///
/// Successive phase increments are taken on the principal branch (−π, π].
pub fn winding_number(p: &ModelParams, frame: Frame, n: usize) -> Result<Winding> {
    let samples = planar_samples(p, frame, n)?;
    let mut total = 0.0;
    for j in 0..n {
        let (x0, z0) = samples[j];
        let (x1, z1) = samples[(j + 1) % n];
        // arg(z1 / z0) without forming the quotient
        total += (x0 * z1 - z0 * x1).atan2(x0 * x1 + z0 * z1);
    }
    let raw = total / (2.0 * PI);
    let winding = raw.round();
    Ok(Winding { winding: winding as i64, raw, residual: (raw - winding).abs() })
}

/// `(ν0, ν_π) = ((W1 + W2)/2, (W1 − W2)/2)`.
pub fn gap_indices(w1: i64, w2: i64) -> Result<GapIndices> {
    if (w1 + w2).rem_euclid(2) != 0 {
        return Err(Error::ParityError { w1, w2 });
    }
    Ok(GapIndices { nu0: (w1 + w2) / 2, nupi: (w1 - w2) / 2 })
}

pub fn invariants(p: &ModelParams, n: usize) -> Result<TopologicalInvariants> {
    let a = winding_number(p, Frame::Frame1, n)?;
    let b = winding_number(p, Frame::Frame2, n)?;
    for w in [a, b] {
        if w.residual >= RESIDUAL_TOL {
            return Err(Error::NumericalInconsistency(format!(
                "winding integral {} is {:.3e} away from an integer",
                w.raw, w.residual
            )));
        }
    }
    let g = gap_indices(a.winding, b.winding)?;
    Ok(TopologicalInvariants {
        w1: a.winding,
        w2: b.winding,
        nu0: g.nu0,
        nupi: g.nupi,
        residual1: a.residual,
        residual2: b.residual,
    })
}

/// `−(1/2)(1/2π) ∮ dk (n_x ∂n_z − n_z ∂n_x)/(n_x² + n_z²)`, equal to `−W/2`.
///
/// Derivatives are periodic central differences on the `n`-point grid.
pub fn geometric_mcd_integral(p: &ModelParams, frame: Frame, n: usize) -> Result<f64> {
    let s = planar_samples(p, frame, n)?;
    let h = 2.0 * PI / n as f64;
    let mut acc = 0.0;
    for j in 0..n {
        let (x, z) = s[j];
        let (xp, zp) = s[(j + 1) % n];
        let (xm, zm) = s[(j + n - 1) % n];
        let dx = (xp - xm) / (2.0 * h);
        let dz = (zp - zm) / (2.0 * h);
        acc += (x * dz - z * dx) / (x * x + z * z);
    }
    Ok(-0.5 * acc * h / (2.0 * PI))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PhaseCell {
    Gapped(TopologicalInvariants),
    /// Either frame's planar vector vanished on the contour, or the
    /// windings came out inconsistent.
    Closed,
}

impl PhaseCell {
    pub fn invariants(&self) -> Option<&TopologicalInvariants> {
        match self {
            PhaseCell::Gapped(t) => Some(t),
            PhaseCell::Closed => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseMapResult {
    pub m_grid: Vec<f64>,
    pub phi_grid: Vec<f64>,
    /// Row-major over `(M, φ)`: cell `(i, j)` sits at `i * phi_grid.len() + j`.
    pub cells: Vec<PhaseCell>,
}

impl PhaseMapResult {
    pub fn cell(&self, i: usize, j: usize) -> &PhaseCell {
        &self.cells[i * self.phi_grid.len() + j]
    }

    /// Grid cell nearest to `(M, φ)`, if the point lies within half a cell of
    /// the grid.
    pub fn nearest_cell(&self, mass: f64, phi: f64) -> Option<(usize, usize)> {
        Some((nearest(&self.m_grid, mass)?, nearest(&self.phi_grid, phi)?))
    }

    pub fn closed_count(&self) -> usize {
        self.cells.iter().filter(|c| matches!(c, PhaseCell::Closed)).count()
    }
}

fn nearest(grid: &[f64], x: f64) -> Option<usize> {
    let (idx, dist) = grid
        .iter()
        .enumerate()
        .map(|(i, g)| (i, (g - x).abs()))
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    let half = if grid.len() > 1 { 0.5 * (grid[1] - grid[0]).abs() } else { 1e-12 };
    (dist <= half + 1e-12).then_some(idx)
}

/// `count` evenly spaced points from `lo` to `hi` inclusive; a single point
/// sits at `lo`.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Classify one `(M, φ)` point.
pub fn phase_cell(p: &ModelParams, n: usize) -> PhaseCell {
    match invariants(p, n) {
        Ok(t) => PhaseCell::Gapped(t),
        Err(_) => PhaseCell::Closed,
    }
}

/// Invariants over the `(M, φ)` grid; other parameters come from `base`.
pub fn phase_map(
    base: &ModelParams,
    m_range: (f64, f64),
    phi_range: (f64, f64),
    n_m: usize,
    n_phi: usize,
    n_k: usize,
) -> Result<PhaseMapResult> {
    phase_map_with(base, m_range, phi_range, n_m, n_phi, n_k, Execution::Parallel)
}

pub fn phase_map_with(
    base: &ModelParams,
    m_range: (f64, f64),
    phi_range: (f64, f64),
    n_m: usize,
    n_phi: usize,
    n_k: usize,
    exec: Execution,
) -> Result<PhaseMapResult> {
    if n_m == 0 || n_phi == 0 {
        return Err(Error::InvalidParams("phase map grid must be non-empty".into()));
    }
    if n_k < 256 {
        return Err(Error::InvalidParams(format!("k grid needs at least 256 points, got {n_k}")));
    }
    base.validate()?;
    let m_grid = linspace(m_range.0, m_range.1, n_m);
    let phi_grid = linspace(phi_range.0, phi_range.1, n_phi);
    let cells = par::map_indexed(n_m * n_phi, exec, |idx| {
        let p = ModelParams { mass: m_grid[idx / n_phi], phi: phi_grid[idx % n_phi], ..*base };
        phase_cell(&p, n_k)
    });
    Ok(PhaseMapResult { m_grid, phi_grid, cells })
}
