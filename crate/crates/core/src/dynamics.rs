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

//! Stroboscopic evolution and the dynamical probes built on it.
//!
//! States are advanced by repeated matrix-vector products; operator powers
//! are never formed.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lattice::{self, Boundary, LatticeOperator, LatticeSpec, StateVector, Sublattice, Substeps};
use crate::linalg::{self, C64};
use crate::model::{quasienergies, Frame, ModelParams};
use crate::par::{self, Execution};

/// Per-step norm drift tolerated during evolution.
pub const NORM_TOL: f64 = 1e-10;
/// Grid used for the maximal group velocity.
pub const VELOCITY_K_POINTS: usize = 2048;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub label: String,
    /// `values[i]` belongs to period `m_start + i·m_step`.
    pub m_start: usize,
    pub m_step: usize,
    pub values: Vec<f64>,
    pub params: Option<ModelParams>,
    pub spec: LatticeSpec,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn periods(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.values.len()).map(|i| self.m_start + i * self.m_step)
    }

    pub fn points(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.periods().zip(self.values.iter().copied())
    }

    pub fn last(&self) -> Option<f64> {
        self.values.last().copied()
    }

    fn derived(&self, label: impl Into<String>, m_start: usize, m_step: usize, values: Vec<f64>) -> Self {
        Self { label: label.into(), m_start, m_step, values, params: self.params, spec: self.spec }
    }
}

/// Advance `psi0` by `u` for `m_max` periods, calling `observe(m, ψ(m))` for
/// `m = 0..=m_max`.
pub fn propagate<F>(u: &LatticeOperator, psi0: &StateVector, m_max: usize, mut observe: F) -> Result<()>
where
    F: FnMut(usize, &Array1<C64>) -> Result<()>,
{
    u.check_dim(psi0.amplitudes.len())?;
    let mut psi = psi0.amplitudes.clone();
    observe(0, &psi)?;
    for m in 1..=m_max {
        psi = u.matrix.dot(&psi);
        let norm = lattice::norm(&psi.view());
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NumericalInconsistency(format!("norm {norm} after {m} periods")));
        }
        observe(m, &psi)?;
    }
    Ok(())
}

/// `⟨Ψ(m)|Π|Ψ(m)⟩` for `m = 0..=m_max`.
pub fn evolve_series(
    u: &LatticeOperator,
    psi0: &StateVector,
    projector: &LatticeOperator,
    m_max: usize,
) -> Result<TimeSeries> {
    if m_max < 1 {
        return Err(Error::InvalidSpec("m_max must be at least 1".into()));
    }
    projector.check_dim(psi0.amplitudes.len())?;
    let mut values = Vec::with_capacity(m_max + 1);
    propagate(u, psi0, m_max, |_, psi| {
        values.push(projector.expectation(&psi.view())?.re);
        Ok(())
    })?;
    Ok(TimeSeries {
        label: format!("{:?}", projector.kind).to_lowercase(),
        m_start: 0,
        m_step: 1,
        values,
        params: u.params,
        spec: u.spec,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sector {
    Trivial,
    ZeroOnly,
    PiOnly,
    Coexistence,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorLabel {
    pub value: Sector,
    pub dc: f64,
    pub ac: f64,
    pub tail_std: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorThresholds {
    /// Trivial below this dc level.
    pub trivial: f64,
    /// Coexistence above this ac level.
    pub alternating: f64,
}

impl Default for SectorThresholds {
    fn default() -> Self {
        Self { trivial: 0.05, alternating: 0.01 }
    }
}

/// Which left-edge modes the spectrum supports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EdgePresence {
    pub zero: bool,
    pub pi: bool,
}

/// dc, ac and residual spread over the last `m_tail` entries.
pub fn tail_statistics(ts: &TimeSeries, m_tail: usize) -> Result<(f64, f64, f64)> {
    if m_tail < 2 || ts.len() < 2 * m_tail {
        return Err(Error::SeriesTooShort { len: ts.len(), required: 2 * m_tail.max(2) });
    }
    let start = ts.len() - m_tail;
    let tail: Vec<(usize, f64)> = ts.points().skip(start).collect();
    let mean_of = |parity: usize| {
        let sel: Vec<f64> = tail.iter().filter(|(m, _)| m % 2 == parity).map(|p| p.1).collect();
        sel.iter().sum::<f64>() / sel.len() as f64
    };
    let dc = tail.iter().map(|p| p.1).sum::<f64>() / m_tail as f64;
    let half_split = 0.5 * (mean_of(0) - mean_of(1));
    let var = tail
        .iter()
        .map(|&(m, v)| {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            (v - dc - sign * half_split).powi(2)
        })
        .sum::<f64>()
        / m_tail as f64;
    Ok((dc, half_split.abs(), var.sqrt()))
}

/// Sector of a boundary probability series started from `|1, A⟩`.
///
/// Trivial is tested first, then Coexistence; a constant nonzero signal is
/// resolved with `edges`, and is ambiguous without it.
pub fn classify_sector(
    ts: &TimeSeries,
    m_tail: usize,
    thresholds: &SectorThresholds,
    edges: Option<EdgePresence>,
) -> Result<SectorLabel> {
    let (dc, ac, tail_std) = tail_statistics(ts, m_tail)?;
    let value = if dc < thresholds.trivial {
        Sector::Trivial
    } else if ac > thresholds.alternating {
        Sector::Coexistence
    } else {
        match edges {
            Some(EdgePresence { zero: true, pi: false }) => Sector::ZeroOnly,
            Some(EdgePresence { zero: false, pi: true }) => Sector::PiOnly,
            _ => return Err(Error::AmbiguousSector),
        }
    };
    Ok(SectorLabel { value, dc, ac, tail_std })
}

/// Largest `|dε/dk|·T` of the upper band, in cells per period.
pub fn max_group_velocity(p: &ModelParams) -> Result<f64> {
    let n = VELOCITY_K_POINTS;
    let h = 2.0 * PI / n as f64;
    let band: Vec<f64> = (0..n)
        .map(|j| quasienergies(p, -PI + j as f64 * h).map(|(_, e)| e * p.period))
        .collect::<Result<_>>()?;
    Ok((0..n)
        .map(|j| ((band[(j + 1) % n] - band[(j + n - 1) % n]) / (2.0 * h)).abs())
        .fold(0.0, f64::max))
}

fn require_centered_ring(spec: LatticeSpec) -> Result<usize> {
    if spec.boundary != Boundary::Periodic {
        return Err(Error::InvalidSpec("bulk probes need a periodic chain".into()));
    }
    spec.center_cell()
}

/// Periods before a wavefront from the centre cell can wrap around the ring,
/// with a safety factor of two.
pub fn pre_reflection_window(p: &ModelParams, spec: LatticeSpec) -> Result<usize> {
    require_centered_ring(spec)?;
    let v = max_group_velocity(p)?;
    let half = (spec.cells - 1) as f64 / 2.0;
    if v == 0.0 {
        return Ok(usize::MAX);
    }
    Ok((half / (2.0 * v)).floor() as usize)
}

/// Raw chiral displacement and `−2×` its running average in one frame.
#[derive(Clone, Debug)]
pub struct McdRun {
    pub frame: Frame,
    pub raw: TimeSeries,
    pub averaged: TimeSeries,
}

/// `x Γ` for a centred ring.
pub fn chiral_displacement_operator(spec: LatticeSpec) -> Result<Array2<C64>> {
    let x = lattice::position_operator(spec)?;
    let gamma = lattice::chiral_operator(spec);
    let d = x.matrix.diag().to_owned();
    Ok(Array2::from_shape_fn((spec.dim(), spec.dim()), |(i, j)| d[i] * gamma.matrix[[i, j]]))
}

pub fn mcd_series(p: &ModelParams, spec: LatticeSpec, frame: Frame, m_max: usize) -> Result<McdRun> {
    let window = pre_reflection_window(p, spec)?;
    check_window(m_max, window)?;
    let steps = Substeps::new(p, spec)?;
    mcd_from_substeps(&steps, frame, m_max)
}

fn check_window(requested: usize, window: usize) -> Result<()> {
    if requested > window {
        return Err(Error::WindowExceeded { requested, window });
    }
    Ok(())
}

/// Frame-resolved displacement from precomputed substeps; the window check is
/// left to the caller.
pub fn mcd_from_substeps(steps: &Substeps, frame: Frame, m_max: usize) -> Result<McdRun> {
    let spec = steps.spec;
    let n0 = require_centered_ring(spec)?;
    let u = steps.frame_operator(frame);
    let xg = chiral_displacement_operator(spec)?;
    let psi0 = StateVector::site(spec, n0, Sublattice::A)?;
    let mut raw = Vec::with_capacity(m_max + 1);
    propagate(&u, &psi0, m_max, |m, psi| {
        let c: C64 = psi.iter().zip(xg.dot(psi).iter()).map(|(a, b)| a.conj() * b).sum();
        if c.im.abs() > 1e-10 {
            return Err(Error::NumericalInconsistency(format!("imaginary displacement {} at m = {m}", c.im)));
        }
        raw.push(c.re);
        Ok(())
    })?;
    let mut acc = 0.0;
    let averaged = raw
        .iter()
        .enumerate()
        .map(|(m, c)| {
            acc += c;
            -2.0 * acc / (m + 1) as f64
        })
        .collect();
    let tag = match frame {
        Frame::Frame1 => "1",
        Frame::Frame2 => "2",
    };
    let series = |label: String, values| TimeSeries {
        label,
        m_start: 0,
        m_step: 1,
        values,
        params: Some(steps.params),
        spec,
    };
    Ok(McdRun {
        frame,
        raw: series(format!("mcd_raw_frame{tag}"), raw),
        averaged: series(format!("mcd_avg_frame{tag}"), averaged),
    })
}

/// Both frames from one pair of substep diagonalizations, run concurrently
/// under [`Execution::Parallel`].
pub fn mcd_both_frames(p: &ModelParams, spec: LatticeSpec, m_max: usize, exec: Execution) -> Result<[McdRun; 2]> {
    let window = pre_reflection_window(p, spec)?;
    check_window(m_max, window)?;
    let steps = Substeps::new(p, spec)?;
    let mut runs = par::map_slice(&Frame::BOTH, exec, |&f| mcd_from_substeps(&steps, f, m_max)).into_iter();
    let first = runs.next().expect("two frames")?;
    let second = runs.next().expect("two frames")?;
    Ok([first, second])
}

/// `P_ret(m) = ⟨Ψ(m)|Π_{n₀}|Ψ(m)⟩` under the period operator from `|n₀, A⟩`.
pub fn return_benchmark(p: &ModelParams, spec: LatticeSpec, m_max: usize) -> Result<TimeSeries> {
    require_centered_ring(spec)?;
    let u = Substeps::new(p, spec)?.period_operator();
    return_series(&u, m_max)
}

pub fn return_series(u: &LatticeOperator, m_max: usize) -> Result<TimeSeries> {
    let n0 = require_centered_ring(u.spec)?;
    let psi0 = StateVector::site(u.spec, n0, Sublattice::A)?;
    let pin = lattice::cell_projector(u.spec, n0..=n0);
    let mut ts = evolve_series(u, &psi0, &pin, m_max)?;
    ts.label = "return_probability".into();
    Ok(ts)
}

#[derive(Clone, Debug)]
pub struct EvenOddSplit {
    pub even: TimeSeries,
    pub odd: TimeSeries,
    /// Mean of `|x_m − (x_{m−1} + x_{m+1})/2|` over interior periods.
    pub staggering: f64,
}

/// Split periods `m_lo..=m_hi` by parity and measure the local alternation.
pub fn even_odd_split(ts: &TimeSeries, m_lo: usize, m_hi: usize) -> Result<EvenOddSplit> {
    if ts.m_start != 0 || ts.m_step != 1 {
        return Err(Error::InvalidSpec("even/odd split needs a unit-step series from m = 0".into()));
    }
    if m_hi >= ts.len() {
        return Err(Error::SeriesTooShort { len: ts.len(), required: m_hi + 1 });
    }
    if m_hi < m_lo + 8 {
        return Err(Error::SeriesTooShort { len: m_hi.saturating_sub(m_lo) + 1, required: 9 });
    }
    let x = &ts.values;
    let staggering = ((m_lo + 1)..m_hi).map(|m| (x[m] - 0.5 * (x[m - 1] + x[m + 1])).abs()).sum::<f64>()
        / (m_hi - m_lo - 1) as f64;
    let parity = |p: usize| {
        let first = if m_lo % 2 == p { m_lo } else { m_lo + 1 };
        let values = (first..=m_hi).step_by(2).map(|m| x[m]).collect();
        let name = if p == 0 { "even" } else { "odd" };
        ts.derived(format!("{}_{name}", ts.label), first, 2, values)
    };
    Ok(EvenOddSplit { even: parity(0), odd: parity(1), staggering })
}

/// `(max_m |x_m − x_{m+2}|, min_m |x_m − x_{m+1}|)`.
pub fn period_two_contrast(ts: &TimeSeries) -> (f64, f64) {
    let x = &ts.values;
    let two = x.windows(3).map(|w| (w[0] - w[2]).abs()).fold(0.0, f64::max);
    let one = x.windows(2).map(|w| (w[0] - w[1]).abs()).fold(f64::INFINITY, f64::min);
    (two, one)
}

/// `ΓUΓU − I` residual, the lattice form of chiral symmetry.
pub fn chiral_residual(u: &LatticeOperator, gamma: &LatticeOperator) -> f64 {
    let prod = gamma.matrix.dot(&u.matrix).dot(&gamma.matrix).dot(&u.matrix);
    linalg::max_diff(&prod.view(), &linalg::identity(u.spec.dim()).view())
}
