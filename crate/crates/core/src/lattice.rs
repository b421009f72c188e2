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

//! Real-space chain of `L` cells with sublattices A and B: the two substep
//! Hamiltonians, the period and frame operators, and the static
//! position, chiral and projector operators.
//!
//! Basis ordering is interleaved per cell: `index(n, s) = 2(n − 1) + s` with
//! cells `n = 1..=L` and `s = 0` for A, `1` for B.

use std::ops::RangeInclusive;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, HermitianEigen, C64, I, ONE};
use crate::model::{Frame, ModelParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Boundary {
    Open,
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sublattice {
    A = 0,
    B = 1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub cells: usize,
    pub boundary: Boundary,
    /// Cells `1..=edge_cells` form the left boundary window.
    pub edge_cells: usize,
}

impl LatticeSpec {
    pub const DEFAULT_EDGE_CELLS: usize = 5;

    pub fn new(cells: usize, boundary: Boundary, edge_cells: usize) -> Result<Self> {
        if cells < 4 {
            return Err(Error::InvalidSpec(format!("need at least 4 cells, got {cells}")));
        }
        if edge_cells < 1 || edge_cells > cells / 2 {
            return Err(Error::InvalidSpec(format!(
                "edge window of {edge_cells} cells must lie in 1..={}",
                cells / 2
            )));
        }
        Ok(Self { cells, boundary, edge_cells })
    }

    pub fn open(cells: usize) -> Result<Self> {
        Self::new(cells, Boundary::Open, Self::DEFAULT_EDGE_CELLS.min(cells / 2))
    }

    pub fn periodic(cells: usize) -> Result<Self> {
        Self::new(cells, Boundary::Periodic, Self::DEFAULT_EDGE_CELLS.min(cells / 2))
    }

    pub fn dim(&self) -> usize {
        2 * self.cells
    }

    /// Basis index of site `(n, s)`, `n` counted from 1.
    pub fn index(&self, cell: usize, s: Sublattice) -> usize {
        debug_assert!((1..=self.cells).contains(&cell));
        2 * (cell - 1) + s as usize
    }

    /// Centre cell `(L + 1)/2` of an odd chain.
    pub fn center_cell(&self) -> Result<usize> {
        if self.cells % 2 == 0 {
            return Err(Error::EvenLength(self.cells));
        }
        Ok(self.cells.div_ceil(2))
    }

    /// Bonds `(n, n + 1)`; the wraparound `(L, 1)` only for periodic chains.
    fn bonds(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let wrap = match self.boundary {
            Boundary::Periodic => Some((self.cells, 1)),
            Boundary::Open => None,
        };
        (1..self.cells).map(|n| (n, n + 1)).chain(wrap)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorKind {
    Period,
    Frame1,
    Frame2,
    HermitianH1,
    HermitianH2,
    Projector,
    Position,
    Chiral,
}

impl From<Frame> for OperatorKind {
    fn from(f: Frame) -> Self {
        match f {
            Frame::Frame1 => OperatorKind::Frame1,
            Frame::Frame2 => OperatorKind::Frame2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LatticeOperator {
    pub matrix: Array2<C64>,
    pub spec: LatticeSpec,
    pub kind: OperatorKind,
    /// Model parameters the operator was built from; `None` for static operators.
    pub params: Option<ModelParams>,
}

impl LatticeOperator {
    pub fn view(&self) -> ArrayView2<'_, C64> {
        self.matrix.view()
    }

    pub fn is_unitary_kind(&self) -> bool {
        matches!(self.kind, OperatorKind::Period | OperatorKind::Frame1 | OperatorKind::Frame2)
    }

    pub fn apply(&self, psi: &StateVector) -> Result<Array1<C64>> {
        self.check_dim(psi.amplitudes.len())?;
        Ok(self.matrix.dot(&psi.amplitudes))
    }

    /// `⟨ψ|O|ψ⟩` for raw amplitudes.
    pub fn expectation(&self, amps: &ArrayView1<C64>) -> Result<C64> {
        self.check_dim(amps.len())?;
        let o_psi = self.matrix.dot(amps);
        Ok(amps.iter().zip(o_psi.iter()).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.matrix.nrows() {
            return Err(Error::DimensionMismatch { expected: self.matrix.nrows(), found: n });
        }
        Ok(())
    }

    /// The identity as a period operator; used as a trivial evolution.
    pub fn identity(spec: LatticeSpec, params: ModelParams) -> Self {
        Self { matrix: linalg::identity(spec.dim()), spec, kind: OperatorKind::Period, params: Some(params) }
    }
}

/// Normalized amplitudes over `(cell, sublattice)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub amplitudes: Array1<C64>,
    pub spec: LatticeSpec,
}

impl StateVector {
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(amplitudes: Array1<C64>, spec: LatticeSpec) -> Result<Self> {
        if amplitudes.len() != spec.dim() {
            return Err(Error::DimensionMismatch { expected: spec.dim(), found: amplitudes.len() });
        }
        let norm = norm(&amplitudes.view());
        if (norm - 1.0).abs() >= Self::NORM_TOL {
            return Err(Error::NumericalInconsistency(format!("state norm {norm} is not 1")));
        }
        Ok(Self { amplitudes, spec })
    }

    /// Rescale to unit norm.
    pub fn normalized(amplitudes: Array1<C64>, spec: LatticeSpec) -> Result<Self> {
        let n = norm(&amplitudes.view());
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NumericalInconsistency("cannot normalize a null state".into()));
        }
        Self::new(amplitudes.mapv(|z| z / n), spec)
    }

    /// `|n, s⟩`.
    pub fn site(spec: LatticeSpec, cell: usize, s: Sublattice) -> Result<Self> {
        if !(1..=spec.cells).contains(&cell) {
            return Err(Error::InvalidSpec(format!("cell {cell} outside 1..={}", spec.cells)));
        }
        let mut a = Array1::zeros(spec.dim());
        a[spec.index(cell, s)] = ONE;
        Ok(Self { amplitudes: a, spec })
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes.view())
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.iter().zip(other.amplitudes.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    /// Probability in cells `cells` (both sublattices).
    pub fn weight_in(&self, cells: RangeInclusive<usize>) -> f64 {
        weight_in(&self.amplitudes.view(), cells)
    }
}

pub fn norm(a: &ArrayView1<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn weight_in(a: &ArrayView1<C64>, cells: RangeInclusive<usize>) -> f64 {
    let lo = 2 * (cells.start() - 1);
    let hi = 2 * cells.end();
    a.iter().skip(lo).take(hi - lo).map(|z| z.norm_sqr()).sum()
}

/// Drift Hamiltonian: hoppings within each sublattice, phase `±φ`, opposite
/// sign on B. Reduces to `2 t1 sin(k − φ) σ_z` in momentum space.
pub fn build_h1(p: &ModelParams, spec: LatticeSpec) -> LatticeOperator {
    let mut h = Array2::<C64>::zeros((spec.dim(), spec.dim()));
    // a_n† a_{n+1} carries −i t1 e^{−iφ}; its conjugate i t1 e^{iφ}.
    let forward = -I * p.t1 * C64::from_polar(1.0, -p.phi);
    for (n, m) in spec.bonds() {
        for (s, sign) in [(Sublattice::A, 1.0), (Sublattice::B, -1.0)] {
            let (i, j) = (spec.index(n, s), spec.index(m, s));
            h[[i, j]] += forward * sign;
            h[[j, i]] += forward.conj() * sign;
        }
    }
    LatticeOperator { matrix: h, spec, kind: OperatorKind::HermitianH1, params: Some(*p) }
}

/// Mixing Hamiltonian: on-site `M` and nearest-neighbour `t2` between
/// sublattices only. Reduces to `(M + 2 t2 cos k) σ_x`.
pub fn build_h2(p: &ModelParams, spec: LatticeSpec) -> LatticeOperator {
    let mut h = Array2::<C64>::zeros((spec.dim(), spec.dim()));
    let mut couple = |i: usize, j: usize, v: f64| {
        h[[i, j]] += v;
        h[[j, i]] += v;
    };
    for n in 1..=spec.cells {
        couple(spec.index(n, Sublattice::A), spec.index(n, Sublattice::B), p.mass);
    }
    for (n, m) in spec.bonds() {
        couple(spec.index(m, Sublattice::A), spec.index(n, Sublattice::B), p.t2);
        couple(spec.index(n, Sublattice::A), spec.index(m, Sublattice::B), p.t2);
    }
    LatticeOperator { matrix: h, spec, kind: OperatorKind::HermitianH2, params: Some(*p) }
}

/// Eigendecompositions of both substep Hamiltonians, from which the period
/// operator and both frame operators follow without further diagonalization.
#[derive(Clone, Debug)]
pub struct Substeps {
    pub params: ModelParams,
    pub spec: LatticeSpec,
    h1: HermitianEigen,
    h2: HermitianEigen,
}

impl Substeps {
    pub fn new(p: &ModelParams, spec: LatticeSpec) -> Result<Self> {
        p.validate()?;
        let h1 = HermitianEigen::new(&build_h1(p, spec).view())?;
        let h2 = HermitianEigen::new(&build_h2(p, spec).view())?;
        Ok(Self { params: *p, spec, h1, h2 })
    }

    fn wrap(&self, matrix: Array2<C64>, kind: OperatorKind) -> LatticeOperator {
        LatticeOperator { matrix, spec: self.spec, kind, params: Some(self.params) }
    }

    /// `exp(−i(T/2)H2) exp(−i(T/2)H1)`.
    pub fn period_operator(&self) -> LatticeOperator {
        let half = 0.5 * self.params.period;
        let u = self.h2.propagator(half).dot(&self.h1.propagator(half));
        self.wrap(u, OperatorKind::Period)
    }

    pub fn frame_operator(&self, frame: Frame) -> LatticeOperator {
        let t = self.params.period;
        let (outer, inner) = match frame {
            Frame::Frame1 => (self.h1.propagator(0.25 * t), self.h2.propagator(0.5 * t)),
            Frame::Frame2 => (self.h2.propagator(0.25 * t), self.h1.propagator(0.5 * t)),
        };
        self.wrap(outer.dot(&inner).dot(&outer), frame.into())
    }
}

pub fn floquet_operator(p: &ModelParams, spec: LatticeSpec) -> Result<LatticeOperator> {
    Ok(Substeps::new(p, spec)?.period_operator())
}

pub fn frame_floquet_operator(p: &ModelParams, spec: LatticeSpec, frame: Frame) -> Result<LatticeOperator> {
    Ok(Substeps::new(p, spec)?.frame_operator(frame))
}

fn static_op(matrix: Array2<C64>, spec: LatticeSpec, kind: OperatorKind) -> LatticeOperator {
    LatticeOperator { matrix, spec, kind, params: None }
}

/// `Σ_{n ∈ cells} (|n,A⟩⟨n,A| + |n,B⟩⟨n,B|)`.
pub fn cell_projector(spec: LatticeSpec, cells: RangeInclusive<usize>) -> LatticeOperator {
    let mut d = Array1::<C64>::zeros(spec.dim());
    for n in cells {
        for s in [Sublattice::A, Sublattice::B] {
            d[spec.index(n, s)] = ONE;
        }
    }
    static_op(Array2::from_diag(&d), spec, OperatorKind::Projector)
}

/// `x = Σ_n (n − n0)(|n,A⟩⟨n,A| + |n,B⟩⟨n,B|)` about the centre cell.
pub fn position_operator(spec: LatticeSpec) -> Result<LatticeOperator> {
    let n0 = spec.center_cell()? as f64;
    let d = Array1::from_shape_fn(spec.dim(), |i| C64::new((i / 2 + 1) as f64 - n0, 0.0));
    Ok(static_op(Array2::from_diag(&d), spec, OperatorKind::Position))
}

/// `Γ = I_L ⊗ σ_y`.
pub fn chiral_operator(spec: LatticeSpec) -> LatticeOperator {
    chiral_operator_with(spec, &linalg::sigma_y())
}

pub(crate) fn chiral_operator_with(spec: LatticeSpec, block: &Array2<C64>) -> LatticeOperator {
    let mut g = Array2::<C64>::zeros((spec.dim(), spec.dim()));
    for n in 0..spec.cells {
        for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            g[[2 * n + a, 2 * n + b]] = block[[a, b]];
        }
    }
    static_op(g, spec, OperatorKind::Chiral)
}

/// Time-independent operators of one chain.
#[derive(Clone, Debug)]
pub struct StaticOperators {
    /// `None` for even `L`.
    pub position: Option<LatticeOperator>,
    pub chiral: LatticeOperator,
    /// Projector on cell 1.
    pub pi1: LatticeOperator,
    /// Projector on the left window `1..=n_e`.
    pub pie: LatticeOperator,
    /// Projector on the centre cell; `None` for even `L`.
    pub pin: Option<LatticeOperator>,
}

pub fn static_operators(spec: LatticeSpec) -> StaticOperators {
    StaticOperators {
        position: position_operator(spec).ok(),
        chiral: chiral_operator(spec),
        pi1: cell_projector(spec, 1..=1),
        pie: cell_projector(spec, 1..=spec.edge_cells),
        pin: spec.center_cell().ok().map(|n0| cell_projector(spec, n0..=n0)),
    }
}
