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

//! Quasienergy spectra of lattice Floquet operators, left-edge 0/π modes and
//! the two-level logical subspace they span.

use ndarray::{s, Array1, Array2, ArrayView1};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lattice::{self, LatticeOperator, LatticeSpec, StateVector};
use crate::linalg::{self, C64, ZERO};
use crate::model::{circular_distance, quasienergy_of_eigenvalue, GapKind, ModelParams};

/// Accepted unitarity residual of an operator handed to [`quasienergy_spectrum`].
pub const UNITARITY_TOL: f64 = 1e-9;
/// Finite-size tolerance on the logical gate at `L = 60`.
pub const GATE_TOL: f64 = 1e-3;
/// Real parts of eigenvalues closer than this are resolved jointly.
const DEGENERACY_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct Level {
    pub eps: f64,
    pub eigenvalue: C64,
    pub state: StateVector,
    pub edge_weight_left: f64,
}

/// All `2L` eigenpairs, sorted by quasienergy.
#[derive(Clone, Debug)]
pub struct QuasienergySpectrum {
    pub levels: Vec<Level>,
    pub spec: LatticeSpec,
    pub period: f64,
    pub params: Option<ModelParams>,
}

impl QuasienergySpectrum {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn quasienergies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.eps).collect()
    }

    /// `Σ λ |ψ⟩⟨ψ|`.
    pub fn reconstruct(&self) -> Array2<C64> {
        let n = self.spec.dim();
        let mut v = Array2::<C64>::zeros((n, n));
        let mut vl = Array2::<C64>::zeros((n, n));
        for (j, level) in self.levels.iter().enumerate() {
            v.column_mut(j).assign(&level.state.amplitudes);
            vl.column_mut(j).assign(&level.state.amplitudes.mapv(|z| z * level.eigenvalue));
        }
        vl.dot(&linalg::adjoint(&v.view()))
    }

    /// Largest `|⟨ψ_i|ψ_j⟩ − δ_ij|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let n = self.levels.len();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                let d = self.levels[i].state.inner(&self.levels[j].state) - if i == j { 1.0 } else { 0.0 };
                worst = worst.max(d.norm());
            }
        }
        worst
    }
}

pub fn quasienergy_spectrum(u: &LatticeOperator) -> Result<QuasienergySpectrum> {
    if !u.is_unitary_kind() {
        return Err(Error::InvalidSpec(format!("{:?} operator has no quasienergy spectrum", u.kind)));
    }
    let residual = linalg::unitarity_residual(&u.view());
    if residual > UNITARITY_TOL {
        return Err(Error::NonUnitary { residual });
    }
    let period = u.params.map(|p| p.period).unwrap_or(ModelParams::default().period);
    let (values, vectors) = linalg::unitary_eigen(&u.view(), DEGENERACY_TOL)?;
    let window = 1..=u.spec.edge_cells;
    let mut levels: Vec<Level> = values
        .iter()
        .zip(vectors.columns())
        .map(|(&lambda, col)| {
            let state = StateVector { amplitudes: col.to_owned(), spec: u.spec };
            Level {
                eps: quasienergy_of_eigenvalue(lambda, period),
                eigenvalue: lambda,
                edge_weight_left: state.weight_in(window.clone()),
                state,
            }
        })
        .collect();
    levels.sort_by(|a, b| a.eps.total_cmp(&b.eps));
    Ok(QuasienergySpectrum { levels, spec: u.spec, period, params: u.params })
}

/// Acceptance rules for edge-mode identification.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeSearch {
    /// Candidate window around 0 or π/T, as a fraction of π/T.
    pub pinning_fraction: f64,
    /// Minimum left-window weight of an accepted mode.
    pub min_weight: f64,
    /// Levels this close to the best candidate are mixed to undo left/right
    /// edge hybridization.
    pub cluster_tol: f64,
}

impl Default for EdgeSearch {
    fn default() -> Self {
        Self { pinning_fraction: 0.05, min_weight: 0.6, cluster_tol: 1e-3 }
    }
}

#[derive(Clone, Debug)]
pub struct EdgeMode {
    pub gap: GapKind,
    pub state: StateVector,
    pub eps: f64,
    pub weight: f64,
    /// Spectrum indices of the levels mixed into this mode.
    pub levels: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct EdgeModePair {
    pub zero_mode: StateVector,
    pub pi_mode: StateVector,
    pub eps0: f64,
    pub epspi: f64,
    pub weight0: f64,
    pub weightpi: f64,
}

impl EdgeModePair {
    pub fn from_modes(zero: EdgeMode, pi: EdgeMode) -> Self {
        Self {
            eps0: zero.eps,
            epspi: pi.eps,
            weight0: zero.weight,
            weightpi: pi.weight,
            zero_mode: zero.state,
            pi_mode: pi.state,
        }
    }
}

fn target(gap: GapKind, period: f64) -> f64 {
    match gap {
        GapKind::Zero => 0.0,
        GapKind::Pi => PI / period,
    }
}

fn missing(gap: GapKind) -> Error {
    match gap {
        GapKind::Zero => Error::NoZeroMode,
        GapKind::Pi => Error::NoPiMode,
    }
}

/// Left-edge mode pinned at 0 or π/T.
///
/// Among levels inside the pinning window the one with the largest left
/// weight is taken. A finite chain hybridizes the left and right partners
/// into near-degenerate symmetric combinations, so every level within
/// `cluster_tol` of that candidate joins a cluster, and the cluster is rotated
/// to the vector maximizing the left-window weight.
pub fn find_edge_mode(s: &QuasienergySpectrum, gap: GapKind, search: &EdgeSearch) -> Result<EdgeMode> {
    let t = s.period;
    let aim = target(gap, t);
    let pinning = search.pinning_fraction * PI / t;
    let candidates: Vec<usize> =
        (0..s.len()).filter(|&i| circular_distance(s.levels[i].eps, aim, t) < pinning).collect();
    let best = candidates
        .iter()
        .copied()
        .max_by(|&a, &b| s.levels[a].edge_weight_left.total_cmp(&s.levels[b].edge_weight_left))
        .ok_or_else(|| missing(gap))?;
    let cluster: Vec<usize> = candidates
        .into_iter()
        .filter(|&i| circular_distance(s.levels[i].eps, s.levels[best].eps, t) < search.cluster_tol)
        .collect();
    let mode = rotate_to_left_edge(s, cluster, gap)?;
    if mode.weight > search.min_weight {
        Ok(mode)
    } else {
        Err(missing(gap))
    }
}

fn rotate_to_left_edge(s: &QuasienergySpectrum, cluster: Vec<usize>, gap: GapKind) -> Result<EdgeMode> {
    let spec = s.spec;
    let hi = 2 * spec.edge_cells;
    let c = cluster.len();
    let window = |i: usize| s.levels[cluster[i]].state.amplitudes.slice(s![..hi]);
    // compressed projector ⟨v_i|Π_e|v_j⟩
    let m = Array2::from_shape_fn((c, c), |(i, j)| inner(&window(i), &window(j)));
    let (w, vecs) = linalg::eigh(&m.view())?;
    let top = vecs.column(c - 1);
    let mut amps = Array1::<C64>::zeros(spec.dim());
    let mut lambda = ZERO;
    for (coef, &i) in top.iter().zip(&cluster) {
        amps.scaled_add(*coef, &s.levels[i].state.amplitudes);
        lambda += s.levels[i].eigenvalue * coef.norm_sqr();
    }
    let state = StateVector::normalized(amps, spec)?;
    Ok(EdgeMode { gap, eps: quasienergy_of_eigenvalue(lambda, s.period), weight: w[c - 1], state, levels: cluster })
}

pub fn find_edge_pair(s: &QuasienergySpectrum, search: &EdgeSearch) -> Result<EdgeModePair> {
    let zero = find_edge_mode(s, GapKind::Zero, search)?;
    let pi = find_edge_mode(s, GapKind::Pi, search)?;
    Ok(EdgeModePair::from_modes(zero, pi))
}

/// `⟨i|U|j⟩` over `{|L,0⟩, |L,π⟩}`.
pub fn logical_projection(u: &LatticeOperator, pair: &EdgeModePair) -> Result<Array2<C64>> {
    let basis = [&pair.zero_mode, &pair.pi_mode];
    let images = [u.apply(basis[0])?, u.apply(basis[1])?];
    Ok(Array2::from_shape_fn((2, 2), |(i, j)| inner(&basis[i].amplitudes.view(), &images[j].view())))
}

/// `max |g − τ_z|` over the four entries.
pub fn gate_deviation(g: &Array2<C64>) -> f64 {
    let tau_z = linalg::sigma_z();
    linalg::max_diff(&g.view(), &tau_z.view())
}

/// `(|L,0⟩ + e^{−i arg⟨L,0|Π₁|L,π⟩}|L,π⟩)/√2`, which maximizes the
/// alternating part of `P₁(m)`.
pub fn optimized_superposition(pair: &EdgeModePair, pi1: &LatticeOperator) -> Result<StateVector> {
    let cross = cross_element(pair, pi1)?;
    if cross.norm() <= 1e-12 {
        return Err(Error::ZeroOverlap);
    }
    superposition(pair, -cross.arg())
}

/// `(|L,0⟩ + e^{iχ}|L,π⟩)/√2`, renormalized.
pub fn superposition(pair: &EdgeModePair, chi: f64) -> Result<StateVector> {
    let mut amps = pair.zero_mode.amplitudes.clone();
    amps.scaled_add(C64::from_polar(1.0, chi), &pair.pi_mode.amplitudes);
    StateVector::normalized(amps, pair.zero_mode.spec)
}

/// `⟨L,0|Π₁|L,π⟩`.
pub fn cross_element(pair: &EdgeModePair, pi1: &LatticeOperator) -> Result<C64> {
    let image = pi1.apply(&pair.pi_mode)?;
    Ok(inner(&pair.zero_mode.amplitudes.view(), &image.view()))
}

fn inner(a: &ArrayView1<C64>, b: &ArrayView1<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Diagonalize the open-chain period operator and look for the left-edge pair.
pub fn open_chain_pair(
    p: &ModelParams,
    spec: LatticeSpec,
    search: &EdgeSearch,
) -> Result<(LatticeOperator, QuasienergySpectrum, Result<EdgeModePair>)> {
    let u = lattice::floquet_operator(p, spec)?;
    let s = quasienergy_spectrum(&u)?;
    let pair = find_edge_pair(&s, search);
    Ok((u, s, pair))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::PointLabel;
    use crate::lattice::{floquet_operator, static_operators, Boundary, Sublattice};
    use crate::model::quasienergies;

    fn open60() -> LatticeSpec {
        LatticeSpec::open(60).unwrap()
    }

    fn spectrum_at(label: PointLabel, spec: LatticeSpec) -> (LatticeOperator, QuasienergySpectrum) {
        let u = floquet_operator(&label.params(), spec).unwrap();
        let s = quasienergy_spectrum(&u).unwrap();
        (u, s)
    }

    #[test]
    fn identity_has_zero_quasienergies() {
        let spec = LatticeSpec::periodic(6).unwrap();
        let u = LatticeOperator::identity(spec, ModelParams::default());
        let s = quasienergy_spectrum(&u).unwrap();
        assert_eq!(s.len(), 12);
        assert!(s.levels.iter().all(|l| l.eps.abs() < 1e-15));
        assert!(s.orthonormality_residual() < 1e-12);
    }

    #[test]
    fn rejects_non_unitary_and_static_input() {
        let spec = LatticeSpec::periodic(6).unwrap();
        let mut u = LatticeOperator::identity(spec, ModelParams::default());
        u.matrix[[0, 0]] = C64::new(1.01, 0.0);
        assert!(matches!(quasienergy_spectrum(&u), Err(Error::NonUnitary { .. })));
        let chiral = crate::lattice::chiral_operator(spec);
        assert!(matches!(quasienergy_spectrum(&chiral), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn periodic_quasienergies_match_bands() {
        let p = PointLabel::Q1.params();
        let (_, s) = spectrum_at(PointLabel::Q1, LatticeSpec::periodic(12).unwrap());
        let mut expected: Vec<f64> = (0..12)
            .flat_map(|j| {
                let (lo, hi) = quasienergies(&p, 2.0 * PI * j as f64 / 12.0).unwrap();
                [lo, hi]
            })
            .collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in s.quasienergies().iter().zip(&expected) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn p4_open_chain_levels_and_pair() {
        let (u, s) = spectrum_at(PointLabel::P4, open60());
        assert_eq!(s.len(), 120);
        assert!(s.orthonormality_residual() < 1e-9);
        assert!(linalg::max_diff(&s.reconstruct().view(), &u.view()) < 1e-9);

        // chiral pairing on the circle
        let eps = s.quasienergies();
        for &e in &eps {
            let partner = eps.iter().map(|&f| circular_distance(f, -e, s.period)).fold(f64::MAX, f64::min);
            assert!(partner < 1e-9);
        }

        let pair = find_edge_pair(&s, &EdgeSearch::default()).unwrap();
        assert!(pair.eps0.abs() < 1e-3);
        assert!(circular_distance(pair.epspi, PI / s.period, s.period) < 1e-3);
        assert!(pair.weight0 > 0.6 && pair.weightpi > 0.6);

        let right = 56..=60;
        assert!(pair.zero_mode.weight_in(right.clone()) < 1e-6);
        assert!(pair.pi_mode.weight_in(right) < 1e-6);
    }

    #[test]
    fn single_gap_and_trivial_points() {
        let search = EdgeSearch::default();
        let (_, s1) = spectrum_at(PointLabel::P1, open60());
        assert!(matches!(find_edge_mode(&s1, GapKind::Zero, &search), Err(Error::NoZeroMode)));
        assert!(matches!(find_edge_mode(&s1, GapKind::Pi, &search), Err(Error::NoPiMode)));

        let (_, s2) = spectrum_at(PointLabel::P2, open60());
        assert!(matches!(find_edge_pair(&s2, &search), Err(Error::NoZeroMode)));
        assert!(find_edge_mode(&s2, GapKind::Pi, &search).is_ok());

        let (_, s3) = spectrum_at(PointLabel::P3, open60());
        assert!(find_edge_mode(&s3, GapKind::Zero, &search).is_ok());
        assert!(matches!(find_edge_pair(&s3, &search), Err(Error::NoPiMode)));
    }

    #[test]
    fn gate_action_approaches_tau_z() {
        let search = EdgeSearch::default();
        let deviation = |cells: usize| {
            let (u, s) = spectrum_at(PointLabel::P4, LatticeSpec::open(cells).unwrap());
            let pair = find_edge_pair(&s, &search).unwrap();
            let g = logical_projection(&u, &pair).unwrap();
            (gate_deviation(&g), g[[0, 1]].norm().max(g[[1, 0]].norm()))
        };
        let (d60, off60) = deviation(60);
        let (d120, _) = deviation(120);
        assert!(d60 < GATE_TOL && off60 < GATE_TOL);
        assert!(d120 < d60, "{d120} !< {d60}");
    }

    #[test]
    fn superposition_phase_sweep() {
        let spec = open60();
        let (u, s) = spectrum_at(PointLabel::P4, spec);
        let pair = find_edge_pair(&s, &EdgeSearch::default()).unwrap();
        let pi1 = static_operators(spec).pi1;
        let best = optimized_superposition(&pair, &pi1).unwrap();
        assert!((best.norm() - 1.0).abs() < 1e-12);

        // ac amplitude of P₁ over a short stroboscopic run
        let ac = |psi: &StateVector| {
            let mut a = psi.amplitudes.clone();
            let (mut even, mut odd) = (0.0, 0.0);
            for m in 0..40 {
                let p1 = lattice::weight_in(&a.view(), 1..=1);
                if m % 2 == 0 { even += p1 } else { odd += p1 }
                a = u.matrix.dot(&a);
            }
            ((even - odd) / 20.0).abs() / 2.0
        };
        let target = ac(&best);
        let swept = (0..64)
            .map(|j| ac(&superposition(&pair, 2.0 * PI * j as f64 / 64.0).unwrap()))
            .fold(0.0, f64::max);
        assert!(target >= swept - 1e-9, "{target} < {swept}");
        let cross = cross_element(&pair, &pi1).unwrap();
        assert!((target - cross.norm()).abs() < 1e-3);
    }

    #[test]
    fn real_positive_overlap_gives_zero_phase() {
        let spec = LatticeSpec::new(4, Boundary::Open, 1).unwrap();
        let a = StateVector::site(spec, 1, Sublattice::A).unwrap();
        let mut b = a.amplitudes.clone();
        b[0] = C64::new(0.6, 0.0);
        b[2] = C64::new(0.8, 0.0);
        let pair = EdgeModePair {
            zero_mode: a.clone(),
            pi_mode: StateVector::new(b.clone(), spec).unwrap(),
            eps0: 0.0,
            epspi: PI / 2.0,
            weight0: 1.0,
            weightpi: 0.36,
        };
        let pi1 = static_operators(spec).pi1;
        let psi = optimized_superposition(&pair, &pi1).unwrap();
        let mut expected = a.amplitudes.clone() + &b;
        let n = lattice::norm(&expected.view());
        expected.mapv_inplace(|z| z / n);
        for (x, y) in psi.amplitudes.iter().zip(expected.iter()) {
            assert!((x - y).norm() < 1e-14);
        }

        let far = StateVector::site(spec, 3, Sublattice::B).unwrap();
        let orthogonal = EdgeModePair { pi_mode: far, ..pair };
        assert!(matches!(optimized_superposition(&orthogonal, &pi1), Err(Error::ZeroOverlap)));
    }
}
