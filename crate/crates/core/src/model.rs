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

//! Momentum-space walk: drift and mixing angles, the Bloch unitary and its
//! Pauli content, quasienergy bands, gap closings and the two symmetric
//! time frames.
//!
//! The walk operator at quasimomentum `k` is
//! `U(k) = exp(−iθ₂σ_x) exp(−iθ₁σ_z)` with
//! `θ₁ = T t₁ sin(k − φ)` and `θ₂ = (T/2)(M + 2 t₂ cos k)`.

use std::f64::consts::PI;

use ndarray::{Array2, ArrayView2};
use ndarray_linalg::EigVals;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, C64, I, ZERO};

/// Physical parameters of the walk. `t1 = t2 = 1` and `T = 2` throughout the
/// labeled catalog.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub t1: f64,
    pub t2: f64,
    #[serde(rename = "M")]
    pub mass: f64,
    pub phi: f64,
    #[serde(rename = "T")]
    pub period: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { t1: 1.0, t2: 1.0, mass: 0.0, phi: 0.0, period: 2.0 }
    }
}

impl ModelParams {
    pub fn new(t1: f64, t2: f64, mass: f64, phi: f64, period: f64) -> Result<Self> {
        let p = Self { t1, t2, mass, phi, period };
        p.validate()?;
        Ok(p)
    }

    /// Point `(M, φ)` of the plane with the default hoppings and period.
    pub fn at(mass: f64, phi: f64) -> Self {
        Self { mass, phi, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [self.t1, self.t2, self.mass, self.phi, self.period];
        if fields.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams(format!("non-finite field in {self:?}")));
        }
        if self.period <= 0.0 {
            return Err(Error::InvalidParams(format!("period must be positive, got {}", self.period)));
        }
        Ok(())
    }

    /// Upper edge of the Floquet zone, π/T.
    pub fn zone_edge(&self) -> f64 {
        PI / self.period
    }
}

/// One of the two symmetric time frames.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Frame {
    /// Drift split in halves around the full mixing step.
    Frame1,
    /// Mixing split in halves around the full drift step.
    Frame2,
}

impl Frame {
    pub const BOTH: [Frame; 2] = [Frame::Frame1, Frame::Frame2];

    pub fn index(self) -> usize {
        match self {
            Frame::Frame1 => 1,
            Frame::Frame2 => 2,
        }
    }
}

/// A 2×2 unitary acting on the coin (sublattice) space.
#[derive(Clone, Debug)]
pub struct CoinOperator {
    u: Array2<C64>,
}

impl CoinOperator {
    pub const UNITARITY_TOL: f64 = 1e-12;

    pub fn new(u: Array2<C64>) -> Result<Self> {
        if u.dim() != (2, 2) {
            return Err(Error::DimensionMismatch { expected: 2, found: u.nrows() });
        }
        let residual = linalg::unitarity_residual(&u.view());
        if residual >= Self::UNITARITY_TOL {
            return Err(Error::NonUnitaryInput { residual });
        }
        Ok(Self { u })
    }

    fn from_product(u: Array2<C64>) -> Self {
        Self { u }
    }

    pub fn matrix(&self) -> ArrayView2<'_, C64> {
        self.u.view()
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.u
    }

    /// Eigenvalues by direct (LAPACK) diagonalization.
    pub fn eigenvalues(&self) -> Result<[C64; 2]> {
        let ev = self.u.eigvals()?;
        Ok([ev[0], ev[1]])
    }
}

/// `U = d0·I − i d⃗·σ⃗`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochDecomposition {
    pub d0: f64,
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
}

impl BlochDecomposition {
    pub fn norm_sqr(&self) -> f64 {
        self.d0 * self.d0 + self.dx * self.dx + self.dy * self.dy + self.dz * self.dz
    }

    pub fn reconstruct(&self) -> Array2<C64> {
        let (x, y, z) = (linalg::sigma_x(), linalg::sigma_y(), linalg::sigma_z());
        let mut u = linalg::identity(2).mapv(|v| v * self.d0);
        u = u - (x * self.dx + y * self.dy + z * self.dz).mapv(|v| I * v);
        u
    }
}

/// Chiral-frame vector `U_ℓ = n0·I − i(n_x σ_x + n_z σ_z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameVector {
    pub frame: Frame,
    pub n0: f64,
    pub nx: f64,
    pub nz: f64,
}

impl FrameVector {
    /// `n_x + i n_z`, whose winding around the origin is the frame's index.
    pub fn planar(&self) -> C64 {
        C64::new(self.nx, self.nz)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GapKind {
    Zero,
    Pi,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapClosing {
    pub kstar: f64,
    pub m_index: i64,
    pub n_index: i64,
    pub gap: GapKind,
}

/// Drift and mixing angles `(θ₁, θ₂)` at quasimomentum `k`.
pub fn angles(p: &ModelParams, k: f64) -> (f64, f64) {
    let theta1 = p.period * p.t1 * (k - p.phi).sin();
    let theta2 = 0.5 * p.period * (p.mass + 2.0 * p.t2 * k.cos());
    (theta1, theta2)
}

/// exp(−iθσ_x)
fn rot_x(theta: f64) -> Array2<C64> {
    let (s, c) = theta.sin_cos();
    ndarray::array![[C64::new(c, 0.0), C64::new(0.0, -s)], [C64::new(0.0, -s), C64::new(c, 0.0)]]
}

/// exp(−iθσ_z)
fn rot_z(theta: f64) -> Array2<C64> {
    ndarray::array![[C64::from_polar(1.0, -theta), ZERO], [ZERO, C64::from_polar(1.0, theta)]]
}

/// Walk operator from explicit angles.
pub fn unitary_from_angles(theta1: f64, theta2: f64) -> CoinOperator {
    CoinOperator::from_product(rot_x(theta2).dot(&rot_z(theta1)))
}

pub fn bloch_unitary(p: &ModelParams, k: f64) -> CoinOperator {
    let (t1, t2) = angles(p, k);
    unitary_from_angles(t1, t2)
}

pub fn pauli_decompose(c: &CoinOperator) -> Result<BlochDecomposition> {
    let residual = linalg::unitarity_residual(&c.matrix());
    if residual >= CoinOperator::UNITARITY_TOL {
        return Err(Error::NonUnitaryInput { residual });
    }
    Ok(decompose_unchecked(&c.matrix()))
}

fn decompose_unchecked(u: &ArrayView2<C64>) -> BlochDecomposition {
    // Tr(U σ_j) = −2i d_j
    let component = |s: Array2<C64>| {
        let tr: C64 = u.dot(&s).diag().sum();
        (I * tr * 0.5).re
    };
    BlochDecomposition {
        d0: 0.5 * (u[[0, 0]] + u[[1, 1]]).re,
        dx: component(linalg::sigma_x()),
        dy: component(linalg::sigma_y()),
        dz: component(linalg::sigma_z()),
    }
}

/// Slack allowed on the arccos argument before it counts as a logic error.
const ARCCOS_SLACK: f64 = 1e-12;

fn clamped_acos(x: f64) -> Result<f64> {
    if x.abs() > 1.0 + ARCCOS_SLACK || !x.is_finite() {
        return Err(Error::NumericalInconsistency(format!("arccos argument {x} outside [-1, 1]")));
    }
    Ok(x.clamp(-1.0, 1.0).acos())
}

/// Bands `(ε₋, ε₊) = ±(1/T) arccos(cos θ₁ cos θ₂)`.
pub fn quasienergies(p: &ModelParams, k: f64) -> Result<(f64, f64)> {
    let (t1, t2) = angles(p, k);
    let e = clamped_acos(t1.cos() * t2.cos())? / p.period;
    Ok((-e, e))
}

/// Quasienergy of a Floquet eigenvalue `e^{−iεT}` on the branch (−π/T, π/T].
pub fn quasienergy_of_eigenvalue(lambda: C64, period: f64) -> f64 {
    let eps = -lambda.arg() / period;
    if eps <= -PI / period {
        eps + 2.0 * PI / period
    } else {
        eps
    }
}

/// Circular distance between two quasienergies on the zone of width 2π/T.
pub fn circular_distance(a: f64, b: f64, period: f64) -> f64 {
    let width = 2.0 * PI / period;
    let d = (a - b).rem_euclid(width);
    d.min(width - d)
}

fn wrap_k(k: f64) -> f64 {
    (k + PI).rem_euclid(2.0 * PI) - PI
}

const GAP_SCAN_INTERVALS: usize = 2048;
const GAP_RESIDUAL_TOL: f64 = 1e-9;

/// Bisection roots of `f` on `[−π, π)` over a uniform bracket scan.
///
/// The scan overhangs the zone by half a bracket on both sides so that a
/// root at `k = ±π` is bracketed; roots are wrapped back into the zone.
fn level_set_roots(f: impl Fn(f64) -> f64) -> Vec<f64> {
    let h = 2.0 * PI / GAP_SCAN_INTERVALS as f64;
    let start = -PI - 0.5 * h;
    let mut roots = Vec::new();
    for i in 0..=GAP_SCAN_INTERVALS {
        let (mut a, mut b) = (start + i as f64 * h, start + (i + 1) as f64 * h);
        let (mut fa, fb) = (f(a), f(b));
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if fa * fb > 0.0 {
            continue;
        }
        if fb == 0.0 {
            // picked up as the left endpoint of the next bracket
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            let fm = f(mid);
            if fm == 0.0 || (b - a) < 1e-15 {
                a = mid;
                b = mid;
                break;
            }
            if fa * fm < 0.0 {
                b = mid;
            } else {
                a = mid;
                fa = fm;
            }
        }
        roots.push(0.5 * (a + b));
    }
    roots.into_iter().map(wrap_k).collect()
}

/// All simultaneous solutions of `θ₁(k*) = mπ`, `θ₂(k*) = nπ` in `[−π, π)`.
pub fn gap_closings(p: &ModelParams) -> Vec<GapClosing> {
    let amp1 = (p.period * p.t1).abs();
    let mut candidates: Vec<(f64, i64)> = Vec::new();
    if amp1 < 1e-300 {
        // θ₁ ≡ 0: every k lies on the m = 0 level set, so scan θ₂ instead.
        let amp2 = p.period * p.t2.abs();
        let centre = 0.5 * p.period * p.mass;
        let n_lo = ((centre - amp2) / PI).ceil() as i64;
        let n_hi = ((centre + amp2) / PI).floor() as i64;
        for n in n_lo..=n_hi {
            for k in level_set_roots(|k| angles(p, k).1 - n as f64 * PI) {
                candidates.push((k, 0));
            }
        }
    } else {
        let m_max = (amp1 / PI).floor() as i64;
        for m in -m_max..=m_max {
            let level = m as f64 * PI;
            let mut roots = level_set_roots(|k| angles(p, k).0 - level);
            // Tangent level sets (|mπ| = |T t1|) have no sign change.
            if ((level.abs() - amp1) / amp1).abs() < 1e-12 {
                let s = (level / (p.period * p.t1)).signum();
                roots.push(wrap_k(p.phi + s * PI / 2.0));
            }
            candidates.extend(roots.into_iter().map(|k| (k, m)));
        }
    }
    let mut out: Vec<GapClosing> = Vec::new();
    for (k, m) in candidates {
        let k = wrap_k(k);
        let theta2 = angles(p, k).1;
        let n = (theta2 / PI).round();
        if (theta2 - n * PI).abs() >= GAP_RESIDUAL_TOL {
            continue;
        }
        let n = n as i64;
        let duplicate = out.iter().any(|g| {
            let d = (g.kstar - k).abs();
            g.m_index == m && g.n_index == n && d.min(2.0 * PI - d) < 1e-9
        });
        if !duplicate {
            let gap = if (m + n).rem_euclid(2) == 0 { GapKind::Zero } else { GapKind::Pi };
            out.push(GapClosing { kstar: k, m_index: m, n_index: n, gap });
        }
    }
    out.sort_by(|a, b| a.kstar.total_cmp(&b.kstar));
    out
}

pub fn frame_unitary(p: &ModelParams, k: f64, frame: Frame) -> CoinOperator {
    let (t1, t2) = angles(p, k);
    let u = match frame {
        Frame::Frame1 => {
            let half = rot_z(0.5 * t1);
            half.dot(&rot_x(t2)).dot(&half)
        }
        Frame::Frame2 => {
            let half = rot_x(0.5 * t2);
            half.dot(&rot_z(t1)).dot(&half)
        }
    };
    CoinOperator::from_product(u)
}

pub fn frame_vector(p: &ModelParams, k: f64, frame: Frame) -> FrameVector {
    let (t1, t2) = angles(p, k);
    let (s1, c1) = t1.sin_cos();
    let (s2, c2) = t2.sin_cos();
    let (nx, nz) = match frame {
        Frame::Frame1 => (s2, c2 * s1),
        Frame::Frame2 => (c1 * s2, s1),
    };
    FrameVector { frame, n0: c1 * c2, nx, nz }
}

/// The two labeled critical benchmarks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Benchmark {
    /// 0-gap closing at `(M, φ) = (0, π/2)`, `k* = π/2`.
    C0,
    /// π-gap closing at `(M, φ) = (π − 2, 0)`, `k* = 0`.
    Cpi,
}

impl Benchmark {
    pub fn params(self) -> ModelParams {
        match self {
            Benchmark::C0 => ModelParams::at(0.0, PI / 2.0),
            Benchmark::Cpi => ModelParams::at(PI - 2.0, 0.0),
        }
    }

    pub fn kstar(self) -> f64 {
        match self {
            Benchmark::C0 => PI / 2.0,
            Benchmark::Cpi => 0.0,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Benchmark::C0 => "C0",
            Benchmark::Cpi => "Cpi",
        }
    }

    /// Leading-order walk operator at `k* + q`.
    pub fn leading_order(self, q: f64) -> Array2<C64> {
        let id = linalg::identity(2);
        match self {
            // I − 2iq(σ_z − σ_x)
            Benchmark::C0 => id - (linalg::sigma_z() - linalg::sigma_x()).mapv(|v| 2.0 * q * I * v),
            // −I + 2iq σ_z
            Benchmark::Cpi => id.mapv(|v| -v) + linalg::sigma_z().mapv(|v| 2.0 * q * I * v),
        }
    }
}

/// `‖U(k* + q) − U_lead(q)‖_max` at a benchmark point; second order in `q`.
pub fn critical_expansion_error(p: &ModelParams, benchmark: Benchmark, q: f64) -> Result<f64> {
    let target = benchmark.params();
    let same = [
        (p.t1, target.t1),
        (p.t2, target.t2),
        (p.mass, target.mass),
        (p.phi, target.phi),
        (p.period, target.period),
    ]
    .iter()
    .all(|(a, b)| (a - b).abs() < 1e-12);
    if !same {
        return Err(Error::WrongParameters(benchmark.name()));
    }
    if q.is_nan() || q.abs() >= 0.3 {
        return Err(Error::InvalidParams(format!("expansion offset |q| = {} must be below 0.3", q.abs())));
    }
    let u = bloch_unitary(p, benchmark.kstar() + q);
    Ok(linalg::max_diff(&u.matrix(), &benchmark.leading_order(q).view()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use proptest::prelude::*;

    /// Textbook scaling-and-squaring exponential (Taylor core), independent
    /// of the closed-form rotations used in the implementation.
    fn expm_oracle(a: &Array2<C64>) -> Array2<C64> {
        let norm = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let squarings = (norm.max(1e-300).log2().ceil() as i32 + 4).max(0) as u32;
        let scaled = a.mapv(|z| z / 2f64.powi(squarings as i32));
        let mut term = linalg::identity(2);
        let mut sum = linalg::identity(2);
        for j in 1..30 {
            term = term.dot(&scaled).mapv(|z| z / j as f64);
            sum += &term;
        }
        for _ in 0..squarings {
            sum = sum.dot(&sum);
        }
        sum
    }

    fn close(a: &ArrayView2<C64>, b: &ArrayView2<C64>, tol: f64) -> bool {
        linalg::max_diff(a, b) < tol
    }

    #[test]
    fn angles_at_reference_points() {
        // θ₂(0) = (T/2)(M + 2t₂) = 2 at the defaults
        let (a, b) = angles(&ModelParams::default(), 0.0);
        assert_abs_diff_eq!(a, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b, 2.0, epsilon = 1e-15);

        let (a, b) = angles(&Benchmark::C0.params(), PI / 2.0);
        assert_abs_diff_eq!(a, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b, 0.0, epsilon = 1e-15);

        let (a, b) = angles(&Benchmark::Cpi.params(), 0.0);
        assert_abs_diff_eq!(a, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b, PI, epsilon = 1e-14);
    }

    #[test]
    fn bloch_unitary_special_angles() {
        let u = unitary_from_angles(0.0, 0.0);
        assert!(close(&u.matrix(), &linalg::identity(2).view(), 1e-15));
        let u = unitary_from_angles(PI / 2.0, 0.0);
        let expected = array![[C64::new(0.0, -1.0), ZERO], [ZERO, C64::new(0.0, 1.0)]];
        assert!(close(&u.matrix(), &expected.view(), 1e-15));
    }

    #[test]
    fn bloch_unitary_matches_series_exponential() {
        let p = ModelParams::at(-1.5, 0.0);
        let k = 0.7;
        let (t1, t2) = angles(&p, k);
        let ex = expm_oracle(&linalg::sigma_x().mapv(|v| -I * t2 * v));
        let ez = expm_oracle(&linalg::sigma_z().mapv(|v| -I * t1 * v));
        let oracle = ex.dot(&ez);
        assert!(close(&bloch_unitary(&p, k).matrix(), &oracle.view(), 1e-10));
    }

    #[test]
    fn pauli_decomposition_examples() {
        let d = pauli_decompose(&unitary_from_angles(0.0, 0.0)).unwrap();
        assert_eq!((d.d0, d.dx, d.dy, d.dz), (1.0, 0.0, 0.0, 0.0));

        let d = pauli_decompose(&unitary_from_angles(0.0, PI / 2.0)).unwrap();
        assert_abs_diff_eq!(d.d0, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.dx, 1.0, epsilon = 1e-15);

        let p = ModelParams::at(-1.5, 0.0);
        let (t1, t2) = angles(&p, 0.7);
        let d = pauli_decompose(&bloch_unitary(&p, 0.7)).unwrap();
        assert_abs_diff_eq!(d.dx, t2.sin() * t1.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(d.dy, -t2.sin() * t1.sin(), epsilon = 1e-12);
        assert_abs_diff_eq!(d.dz, t2.cos() * t1.sin(), epsilon = 1e-12);
        assert_abs_diff_eq!(d.norm_sqr(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn pauli_decompose_rejects_non_unitary() {
        let bad = CoinOperator { u: linalg::identity(2).mapv(|v| v * 1.01) };
        assert!(matches!(pauli_decompose(&bad), Err(Error::NonUnitaryInput { .. })));
        assert!(CoinOperator::new(linalg::identity(2).mapv(|v| v * 2.0)).is_err());
    }

    #[test]
    fn quasienergy_examples() {
        // θ₁ = 0, θ₂ = π/3 → ±π/6 at T = 2
        let u = unitary_from_angles(0.0, PI / 3.0);
        let d = pauli_decompose(&u).unwrap();
        assert_abs_diff_eq!(d.d0.acos() / 2.0, PI / 6.0, epsilon = 1e-14);

        let (lo, hi) = quasienergies(&Benchmark::C0.params(), PI / 2.0).unwrap();
        assert_abs_diff_eq!(lo, 0.0, epsilon = 1e-7);
        assert_abs_diff_eq!(hi, 0.0, epsilon = 1e-7);

        let (lo, hi) = quasienergies(&Benchmark::Cpi.params(), 0.0).unwrap();
        assert_abs_diff_eq!(lo, -PI / 2.0, epsilon = 1e-7);
        assert_abs_diff_eq!(hi, PI / 2.0, epsilon = 1e-7);
    }

    #[test]
    fn arccos_clamping() {
        assert_eq!(clamped_acos(1.0 + 5e-13).unwrap(), 0.0);
        assert!(matches!(clamped_acos(1.0 + 1e-9), Err(Error::NumericalInconsistency(_))));
    }

    #[test]
    fn quasienergy_branch_is_half_open() {
        let eps = quasienergy_of_eigenvalue(C64::new(-1.0, 0.0), 2.0);
        assert_abs_diff_eq!(eps, PI / 2.0, epsilon = 1e-15);
        let eps = quasienergy_of_eigenvalue(C64::new(-1.0, -0.0), 2.0);
        assert!(eps > 0.0);
        assert_abs_diff_eq!(circular_distance(PI / 2.0 - 1e-3, -PI / 2.0 + 1e-3, 2.0), 2e-3, epsilon = 1e-12);
    }

    #[test]
    fn gap_closings_at_benchmarks() {
        let c0 = gap_closings(&Benchmark::C0.params());
        assert!(c0.iter().any(|g| (g.kstar - PI / 2.0).abs() < 1e-9
            && g.m_index == 0
            && g.n_index == 0
            && g.gap == GapKind::Zero));

        let cpi = gap_closings(&Benchmark::Cpi.params());
        assert!(cpi.iter().any(|g| g.kstar.abs() < 1e-9
            && g.m_index == 0
            && g.n_index == 1
            && g.gap == GapKind::Pi));

        assert!(gap_closings(&ModelParams::at(-1.65, 0.0625 * PI)).is_empty());
        for g in c0.iter().chain(cpi.iter()) {
            assert_eq!(g.gap == GapKind::Zero, (g.m_index + g.n_index) % 2 == 0);
        }
    }

    #[test]
    fn gapped_point_has_open_gaps_on_dense_grid() {
        // oracle for the empty-list example: both gaps stay open on a fine grid
        let p = ModelParams::at(-1.65, 0.0625 * PI);
        let mut min_gap = f64::MAX;
        for j in 0..20000 {
            let k = -PI + 2.0 * PI * j as f64 / 20000.0;
            let (_, e) = quasienergies(&p, k).unwrap();
            min_gap = min_gap.min(e).min(PI / 2.0 - e);
        }
        assert!(min_gap > 1e-2, "min gap {min_gap}");
    }

    #[test]
    fn gap_closings_with_zero_drift() {
        // θ₁ ≡ 0: closings occur where θ₂ = nπ; for M = 1 only n = 0, at cos k = −1/2
        let p = ModelParams { t1: 0.0, mass: 1.0, ..ModelParams::default() };
        let g = gap_closings(&p);
        assert!(g.iter().any(|g| (g.kstar.abs() - 2.0 * PI / 3.0).abs() < 1e-9 && g.n_index == 0));
        assert!(g.iter().all(|g| g.m_index == 0));
    }

    #[test]
    fn gap_closing_on_tangent_level_set() {
        // T t1 = π puts θ₁ = π only at the peak of the sine: k = φ + π/2.
        let p = ModelParams { t1: PI / 2.0, mass: -2.0 * (PI / 2.0).cos(), ..ModelParams::default() };
        let g = gap_closings(&p);
        assert!(g.iter().any(|g| (g.kstar - PI / 2.0).abs() < 1e-9 && g.m_index == 1 && g.gap == GapKind::Pi));
    }

    #[test]
    fn frame_unitary_examples() {
        let p = ModelParams::at(-1.5, 0.0);
        let id = linalg::identity(2);
        let zero = ModelParams { t1: 0.0, t2: 0.0, ..ModelParams::default() };
        for f in Frame::BOTH {
            assert!(close(&frame_unitary(&zero, 0.3, f).matrix(), &id.view(), 1e-15));
        }
        // θ₁ = 0 collapses the outer factors of frame 1
        let drift_free = ModelParams { t1: 0.0, ..p };
        let (_, t2) = angles(&drift_free, 1.1);
        assert!(close(&frame_unitary(&drift_free, 1.1, Frame::Frame1).matrix(), &rot_x(t2).view(), 1e-15));

        let reference = bloch_unitary(&p, 1.1).eigenvalues().unwrap();
        for f in Frame::BOTH {
            let ev = frame_unitary(&p, 1.1, f).eigenvalues().unwrap();
            let direct = (ev[0] - reference[0]).norm().max((ev[1] - reference[1]).norm());
            let swapped = (ev[0] - reference[1]).norm().max((ev[1] - reference[0]).norm());
            assert!(direct.min(swapped) < 1e-12);
        }
    }

    #[test]
    fn frame_vector_examples() {
        // θ₂ = 0 in frame 1 and θ₁ = 0 in frame 2
        let v = frame_vector(&ModelParams { t2: 0.0, ..ModelParams::default() }, 0.4, Frame::Frame1);
        assert_abs_diff_eq!(v.nx, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.nz, (2.0 * 0.4f64.sin()).sin(), epsilon = 1e-15);
        let p = ModelParams { t1: 0.0, ..ModelParams::default() };
        let v = frame_vector(&p, 0.4, Frame::Frame2);
        assert_abs_diff_eq!(v.nz, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.nx, angles(&p, 0.4).1.sin(), epsilon = 1e-15);

        let q3 = ModelParams::at(-2.5, 0.0);
        for f in Frame::BOTH {
            let min = (0..4096)
                .map(|j| frame_vector(&q3, -PI + 2.0 * PI * j as f64 / 4096.0, f).planar().norm())
                .fold(f64::MAX, f64::min);
            assert!(min > 0.1, "{f:?} min modulus {min}");
        }
    }

    #[test]
    fn critical_expansions() {
        for b in [Benchmark::C0, Benchmark::Cpi] {
            assert!(critical_expansion_error(&b.params(), b, 0.0).unwrap() < 1e-12);
            let ratios: Vec<f64> = [1e-2, 5e-3, 2.5e-3]
                .iter()
                .map(|&q| critical_expansion_error(&b.params(), b, q).unwrap() / (q * q))
                .collect();
            let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(l, h), &r| (l.min(r), h.max(r)));
            assert!((hi - lo) / lo < 0.1, "{b:?} ratios {ratios:?}");
        }
        assert!(matches!(
            critical_expansion_error(&ModelParams::default(), Benchmark::C0, 0.01),
            Err(Error::WrongParameters("C0"))
        ));
        assert!(critical_expansion_error(&Benchmark::Cpi.params(), Benchmark::Cpi, 0.5).is_err());
    }

    fn arb_params() -> impl Strategy<Value = ModelParams> {
        (0.2f64..2.0, 0.2f64..2.0, -4.0f64..2.0, -PI..PI, 0.5f64..3.0)
            .prop_map(|(t1, t2, mass, phi, period)| ModelParams { t1, t2, mass, phi, period })
    }

    proptest! {
        #[test]
        fn unitary_and_chiral(p in arb_params(), k in -PI..PI) {
            let u = bloch_unitary(&p, k);
            prop_assert!(linalg::unitarity_residual(&u.matrix()) < 1e-12);
            let y = linalg::sigma_y();
            for f in Frame::BOTH {
                let uf = frame_unitary(&p, k, f);
                let chiral = y.dot(&uf.matrix()).dot(&y).dot(&uf.matrix());
                prop_assert!(linalg::max_diff(&chiral.view(), &linalg::identity(2).view()) < 1e-12);
            }
        }

        #[test]
        fn band_consistency(p in arb_params(), k in -PI..PI) {
            let u = bloch_unitary(&p, k);
            let (t1, t2) = angles(&p, k);
            let d = pauli_decompose(&u).unwrap();
            prop_assert!((d.d0 - t1.cos() * t2.cos()).abs() < 1e-12);
            let (_, eps) = quasienergies(&p, k).unwrap();
            let direct = u.eigenvalues().unwrap()
                .iter()
                .map(|&l| quasienergy_of_eigenvalue(l, p.period).abs())
                .fold(0.0, f64::max);
            prop_assert!((eps - direct).abs() < 1e-10);
        }

        #[test]
        fn frame_vector_closure(p in arb_params(), k in -PI..PI) {
            for f in Frame::BOTH {
                let d = pauli_decompose(&frame_unitary(&p, k, f)).unwrap();
                let v = frame_vector(&p, k, f);
                prop_assert!(d.dy.abs() < 1e-12);
                prop_assert!((d.dx - v.nx).abs() < 1e-12 && (d.dz - v.nz).abs() < 1e-12);
                prop_assert!((d.d0 - v.n0).abs() < 1e-12);
                prop_assert!((v.n0 * v.n0 + v.nx * v.nx + v.nz * v.nz - 1.0).abs() < 1e-12);
                prop_assert!((d.reconstruct() - frame_unitary(&p, k, f).matrix()).iter().all(|z| z.norm() < 1e-12));
            }
        }
    }
}
