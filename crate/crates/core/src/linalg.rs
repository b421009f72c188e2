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

//! Dense complex linear algebra shared by the momentum-space and lattice
//! code. LAPACK does the heavy lifting through `ndarray-linalg`.

use ndarray::{self as nd, Array1, Array2, ArrayView2, ShapeBuilder};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;

use crate::error::Result;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn identity(n: usize) -> Array2<C64> {
    Array2::eye(n)
}

pub fn sigma_x() -> Array2<C64> {
    nd::array![[ZERO, ONE], [ONE, ZERO]]
}

/// σ_y = [[0, −i], [i, 0]].
pub fn sigma_y() -> Array2<C64> {
    nd::array![[ZERO, -I], [I, ZERO]]
}

pub fn sigma_z() -> Array2<C64> {
    nd::array![[ONE, ZERO], [ZERO, -ONE]]
}

pub fn adjoint(a: &ArrayView2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

/// Largest entry modulus.
pub fn max_abs(a: &ArrayView2<C64>) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// ‖a − b‖_max.
pub fn max_diff(a: &ArrayView2<C64>, b: &ArrayView2<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

/// ‖u†u − I‖_max.
pub fn unitarity_residual(u: &ArrayView2<C64>) -> f64 {
    let n = u.nrows();
    let uu = adjoint(u).dot(u);
    max_diff(&uu.view(), &identity(n).view())
}

/// ‖h − h†‖_max.
pub fn hermiticity_residual(h: &ArrayView2<C64>) -> f64 {
    max_diff(h, &adjoint(h).view())
}

/// Eigendecomposition of a Hermitian matrix, reusable for any evolution time.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Array1<f64>,
    pub vectors: Array2<C64>,
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
///
/// `ndarray-linalg` hands row-major complex input to LAPACK as its
/// transpose and returns conjugated eigenvectors, so the input is copied
/// into column-major order first.
pub fn eigh(h: &ArrayView2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let mut f = Array2::zeros(h.raw_dim().f());
    f.assign(h);
    Ok(f.eigh(UPLO::Lower)?)
}

impl HermitianEigen {
    pub fn new(h: &ArrayView2<C64>) -> Result<Self> {
        let (values, vectors) = eigh(h)?;
        Ok(Self { values, vectors })
    }

    /// exp(−i s H).
    pub fn propagator(&self, s: f64) -> Array2<C64> {
        let phases = self.values.mapv(|e| C64::from_polar(1.0, -s * e));
        let scaled = &self.vectors * &phases.view().insert_axis(nd::Axis(0));
        scaled.dot(&adjoint(&self.vectors.view()))
    }
}

/// Eigenpairs of a unitary matrix with orthonormal eigenvectors.
///
/// LAPACK's general solver leaves eigenvectors of nearly degenerate
/// eigenvalues non-orthogonal. Instead the Hermitian part `(U + U†)/2` is
/// diagonalized; eigenvalues of it closer than `cluster_tol` (which
/// include every `e^{±iα}` pair) are resolved by diagonalizing the compressed
/// `(U + U†)/2 + (U − U†)/2i` on the cluster. Eigenvalues are the Rayleigh
/// quotients `v†Uv`. Columns of the returned matrix are the eigenvectors.
pub fn unitary_eigen(u: &ArrayView2<C64>, cluster_tol: f64) -> Result<(Array1<C64>, Array2<C64>)> {
    let ud = adjoint(u);
    let re_part = (u + &ud).mapv(|z| 0.5 * z);
    let im_part = (u - &ud).mapv(|z| -0.5 * I * z);
    let (cosines, mut vectors) = eigh(&re_part.view())?;
    let mixed = &re_part + &im_part;
    let n = cosines.len();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && cosines[end] - cosines[end - 1] < cluster_tol {
            end += 1;
        }
        if end - start > 1 {
            let block = vectors.slice(nd::s![.., start..end]).to_owned();
            let compressed = adjoint(&block.view()).dot(&mixed.dot(&block));
            let (_, w) = eigh(&compressed.view())?;
            vectors.slice_mut(nd::s![.., start..end]).assign(&block.dot(&w));
        }
        start = end;
    }
    let uv = u.dot(&vectors);
    let values = Array1::from_shape_fn(n, |j| {
        vectors.column(j).iter().zip(uv.column(j).iter()).map(|(a, b)| a.conj() * b).sum()
    });
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (sigma_x(), sigma_y(), sigma_z());
        // σ_x σ_z = −i σ_y
        let lhs = x.dot(&z);
        let rhs = y.mapv(|v| -I * v);
        assert!(max_diff(&lhs.view(), &rhs.view()) < 1e-15);
        assert!(max_diff(&y.dot(&y).view(), &identity(2).view()) < 1e-15);
    }

    #[test]
    fn eigh_returns_eigenvectors_of_complex_input() {
        let h: Array2<C64> = nd::array![
            [C64::new(1.0, 0.0), C64::new(0.3, -0.7)],
            [C64::new(0.3, 0.7), C64::new(-0.5, 0.0)]
        ];
        let (w, v) = eigh(&h.view()).unwrap();
        let scaled = &v * &w.mapv(|x| C64::new(x, 0.0)).view().insert_axis(nd::Axis(0));
        assert!(max_diff(&h.dot(&v).view(), &scaled.view()) < 1e-14);
    }

    #[test]
    fn propagator_matches_series_exponential() {
        let h: Array2<C64> = nd::array![
            [C64::new(0.4, 0.0), C64::new(0.3, -0.7)],
            [C64::new(0.3, 0.7), C64::new(-0.5, 0.0)]
        ];
        let s = 0.8;
        let mut term = identity(2);
        let mut sum = identity(2);
        for n in 1..40 {
            term = term.dot(&h).mapv(|z| z * (-I * s) / n as f64);
            sum += &term;
        }
        let exact = HermitianEigen::new(&h.view()).unwrap().propagator(s);
        assert!(max_diff(&exact.view(), &sum.view()) < 1e-14);
    }

    #[test]
    fn hermitian_propagator_is_unitary() {
        let h: Array2<C64> = nd::array![
            [C64::new(1.0, 0.0), C64::new(0.3, -0.2), ZERO],
            [C64::new(0.3, 0.2), C64::new(-0.5, 0.0), C64::new(0.0, 1.0)],
            [ZERO, C64::new(0.0, -1.0), C64::new(2.0, 0.0)]
        ];
        let eig = HermitianEigen::new(&h.view()).unwrap();
        let u = eig.propagator(0.7);
        assert!(unitarity_residual(&u.view()) < 1e-13);
        assert!(max_diff(&eig.propagator(0.0).view(), &identity(3).view()) < 1e-13);
    }

    #[test]
    fn degenerate_cluster_is_orthonormalized() {
        // diag(1, 1, −1) in a rotated basis has an exactly degenerate pair.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v: Array2<C64> = nd::array![
            [C64::new(s, 0.0), C64::new(0.0, s), ZERO],
            [C64::new(s, 0.0), C64::new(0.0, -s), ZERO],
            [ZERO, ZERO, ONE]
        ];
        let d = Array2::from_diag(&nd::array![ONE, ONE, -ONE]);
        let u = v.dot(&d).dot(&adjoint(&v.view()));
        let (vals, vecs) = unitary_eigen(&u.view(), 1e-8).unwrap();
        let gram = adjoint(&vecs.view()).dot(&vecs);
        assert!(max_diff(&gram.view(), &identity(3).view()) < 1e-12);
        let back = (&vecs * &vals.view().insert_axis(nd::Axis(0))).dot(&adjoint(&vecs.view()));
        assert!(max_diff(&back.view(), &u.view()) < 1e-12);
    }

    #[test]
    fn conjugate_pairs_are_separated() {
        // e^{±iα} share a real part and must come out as distinct eigenvectors.
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let u: Array2<C64> = nd::array![[C64::new(c, 0.0), C64::new(-s, 0.0)], [C64::new(s, 0.0), C64::new(c, 0.0)]];
        let (vals, vecs) = unitary_eigen(&u.view(), 1e-6).unwrap();
        let mut args: Vec<f64> = vals.iter().map(|z| z.arg()).collect();
        args.sort_by(f64::total_cmp);
        assert!((args[0] + 0.3).abs() < 1e-14 && (args[1] - 0.3).abs() < 1e-14);
        let back = (&vecs * &vals.view().insert_axis(nd::Axis(0))).dot(&adjoint(&vecs.view()));
        assert!(max_diff(&back.view(), &u.view()) < 1e-14);
    }
}
