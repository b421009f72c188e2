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

use std::f64::consts::PI;

use afqw_core::dynamics::{evolve_series, propagate};
use afqw_core::lattice::{
    chiral_operator, floquet_operator, static_operators, LatticeSpec, StateVector, Sublattice, Substeps,
};
use afqw_core::linalg::{self, C64};
use afqw_core::model::{bloch_unitary, circular_distance, frame_unitary, quasienergy_of_eigenvalue};
use afqw_core::spectra::quasienergy_spectrum;
use afqw_core::{Frame, ModelParams};
use ndarray::Array1;
use ndarray_linalg::EigVals;
use proptest::prelude::*;

fn arb_params() -> impl Strategy<Value = ModelParams> {
    (0.2f64..1.5, 0.2f64..1.5, -4.0f64..2.0, 0.0f64..PI, 1.0f64..3.0)
        .prop_map(|(t1, t2, mass, phi, period)| ModelParams { t1, t2, mass, phi, period })
}

/// Greedy matching of two eigenvalue multisets on the unit circle.
fn multiset_distance(mut a: Vec<C64>, mut b: Vec<C64>) -> f64 {
    assert_eq!(a.len(), b.len());
    a.sort_by(|x, y| x.arg().total_cmp(&y.arg()));
    let mut worst = 0.0_f64;
    for z in a.drain(..) {
        let (j, d) = b
            .iter()
            .enumerate()
            .map(|(j, w)| (j, (z - w).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        worst = worst.max(d);
        b.swap_remove(j);
    }
    worst
}

fn momenta(l: usize) -> impl Iterator<Item = f64> {
    (0..l).map(move |j| 2.0 * PI * j as f64 / l as f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn momentum_sectors_reproduce_lattice_spectra(p in arb_params()) {
        let spec = LatticeSpec::periodic(12).unwrap();
        let steps = Substeps::new(&p, spec).unwrap();
        let period: Vec<C64> = momenta(12).flat_map(|k| bloch_unitary(&p, k).eigenvalues().unwrap()).collect();
        let real = steps.period_operator().matrix.eigvals().unwrap().to_vec();
        prop_assert!(multiset_distance(real, period) < 1e-9);
        for f in Frame::BOTH {
            let bloch: Vec<C64> = momenta(12).flat_map(|k| frame_unitary(&p, k, f).eigenvalues().unwrap()).collect();
            let real = steps.frame_operator(f).matrix.eigvals().unwrap().to_vec();
            prop_assert!(multiset_distance(real, bloch) < 1e-9);
        }
    }

    #[test]
    fn periodic_frames_are_chiral(p in arb_params()) {
        let spec = LatticeSpec::periodic(9).unwrap();
        let steps = Substeps::new(&p, spec).unwrap();
        let gamma = chiral_operator(spec);
        for f in Frame::BOTH {
            let u = steps.frame_operator(f);
            let r = afqw_core::dynamics::chiral_residual(&u, &gamma);
            prop_assert!(r < 1e-10, "{:?}: {}", f, r);
        }
    }

    #[test]
    fn open_spectra_are_chirally_paired_and_complete(p in arb_params()) {
        let spec = LatticeSpec::open(16).unwrap();
        let u = floquet_operator(&p, spec).unwrap();
        let s = quasienergy_spectrum(&u).unwrap();
        prop_assert!(s.orthonormality_residual() < 1e-9);
        prop_assert!(linalg::max_diff(&s.reconstruct().view(), &u.view()) < 1e-9);
        let eps = s.quasienergies();
        for &e in &eps {
            let partner = eps.iter().map(|&f| circular_distance(f, -e, p.period)).fold(f64::MAX, f64::min);
            prop_assert!(partner < 1e-9);
        }
        for level in &s.levels {
            prop_assert!((level.eps - quasienergy_of_eigenvalue(level.eigenvalue, p.period)).abs() < 1e-15);
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&level.edge_weight_left));
        }
    }

    #[test]
    fn evolution_conserves_norm_and_bounds_probabilities(p in arb_params(), cell in 1usize..=20, b in any::<bool>()) {
        let spec = LatticeSpec::open(20).unwrap();
        let u = floquet_operator(&p, spec).unwrap();
        let s = if b { Sublattice::B } else { Sublattice::A };
        let psi = StateVector::site(spec, cell, s).unwrap();
        let ops = static_operators(spec);
        let ts = evolve_series(&u, &psi, &ops.pie, 60).unwrap();
        prop_assert!(ts.values.iter().all(|&v| (-1e-10..=1.0 + 1e-10).contains(&v)));
        let mut worst = 0.0_f64;
        propagate(&u, &psi, 60, |_, a| {
            worst = worst.max((afqw_core::lattice::norm(&a.view()) - 1.0).abs());
            Ok(())
        })
        .unwrap();
        prop_assert!(worst < 1e-10);
    }

    #[test]
    fn random_states_evolve_unitarily(p in arb_params(), seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let spec = LatticeSpec::open(12).unwrap();
        let u = floquet_operator(&p, spec).unwrap();
        let raw = Array1::from_shape_fn(spec.dim(), |_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let psi = StateVector::normalized(raw, spec).unwrap();
        let full = afqw_core::lattice::cell_projector(spec, 1..=12);
        let ts = evolve_series(&u, &psi, &full, 30).unwrap();
        prop_assert!(ts.values.iter().all(|v| (v - 1.0).abs() < 1e-10));
    }
}
