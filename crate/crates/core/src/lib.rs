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

//! Simulation core for a one-dimensional flux-controlled anomalous Floquet
//! quantum walk on a driven bipartite lattice.
//!
//! The walk alternates a coin-dependent drift generated by `H1` with a
//! momentum-dependent coin mixing generated by `H2`. The same step operator
//! governs the momentum-space bands and their two winding numbers
//! ([`model`], [`topology`]), the open-chain 0 and π/T edge modes
//! ([`lattice`], [`spectra`]), and the stroboscopic boundary and bulk
//! probes ([`dynamics`]).
//!
//! Data-parallel sweeps go through [`par`]; with the default `parallel`
//! feature they run on rayon, without it they run sequentially.

pub mod catalog;
pub mod dynamics;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod model;
pub mod par;
pub mod spectra;
pub mod topology;

pub use crate::error::{Error, Result};
pub use crate::linalg::C64;
pub use crate::model::{Frame, ModelParams};
