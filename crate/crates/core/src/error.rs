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

use thiserror::Error;

use crate::model::Frame;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("invalid lattice spec: {0}")]
    InvalidSpec(String),
    #[error("input is not unitary (residual {residual:.3e})")]
    NonUnitaryInput { residual: f64 },
    #[error("operator is not unitary (residual {residual:.3e})")]
    NonUnitary { residual: f64 },
    #[error("numerical inconsistency: {0}")]
    NumericalInconsistency(String),
    #[error("parameters are not the {0} benchmark point")]
    WrongParameters(&'static str),
    #[error("gap closed on the k contour in {frame:?} (min |n_x + i n_z| = {min_modulus:.3e})")]
    GapClosedOnContour { frame: Frame, min_modulus: f64 },
    #[error("W1 + W2 = {w1} + {w2} is odd")]
    ParityError { w1: i64, w2: i64 },
    #[error("chain length {0} is even; a centered position operator needs odd L")]
    EvenLength(usize),
    #[error("no zero mode on the left edge")]
    NoZeroMode,
    #[error("no pi mode on the left edge")]
    NoPiMode,
    #[error("cross matrix element <L,0|P1|L,pi> vanishes")]
    ZeroOverlap,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("series has {len} points, need at least {required}")]
    SeriesTooShort { len: usize, required: usize },
    #[error("requested {requested} periods but the pre-reflection window is {window}")]
    WindowExceeded { requested: usize, window: usize },
    #[error("edge-mode information does not disambiguate the sector")]
    AmbiguousSector,
    #[error("linear algebra failure: {0}")]
    Linalg(#[from] ndarray_linalg::error::LinalgError),
}
