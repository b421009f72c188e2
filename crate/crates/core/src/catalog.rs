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

//! Labeled parameter points of the (M, φ) plane, all at `t1 = t2 = 1`, `T = 2`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::ModelParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PointLabel {
    P1,
    P2,
    P3,
    P4,
    Q1,
    Q2,
    Q3,
    Q4,
    C0,
    Cpi,
}

/// Shape the point is drawn with on the phase map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Marker {
    Circle,
    Square,
    Diamond,
}

impl PointLabel {
    pub const ALL: [PointLabel; 10] = [
        PointLabel::P1,
        PointLabel::P2,
        PointLabel::P3,
        PointLabel::P4,
        PointLabel::Q1,
        PointLabel::Q2,
        PointLabel::Q3,
        PointLabel::Q4,
        PointLabel::C0,
        PointLabel::Cpi,
    ];
    pub const OPEN_BOUNDARY: [PointLabel; 4] = [PointLabel::P1, PointLabel::P2, PointLabel::P3, PointLabel::P4];
    pub const BULK: [PointLabel; 4] = [PointLabel::Q1, PointLabel::Q2, PointLabel::Q3, PointLabel::Q4];

    /// `(M, φ)`.
    pub fn coordinates(self) -> (f64, f64) {
        match self {
            PointLabel::P1 => (-1.60, 0.50 * PI),
            PointLabel::P2 => (-2.50, 0.125 * PI),
            PointLabel::P3 => (-0.10, 0.1875 * PI),
            PointLabel::P4 => (-1.65, 0.0625 * PI),
            PointLabel::Q1 => (-1.5, PI / 3.0),
            PointLabel::Q2 => (0.0, PI / 3.0),
            PointLabel::Q3 => (-2.5, 0.0),
            PointLabel::Q4 => (-1.5, 0.0),
            PointLabel::C0 => (0.0, PI / 2.0),
            PointLabel::Cpi => (PI - 2.0, 0.0),
        }
    }

    pub fn params(self) -> ModelParams {
        let (m, phi) = self.coordinates();
        ModelParams::at(m, phi)
    }

    pub fn marker(self) -> Marker {
        match self {
            PointLabel::P1 | PointLabel::P2 | PointLabel::P3 | PointLabel::P4 => Marker::Circle,
            PointLabel::Q1 | PointLabel::Q2 | PointLabel::Q3 | PointLabel::Q4 => Marker::Square,
            PointLabel::C0 | PointLabel::Cpi => Marker::Diamond,
        }
    }

    /// `(ν0, ν_π)` for P points.
    pub fn expected_gap_indices(self) -> Option<(i64, i64)> {
        match self {
            PointLabel::P1 => Some((0, 0)),
            PointLabel::P2 => Some((0, 1)),
            PointLabel::P3 => Some((1, 0)),
            PointLabel::P4 => Some((1, 1)),
            _ => None,
        }
    }

    /// `(W1, W2)` for Q points.
    pub fn expected_windings(self) -> Option<(i64, i64)> {
        match self {
            PointLabel::Q1 => Some((0, 0)),
            PointLabel::Q2 => Some((1, 1)),
            PointLabel::Q3 => Some((1, -1)),
            PointLabel::Q4 => Some((2, 0)),
            _ => None,
        }
    }
}

impl fmt::Display for PointLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for PointLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PointLabel::ALL
            .into_iter()
            .find(|p| p.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown point label {s:?} (expected one of P1..P4, Q1..Q4, C0, Cpi)"))
    }
}
