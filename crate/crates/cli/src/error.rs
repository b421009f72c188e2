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

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("required edge mode is absent: {0}")]
    MissingEdgeMode(String),
    #[error(transparent)]
    Core(#[from] afqw_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{0} acceptance criteria failed")]
    VerifyFailed(usize),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 2 for bad input, 3 for a demanded but missing edge mode, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        use afqw_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(E::InvalidParams(_) | E::InvalidSpec(_) | E::EvenLength(_) | E::WindowExceeded { .. }) => 2,
            CliError::MissingEdgeMode(_) => 3,
            _ => 1,
        }
    }
}
