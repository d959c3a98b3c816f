// Copyright 2026 The SHARQ Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, SharqError>;

#[derive(Debug, Error)]
pub enum SharqError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid rule record {record}: {message}")]
    Validation { record: usize, message: String },

    #[error("lookup error: {0}")]
    Lookup(String),

    #[error("undefined measure: {0}")]
    UndefinedMeasure(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The naive oracle refuses instances whose coalition space exceeds its budget.
    #[error("naive enumeration needs {count} coalitions, over the budget of {budget}; use the optimized algorithm")]
    BudgetExceeded { count: u128, budget: u128 },
}

impl From<csv::Error> for SharqError {
    fn from(err: csv::Error) -> Self {
        let line = err.position().map(|p| p.line()).unwrap_or(0);
        match err.into_kind() {
            csv::ErrorKind::Io(io) => SharqError::Io(io),
            kind => SharqError::Parse {
                line,
                message: format!("{kind:?}"),
            },
        }
    }
}
