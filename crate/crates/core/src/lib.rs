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

//! Element-level contribution scores for association rules.
//!
//! Elements (attribute-value pairs) are treated as players of a cooperative
//! game whose utility is the aggregated interestingness of the rules made of
//! exactly a given set of elements. The Shapley value of that game, SHARQ,
//! ranks elements by their contribution to the rule set.

pub mod analysis;
pub mod approx;
pub mod bench;
pub mod dataset;
pub mod error;
pub mod exact;
pub mod miner;
pub mod scoring;

pub use dataset::{Dataset, Element};
pub use error::{Result, SharqError};
pub use exact::{Coalition, Game};
pub use miner::{Rule, RuleSet};
pub use scoring::{Aggregator, Measure, MeasureConfig};
