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

//! Rules and rule sets: the bundled Apriori miner, lift filtering and the JSONL
//! interchange format.

mod apriori;
pub(crate) mod io;
mod rule;

pub use apriori::{mine_apriori, MinerConfig};
pub use io::{load_rules, read_rules, save_rules, write_rules};
pub use rule::{filter_by_lift, Rule, RuleSet};
