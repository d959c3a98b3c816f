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

//! Benchmark harness: seeded synthetic instances, ranking agreement metrics
//! and the counting, runtime, approximation and ablation suites.

mod generate;
mod metrics;
mod suites;

pub use generate::{generate_instance, Instance, InstanceConfig};
pub use metrics::{avg_precision_at_10, precision_at_k, spearman};
pub use suites::{
    ablation_variants, run_ablation_suite, run_approx_suite, run_counting_suite, run_runtime_suite,
    write_csv, AblationRow, ApproxRow, CountingRow, RuntimeRow,
};
