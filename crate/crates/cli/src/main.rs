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

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod config;
mod output;

#[derive(Debug, Parser)]
#[command(
    name = "sharq",
    version,
    about = "Element contribution scores for association rules"
)]
pub struct Cli {
    /// File of `key=value` lines supplying defaults for any long flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads for concurrent scoring; defaults to available parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample, bin and mine a CSV dataset into JSONL rules.
    Mine(MineArgs),
    /// Score elements with an exact or approximate method.
    Score(ScoreArgs),
    /// Score elements with a baseline measure.
    Baseline(BaselineArgs),
    /// Element, rule or attribute report.
    Report {
        #[command(subcommand)]
        kind: ReportKind,
    },
    /// Run a benchmark suite on generated instances.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Field delimiter of the CSV input.
    #[arg(long, default_value = ",")]
    pub delimiter: char,
    /// Cell value treated as missing.
    #[arg(long, default_value = "")]
    pub missing: String,
}

#[derive(Debug, Args)]
pub struct MineArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Rows to sample before mining; all rows when omitted.
    #[arg(long)]
    pub sample: Option<usize>,
    /// Equal-width bins for numeric columns; no binning when omitted.
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    pub support: f64,
    /// Keep rules with max(lift, 1/lift) at least this value.
    #[arg(long)]
    pub lift_threshold: Option<f64>,
    #[arg(long, default_value_t = 8)]
    pub max_len: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[arg(long, default_value = "is")]
    pub measure: String,
    #[arg(long, default_value = "max")]
    pub aggregator: String,
    /// Multiplier applied to every rule score.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
}

#[derive(Debug, Args)]
pub struct RuleInput {
    #[arg(long)]
    pub rules: PathBuf,
    /// Dataset for confidences, frequencies and extra elements.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[command(flatten)]
    pub data_opts: DataArgs,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub input: RuleInput,
    /// `all`, or comma-separated `ATTR=VALUE` selectors.
    #[arg(long, default_value = "all")]
    pub elements: String,
    /// exact, naive, kernel, mc, antithetic, stratified or sobol.
    #[arg(long, default_value = "exact")]
    pub method: String,
    #[command(flatten)]
    pub measure: MeasureArgs,
    /// Coalition samples per element for sampling methods.
    #[arg(long, default_value_t = 1000)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest coalition count the naive method will enumerate.
    #[arg(long, default_value_t = sharq::exact::DEFAULT_ORACLE_BUDGET)]
    pub oracle_budget: u128,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[command(flatten)]
    pub input: RuleInput,
    #[arg(long, default_value = "all")]
    pub elements: String,
    /// itop or influence.
    #[arg(long, default_value = "itop")]
    pub method: String,
    #[command(flatten)]
    pub measure: MeasureArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub rules: PathBuf,
    /// Dataset the rules were mined from.
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub data_opts: DataArgs,
    #[command(flatten)]
    pub measure: MeasureArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ReportKind {
    Elements(ReportArgs),
    Rules {
        #[command(flatten)]
        args: ReportArgs,
        /// Drop rules whose R-SHARQ is below this threshold.
        #[arg(long)]
        prune: Option<f64>,
        /// Also write the kept rules as JSONL.
        #[arg(long)]
        pruned_rules: Option<PathBuf>,
    },
    Attributes(ReportArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Suite {
    Coalitions,
    Runtime,
    Approx,
    Ablation,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for the suite's CSV report.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub instances: usize,
    #[arg(long, default_value_t = 10)]
    pub attributes: usize,
    #[arg(long, default_value_t = 3)]
    pub values: usize,
    #[arg(long = "n-rules", default_value_t = 5000)]
    pub n_rules: usize,
    #[arg(long, default_value_t = 5)]
    pub tau: usize,
    /// Timed repetitions after the warm-up run.
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    /// Comma-separated sampling schemes for the approx suite.
    #[arg(long, default_value = "kernel,mc,antithetic,stratified,sobol")]
    pub schemes: String,
    /// Comma-separated budget fractions of |C*| for the approx suite.
    #[arg(long, default_value = "0.05,0.1,0.2")]
    pub fractions: String,
    /// Naive counts up to this are also enumerated by the coalitions suite.
    #[arg(long, default_value_t = 100_000)]
    pub enumerate_limit: u128,
    #[command(flatten)]
    pub measure: MeasureArgs,
}

fn main() -> ExitCode {
    let argv = match config::merge_config(std::env::args_os().collect()) {
        Ok(argv) => argv,
        Err(err) => {
            eprintln!("sharq: {err}");
            return ExitCode::from(commands::exit_code(&err));
        }
    };
    let cli = Cli::parse_from(argv);
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("sharq: {err}");
            ExitCode::from(commands::exit_code(&err))
        }
    }
}
