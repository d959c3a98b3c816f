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

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use sharq::analysis::{
    attribute_report, baseline_scores, element_report, normalized_sharq, prune_rules, rule_report,
    write_attribute_report, write_element_report, write_rule_report, Baseline, ScoreTable,
};
use sharq::approx::{ApproxConfig, Approximator, Scheme};
use sharq::bench::{
    ablation_variants, generate_instance, run_ablation_suite, run_approx_suite, run_counting_suite,
    run_runtime_suite, write_csv, Instance, InstanceConfig,
};
use sharq::dataset::{load_dataset, LoadOptions, NumericDetection};
use sharq::miner::{filter_by_lift, load_rules, mine_apriori, write_rules, MinerConfig};
use sharq::{Dataset, Element, Game, Measure, MeasureConfig, Result, RuleSet, SharqError};

use crate::output::{emit, write_atomic};
use crate::{
    BaselineArgs, BenchArgs, Cli, Command, DataArgs, MeasureArgs, MineArgs, ReportArgs, ReportKind,
    RuleInput, ScoreArgs, Suite,
};

pub fn exit_code(err: &SharqError) -> u8 {
    match err {
        SharqError::Config(_) => 2,
        SharqError::BudgetExceeded { .. } => 4,
        _ => 3,
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
        .map_err(|e| SharqError::Config(format!("cannot start thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Mine(args) => mine(&args),
        Command::Score(args) => score(&args),
        Command::Baseline(args) => baseline(&args),
        Command::Report { kind } => report(&kind),
        Command::Bench(args) => bench(&args),
    })
}

fn load_options(args: &DataArgs) -> Result<LoadOptions> {
    if !args.delimiter.is_ascii() {
        return Err(SharqError::Config(format!(
            "delimiter {:?} must be a single ASCII character",
            args.delimiter
        )));
    }
    Ok(LoadOptions {
        delimiter: args.delimiter as u8,
        missing_token: args.missing.clone(),
    })
}

fn measure_config(args: &MeasureArgs) -> Result<MeasureConfig> {
    MeasureConfig::new(args.measure.parse()?, args.aggregator.parse()?).with_scale(args.scale)
}

fn mine(args: &MineArgs) -> Result<()> {
    let mut data = load_dataset(&args.input, &load_options(&args.data)?)?;
    if let Some(n) = args.sample {
        if n < data.len() {
            data = data.sample_rows(n, args.seed)?;
        }
    }
    if let Some(bins) = args.bins {
        data = data.discretize(bins, &NumericDetection::Auto)?;
    }
    let config = MinerConfig {
        min_support: args.support,
        max_len: args.max_len,
    };
    let mut rules = mine_apriori(&data, &config)?;
    if let Some(t) = args.lift_threshold {
        rules = filter_by_lift(&rules, t)?;
    }
    write_atomic(&args.output, |w| write_rules(&rules, w))
}

/// Rules plus the optional dataset, with confidences filled in when the
/// measure needs them.
fn load_inputs(input: &RuleInput, cfg: &MeasureConfig) -> Result<(RuleSet, Option<Dataset>)> {
    let mut rules = load_rules(&input.rules)?;
    let data = match &input.data {
        Some(p) => Some(load_dataset(p, &load_options(&input.data_opts)?)?),
        None => None,
    };
    if cfg.measure == Measure::Confidence {
        if let Some(d) = &data {
            rules = rules.with_confidences(d)?;
        }
    }
    Ok((rules, data))
}

/// The player set and the elements to report.
fn select_elements(
    spec: &str,
    rules: &RuleSet,
    data: Option<&Dataset>,
) -> Result<(BTreeSet<Element>, Vec<Element>)> {
    let mut players = rules.universe().clone();
    if spec.trim().eq_ignore_ascii_case("all") {
        return Ok((players.clone(), players.into_iter().collect()));
    }
    let known: BTreeSet<Element> = data.map(Dataset::elements).unwrap_or_default();
    let mut requested = Vec::new();
    for part in spec.split(',').filter(|p| !p.trim().is_empty()) {
        let e: Element = part.parse()?;
        if !players.contains(&e) && !known.contains(&e) {
            return Err(SharqError::Config(format!(
                "element {e} appears in neither the rules nor the dataset"
            )));
        }
        requested.push(e);
    }
    if requested.is_empty() {
        return Err(SharqError::Config("no elements selected".into()));
    }
    requested.sort();
    requested.dedup();
    players.extend(requested.iter().cloned());
    Ok((players, requested))
}

fn write_scores(
    scores: &BTreeMap<Element, f64>,
    method: &str,
    cfg: &MeasureConfig,
    output: Option<&Path>,
) -> Result<()> {
    let table = ScoreTable::new(scores, method, cfg.scale);
    emit(output, |w| table.write_csv(w))
}

fn score(args: &ScoreArgs) -> Result<()> {
    let cfg = measure_config(&args.measure)?;
    let (rules, data) = load_inputs(&args.input, &cfg)?;
    let all = args.elements.trim().eq_ignore_ascii_case("all");
    let (players, requested) = select_elements(&args.elements, &rules, data.as_ref())?;
    let method = args.method.to_ascii_lowercase();
    let mut scores = BTreeMap::new();
    if !players.is_empty() {
        let game = Game::new(&players, &rules, &cfg)?;
        let ids: Vec<u32> = requested
            .iter()
            .map(|e| game.player_id(e))
            .collect::<Result<_>>()?;
        let values: Vec<f64> = match method.as_str() {
            "exact" if !all && ids.len() == 1 => vec![game.sharq_star_single(ids[0])],
            "exact" => {
                let all_scores = game.build_indices().par_score_all();
                ids.iter().map(|&p| all_scores[p as usize]).collect()
            }
            "naive" => ids
                .iter()
                .map(|&p| game.naive_sharq(p, args.oracle_budget))
                .collect::<Result<_>>()?,
            other => {
                let scheme: Scheme = other.parse()?;
                let acfg = ApproxConfig::new(scheme, args.budget, args.seed)?;
                let index = game.build_indices();
                let approx = Approximator::new(&index);
                ids.iter().map(|&p| approx.estimate(p, &acfg)).collect()
            }
        };
        scores = requested.into_iter().zip(values).collect();
    } else if !matches!(method.as_str(), "exact" | "naive") {
        method.parse::<Scheme>()?;
    }
    write_scores(&scores, &method, &cfg, args.output.as_deref())
}

fn baseline(args: &BaselineArgs) -> Result<()> {
    let cfg = measure_config(&args.measure)?;
    let which: Baseline = args.method.parse()?;
    let (rules, data) = load_inputs(&args.input, &cfg)?;
    let (_, requested) = select_elements(&args.elements, &rules, data.as_ref())?;
    let requested: BTreeSet<Element> = requested.into_iter().collect();
    let scores = baseline_scores(&requested, &rules, &cfg, which)?;
    write_scores(&scores, which.name(), &cfg, args.output.as_deref())
}

struct ReportInputs {
    rules: RuleSet,
    data: Dataset,
    cfg: MeasureConfig,
    sharq: BTreeMap<Element, f64>,
    norm: BTreeMap<Element, f64>,
}

fn report_inputs(args: &ReportArgs) -> Result<ReportInputs> {
    let cfg = measure_config(&args.measure)?;
    let data = load_dataset(&args.data, &load_options(&args.data_opts)?)?;
    let mut rules = load_rules(&args.rules)?;
    if cfg.measure == Measure::Confidence {
        rules = rules.with_confidences(&data)?;
    }
    if rules.is_empty() {
        return Err(SharqError::Precondition("the rule file is empty".into()));
    }
    let game = Game::over_rules(&rules, &cfg)?;
    let scores = game.build_indices().par_score_all();
    let sharq: BTreeMap<Element, f64> = game.players().iter().cloned().zip(scores).collect();
    let norm = normalized_sharq(&sharq, &data)?;
    Ok(ReportInputs {
        rules,
        data,
        cfg,
        sharq,
        norm,
    })
}

fn report(kind: &ReportKind) -> Result<()> {
    match kind {
        ReportKind::Elements(args) => {
            let r = report_inputs(args)?;
            let rows = element_report(&r.sharq, &r.rules, &r.cfg, &r.data)?;
            emit(args.output.as_deref(), |w| write_element_report(&rows, w))
        }
        ReportKind::Rules {
            args,
            prune,
            pruned_rules,
        } => {
            let r = report_inputs(args)?;
            let mut rows = rule_report(&r.rules, &r.cfg, &r.norm)?;
            let threshold = prune.unwrap_or(0.0);
            let kept = prune_rules(&r.rules, &r.norm, threshold)?;
            rows.retain(|row| row.r_sharq >= threshold);
            if let Some(path) = pruned_rules {
                write_atomic(path, |w| write_rules(&kept, w))?;
            }
            emit(args.output.as_deref(), |w| write_rule_report(&rows, w))
        }
        ReportKind::Attributes(args) => {
            let r = report_inputs(args)?;
            let rows = attribute_report(r.rules.universe(), &r.rules, &r.norm);
            emit(args.output.as_deref(), |w| write_attribute_report(&rows, w))
        }
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse()
                .map_err(|_| SharqError::Config(format!("invalid {what} `{p}`")))
        })
        .collect()
}

fn bench(args: &BenchArgs) -> Result<()> {
    let cfg = measure_config(&args.measure)?;
    let instances: Vec<Instance> = (0..args.instances as u64)
        .map(|i| {
            generate_instance(&InstanceConfig {
                n_attributes: args.attributes,
                values_per_attribute: args.values,
                n_rules: args.n_rules,
                max_rule_len: args.tau,
                seed: args.seed.wrapping_add(i),
                ..Default::default()
            })
        })
        .collect::<Result<_>>()?;
    std::fs::create_dir_all(&args.out)?;
    let (name, path) = match args.suite {
        Suite::Coalitions => ("coalitions", args.out.join("coalitions.csv")),
        Suite::Runtime => ("runtime", args.out.join("runtime.csv")),
        Suite::Approx => ("approx", args.out.join("approx.csv")),
        Suite::Ablation => ("ablation", args.out.join("ablation.csv")),
    };
    match args.suite {
        Suite::Coalitions => {
            let rows = run_counting_suite(&instances, args.enumerate_limit)?;
            write_atomic(&path, |w| write_csv(&rows, w))?;
        }
        Suite::Runtime => {
            // both paths on one thread, so the comparison is fair
            let rows = run_runtime_suite(&instances, &cfg, args.repeats)?;
            write_atomic(&path, |w| write_csv(&rows, w))?;
        }
        Suite::Approx => {
            let schemes: Vec<Scheme> = parse_list(&args.schemes, "scheme")?;
            let fractions: Vec<f64> = parse_list(&args.fractions, "budget fraction")?;
            let rows = run_approx_suite(&instances, &cfg, &schemes, &fractions, args.seed)?;
            write_atomic(&path, |w| write_csv(&rows, w))?;
        }
        Suite::Ablation => {
            let rows = run_ablation_suite(&instances, &cfg, &ablation_variants())?;
            write_atomic(&path, |w| write_csv(&rows, w))?;
        }
    }
    println!("{name}: {}", path.display());
    Ok(())
}
