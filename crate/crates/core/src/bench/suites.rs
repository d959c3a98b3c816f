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

use std::collections::BTreeMap;
use std::io::Write;
use std::time::{Duration, Instant};

use super::generate::Instance;
use super::metrics::{avg_precision_at_10, precision_at_k, spearman};
use crate::analysis::{format_number, ScoreTable};
use crate::approx::{ApproxConfig, Approximator, Scheme};
use crate::dataset::Element;
use crate::error::{Result, SharqError};
use crate::exact::{Game, PlayerId};
use crate::scoring::{Aggregator, Measure, MeasureConfig};

/// A row of a suite report.
pub trait CsvRow {
    fn header() -> &'static [&'static str];
    fn record(&self) -> Vec<String>;
}

pub fn write_csv<W: Write, R: CsvRow>(rows: &[R], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(R::header())?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}

fn opt_number(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

fn scores_by_element(game: &Game, scores: &[f64]) -> BTreeMap<Element, f64> {
    game.players()
        .iter()
        .cloned()
        .zip(scores.iter().copied())
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountingRow {
    pub instance: usize,
    pub element: Element,
    pub naive_count: u128,
    /// Length of the enumerated stream, when small enough to enumerate.
    pub enumerated: Option<u128>,
    pub optimized_count: usize,
    /// `|R| (τ + 1)`.
    pub bound: usize,
    pub gamma: f64,
    pub tau: usize,
    pub rules: usize,
}

impl CsvRow for CountingRow {
    fn header() -> &'static [&'static str] {
        &[
            "instance",
            "attribute",
            "value",
            "naive_count",
            "enumerated",
            "optimized_count",
            "bound",
            "gamma",
            "tau",
            "rules",
        ]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.instance.to_string(),
            self.element.attribute.clone(),
            self.element.value.clone(),
            self.naive_count.to_string(),
            self.enumerated.map(|c| c.to_string()).unwrap_or_default(),
            self.optimized_count.to_string(),
            self.bound.to_string(),
            format_number(self.gamma),
            self.tau.to_string(),
            self.rules.to_string(),
        ]
    }
}

/// Naive and optimized coalition counts per element. Naive sets with at most
/// `enumerate_limit` members are also enumerated.
pub fn run_counting_suite(
    instances: &[Instance],
    enumerate_limit: u128,
) -> Result<Vec<CountingRow>> {
    let mut rows = Vec::new();
    for (i, inst) in instances.iter().enumerate() {
        let game = Game::over_rules(&inst.rules, &MeasureConfig::default())?;
        for p in 0..game.n_players() as PlayerId {
            let stats = game.stats(p);
            let enumerated = (stats.naive_count <= enumerate_limit)
                .then(|| game.valid_coalitions(p).count() as u128);
            rows.push(CountingRow {
                instance: i,
                element: game.player(p).clone(),
                naive_count: stats.naive_count,
                enumerated,
                optimized_count: stats.optimized_count,
                bound: stats.rules * (stats.tau + 1),
                gamma: stats.gamma,
                tau: stats.tau,
                rules: stats.rules,
            });
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RuntimeRow {
    pub instance: usize,
    pub n_elements: usize,
    pub n_rules: usize,
    pub tau: usize,
    pub sequential: Duration,
    pub multi: Duration,
    pub max_abs_diff: f64,
}

impl RuntimeRow {
    pub fn speedup(&self) -> f64 {
        self.sequential.as_secs_f64() / self.multi.as_secs_f64()
    }
}

impl CsvRow for RuntimeRow {
    fn header() -> &'static [&'static str] {
        &[
            "instance",
            "n_elements",
            "n_rules",
            "tau",
            "sequential_s",
            "multi_s",
            "speedup",
            "max_abs_diff",
        ]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.instance.to_string(),
            self.n_elements.to_string(),
            self.n_rules.to_string(),
            self.tau.to_string(),
            format_number(self.sequential.as_secs_f64()),
            format_number(self.multi.as_secs_f64()),
            format_number(self.speedup()),
            format_number(self.max_abs_diff),
        ]
    }
}

fn median_time(repeats: usize, mut f: impl FnMut() -> Vec<f64>) -> (Duration, Vec<f64>) {
    let out = f();
    let mut times: Vec<Duration> = (0..repeats.max(1))
        .map(|_| {
            let start = Instant::now();
            std::hint::black_box(f());
            start.elapsed()
        })
        .collect();
    times.sort();
    (times[times.len() / 2], out)
}

/// Multi-element against per-element scoring, both on the calling thread.
/// Outputs are compared before any timing is reported.
pub fn run_runtime_suite(
    instances: &[Instance],
    cfg: &MeasureConfig,
    repeats: usize,
) -> Result<Vec<RuntimeRow>> {
    let mut rows = Vec::new();
    for (i, inst) in instances.iter().enumerate() {
        let game = Game::over_rules(&inst.rules, cfg)?;
        let sequential = || {
            (0..game.n_players() as PlayerId)
                .map(|p| game.sharq_star_single(p))
                .collect::<Vec<f64>>()
        };
        let multi = || game.build_indices().score_all();
        let max_abs_diff = sequential()
            .iter()
            .zip(multi())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if max_abs_diff > 1e-9 {
            return Err(SharqError::Precondition(format!(
                "instance {i}: multi-element scores differ from sequential by {max_abs_diff}"
            )));
        }
        let (seq_time, _) = median_time(repeats, sequential);
        let (multi_time, _) = median_time(repeats, multi);
        rows.push(RuntimeRow {
            instance: i,
            n_elements: game.n_players(),
            n_rules: game.n_rules(),
            tau: game.tau(),
            sequential: seq_time,
            multi: multi_time,
            max_abs_diff,
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxRow {
    pub instance: usize,
    pub scheme: Scheme,
    /// Per-element budget as a fraction of `|C*(e, E)|`.
    pub budget_fraction: f64,
    pub spearman: Option<f64>,
    pub p_at_10: f64,
    pub ap_at_10: f64,
    pub max_abs_error: f64,
    pub seconds: f64,
}

impl CsvRow for ApproxRow {
    fn header() -> &'static [&'static str] {
        &[
            "instance",
            "scheme",
            "budget_fraction",
            "spearman",
            "p_at_10",
            "ap_at_10",
            "max_abs_error",
            "seconds",
        ]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.instance.to_string(),
            self.scheme.to_string(),
            format_number(self.budget_fraction),
            opt_number(self.spearman),
            format_number(self.p_at_10),
            format_number(self.ap_at_10),
            format_number(self.max_abs_error),
            format_number(self.seconds),
        ]
    }
}

/// Agreement of each scheme with the exact ranking. Each element gets
/// `ceil(fraction * |C*(e, E)|)` samples.
pub fn run_approx_suite(
    instances: &[Instance],
    cfg: &MeasureConfig,
    schemes: &[Scheme],
    fractions: &[f64],
    seed: u64,
) -> Result<Vec<ApproxRow>> {
    let mut rows = Vec::new();
    for (i, inst) in instances.iter().enumerate() {
        let game = Game::over_rules(&inst.rules, cfg)?;
        let index = game.build_indices();
        let exact = index.par_score_all();
        let exact_map = scores_by_element(&game, &exact);
        let exact_rank = ScoreTable::new(&exact_map, "exact", cfg.scale).ranking();
        let approx = Approximator::new(&index);
        for &scheme in schemes {
            for &fraction in fractions {
                if fraction.is_nan() || fraction <= 0.0 {
                    return Err(SharqError::Config(format!(
                        "budget fraction {fraction} must be positive"
                    )));
                }
                let start = Instant::now();
                let estimates: Vec<f64> = (0..game.n_players() as PlayerId)
                    .map(|p| {
                        let n = approx.optimized_count(p);
                        let budget = ((fraction * n as f64).ceil() as usize).max(1);
                        let acfg = ApproxConfig::new(scheme, budget, seed)?;
                        Ok(approx.estimate(p, &acfg))
                    })
                    .collect::<Result<_>>()?;
                let seconds = start.elapsed().as_secs_f64();
                let est_map = scores_by_element(&game, &estimates);
                let est_rank = ScoreTable::new(&est_map, scheme.name(), cfg.scale).ranking();
                rows.push(ApproxRow {
                    instance: i,
                    scheme,
                    budget_fraction: fraction,
                    spearman: spearman(&exact_map, &est_map),
                    p_at_10: precision_at_k(&exact_rank, &est_rank, 10).0,
                    ap_at_10: avg_precision_at_10(&exact_rank, &est_rank),
                    max_abs_error: exact
                        .iter()
                        .zip(&estimates)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max),
                    seconds,
                });
            }
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AblationRow {
    pub instance: usize,
    pub reference: MeasureConfig,
    pub variant: MeasureConfig,
    pub spearman: Option<f64>,
}

fn label(cfg: &MeasureConfig) -> String {
    format!("{}/{}", cfg.measure, cfg.aggregator)
}

impl CsvRow for AblationRow {
    fn header() -> &'static [&'static str] {
        &["instance", "reference", "variant", "spearman"]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.instance.to_string(),
            label(&self.reference),
            label(&self.variant),
            opt_number(self.spearman),
        ]
    }
}

/// The measure and aggregator variants compared against IS with max.
pub fn ablation_variants() -> Vec<MeasureConfig> {
    vec![
        MeasureConfig::new(Measure::Lift, Aggregator::Max),
        MeasureConfig::new(Measure::Is, Aggregator::Avg),
        MeasureConfig::new(Measure::Confidence, Aggregator::Max),
        MeasureConfig::new(Measure::Is, Aggregator::Sum),
    ]
}

/// Rank agreement of SHARQ under each variant with SHARQ under `reference`.
pub fn run_ablation_suite(
    instances: &[Instance],
    reference: &MeasureConfig,
    variants: &[MeasureConfig],
) -> Result<Vec<AblationRow>> {
    let exact = |inst: &Instance, cfg: &MeasureConfig| -> Result<BTreeMap<Element, f64>> {
        let game = Game::over_rules(&inst.rules, cfg)?;
        let scores = game.build_indices().par_score_all();
        Ok(scores_by_element(&game, &scores))
    };
    let mut rows = Vec::new();
    for (i, inst) in instances.iter().enumerate() {
        let base = exact(inst, reference)?;
        for v in variants {
            rows.push(AblationRow {
                instance: i,
                reference: *reference,
                variant: *v,
                spearman: spearman(&base, &exact(inst, v)?),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::generate::{generate_instance, InstanceConfig};

    fn small(seed: u64) -> Instance {
        generate_instance(&InstanceConfig {
            n_attributes: 5,
            values_per_attribute: 3,
            n_rules: 80,
            max_rule_len: 3,
            seed,
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn counting_rows_agree_with_enumeration() {
        let rows = run_counting_suite(&[small(1), small(2)], 100_000).unwrap();
        assert!(!rows.is_empty());
        for r in &rows {
            assert_eq!(r.enumerated, Some(r.naive_count));
            assert!(r.optimized_count <= r.bound);
        }
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap().lines().count(),
            rows.len() + 1
        );
    }

    #[test]
    fn runtime_suite_reports_equal_outputs() {
        let rows = run_runtime_suite(&[small(3)], &MeasureConfig::default(), 1).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].max_abs_diff <= 1e-9);
        assert_eq!(rows[0].n_rules, 80);
    }

    #[test]
    fn approx_suite_is_exact_at_full_budget() {
        let rows = run_approx_suite(
            &[small(4)],
            &MeasureConfig::default(),
            &Scheme::ALL,
            &[1.0],
            9,
        )
        .unwrap();
        assert_eq!(rows.len(), 5);
        for r in &rows {
            assert!(r.max_abs_error <= 1e-9, "{:?}", r);
            assert_eq!(r.p_at_10, 1.0);
        }
    }

    #[test]
    fn ablation_identity_is_perfect() {
        let reference = MeasureConfig::default();
        let rows = run_ablation_suite(&[small(5)], &reference, &[reference]).unwrap();
        assert_eq!(rows[0].spearman, Some(1.0));
    }
}
