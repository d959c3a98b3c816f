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

//! Baseline contribution measures and the element, rule and attribute reports.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::Serialize;

use crate::dataset::{Dataset, Element};
use crate::error::{Result, SharqError};
use crate::miner::{Rule, RuleSet};
use crate::scoring::{aggregate_iter, MeasureConfig};

/// Scored elements with 1-based ranks, highest score first.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreTable {
    rows: Vec<ScoreRow>,
    method: String,
    scale: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScoreRow {
    pub element: Element,
    pub score: f64,
    pub rank: usize,
}

impl ScoreTable {
    /// Ranks by descending score; equal scores fall back to element order.
    pub fn new(scores: &BTreeMap<Element, f64>, method: impl Into<String>, scale: f64) -> Self {
        let mut rows: Vec<ScoreRow> = scores
            .iter()
            .map(|(e, &s)| ScoreRow {
                element: e.clone(),
                score: s,
                rank: 0,
            })
            .collect();
        // the map is already in element order, and the sort is stable
        rows.sort_by(|a, b| b.score.total_cmp(&a.score));
        for (i, row) in rows.iter_mut().enumerate() {
            row.rank = i + 1;
        }
        ScoreTable {
            rows,
            method: method.into(),
            scale,
        }
    }

    pub fn rows(&self) -> &[ScoreRow] {
        &self.rows
    }

    pub fn method(&self) -> &str {
        &self.method
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rank_of(&self, e: &Element) -> Option<usize> {
        self.rows.iter().find(|r| &r.element == e).map(|r| r.rank)
    }

    pub fn ranks(&self) -> BTreeMap<Element, usize> {
        self.rows
            .iter()
            .map(|r| (r.element.clone(), r.rank))
            .collect()
    }

    pub fn scores(&self) -> BTreeMap<Element, f64> {
        self.rows
            .iter()
            .map(|r| (r.element.clone(), r.score))
            .collect()
    }

    /// Elements in rank order.
    pub fn ranking(&self) -> Vec<Element> {
        self.rows.iter().map(|r| r.element.clone()).collect()
    }

    /// CSV with columns `rank, attribute, value, score`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["rank", "attribute", "value", "score"])?;
        for row in &self.rows {
            w.write_record([
                row.rank.to_string(),
                row.element.attribute.clone(),
                row.element.value.clone(),
                format_number(row.score),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Formats to at most 9 significant digits.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.8e}").parse().unwrap_or(x);
    let s = rounded.to_string();
    if s == "-0" {
        "0".to_string()
    } else {
        s
    }
}

fn scored_rules<'a>(rs: &'a RuleSet, cfg: &MeasureConfig) -> Result<Vec<(&'a Rule, f64)>> {
    rs.rules()
        .iter()
        .map(|r| Ok((r, cfg.rule_score(r)?)))
        .collect()
}

/// Score of the best rule containing `e`, 0 if none does.
pub fn i_top(e: &Element, rs: &RuleSet, cfg: &MeasureConfig) -> Result<f64> {
    let mut best: Option<f64> = None;
    for (r, s) in scored_rules(rs, cfg)? {
        if r.contains(e) {
            best = Some(best.map_or(s, |b| b.max(s)));
        }
    }
    Ok(best.unwrap_or(0.0))
}

/// Drop in `I(R)` after removing the rules that contain `e`.
pub fn influence(e: &Element, rs: &RuleSet, cfg: &MeasureConfig) -> Result<f64> {
    let scored = scored_rules(rs, cfg)?;
    let all = aggregate_iter(scored.iter().map(|(_, s)| *s), cfg.aggregator);
    let rest = aggregate_iter(
        scored
            .iter()
            .filter(|(r, _)| !r.contains(e))
            .map(|(_, s)| *s),
        cfg.aggregator,
    );
    Ok(all - rest)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Baseline {
    ITop,
    Influence,
}

impl Baseline {
    pub fn name(self) -> &'static str {
        match self {
            Baseline::ITop => "itop",
            Baseline::Influence => "influence",
        }
    }
}

impl std::str::FromStr for Baseline {
    type Err = SharqError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "itop" | "i_top" | "i-top" => Ok(Baseline::ITop),
            "influence" => Ok(Baseline::Influence),
            _ => Err(SharqError::Config(format!("unknown baseline `{s}`"))),
        }
    }
}

pub fn baseline_scores(
    elements: &BTreeSet<Element>,
    rs: &RuleSet,
    cfg: &MeasureConfig,
    baseline: Baseline,
) -> Result<BTreeMap<Element, f64>> {
    elements
        .iter()
        .map(|e| {
            let s = match baseline {
                Baseline::ITop => i_top(e, rs, cfg)?,
                Baseline::Influence => influence(e, rs, cfg)?,
            };
            Ok((e.clone(), s))
        })
        .collect()
}

/// Frequency rank over SHARQ rank: high values mark frequent elements that
/// contribute little.
pub fn normalized_sharq(
    sharq: &BTreeMap<Element, f64>,
    data: &Dataset,
) -> Result<BTreeMap<Element, f64>> {
    let freq: BTreeMap<Element, f64> = sharq
        .keys()
        .map(|e| Ok((e.clone(), data.element_frequency(e)?)))
        .collect::<Result<_>>()?;
    let freq_rank = ScoreTable::new(&freq, "frequency", 1.0).ranks();
    let sharq_rank = ScoreTable::new(sharq, "sharq", 1.0).ranks();
    Ok(sharq_rank
        .iter()
        .map(|(e, &rs)| (e.clone(), freq_rank[e] as f64 / rs as f64))
        .collect())
}

/// Lowest normalized score among the rule's elements, and that element.
pub fn r_sharq_with_element<'r>(
    rule: &'r Rule,
    norm: &BTreeMap<Element, f64>,
) -> Result<(f64, &'r Element)> {
    let mut best: Option<(f64, &Element)> = None;
    for e in rule.elements() {
        let s = *norm
            .get(e)
            .ok_or_else(|| SharqError::Lookup(format!("no normalized score for {e}")))?;
        if best.is_none_or(|(b, _)| s < b) {
            best = Some((s, e));
        }
    }
    best.ok_or_else(|| SharqError::Precondition("rule has no elements".into()))
}

pub fn r_sharq(rule: &Rule, norm: &BTreeMap<Element, f64>) -> Result<f64> {
    r_sharq_with_element(rule, norm).map(|(s, _)| s)
}

/// Mean normalized score over the attribute's elements that occur in a rule;
/// `None` when no such element exists.
pub fn a_sharq(
    attribute: &str,
    elements: &BTreeSet<Element>,
    rs: &RuleSet,
    norm: &BTreeMap<Element, f64>,
) -> Option<(f64, usize)> {
    let scores: Vec<f64> = elements
        .iter()
        .filter(|e| e.attribute == attribute && rs.universe().contains(e))
        .filter_map(|e| norm.get(e).copied())
        .collect();
    if scores.is_empty() {
        None
    } else {
        Some((
            scores.iter().sum::<f64>() / scores.len() as f64,
            scores.len(),
        ))
    }
}

/// Keeps rules whose R-SHARQ is at least `threshold`.
pub fn prune_rules(rs: &RuleSet, norm: &BTreeMap<Element, f64>, threshold: f64) -> Result<RuleSet> {
    if threshold.is_nan() || threshold < 0.0 {
        return Err(SharqError::Config(format!(
            "pruning threshold must be non-negative, got {threshold}"
        )));
    }
    let mut kept = Vec::new();
    for r in rs.rules() {
        if r_sharq(r, norm)? >= threshold {
            kept.push(r.clone());
        }
    }
    Ok(RuleSet::new(kept))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ElementReportRow {
    pub attribute: String,
    pub value: String,
    pub sharq: f64,
    pub normalized_sharq: f64,
    pub freq_pct: f64,
    pub n_rules_low: usize,
    pub n_rules_med: usize,
    pub n_rules_high: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Category {
    Low,
    Medium,
    High,
}

/// Equal-width tertiles of `[lo, hi]`; the top bin is closed and a degenerate
/// range puts everything in it.
pub fn categorize(score: f64, lo: f64, hi: f64) -> Category {
    let width = hi - lo;
    if width <= 0.0 {
        return Category::High;
    }
    let pos = (score - lo) / width;
    if pos < 1.0 / 3.0 {
        Category::Low
    } else if pos < 2.0 / 3.0 {
        Category::Medium
    } else {
        Category::High
    }
}

/// One row per element of the rule universe, highest SHARQ first.
pub fn element_report(
    sharq: &BTreeMap<Element, f64>,
    rs: &RuleSet,
    cfg: &MeasureConfig,
    data: &Dataset,
) -> Result<Vec<ElementReportRow>> {
    if rs.is_empty() {
        return Err(SharqError::Precondition(
            "element report needs at least one rule".into(),
        ));
    }
    let scored = scored_rules(rs, cfg)?;
    let lo = scored.iter().map(|(_, s)| *s).fold(f64::INFINITY, f64::min);
    let hi = scored
        .iter()
        .map(|(_, s)| *s)
        .fold(f64::NEG_INFINITY, f64::max);
    let universe: BTreeMap<Element, f64> = sharq
        .iter()
        .filter(|(e, _)| rs.universe().contains(e))
        .map(|(e, s)| (e.clone(), *s))
        .collect();
    let norm = normalized_sharq(&universe, data)?;
    let table = ScoreTable::new(&universe, "sharq", cfg.scale);
    table
        .rows()
        .iter()
        .map(|row| {
            let e = &row.element;
            let mut counts = [0usize; 3];
            for (r, s) in &scored {
                if r.contains(e) {
                    counts[categorize(*s, lo, hi) as usize] += 1;
                }
            }
            Ok(ElementReportRow {
                attribute: e.attribute.clone(),
                value: e.value.clone(),
                sharq: row.score,
                normalized_sharq: norm[e],
                freq_pct: 100.0 * data.element_frequency(e)?,
                n_rules_low: counts[0],
                n_rules_med: counts[1],
                n_rules_high: counts[2],
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RuleReportRow {
    /// Position of the rule in its rule set.
    pub rule_id: usize,
    pub score: f64,
    pub r_sharq: f64,
    pub min_element: Element,
}

pub fn rule_report(
    rs: &RuleSet,
    cfg: &MeasureConfig,
    norm: &BTreeMap<Element, f64>,
) -> Result<Vec<RuleReportRow>> {
    rs.rules()
        .iter()
        .enumerate()
        .map(|(rule_id, r)| {
            let (r_sharq, min_element) = r_sharq_with_element(r, norm)?;
            Ok(RuleReportRow {
                rule_id,
                score: cfg.rule_score(r)?,
                r_sharq,
                min_element: min_element.clone(),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttributeReportRow {
    pub attribute: String,
    pub a_sharq: f64,
    pub n_participating: usize,
}

/// A-SHARQ per attribute, highest first; attributes without a participating
/// element are left out.
pub fn attribute_report(
    elements: &BTreeSet<Element>,
    rs: &RuleSet,
    norm: &BTreeMap<Element, f64>,
) -> Vec<AttributeReportRow> {
    let attributes: BTreeSet<&str> = elements.iter().map(|e| e.attribute.as_str()).collect();
    let mut rows: Vec<AttributeReportRow> = attributes
        .into_iter()
        .filter_map(|a| {
            a_sharq(a, elements, rs, norm).map(|(a_sharq, n)| AttributeReportRow {
                attribute: a.to_string(),
                a_sharq,
                n_participating: n,
            })
        })
        .collect();
    rows.sort_by(|a, b| b.a_sharq.total_cmp(&a.a_sharq));
    rows
}

pub fn write_element_report<W: Write>(rows: &[ElementReportRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "attribute",
        "value",
        "sharq",
        "normalized_sharq",
        "freq_pct",
        "n_rules_low",
        "n_rules_med",
        "n_rules_high",
    ])?;
    for r in rows {
        w.write_record([
            r.attribute.clone(),
            r.value.clone(),
            format_number(r.sharq),
            format_number(r.normalized_sharq),
            format_number(r.freq_pct),
            r.n_rules_low.to_string(),
            r.n_rules_med.to_string(),
            r.n_rules_high.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_rule_report<W: Write>(rows: &[RuleReportRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["rule_id", "score", "r_sharq", "min_element"])?;
    for r in rows {
        w.write_record([
            r.rule_id.to_string(),
            format_number(r.score),
            format_number(r.r_sharq),
            r.min_element.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_attribute_report<W: Write>(rows: &[AttributeReportRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["attribute", "a_sharq", "n_participating"])?;
    for r in rows {
        w.write_record([
            r.attribute.clone(),
            format_number(r.a_sharq),
            r.n_participating.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
