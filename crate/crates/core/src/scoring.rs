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

//! Rule interestingness measures and rule-set aggregation.

use std::fmt;
use std::str::FromStr;

use crate::dataset::Dataset;
use crate::error::{Result, SharqError};
use crate::miner::Rule;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Measure {
    #[default]
    Is,
    Lift,
    Confidence,
    Support,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Aggregator {
    #[default]
    Max,
    Sum,
    Avg,
    Top2,
    Top3,
}

impl Measure {
    pub const ALL: [Measure; 4] = [
        Measure::Is,
        Measure::Lift,
        Measure::Confidence,
        Measure::Support,
    ];
}

impl Aggregator {
    pub const ALL: [Aggregator; 5] = [
        Aggregator::Max,
        Aggregator::Sum,
        Aggregator::Avg,
        Aggregator::Top2,
        Aggregator::Top3,
    ];
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::Is => "is",
            Measure::Lift => "lift",
            Measure::Confidence => "confidence",
            Measure::Support => "support",
        })
    }
}

impl FromStr for Measure {
    type Err = SharqError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "is" => Ok(Measure::Is),
            "lift" => Ok(Measure::Lift),
            "confidence" => Ok(Measure::Confidence),
            "support" => Ok(Measure::Support),
            _ => Err(SharqError::Config(format!("unknown measure {s:?}"))),
        }
    }
}

impl fmt::Display for Aggregator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Aggregator::Max => "max",
            Aggregator::Sum => "sum",
            Aggregator::Avg => "avg",
            Aggregator::Top2 => "top2",
            Aggregator::Top3 => "top3",
        })
    }
}

impl FromStr for Aggregator {
    type Err = SharqError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "max" => Ok(Aggregator::Max),
            "sum" => Ok(Aggregator::Sum),
            "avg" | "average" | "mean" => Ok(Aggregator::Avg),
            "top2" => Ok(Aggregator::Top2),
            "top3" => Ok(Aggregator::Top3),
            _ => Err(SharqError::Config(format!("unknown aggregator {s:?}"))),
        }
    }
}

/// The utility function of the game: how a rule is scored and how the scores
/// of a rule set are combined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasureConfig {
    pub measure: Measure,
    pub aggregator: Aggregator,
    /// Multiplier applied to every rule score.
    pub scale: f64,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        MeasureConfig {
            measure: Measure::Is,
            aggregator: Aggregator::Max,
            scale: 1.0,
        }
    }
}

impl MeasureConfig {
    pub fn new(measure: Measure, aggregator: Aggregator) -> Self {
        MeasureConfig {
            measure,
            aggregator,
            scale: 1.0,
        }
    }

    pub fn with_scale(mut self, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(SharqError::Config(format!(
                "scale must be positive, got {scale}"
            )));
        }
        self.scale = scale;
        Ok(self)
    }

    /// Score of a rule from its stored statistics.
    ///
    /// Under the IS measure an explicit `score` on the rule is used verbatim.
    pub fn rule_score(&self, rule: &Rule) -> Result<f64> {
        let raw = match self.measure {
            Measure::Is => match rule.score() {
                Some(s) => s,
                None => is_value(rule.support(), rule.lift()),
            },
            Measure::Lift => rule.lift(),
            Measure::Support => rule.support(),
            Measure::Confidence => rule.confidence().ok_or_else(|| {
                SharqError::UndefinedMeasure(format!(
                    "rule {rule} has no confidence; score it against a dataset first"
                ))
            })?,
        };
        Ok(raw * self.scale)
    }
}

/// `sqrt(support * lift)`.
pub fn is_value(support: f64, lift: f64) -> f64 {
    (support * lift).sqrt()
}

pub fn support(rule: &Rule, data: &Dataset) -> Result<f64> {
    set_support(rule.elements(), data)
}

fn set_support<'a, I>(elements: I, data: &Dataset) -> Result<f64>
where
    I: IntoIterator<Item = &'a crate::dataset::Element>,
{
    if data.is_empty() {
        return Err(SharqError::Precondition(
            "support over an empty dataset".into(),
        ));
    }
    Ok(data.count_matching(elements) as f64 / data.len() as f64)
}

pub fn lift(rule: &Rule, data: &Dataset) -> Result<f64> {
    let both = support(rule, data)?;
    let lhs = set_support(rule.lhs(), data)?;
    let rhs = set_support(rule.rhs(), data)?;
    if lhs == 0.0 || rhs == 0.0 {
        return Err(SharqError::UndefinedMeasure(format!(
            "lift of {rule}: a side never occurs in the data"
        )));
    }
    Ok(both / (lhs * rhs))
}

pub fn confidence(rule: &Rule, data: &Dataset) -> Result<f64> {
    let both = support(rule, data)?;
    let lhs = set_support(rule.lhs(), data)?;
    if lhs == 0.0 {
        return Err(SharqError::UndefinedMeasure(format!(
            "confidence of {rule}: the left-hand side never occurs in the data"
        )));
    }
    Ok(both / lhs)
}

pub fn is_score(rule: &Rule, data: &Dataset) -> Result<f64> {
    let lift = lift(rule, data)?;
    Ok(is_value(support(rule, data)?, lift))
}

/// Streaming aggregation of rule scores; keeps the three largest values seen.
#[derive(Clone, Copy, Debug)]
pub struct Accumulator {
    count: usize,
    sum: f64,
    top: [f64; 3],
}

impl Default for Accumulator {
    fn default() -> Self {
        Accumulator {
            count: 0,
            sum: 0.0,
            top: [f64::NEG_INFINITY; 3],
        }
    }
}

impl Accumulator {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        if x > self.top[0] {
            self.top = [x, self.top[0], self.top[1]];
        } else if x > self.top[1] {
            self.top = [self.top[0], x, self.top[1]];
        } else if x > self.top[2] {
            self.top[2] = x;
        }
    }

    pub fn finish(&self, agg: Aggregator) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        let top_k = |k: usize| self.top[..k.min(self.count)].iter().sum::<f64>();
        match agg {
            Aggregator::Max => self.top[0],
            Aggregator::Sum => self.sum,
            Aggregator::Avg => self.sum / self.count as f64,
            Aggregator::Top2 => top_k(2),
            Aggregator::Top3 => top_k(3),
        }
    }
}

/// Aggregated interestingness of a multiset of rule scores; 0 when empty.
pub fn aggregate(scores: &[f64], agg: Aggregator) -> f64 {
    aggregate_iter(scores.iter().copied(), agg)
}

pub fn aggregate_iter(scores: impl IntoIterator<Item = f64>, agg: Aggregator) -> f64 {
    let mut acc = Accumulator::default();
    for s in scores {
        acc.push(s);
    }
    acc.finish(agg)
}
