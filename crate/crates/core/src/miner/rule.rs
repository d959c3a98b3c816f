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

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::dataset::Element;
use crate::error::{Result, SharqError};

/// An association rule `lhs -> rhs` with its statistics.
///
/// Both sides are kept sorted; no two elements of a rule share an attribute.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    lhs: Vec<Element>,
    rhs: Vec<Element>,
    elements: Vec<Element>,
    support: f64,
    lift: f64,
    confidence: Option<f64>,
    score: Option<f64>,
}

impl Rule {
    pub fn new(
        mut lhs: Vec<Element>,
        mut rhs: Vec<Element>,
        support: f64,
        lift: f64,
    ) -> std::result::Result<Rule, String> {
        if lhs.is_empty() || rhs.is_empty() {
            return Err("both sides of a rule must be non-empty".into());
        }
        lhs.sort();
        rhs.sort();
        let mut elements: Vec<Element> = lhs.iter().chain(&rhs).cloned().collect();
        elements.sort();
        let mut attrs = HashSet::new();
        for e in &elements {
            if e.attribute.is_empty() || e.value.is_empty() {
                return Err(format!("element {e} has an empty attribute or value"));
            }
            if !attrs.insert(e.attribute.as_str()) {
                return Err(format!("attribute {:?} appears twice", e.attribute));
            }
        }
        if !(0.0..=1.0).contains(&support) {
            return Err(format!("support {support} outside [0, 1]"));
        }
        if !(lift >= 0.0 && lift.is_finite()) {
            return Err(format!("lift {lift} must be a non-negative number"));
        }
        Ok(Rule {
            lhs,
            rhs,
            elements,
            support,
            lift,
            confidence: None,
            score: None,
        })
    }

    pub fn with_confidence(mut self, confidence: f64) -> Self {
        self.confidence = Some(confidence);
        self
    }

    /// Attaches an externally computed interestingness score.
    pub fn with_score(mut self, score: f64) -> Self {
        self.score = Some(score);
        self
    }

    pub fn lhs(&self) -> &[Element] {
        &self.lhs
    }

    pub fn rhs(&self) -> &[Element] {
        &self.rhs
    }

    /// `lhs ∪ rhs`, sorted.
    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.elements.binary_search(e).is_ok()
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn lift(&self) -> f64 {
        self.lift
    }

    pub fn confidence(&self) -> Option<f64> {
        self.confidence
    }

    pub fn score(&self) -> Option<f64> {
        self.score
    }

    #[cfg(test)]
    fn key(&self) -> (&[Element], &[Element]) {
        (&self.lhs, &self.rhs)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |es: &[Element]| {
            es.iter()
                .map(|e| format!("({}, {})", e.attribute, e.value))
                .collect::<Vec<_>>()
                .join(", ")
        };
        write!(f, "{} -> {}", side(&self.lhs), side(&self.rhs))
    }
}

/// A deduplicated list of rules with its element universe and maximum length.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RuleSet {
    rules: Vec<Rule>,
    universe: BTreeSet<Element>,
    tau: usize,
}

impl RuleSet {
    /// Builds a rule set, dropping later duplicates of the same `(lhs, rhs)`.
    pub fn new(rules: Vec<Rule>) -> RuleSet {
        let mut seen = HashSet::new();
        let rules: Vec<Rule> = rules
            .into_iter()
            .filter(|r| seen.insert((r.lhs.clone(), r.rhs.clone())))
            .collect();
        let universe = rules
            .iter()
            .flat_map(|r| r.elements.iter().cloned())
            .collect();
        let tau = rules.iter().map(Rule::len).max().unwrap_or(0);
        RuleSet {
            rules,
            universe,
            tau,
        }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Every element that appears in some rule.
    pub fn universe(&self) -> &BTreeSet<Element> {
        &self.universe
    }

    /// Maximum rule length.
    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn filter(&self, mut keep: impl FnMut(&Rule) -> bool) -> RuleSet {
        RuleSet::new(self.rules.iter().filter(|r| keep(r)).cloned().collect())
    }

    /// Fills in missing confidences from a dataset.
    pub fn with_confidences(&self, data: &crate::dataset::Dataset) -> Result<RuleSet> {
        let rules = self
            .rules
            .iter()
            .map(|r| match r.confidence {
                Some(_) => Ok(r.clone()),
                None => Ok(r
                    .clone()
                    .with_confidence(crate::scoring::confidence(r, data)?)),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RuleSet::new(rules))
    }

    #[cfg(test)]
    pub(crate) fn contains_key(&self, rule: &Rule) -> bool {
        self.rules.iter().any(|r| r.key() == rule.key())
    }
}

/// Keeps rules whose lift deviates from independence by at least `threshold`
/// in either direction: `max(lift, 1/lift) >= threshold`.
pub fn filter_by_lift(rules: &RuleSet, threshold: f64) -> Result<RuleSet> {
    if threshold.is_nan() || threshold <= 1.0 {
        return Err(SharqError::Config(format!(
            "lift threshold must exceed 1, got {threshold}"
        )));
    }
    Ok(rules.filter(|r| {
        let lift = r.lift();
        lift == 0.0 || lift.max(1.0 / lift) >= threshold
    }))
}
