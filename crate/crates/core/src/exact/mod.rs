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

//! Exact SHARQ scores.
//!
//! Elements of the player set `E` are interned into dense ids ordered by
//! `(attribute, value)`, so a sorted id slice is the canonical form of a
//! coalition. A [`Game`] fixes `E`, the rules whose elements all lie in `E`,
//! their resolved scores and the Shapley weights; every algorithm in this
//! module runs against one.

mod index;
mod naive;
mod star;

use std::collections::{BTreeMap, BTreeSet};

use crate::dataset::Element;
use crate::error::{Result, SharqError};
use crate::miner::RuleSet;
use crate::scoring::{Aggregator, MeasureConfig};

pub use index::{AttributeCoalitionIndex, CoalitionRulesIndex, SharqIndex};
pub use naive::{ValidCoalitions, DEFAULT_ORACLE_BUDGET};

pub type PlayerId = u32;

/// A duplicate-free, canonically ordered set of elements.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coalition(Vec<Element>);

impl Coalition {
    pub fn new(members: impl IntoIterator<Item = Element>) -> Self {
        let mut members: Vec<Element> = members.into_iter().collect();
        members.sort();
        members.dedup();
        Coalition(members)
    }

    pub fn members(&self) -> &[Element] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.0.binary_search(e).is_ok()
    }
}

#[derive(Clone, Debug)]
pub(crate) struct GameRule {
    pub members: Box<[PlayerId]>,
    pub score: f64,
}

/// Coalition sizes for one element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoalitionStats {
    /// `|C(e, E)|`, saturating at `u128::MAX`.
    pub naive_count: u128,
    /// `|C*(e, E)|`.
    pub optimized_count: usize,
    /// Fraction of rules without an element of `attr(e)`.
    pub gamma: f64,
    pub tau: usize,
    pub rules: usize,
}

/// The cooperative game behind SHARQ: players, rules and the utility function.
#[derive(Clone, Debug)]
pub struct Game {
    players: Vec<Element>,
    attr_of: Vec<u32>,
    attributes: Vec<String>,
    rules: Vec<GameRule>,
    weights: Vec<f64>,
    aggregator: Aggregator,
    tau: usize,
}

impl Game {
    /// Players are `elements`; rules with an element outside it are ignored.
    pub fn new(elements: &BTreeSet<Element>, rules: &RuleSet, cfg: &MeasureConfig) -> Result<Game> {
        let players: Vec<Element> = elements.iter().cloned().collect();
        let mut attributes: Vec<String> = players.iter().map(|e| e.attribute.clone()).collect();
        attributes.dedup();
        let attr_of = players
            .iter()
            .map(|e| attributes.binary_search(&e.attribute).unwrap() as u32)
            .collect();

        let mut game_rules = Vec::new();
        'rules: for rule in rules.rules() {
            let mut members = Vec::with_capacity(rule.len());
            for e in rule.elements() {
                match players.binary_search(e) {
                    Ok(id) => members.push(id as PlayerId),
                    Err(_) => continue 'rules,
                }
            }
            game_rules.push(GameRule {
                members: members.into_boxed_slice(),
                score: cfg.rule_score(rule)?,
            });
        }
        let tau = game_rules
            .iter()
            .map(|r| r.members.len())
            .max()
            .unwrap_or(0);
        Ok(Game {
            weights: shapley_weights(players.len()),
            players,
            attr_of,
            attributes,
            rules: game_rules,
            aggregator: cfg.aggregator,
            tau,
        })
    }

    /// The game over every element that appears in some rule.
    pub fn over_rules(rules: &RuleSet, cfg: &MeasureConfig) -> Result<Game> {
        Game::new(rules.universe(), rules, cfg)
    }

    pub fn n_players(&self) -> usize {
        self.players.len()
    }

    pub fn players(&self) -> &[Element] {
        &self.players
    }

    pub fn player(&self, id: PlayerId) -> &Element {
        &self.players[id as usize]
    }

    pub fn player_id(&self, e: &Element) -> Result<PlayerId> {
        self.players
            .binary_search(e)
            .map(|i| i as PlayerId)
            .map_err(|_| SharqError::Lookup(format!("element {e} is not in the player set")))
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub(crate) fn attr_of(&self, id: PlayerId) -> u32 {
        self.attr_of[id as usize]
    }

    pub(crate) fn rules(&self) -> &[GameRule] {
        &self.rules
    }

    /// Number of rules that take part in the game.
    pub fn n_rules(&self) -> usize {
        self.rules.len()
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn aggregator(&self) -> Aggregator {
        self.aggregator
    }

    /// `|S|! (|E| - |S| - 1)! / |E|!` for a coalition of `size` elements.
    pub fn shapley_weight(&self, size: usize) -> f64 {
        self.weights[size]
    }

    pub fn coalition(&self, ids: &[PlayerId]) -> Coalition {
        Coalition(ids.iter().map(|&i| self.player(i).clone()).collect())
    }

    pub fn stats(&self, player: PlayerId) -> CoalitionStats {
        let attr = self.attr_of(player);
        let lacking = self
            .rules
            .iter()
            .filter(|r| r.members.iter().all(|&m| self.attr_of(m) != attr))
            .count();
        CoalitionStats {
            naive_count: self.count_naive_coalitions(player),
            optimized_count: self.optimized_coalitions(player).len(),
            gamma: if self.rules.is_empty() {
                1.0
            } else {
                lacking as f64 / self.rules.len() as f64
            },
            tau: self.tau,
            rules: self.rules.len(),
        }
    }
}

/// Weights by coalition size via `w(s + 1) = w(s) (s + 1) / (n - s - 1)`, `w(0) = 1/n`.
fn shapley_weights(n: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(n);
    if n == 0 {
        return w;
    }
    w.push(1.0 / n as f64);
    for s in 0..n.saturating_sub(1) {
        let next = w[s] * (s + 1) as f64 / (n - s - 1) as f64;
        w.push(next);
    }
    w
}

fn game_and_player(
    e: &Element,
    elements: &BTreeSet<Element>,
    rules: &RuleSet,
    cfg: &MeasureConfig,
) -> Result<(Game, PlayerId)> {
    if !elements.contains(e) {
        return Err(SharqError::Precondition(format!(
            "element {e} is not in the element set"
        )));
    }
    let game = Game::new(elements, rules, cfg)?;
    let id = game.player_id(e)?;
    Ok((game, id))
}

/// Every valid coalition for `e` over `elements`, including the empty one.
pub fn valid_coalitions(e: &Element, elements: &BTreeSet<Element>) -> Result<Vec<Coalition>> {
    let (game, p) = game_and_player(e, elements, &RuleSet::default(), &MeasureConfig::default())?;
    Ok(game
        .valid_coalitions(p)
        .map(|ids| game.coalition(&ids))
        .collect())
}

pub fn count_naive_coalitions(e: &Element, elements: &BTreeSet<Element>) -> Result<u128> {
    let (game, p) = game_and_player(e, elements, &RuleSet::default(), &MeasureConfig::default())?;
    Ok(game.count_naive_coalitions(p))
}

/// SHARQ by enumerating every valid coalition; refuses once the count exceeds `budget`.
pub fn naive_sharq(
    e: &Element,
    elements: &BTreeSet<Element>,
    rules: &RuleSet,
    cfg: &MeasureConfig,
    budget: u128,
) -> Result<f64> {
    let (game, p) = game_and_player(e, elements, rules, cfg)?;
    game.naive_sharq(p, budget)
}

pub fn optimized_coalitions(
    e: &Element,
    elements: &BTreeSet<Element>,
    rules: &RuleSet,
) -> Result<BTreeSet<Coalition>> {
    let (game, p) = game_and_player(e, elements, rules, &MeasureConfig::default())?;
    Ok(game
        .optimized_coalitions(p)
        .iter()
        .map(|ids| game.coalition(ids))
        .collect())
}

/// Single-element SHARQ* over the optimized coalitions.
pub fn sharq_star_single(
    e: &Element,
    elements: &BTreeSet<Element>,
    rules: &RuleSet,
    cfg: &MeasureConfig,
) -> Result<f64> {
    let (game, p) = game_and_player(e, elements, rules, cfg)?;
    Ok(game.sharq_star_single(p))
}

/// Multi-element SHARQ* for every element of `elements`.
pub fn sharq_star_multi(
    elements: &BTreeSet<Element>,
    rules: &RuleSet,
    cfg: &MeasureConfig,
) -> Result<BTreeMap<Element, f64>> {
    if elements.is_empty() {
        return Ok(BTreeMap::new());
    }
    let game = Game::new(elements, rules, cfg)?;
    let index = game.build_indices();
    Ok(game
        .players()
        .iter()
        .cloned()
        .zip(index.score_all())
        .collect())
}

pub fn coalition_stats(
    e: &Element,
    elements: &BTreeSet<Element>,
    rules: &RuleSet,
) -> Result<CoalitionStats> {
    let (game, p) = game_and_player(e, elements, rules, &MeasureConfig::default())?;
    Ok(game.stats(p))
}
