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

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::{Coalition, Game, PlayerId};
use crate::scoring::Accumulator;

#[derive(Clone, Debug)]
struct RuleGroup {
    scores: Accumulator,
    ids: Vec<u32>,
}

/// Coalition key -> rules whose element set equals the key exactly.
///
/// Keys borrow the rules' member slices from the [`Game`].
#[derive(Clone, Debug, Default)]
pub struct CoalitionRulesIndex<'g> {
    entries: FxHashMap<&'g [PlayerId], RuleGroup>,
}

impl<'g> CoalitionRulesIndex<'g> {
    pub(crate) fn with_capacity(n: usize) -> Self {
        CoalitionRulesIndex {
            entries: FxHashMap::with_capacity_and_hasher(n, Default::default()),
        }
    }

    pub(crate) fn insert(&mut self, key: &'g [PlayerId], rule: u32, score: f64) {
        let group = self.entries.entry(key).or_insert_with(|| RuleGroup {
            scores: Accumulator::default(),
            ids: Vec::new(),
        });
        group.scores.push(score);
        group.ids.push(rule);
    }

    /// Indexes every rule of the game under its own element set.
    pub fn build(game: &'g Game) -> Self {
        let mut index = Self::with_capacity(game.rules().len());
        for (id, rule) in game.rules().iter().enumerate() {
            index.insert(&rule.members, id as u32, rule.score);
        }
        index
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Game-rule ids stored under `key`; empty for an absent key.
    pub fn rules_for(&self, key: &[PlayerId]) -> &[u32] {
        self.entries
            .get(key)
            .map(|g| g.ids.as_slice())
            .unwrap_or(&[])
    }

    /// `I(R_S)`: the aggregated score of the rules stored under `key`, 0 if none.
    pub fn utility(&self, key: &[PlayerId], game: &Game) -> f64 {
        self.entries
            .get(key)
            .map(|g| g.scores.finish(game.aggregator()))
            .unwrap_or(0.0)
    }

    pub fn keys(&self) -> impl Iterator<Item = &[PlayerId]> + '_ {
        self.entries.keys().copied()
    }
}

/// Optimized coalitions shared by all elements of an attribute.
///
/// `coalitions` is sorted canonically; each per-attribute list holds indexes
/// into it in ascending (hence canonical) order.
#[derive(Clone, Debug, Default)]
pub struct AttributeCoalitionIndex {
    coalitions: Vec<Box<[PlayerId]>>,
    by_attribute: Vec<Vec<u32>>,
}

impl AttributeCoalitionIndex {
    /// Coalitions for attribute id `attr`, in canonical order.
    pub fn for_attribute(&self, attr: u32) -> impl ExactSizeIterator<Item = &[PlayerId]> + '_ {
        self.by_attribute[attr as usize]
            .iter()
            .map(move |&i| &*self.coalitions[i as usize])
    }

    /// The `i`-th coalition of attribute `attr`, in canonical order.
    pub fn get(&self, attr: u32, i: usize) -> &[PlayerId] {
        &self.coalitions[self.by_attribute[attr as usize][i] as usize]
    }

    pub fn count_for(&self, attr: u32) -> usize {
        self.by_attribute[attr as usize].len()
    }

    /// Number of distinct coalitions across all attributes.
    pub fn n_coalitions(&self) -> usize {
        self.coalitions.len()
    }

    pub fn coalitions_for(&self, game: &Game, attribute: &str) -> Vec<Coalition> {
        match game
            .attributes()
            .binary_search_by(|a| a.as_str().cmp(attribute))
        {
            Ok(attr) => self
                .for_attribute(attr as u32)
                .map(|ids| game.coalition(ids))
                .collect(),
            Err(_) => Vec::new(),
        }
    }
}

/// Both indices of the multi-element algorithm, built in one pass over the rules.
#[derive(Clone, Debug)]
pub struct SharqIndex<'g> {
    game: &'g Game,
    rules: CoalitionRulesIndex<'g>,
    coalitions: AttributeCoalitionIndex,
}

impl<'g> SharqIndex<'g> {
    pub(crate) fn build(game: &'g Game) -> Self {
        let n_attrs = game.attributes().len();
        let mut rules = CoalitionRulesIndex::with_capacity(game.rules().len());
        let mut interned: FxHashMap<Box<[PlayerId]>, u32> = FxHashMap::default();
        let mut coalitions: Vec<Box<[PlayerId]>> = Vec::new();
        let mut by_attribute: Vec<Vec<u32>> = vec![Vec::new(); n_attrs];
        let mut in_coalition = vec![false; n_attrs];
        let mut buf: Vec<PlayerId> = Vec::with_capacity(game.tau());

        for (id, rule) in game.rules().iter().enumerate() {
            rules.insert(&rule.members, id as u32, rule.score);
            let k = rule.members.len();
            // C_r: the rule's element set, then the set minus each element.
            for drop in 0..=k {
                buf.clear();
                buf.extend(
                    rule.members
                        .iter()
                        .enumerate()
                        .filter(|(pos, _)| *pos != drop)
                        .map(|(_, m)| *m),
                );
                if interned.contains_key(buf.as_slice()) {
                    continue;
                }
                let cid = coalitions.len() as u32;
                let key: Box<[PlayerId]> = buf.as_slice().into();
                interned.insert(key.clone(), cid);
                coalitions.push(key);
                for &m in &buf {
                    in_coalition[game.attr_of(m) as usize] = true;
                }
                for (attr, list) in by_attribute.iter_mut().enumerate() {
                    if !in_coalition[attr] {
                        list.push(cid);
                    }
                }
                for &m in &buf {
                    in_coalition[game.attr_of(m) as usize] = false;
                }
            }
        }

        // Renumber coalitions in canonical order.
        let mut order: Vec<u32> = (0..coalitions.len() as u32).collect();
        order.sort_unstable_by(|&a, &b| coalitions[a as usize].cmp(&coalitions[b as usize]));
        let mut rank = vec![0u32; order.len()];
        for (new, &old) in order.iter().enumerate() {
            rank[old as usize] = new as u32;
        }
        let mut slots: Vec<Option<Box<[PlayerId]>>> = coalitions.into_iter().map(Some).collect();
        let coalitions: Vec<Box<[PlayerId]>> = order
            .iter()
            .map(|&old| slots[old as usize].take().unwrap())
            .collect();
        for list in &mut by_attribute {
            for c in list.iter_mut() {
                *c = rank[*c as usize];
            }
            list.sort_unstable();
        }

        SharqIndex {
            game,
            rules,
            coalitions: AttributeCoalitionIndex {
                coalitions,
                by_attribute,
            },
        }
    }

    pub fn game(&self) -> &'g Game {
        self.game
    }

    pub fn rules_index(&self) -> &CoalitionRulesIndex<'g> {
        &self.rules
    }

    pub fn coalition_index(&self) -> &AttributeCoalitionIndex {
        &self.coalitions
    }

    /// `C*(e, E)` for a player, in canonical order.
    pub fn optimized_for(
        &self,
        player: PlayerId,
    ) -> impl ExactSizeIterator<Item = &[PlayerId]> + '_ {
        self.coalitions.for_attribute(self.game.attr_of(player))
    }

    pub fn score(&self, player: PlayerId) -> f64 {
        calc_sharq(self.game, player, &self.rules, self.optimized_for(player))
    }

    /// Scores for every player, indexed by player id.
    pub fn score_all(&self) -> Vec<f64> {
        (0..self.game.n_players() as PlayerId)
            .map(|p| self.score(p))
            .collect()
    }

    /// As [`score_all`](Self::score_all), spread over the current rayon pool.
    pub fn par_score_all(&self) -> Vec<f64> {
        (0..self.game.n_players() as PlayerId)
            .into_par_iter()
            .map(|p| self.score(p))
            .collect()
    }

    /// Weighted utility difference of one coalition for `player`.
    pub fn term(&self, player: PlayerId, coalition: &[PlayerId], buf: &mut Vec<PlayerId>) -> f64 {
        coalition_term(self.game, player, &self.rules, coalition, buf)
    }
}

/// Sum of weighted utility differences over `coalitions`, in the order given.
pub(crate) fn calc_sharq<'c>(
    game: &Game,
    player: PlayerId,
    index: &CoalitionRulesIndex<'_>,
    coalitions: impl Iterator<Item = &'c [PlayerId]>,
) -> f64 {
    let mut buf = Vec::with_capacity(game.tau() + 1);
    let mut total = 0.0;
    for s in coalitions {
        total += coalition_term(game, player, index, s, &mut buf);
    }
    total
}

pub(crate) fn coalition_term(
    game: &Game,
    player: PlayerId,
    index: &CoalitionRulesIndex<'_>,
    coalition: &[PlayerId],
    buf: &mut Vec<PlayerId>,
) -> f64 {
    buf.clear();
    let at = coalition.partition_point(|&m| m < player);
    buf.extend_from_slice(&coalition[..at]);
    buf.push(player);
    buf.extend_from_slice(&coalition[at..]);
    let with = index.utility(buf, game);
    let without = index.utility(coalition, game);
    game.shapley_weight(coalition.len()) * (with - without)
}
