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

use rustc_hash::FxHashSet;

use super::index::{calc_sharq, CoalitionRulesIndex, SharqIndex};
use super::{Game, PlayerId};

impl Game {
    /// One pass over the rules: index each rule under its element set and
    /// collect `C*(e, E)` for `player`, returned in canonical order.
    fn single_pass(&self, player: PlayerId) -> (CoalitionRulesIndex<'_>, Vec<Box<[PlayerId]>>) {
        let attr = self.attr_of(player);
        let mut index = CoalitionRulesIndex::with_capacity(self.rules().len());
        let mut found: FxHashSet<Box<[PlayerId]>> = FxHashSet::default();
        let mut buf: Vec<PlayerId> = Vec::with_capacity(self.tau());
        let mut add = |buf: &Vec<PlayerId>| {
            if !found.contains(buf.as_slice()) {
                found.insert(buf.as_slice().into());
            }
        };

        for (id, rule) in self.rules().iter().enumerate() {
            index.insert(&rule.members, id as u32, rule.score);
            let members = &rule.members;
            match members.iter().position(|&m| self.attr_of(m) == attr) {
                // Only the rule minus its clashing element avoids attr(e).
                Some(clash) => {
                    buf.clear();
                    buf.extend_from_slice(&members[..clash]);
                    buf.extend_from_slice(&members[clash + 1..]);
                    add(&buf);
                }
                None => {
                    for drop in 0..=members.len() {
                        buf.clear();
                        buf.extend(
                            members
                                .iter()
                                .enumerate()
                                .filter(|(pos, _)| *pos != drop)
                                .map(|(_, m)| *m),
                        );
                        add(&buf);
                    }
                }
            }
        }
        let mut coalitions: Vec<Box<[PlayerId]>> = found.into_iter().collect();
        coalitions.sort_unstable();
        (index, coalitions)
    }

    /// `C*(e, E)` in canonical order.
    pub fn optimized_coalitions(&self, player: PlayerId) -> Vec<Box<[PlayerId]>> {
        self.single_pass(player).1
    }

    /// Single-element SHARQ*: builds its own indices, then sums over `C*(e, E)`.
    pub fn sharq_star_single(&self, player: PlayerId) -> f64 {
        let (index, coalitions) = self.single_pass(player);
        calc_sharq(self, player, &index, coalitions.iter().map(|c| &**c))
    }

    /// Builds the shared indices of the multi-element algorithm.
    pub fn build_indices(&self) -> SharqIndex<'_> {
        SharqIndex::build(self)
    }
}
