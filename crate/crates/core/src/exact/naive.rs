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

use super::{Game, PlayerId};
use crate::error::{Result, SharqError};
use crate::scoring::aggregate;

pub const DEFAULT_ORACLE_BUDGET: u128 = 1_000_000;

/// Mixed-radix walk over the valid coalitions of one player: for every other
/// attribute, either no element or exactly one of its elements.
pub struct ValidCoalitions {
    groups: Vec<Vec<PlayerId>>,
    // digit 0 means "attribute absent", d > 0 picks groups[i][d - 1]
    digits: Vec<usize>,
    done: bool,
}

impl Iterator for ValidCoalitions {
    type Item = Vec<PlayerId>;

    fn next(&mut self) -> Option<Vec<PlayerId>> {
        if self.done {
            return None;
        }
        let current = self
            .digits
            .iter()
            .zip(&self.groups)
            .filter(|(d, _)| **d > 0)
            .map(|(d, g)| g[d - 1])
            .collect();
        // advance the last attribute fastest
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.digits[i] < self.groups[i].len() {
                self.digits[i] += 1;
                break;
            }
            self.digits[i] = 0;
        }
        Some(current)
    }
}

impl Game {
    fn other_attribute_groups(&self, player: PlayerId) -> Vec<Vec<PlayerId>> {
        let own = self.attr_of(player);
        let mut groups: Vec<Vec<PlayerId>> = vec![Vec::new(); self.attributes().len()];
        for id in 0..self.n_players() as PlayerId {
            let a = self.attr_of(id);
            if a != own {
                groups[a as usize].push(id);
            }
        }
        groups.retain(|g| !g.is_empty());
        groups
    }

    pub fn valid_coalitions(&self, player: PlayerId) -> ValidCoalitions {
        let groups = self.other_attribute_groups(player);
        ValidCoalitions {
            digits: vec![0; groups.len()],
            groups,
            done: false,
        }
    }

    /// `prod over a != attr(e) of (|E_a| + 1)`, saturating.
    pub fn count_naive_coalitions(&self, player: PlayerId) -> u128 {
        self.other_attribute_groups(player)
            .iter()
            .fold(1u128, |acc, g| acc.saturating_mul(g.len() as u128 + 1))
    }

    /// SHARQ straight from its definition: every valid coalition, with `R_S`
    /// found through a plain exact-match table of the rules.
    pub fn naive_sharq(&self, player: PlayerId, budget: u128) -> Result<f64> {
        let count = self.count_naive_coalitions(player);
        if count > budget {
            return Err(SharqError::BudgetExceeded { count, budget });
        }
        let mut exact: BTreeMap<&[PlayerId], Vec<f64>> = BTreeMap::new();
        for rule in self.rules() {
            exact.entry(&rule.members).or_default().push(rule.score);
        }
        let agg = self.aggregator();
        let utility = |s: &[PlayerId]| exact.get(s).map(|v| aggregate(v, agg)).unwrap_or(0.0);
        let n = self.n_players();
        let mut total = 0.0;
        let mut with = Vec::new();
        for s in self.valid_coalitions(player) {
            with.clear();
            with.extend_from_slice(&s);
            with.push(player);
            with.sort_unstable();
            let diff = utility(&with) - utility(&s);
            if diff != 0.0 {
                total += factorial_ratio(s.len(), n) * diff;
            }
        }
        Ok(total)
    }
}

/// `s! (n - s - 1)! / n!` through log-factorials.
fn factorial_ratio(s: usize, n: usize) -> f64 {
    let ln_fact = |k: usize| (2..=k).map(|i| (i as f64).ln()).sum::<f64>();
    (ln_fact(s) + ln_fact(n - s - 1) - ln_fact(n)).exp()
}

#[cfg(test)]
mod tests {
    use super::factorial_ratio;

    #[test]
    fn factorial_ratio_matches_integer_arithmetic() {
        let fact = |k: u128| (1..=k).product::<u128>().max(1);
        for n in 1..20u128 {
            for s in 0..n {
                let exact = fact(s) * fact(n - s - 1);
                let expected = exact as f64 / fact(n) as f64;
                let got = factorial_ratio(s as usize, n as usize);
                assert!((got - expected).abs() <= 1e-12 * expected, "n={n} s={s}");
            }
        }
    }
}
