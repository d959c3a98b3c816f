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

//! Sampling estimators of SHARQ over the optimized coalition set.
//!
//! Every scheme draws coalitions from `C*(e, E)` and averages
//! `w(|S|) / p(S) * (I(R_{S+e}) - I(R_S))`, so each estimate targets the exact
//! score. A budget that covers `C*` falls back to exhaustive enumeration.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dataset::Element;
use crate::error::{Result, SharqError};
use crate::exact::{Game, PlayerId, SharqIndex};
use crate::miner::RuleSet;
use crate::scoring::MeasureConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    Kernel,
    MonteCarlo,
    Antithetic,
    Stratified,
    Sobol,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::Kernel,
        Scheme::MonteCarlo,
        Scheme::Antithetic,
        Scheme::Stratified,
        Scheme::Sobol,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Kernel => "kernel",
            Scheme::MonteCarlo => "mc",
            Scheme::Antithetic => "antithetic",
            Scheme::Stratified => "stratified",
            Scheme::Sobol => "sobol",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = SharqError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kernel" => Ok(Scheme::Kernel),
            "mc" | "monte_carlo" | "monte-carlo" => Ok(Scheme::MonteCarlo),
            "antithetic" => Ok(Scheme::Antithetic),
            "stratified" => Ok(Scheme::Stratified),
            "sobol" => Ok(Scheme::Sobol),
            _ => Err(SharqError::Config(format!("unknown sampling scheme `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApproxConfig {
    pub scheme: Scheme,
    /// Coalition samples per element.
    pub budget: usize,
    pub seed: u64,
}

impl ApproxConfig {
    pub fn new(scheme: Scheme, budget: usize, seed: u64) -> Result<Self> {
        if budget == 0 {
            return Err(SharqError::Config(
                "sampling budget must be at least 1".into(),
            ));
        }
        Ok(ApproxConfig {
            scheme,
            budget,
            seed,
        })
    }

    /// Budget actually spent; antithetic draws come in pairs.
    pub fn effective_budget(&self) -> usize {
        match self.scheme {
            Scheme::Antithetic => self.budget.div_ceil(2) * 2,
            _ => self.budget,
        }
    }
}

/// Shapley kernel weight `(n - 1) / (C(n, s) s (n - s))` of a coalition of size `s`.
pub fn kernel_weight(n: usize, s: usize) -> Result<f64> {
    if n < 2 || s == 0 || s >= n {
        return Err(SharqError::Precondition(format!(
            "kernel weight is infinite or undefined for n={n}, s={s}"
        )));
    }
    Ok((n - 1) as f64 / (binomial(n, s) * s as f64 * (n - s) as f64))
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Coalition positions of one attribute's `C*` list, grouped by size.
#[derive(Clone, Debug, Default)]
struct Strata {
    sizes: Vec<usize>,
    members: Vec<Vec<u32>>,
}

/// Sampling estimators sharing the indices of the multi-element algorithm.
pub struct Approximator<'i, 'g> {
    index: &'i SharqIndex<'g>,
    strata: Vec<Strata>,
}

impl<'i, 'g> Approximator<'i, 'g> {
    pub fn new(index: &'i SharqIndex<'g>) -> Self {
        let game = index.game();
        let coalitions = index.coalition_index();
        let strata = (0..game.attributes().len() as u32)
            .map(|attr| {
                let mut by_size: std::collections::BTreeMap<usize, Vec<u32>> = Default::default();
                for (i, c) in coalitions.for_attribute(attr).enumerate() {
                    by_size.entry(c.len()).or_default().push(i as u32);
                }
                let (sizes, members) = by_size.into_iter().unzip();
                Strata { sizes, members }
            })
            .collect();
        Approximator { index, strata }
    }

    pub fn game(&self) -> &'g Game {
        self.index.game()
    }

    /// `|C*(e, E)|` for a player.
    pub fn optimized_count(&self, player: PlayerId) -> usize {
        self.index
            .coalition_index()
            .count_for(self.index.game().attr_of(player))
    }

    /// Estimate for one player.
    pub fn estimate(&self, player: PlayerId, cfg: &ApproxConfig) -> f64 {
        let game = self.index.game();
        let attr = game.attr_of(player);
        let total = self.index.coalition_index().count_for(attr);
        if total == 0 {
            return 0.0;
        }
        if cfg.effective_budget() >= total {
            return self.index.score(player);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, player));
        let mut draw = Draw {
            index: self.index,
            player,
            attr,
            buf: Vec::with_capacity(game.tau() + 1),
        };
        let strata = &self.strata[attr as usize];
        match cfg.scheme {
            Scheme::MonteCarlo => monte_carlo(&mut draw, total, cfg.budget, &mut rng),
            Scheme::Antithetic => antithetic(&mut draw, total, cfg.effective_budget(), &mut rng),
            Scheme::Sobol => sobol(&mut draw, total, cfg.budget, &mut rng),
            Scheme::Stratified => stratified(&mut draw, strata, cfg.budget, &mut rng),
            Scheme::Kernel => kernel(&mut draw, strata, game.n_players(), cfg.budget, &mut rng),
        }
    }

    /// Estimates for every player, indexed by player id.
    pub fn estimate_all(&self, cfg: &ApproxConfig) -> Vec<f64> {
        (0..self.game().n_players() as PlayerId)
            .into_par_iter()
            .map(|p| self.estimate(p, cfg))
            .collect()
    }
}

struct Draw<'a, 'g> {
    index: &'a SharqIndex<'g>,
    player: PlayerId,
    attr: u32,
    buf: Vec<PlayerId>,
}

impl Draw<'_, '_> {
    /// Weighted utility difference of the `i`-th coalition.
    fn term(&mut self, i: usize) -> f64 {
        let coalition = self.index.coalition_index().get(self.attr, i);
        self.index.term(self.player, coalition, &mut self.buf)
    }
}

fn mix_seed(seed: u64, player: PlayerId) -> u64 {
    seed ^ (player as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn monte_carlo(draw: &mut Draw, total: usize, budget: usize, rng: &mut ChaCha8Rng) -> f64 {
    let sum: f64 = (0..budget)
        .map(|_| draw.term(rng.gen_range(0..total)))
        .sum();
    total as f64 * sum / budget as f64
}

/// Pairs each uniform draw `i` with its mirror `total - 1 - i`.
fn antithetic(draw: &mut Draw, total: usize, budget: usize, rng: &mut ChaCha8Rng) -> f64 {
    let pairs = budget / 2;
    let mut sum = 0.0;
    for _ in 0..pairs {
        let i = rng.gen_range(0..total);
        sum += draw.term(i) + draw.term(total - 1 - i);
    }
    total as f64 * sum / (2 * pairs) as f64
}

/// Base-2 radical inverse of `i`.
fn van_der_corput(mut i: u64) -> f64 {
    let mut result = 0.0;
    let mut f = 0.5;
    while i > 0 {
        if i & 1 == 1 {
            result += f;
        }
        i >>= 1;
        f *= 0.5;
    }
    result
}

/// Van der Corput points under a random shift modulo 1.
fn sobol(draw: &mut Draw, total: usize, budget: usize, rng: &mut ChaCha8Rng) -> f64 {
    let shift: f64 = rng.gen();
    let mut sum = 0.0;
    for k in 0..budget {
        let u = (van_der_corput(k as u64 + 1) + shift).fract();
        let i = ((u * total as f64) as usize).min(total - 1);
        sum += draw.term(i);
    }
    total as f64 * sum / budget as f64
}

/// Equal allocation over size strata. With fewer samples than strata, a random
/// subset of strata gets one sample each and is scaled up.
fn stratified(draw: &mut Draw, strata: &Strata, budget: usize, rng: &mut ChaCha8Rng) -> f64 {
    let n_strata = strata.members.len();
    let (chosen, scale): (Vec<usize>, f64) = if budget >= n_strata {
        ((0..n_strata).collect(), 1.0)
    } else {
        let picked = rand::seq::index::sample(rng, n_strata, budget).into_vec();
        (picked, n_strata as f64 / budget as f64)
    };
    let base = budget / chosen.len();
    let extra = budget % chosen.len();
    let mut estimate = 0.0;
    for (rank, &h) in chosen.iter().enumerate() {
        let members = &strata.members[h];
        let quota = base + usize::from(rank < extra);
        if quota >= members.len() {
            estimate += members.iter().map(|&i| draw.term(i as usize)).sum::<f64>();
        } else {
            let sum: f64 = (0..quota)
                .map(|_| draw.term(members[rng.gen_range(0..members.len())] as usize))
                .sum();
            estimate += members.len() as f64 * sum / quota as f64;
        }
    }
    scale * estimate
}

/// Coalitions drawn in proportion to their Shapley kernel weight: a size is
/// picked with probability proportional to `kernel_weight(n, s) * |C*_s|`,
/// then a coalition uniformly within it.
fn kernel(draw: &mut Draw, strata: &Strata, n: usize, budget: usize, rng: &mut ChaCha8Rng) -> f64 {
    // the empty coalition has infinite kernel weight; give it the largest finite one
    let cap = kernel_weight(n, 1).unwrap_or(1.0);
    let per_coalition: Vec<f64> = strata
        .sizes
        .iter()
        .map(|&s| kernel_weight(n, s).unwrap_or(cap))
        .collect();
    let mass: f64 = per_coalition
        .iter()
        .zip(&strata.members)
        .map(|(k, m)| k * m.len() as f64)
        .sum();
    let mut cumulative = Vec::with_capacity(per_coalition.len());
    let mut acc = 0.0;
    for (k, m) in per_coalition.iter().zip(&strata.members) {
        acc += k * m.len() as f64 / mass;
        cumulative.push(acc);
    }
    let mut sum = 0.0;
    for _ in 0..budget {
        let u: f64 = rng.gen();
        let h = cumulative
            .partition_point(|&c| c <= u)
            .min(per_coalition.len() - 1);
        let members = &strata.members[h];
        let i = members[rng.gen_range(0..members.len())] as usize;
        sum += draw.term(i) * mass / per_coalition[h];
    }
    sum / budget as f64
}

/// Estimate of SHARQ for `e` with the players `elements` and rules `rules`.
pub fn approx_sharq(
    e: &Element,
    elements: &BTreeSet<Element>,
    rules: &RuleSet,
    cfg: &MeasureConfig,
    acfg: &ApproxConfig,
) -> Result<f64> {
    if !elements.contains(e) {
        return Err(SharqError::Precondition(format!(
            "element {e} is not in the element set"
        )));
    }
    let game = Game::new(elements, rules, cfg)?;
    let player = game.player_id(e)?;
    let index = game.build_indices();
    Ok(Approximator::new(&index).estimate(player, acfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::sharq_star_single;
    use crate::exact::tests::{arb_rules, el, rule};
    use crate::miner::Rule;
    use crate::scoring::{Aggregator, Measure};
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, ProptestConfig};

    fn cfg(agg: Aggregator) -> MeasureConfig {
        MeasureConfig::new(Measure::Is, agg)
    }

    /// Rules over 6 attributes with 3 values each, seeded.
    fn seeded_rules(seed: u64, n_rules: usize) -> RuleSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rules = Vec::new();
        for _ in 0..n_rules {
            let len = rng.gen_range(2..=4);
            let attrs = rand::seq::index::sample(&mut rng, 6, len).into_vec();
            let elems: Vec<Element> = attrs
                .iter()
                .map(|a| el(&format!("a{a}"), &format!("v{}", rng.gen_range(0..3))))
                .collect();
            let split = rng.gen_range(1..len);
            let score = rng.gen_range(0.1..2.0);
            rules.push(
                Rule::new(elems[..split].to_vec(), elems[split..].to_vec(), 0.1, 2.0)
                    .unwrap()
                    .with_score(score),
            );
        }
        RuleSet::new(rules)
    }

    #[test]
    fn kernel_weight_values() {
        assert!((kernel_weight(6, 2).unwrap() - 1.0 / 24.0).abs() < 1e-15);
        assert_eq!(kernel_weight(2, 1).unwrap(), 0.5);
        for n in 2..30 {
            for s in 1..n {
                let a = kernel_weight(n, s).unwrap();
                let b = kernel_weight(n, n - s).unwrap();
                assert!((a - b).abs() <= 1e-12 * a);
            }
        }
        assert!(kernel_weight(6, 0).is_err());
        assert!(kernel_weight(6, 6).is_err());
    }

    #[test]
    fn budget_must_be_positive() {
        assert!(ApproxConfig::new(Scheme::Kernel, 0, 1).is_err());
        let a = ApproxConfig::new(Scheme::Antithetic, 5, 1).unwrap();
        assert_eq!(a.effective_budget(), 6);
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert_eq!("monte_carlo".parse::<Scheme>().unwrap(), Scheme::MonteCarlo);
        assert!("bogus".parse::<Scheme>().is_err());
    }

    #[test]
    fn monte_carlo_is_unbiased_on_three_players() {
        let rs = RuleSet::new(vec![
            rule(&[("e", "1")], &[("f", "1")], 2.0),
            rule(&[("f", "1")], &[("g", "1")], 1.0),
        ]);
        let e = el("e", "1");
        let runs = 400;
        let mean: f64 = (0..runs)
            .map(|seed| {
                let a = ApproxConfig::new(Scheme::MonteCarlo, 2, seed).unwrap();
                approx_sharq(&e, rs.universe(), &rs, &cfg(Aggregator::Max), &a).unwrap()
            })
            .sum::<f64>()
            / runs as f64;
        assert!(mean.abs() < 0.05, "mean {mean}");
    }

    fn estimates(rs: &RuleSet, scheme: Scheme, budget: usize, seeds: u64) -> Vec<Vec<f64>> {
        let game = Game::over_rules(rs, &cfg(Aggregator::Max)).unwrap();
        let index = game.build_indices();
        let approx = Approximator::new(&index);
        (0..seeds)
            .map(|seed| approx.estimate_all(&ApproxConfig::new(scheme, budget, seed).unwrap()))
            .collect()
    }

    #[test]
    fn unbiased_schemes_converge_to_exact() {
        let rs = seeded_rules(7, 40);
        let game = Game::over_rules(&rs, &cfg(Aggregator::Max)).unwrap();
        let exact = game.build_indices().score_all();
        for scheme in [
            Scheme::MonteCarlo,
            Scheme::Stratified,
            Scheme::Kernel,
            Scheme::Sobol,
        ] {
            let runs = estimates(&rs, scheme, 8, 300);
            for p in 0..exact.len() {
                let xs: Vec<f64> = runs.iter().map(|r| r[p]).collect();
                let m = xs.iter().sum::<f64>() / xs.len() as f64;
                let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
                let se = (var / xs.len() as f64).sqrt();
                assert!(
                    (m - exact[p]).abs() <= 3.0 * se + 1e-9,
                    "{scheme} player {p}: mean {m} exact {} se {se}",
                    exact[p]
                );
            }
        }
    }

    #[test]
    fn antithetic_variance_is_not_worse_than_monte_carlo() {
        let mut anti = 0.0;
        let mut mc = 0.0;
        for inst in 0..5 {
            let rs = seeded_rules(100 + inst, 60);
            for (scheme, acc) in [
                (Scheme::Antithetic, &mut anti),
                (Scheme::MonteCarlo, &mut mc),
            ] {
                let runs = estimates(&rs, scheme, 10, 200);
                for p in 0..runs[0].len() {
                    let xs: Vec<f64> = runs.iter().map(|r| r[p]).collect();
                    let m = xs.iter().sum::<f64>() / xs.len() as f64;
                    *acc += xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64;
                }
            }
        }
        assert!(anti <= 1.2 * mc, "antithetic {anti} vs monte carlo {mc}");
    }

    #[test]
    fn null_player_scores_zero() {
        let rs = RuleSet::new(vec![rule(&[("a", "1")], &[("b", "1")], 1.0)]);
        let players: BTreeSet<Element> = [el("a", "1"), el("b", "1"), el("c", "1")]
            .into_iter()
            .collect();
        let a = ApproxConfig::new(Scheme::Kernel, 1, 0).unwrap();
        let got = approx_sharq(&el("c", "1"), &players, &rs, &cfg(Aggregator::Max), &a).unwrap();
        assert_eq!(got, 0.0);
        let none = approx_sharq(
            &el("c", "1"),
            &players,
            &RuleSet::default(),
            &cfg(Aggregator::Max),
            &a,
        );
        assert_eq!(none.unwrap(), 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn exhaustive_budget_is_exact(rs in arb_rules(5, 3, 15, 4), seed in any::<u64>()) {
            let e = rs.universe();
            for x in e {
                let exact = sharq_star_single(x, e, &rs, &cfg(Aggregator::Sum)).unwrap();
                for scheme in Scheme::ALL {
                    let a = ApproxConfig::new(scheme, 1000, seed).unwrap();
                    let got = approx_sharq(x, e, &rs, &cfg(Aggregator::Sum), &a).unwrap();
                    prop_assert!((got - exact).abs() <= 1e-9);
                }
            }
        }

        #[test]
        fn estimates_are_deterministic(seed in any::<u64>(), budget in 1usize..6) {
            let rs = seeded_rules(3, 30);
            for scheme in Scheme::ALL {
                let a = estimates_for(&rs, scheme, budget, seed);
                let b = estimates_for(&rs, scheme, budget, seed);
                prop_assert_eq!(a, b);
            }
        }
    }

    fn estimates_for(rs: &RuleSet, scheme: Scheme, budget: usize, seed: u64) -> Vec<u64> {
        let game = Game::over_rules(rs, &cfg(Aggregator::Max)).unwrap();
        let index = game.build_indices();
        Approximator::new(&index)
            .estimate_all(&ApproxConfig::new(scheme, budget, seed).unwrap())
            .into_iter()
            .map(f64::to_bits)
            .collect()
    }
}
