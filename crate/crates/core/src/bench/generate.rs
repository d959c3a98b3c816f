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

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::LogNormal;

use crate::dataset::{Dataset, Element};
use crate::error::{Result, SharqError};
use crate::miner::{Rule, RuleSet};
use crate::scoring::is_value;

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceConfig {
    pub n_attributes: usize,
    pub values_per_attribute: usize,
    pub n_rules: usize,
    pub min_rule_len: usize,
    /// Longest rule, τ.
    pub max_rule_len: usize,
    /// Exponent of the Zipf-like value marginals.
    pub zipf_exponent: f64,
    /// Location and scale of the log-normal lift.
    pub lift_mu: f64,
    pub lift_sigma: f64,
    /// Rows of the companion dataset.
    pub n_rows: usize,
    pub seed: u64,
}

impl Default for InstanceConfig {
    fn default() -> Self {
        InstanceConfig {
            n_attributes: 10,
            values_per_attribute: 3,
            n_rules: 1000,
            min_rule_len: 2,
            max_rule_len: 4,
            zipf_exponent: 1.0,
            lift_mu: 0.5,
            lift_sigma: 0.4,
            n_rows: 500,
            seed: 0,
        }
    }
}

impl InstanceConfig {
    pub fn n_elements(&self) -> usize {
        self.n_attributes * self.values_per_attribute
    }

    fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(SharqError::Config(m));
        if self.n_attributes < 2 || self.values_per_attribute == 0 {
            return fail("need at least two attributes with one value each".into());
        }
        if self.min_rule_len < 2 || self.min_rule_len > self.max_rule_len {
            return fail(format!(
                "rule length range [{}, {}] is invalid",
                self.min_rule_len, self.max_rule_len
            ));
        }
        if self.max_rule_len > self.n_attributes {
            return fail(format!(
                "rule length {} exceeds the {} attributes",
                self.max_rule_len, self.n_attributes
            ));
        }
        if self.lift_sigma.is_nan()
            || self.lift_sigma <= 0.0
            || !self.lift_mu.is_finite()
            || !self.zipf_exponent.is_finite()
        {
            return fail("score distribution parameters must be finite, sigma positive".into());
        }
        Ok(())
    }
}

/// A generated rule set with a dataset over the same vocabulary.
#[derive(Clone, Debug)]
pub struct Instance {
    pub config: InstanceConfig,
    pub data: Dataset,
    pub rules: RuleSet,
}

fn attribute_name(a: usize) -> String {
    format!("a{a:02}")
}

fn value_name(v: usize) -> String {
    format!("v{v}")
}

/// Draws rules until `n_rules` distinct ones exist or the draw limit is hit.
pub fn generate_instance(cfg: &InstanceConfig) -> Result<Instance> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let marginals: Vec<f64> = {
        let raw: Vec<f64> = (0..cfg.values_per_attribute)
            .map(|v| 1.0 / ((v + 1) as f64).powf(cfg.zipf_exponent))
            .collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|p| p / total).collect()
    };
    let values = WeightedIndex::new(&marginals).expect("positive weights");
    let lift = LogNormal::new(cfg.lift_mu, cfg.lift_sigma).expect("validated parameters");

    let mut rules = Vec::with_capacity(cfg.n_rules);
    let mut seen = std::collections::HashSet::new();
    let max_draws = cfg.n_rules.saturating_mul(50).max(1000);
    for _ in 0..max_draws {
        if rules.len() == cfg.n_rules {
            break;
        }
        let len = rng.gen_range(cfg.min_rule_len..=cfg.max_rule_len);
        let mut attrs = sample(&mut rng, cfg.n_attributes, len).into_vec();
        let split = rng.gen_range(1..len);
        attrs[..split].sort_unstable();
        attrs[split..].sort_unstable();
        let picked: Vec<(usize, usize)> = attrs
            .iter()
            .map(|&a| (a, values.sample(&mut rng)))
            .collect();
        if !seen.insert(picked.clone()) {
            continue;
        }
        let side_support =
            |side: &[(usize, usize)]| side.iter().map(|&(_, v)| marginals[v]).product::<f64>();
        let sup_l = side_support(&picked[..split]);
        let sup_r = side_support(&picked[split..]);
        let support = (sup_l * sup_r * lift.sample(&mut rng)).min(sup_l.min(sup_r));
        let lift = support / (sup_l * sup_r);
        let elements = |side: &[(usize, usize)]| {
            side.iter()
                .map(|&(a, v)| Element::new(attribute_name(a), value_name(v)))
                .collect::<Vec<_>>()
        };
        let rule = Rule::new(
            elements(&picked[..split]),
            elements(&picked[split..]),
            support,
            lift,
        )
        .map_err(SharqError::Config)?
        .with_confidence(support / sup_l)
        .with_score(is_value(support, lift));
        rules.push(rule);
    }

    let attributes: Vec<String> = (0..cfg.n_attributes).map(attribute_name).collect();
    let rows = (0..cfg.n_rows)
        .map(|_| {
            (0..cfg.n_attributes)
                .map(|_| value_name(values.sample(&mut rng)))
                .collect()
        })
        .collect();
    Ok(Instance {
        config: cfg.clone(),
        data: Dataset::from_rows(attributes, rows)?,
        rules: RuleSet::new(rules),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::miner::write_rules;
    use proptest::prelude::*;

    #[test]
    fn single_short_rule() {
        let cfg = InstanceConfig {
            n_rules: 1,
            max_rule_len: 2,
            ..Default::default()
        };
        let inst = generate_instance(&cfg).unwrap();
        assert_eq!(inst.rules.len(), 1);
        assert_eq!(inst.rules.rules()[0].len(), 2);
        assert_eq!(inst.data.len(), cfg.n_rows);
    }

    #[test]
    fn same_seed_same_bytes() {
        let cfg = InstanceConfig {
            seed: 42,
            ..Default::default()
        };
        let dump = |i: &Instance| {
            let mut buf = Vec::new();
            write_rules(&i.rules, &mut buf).unwrap();
            buf
        };
        let a = generate_instance(&cfg).unwrap();
        let b = generate_instance(&cfg).unwrap();
        assert_eq!(dump(&a), dump(&b));
        assert_eq!(a.data, b.data);
        let c = generate_instance(&InstanceConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(dump(&a), dump(&c));
    }

    #[test]
    fn infeasible_length_is_a_config_error() {
        let cfg = InstanceConfig {
            n_attributes: 3,
            max_rule_len: 4,
            ..Default::default()
        };
        assert!(matches!(
            generate_instance(&cfg),
            Err(SharqError::Config(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn generated_rules_are_consistent(seed in any::<u64>(), tau in 2usize..6, n in 1usize..200) {
            let cfg = InstanceConfig { seed, max_rule_len: tau, n_rules: n, n_rows: 10, ..Default::default() };
            let inst = generate_instance(&cfg).unwrap();
            prop_assert_eq!(inst.rules.len(), n);
            for r in inst.rules.rules() {
                prop_assert!((2..=tau).contains(&r.len()));
                prop_assert!(r.support() > 0.0 && r.support() <= 1.0);
                prop_assert!(r.lift() > 0.0);
                let conf = r.confidence().unwrap();
                prop_assert!(conf > 0.0 && conf <= 1.0 + 1e-12);
                prop_assert!(r.score().unwrap() > 0.0);
            }
        }
    }
}
