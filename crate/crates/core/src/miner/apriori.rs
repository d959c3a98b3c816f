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
use rustc_hash::{FxHashMap, FxHashSet};

use super::{Rule, RuleSet};
use crate::dataset::{Dataset, Element};
use crate::error::{Result, SharqError};
use crate::scoring::is_value;

#[derive(Clone, Debug)]
pub struct MinerConfig {
    pub min_support: f64,
    /// Largest frequent itemset considered.
    pub max_len: usize,
}

impl Default for MinerConfig {
    fn default() -> Self {
        MinerConfig {
            min_support: 0.1,
            max_len: 8,
        }
    }
}

/// Row membership of one itemset, one bit per row.
#[derive(Clone)]
struct RowSet(Vec<u64>);

impl RowSet {
    fn and(&self, other: &RowSet) -> RowSet {
        RowSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Classic level-wise Apriori over the dataset's elements, emitting every
/// non-trivial LHS/RHS split of each frequent itemset of size two or more.
pub fn mine_apriori(data: &Dataset, config: &MinerConfig) -> Result<RuleSet> {
    if data.is_empty() {
        return Err(SharqError::Precondition(
            "cannot mine an empty dataset".into(),
        ));
    }
    if !(config.min_support > 0.0 && config.min_support <= 1.0) {
        return Err(SharqError::Config(format!(
            "min_support must lie in (0, 1], got {}",
            config.min_support
        )));
    }
    if config.max_len < 2 {
        return Err(SharqError::Config(
            "max itemset size must be at least 2".into(),
        ));
    }

    let n_rows = data.len();
    let items: Vec<Element> = data.elements().into_iter().collect();
    let attr_of: Vec<usize> = items
        .iter()
        .map(|e| data.attribute_index(&e.attribute))
        .collect::<Result<_>>()?;
    let words = n_rows.div_ceil(64);
    let mut item_rows = vec![RowSet(vec![0; words]); items.len()];
    for (col, attr) in data.attributes().iter().enumerate() {
        for (row, values) in data.rows().iter().enumerate() {
            let e = Element::new(attr.clone(), values[col].clone());
            let id = items.binary_search(&e).expect("element of the dataset");
            item_rows[id].0[row / 64] |= 1 << (row % 64);
        }
    }
    let frequent = |count: usize| count as f64 / n_rows as f64 >= config.min_support;

    let mut counts: FxHashMap<Vec<u32>, usize> = FxHashMap::default();
    let mut level: Vec<(Vec<u32>, RowSet)> = Vec::new();
    for (id, rows) in item_rows.iter().enumerate() {
        let c = rows.count();
        if frequent(c) {
            counts.insert(vec![id as u32], c);
            level.push((vec![id as u32], rows.clone()));
        }
    }

    let mut itemsets: Vec<Vec<u32>> = Vec::new();
    for _size in 2..=config.max_len {
        let known: FxHashSet<&[u32]> = level.iter().map(|(s, _)| s.as_slice()).collect();
        // Join itemsets sharing all but their last item; `level` is sorted so
        // each prefix group is contiguous.
        let mut candidates: Vec<(usize, u32)> = Vec::new();
        for i in 0..level.len() {
            let (a, _) = &level[i];
            for (b, _) in &level[i + 1..] {
                if a[..a.len() - 1] != b[..b.len() - 1] {
                    break;
                }
                let last = *b.last().unwrap();
                if attr_of[*a.last().unwrap() as usize] == attr_of[last as usize] {
                    continue;
                }
                let mut joined = a.clone();
                joined.push(last);
                let all_subsets_frequent = (0..joined.len() - 2).all(|skip| {
                    let sub: Vec<u32> = joined
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| *k != skip)
                        .map(|(_, x)| *x)
                        .collect();
                    known.contains(sub.as_slice())
                });
                if all_subsets_frequent {
                    candidates.push((i, last));
                }
            }
        }
        let next: Vec<(Vec<u32>, RowSet, usize)> = candidates
            .par_iter()
            .filter_map(|&(i, last)| {
                let (prefix, rows) = &level[i];
                let rows = rows.and(&item_rows[last as usize]);
                let c = rows.count();
                frequent(c).then(|| {
                    let mut set = prefix.clone();
                    set.push(last);
                    (set, rows, c)
                })
            })
            .collect();
        drop(known);
        if next.is_empty() {
            break;
        }
        level = next
            .into_iter()
            .map(|(set, rows, c)| {
                counts.insert(set.clone(), c);
                itemsets.push(set.clone());
                (set, rows)
            })
            .collect();
    }

    let support_of = |ids: &[u32]| counts[ids] as f64 / n_rows as f64;
    let mut rules = Vec::new();
    for set in &itemsets {
        let k = set.len();
        let support = support_of(set);
        for mask in 1..(1u32 << k) - 1 {
            let (lhs, rhs): (Vec<u32>, Vec<u32>) = split(set, mask);
            let lhs_support = support_of(&lhs);
            let lift = support / (lhs_support * support_of(&rhs));
            let to_elements =
                |ids: &[u32]| ids.iter().map(|&i| items[i as usize].clone()).collect();
            let rule = Rule::new(to_elements(&lhs), to_elements(&rhs), support, lift)
                .expect("itemsets have distinct attributes")
                .with_confidence(support / lhs_support)
                .with_score(is_value(support, lift));
            rules.push(rule);
        }
    }
    Ok(RuleSet::new(rules))
}

fn split(set: &[u32], mask: u32) -> (Vec<u32>, Vec<u32>) {
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for (k, &id) in set.iter().enumerate() {
        if mask & (1 << k) != 0 {
            lhs.push(id);
        } else {
            rhs.push(id);
        }
    }
    (lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::tests::census;
    use crate::scoring;

    fn mine(d: &Dataset, min_support: f64) -> RuleSet {
        mine_apriori(
            d,
            &MinerConfig {
                min_support,
                max_len: 8,
            },
        )
        .unwrap()
    }

    #[test]
    fn census_high_support_has_no_male_40_rule() {
        let rs = mine(&census(), 0.75);
        let male = Element::new("Gender", "Male");
        let forty = Element::new("Hrs-per-week", "40");
        assert!(!rs
            .rules()
            .iter()
            .any(|r| r.contains(&male) && r.contains(&forty)));
        // both singletons are frequent, but only pairs with support >= 0.75 produce rules
        for r in rs.rules() {
            assert!(r.support() >= 0.75);
        }
    }

    #[test]
    fn no_full_support_pairs() {
        assert!(mine(&census(), 1.0).is_empty());
    }

    #[test]
    fn two_identical_rows() {
        let d = Dataset::from_rows(
            vec!["a".into(), "b".into()],
            vec![vec!["v".into(), "w".into()], vec!["v".into(), "w".into()]],
        )
        .unwrap();
        let rs = mine(&d, 0.5);
        assert_eq!(rs.len(), 2);
        for r in rs.rules() {
            assert_eq!(r.support(), 1.0);
            assert_eq!(r.lift(), 1.0);
        }
    }

    #[test]
    fn emits_multi_element_consequents() {
        let d = Dataset::from_rows(
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec!["1".into(), "2".into(), "3".into()]; 3],
        )
        .unwrap();
        let rs = mine(&d, 0.5);
        // 3 pairs x 2 splits + 1 triple x 6 splits
        assert_eq!(rs.len(), 12);
        assert!(rs.rules().iter().any(|r| r.rhs().len() == 2));
    }

    #[test]
    fn rejects_bad_input() {
        let empty = Dataset::from_rows(vec!["a".into()], vec![]).unwrap();
        assert!(matches!(
            mine_apriori(&empty, &MinerConfig::default()),
            Err(SharqError::Precondition(_))
        ));
        let cfg = MinerConfig {
            min_support: 0.0,
            max_len: 8,
        };
        assert!(mine_apriori(&census(), &cfg).is_err());
    }

    #[test]
    fn stored_statistics_match_the_data() {
        let d = census();
        let rs = mine(&d, 0.25);
        assert!(!rs.is_empty());
        for r in rs.rules() {
            assert_eq!(scoring::support(r, &d).unwrap(), r.support());
            assert!((scoring::lift(r, &d).unwrap() - r.lift()).abs() < 1e-12);
            assert!((scoring::confidence(r, &d).unwrap() - r.confidence().unwrap()).abs() < 1e-12);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn dataset() -> impl Strategy<Value = Dataset> {
            proptest::collection::vec(proptest::collection::vec(0u8..3, 4), 1..16).prop_map(
                |cells| {
                    let rows = cells
                        .into_iter()
                        .map(|r| r.into_iter().map(|v| v.to_string()).collect())
                        .collect();
                    Dataset::from_rows((0..4).map(|c| format!("c{c}")).collect(), rows).unwrap()
                },
            )
        }

        proptest! {
            #[test]
            fn supports_are_exact(d in dataset(), s in 0.05f64..0.9) {
                let rs = mine(&d, s);
                for r in rs.rules() {
                    prop_assert_eq!(scoring::support(r, &d).unwrap(), r.support());
                    prop_assert!(r.support() >= s);
                }
            }

            #[test]
            fn higher_support_mines_a_subset(d in dataset(), s in 0.05f64..0.6, ds in 0.0f64..0.4) {
                let loose = mine(&d, s);
                let strict = mine(&d, s + ds);
                prop_assert!(strict.rules().iter().all(|r| loose.contains_key(r)));
            }
        }
    }
}
