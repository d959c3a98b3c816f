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

use std::collections::{BTreeMap, BTreeSet};

use crate::dataset::Element;

/// Overlap of the two top-`k` lists over `k`, with `k` clamped to the shorter
/// ranking. Returns the value and the `k` actually used.
pub fn precision_at_k(a: &[Element], b: &[Element], k: usize) -> (f64, usize) {
    let k = k.min(a.len()).min(b.len());
    if k == 0 {
        return (0.0, 0);
    }
    let top: BTreeSet<&Element> = a[..k].iter().collect();
    let shared = b[..k].iter().filter(|e| top.contains(e)).count();
    (shared as f64 / k as f64, k)
}

/// Mean of `p@k` for `k = 1..=10`.
pub fn avg_precision_at_10(a: &[Element], b: &[Element]) -> f64 {
    (1..=10).map(|k| precision_at_k(a, b, k).0).sum::<f64>() / 10.0
}

fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            ranks[o] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman's rho over the shared keys, ties given average ranks. `None` when
/// fewer than two keys are shared or either side is constant.
pub fn spearman(a: &BTreeMap<Element, f64>, b: &BTreeMap<Element, f64>) -> Option<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = a
        .iter()
        .filter_map(|(k, &x)| b.get(k).map(|&y| (x, y)))
        .unzip();
    if xs.len() < 2 {
        return None;
    }
    let rx = average_ranks(&xs);
    let ry = average_ranks(&ys);
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in rx.iter().zip(&ry) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn elems(ids: &[usize]) -> Vec<Element> {
        ids.iter()
            .map(|i| Element::new("a", i.to_string()))
            .collect()
    }

    fn scores(xs: &[f64]) -> BTreeMap<Element, f64> {
        xs.iter()
            .enumerate()
            .map(|(i, &x)| (Element::new("a", format!("{i:03}")), x))
            .collect()
    }

    #[test]
    fn precision_examples() {
        let a = elems(&(0..20).collect::<Vec<_>>());
        assert_eq!(precision_at_k(&a, &a, 10), (1.0, 10));
        let b = elems(&(10..30).collect::<Vec<_>>());
        assert_eq!(precision_at_k(&a, &b, 10).0, 0.0);
        let c = elems(&[0, 1, 2, 3, 4, 5, 6, 50, 51, 52]);
        assert!((precision_at_k(&a, &c, 10).0 - 0.7).abs() < 1e-12);
        assert_eq!(precision_at_k(&a[..4], &a[..4], 10), (1.0, 4));
    }

    #[test]
    fn average_precision_examples() {
        let a = elems(&(0..10).collect::<Vec<_>>());
        assert_eq!(avg_precision_at_10(&a, &a), 1.0);
        let reversed: Vec<Element> = a.iter().rev().cloned().collect();
        // independent evaluation of max(0, 2k - 10) / k
        let expected = (1..=10)
            .map(|k| (2 * k as i64 - 10).max(0) as f64 / k as f64)
            .sum::<f64>()
            / 10.0;
        assert!((avg_precision_at_10(&a, &reversed) - expected).abs() < 1e-12);
        // the same set with a different leader
        let mut shifted = a.clone();
        shifted.rotate_left(1);
        assert!(avg_precision_at_10(&a, &shifted) < precision_at_k(&a, &shifted, 10).0);
    }

    #[test]
    fn spearman_examples() {
        let x = scores(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(spearman(&x, &x), Some(1.0));
        let y = scores(&[4.0, 3.0, 2.0, 1.0]);
        assert!((spearman(&x, &y).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(spearman(&x, &scores(&[1.0; 4])), None);
        // ties: ranks (1.5, 1.5, 3) vs (1, 2, 3), checked by hand
        let t = spearman(&scores(&[1.0, 1.0, 2.0]), &scores(&[1.0, 2.0, 3.0])).unwrap();
        assert!((t - 0.866_025_403_784_438_6).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn precision_is_symmetric_and_bounded(p in Just((0..15).collect::<Vec<usize>>()).prop_shuffle(),
                                               q in Just((0..15).collect::<Vec<usize>>()).prop_shuffle(),
                                               k in 1usize..20) {
            let (a, b) = (elems(&p), elems(&q));
            let (x, _) = precision_at_k(&a, &b, k);
            prop_assert_eq!(x, precision_at_k(&b, &a, k).0);
            prop_assert!((0.0..=1.0).contains(&x));
            let ap = avg_precision_at_10(&a, &b);
            prop_assert_eq!(ap, avg_precision_at_10(&b, &a));
            prop_assert!((0.0..=1.0).contains(&ap));
        }

        #[test]
        fn spearman_self_and_negation(xs in proptest::collection::btree_set(-1000i32..1000, 2..30)) {
            let v: Vec<f64> = xs.iter().map(|&x| x as f64).collect();
            let neg: Vec<f64> = v.iter().map(|x| -x).collect();
            let a = scores(&v);
            prop_assert!((spearman(&a, &a).unwrap() - 1.0).abs() < 1e-12);
            prop_assert!((spearman(&a, &scores(&neg)).unwrap() + 1.0).abs() < 1e-12);
        }
    }
}
