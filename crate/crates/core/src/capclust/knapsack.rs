//! Exact 0-1 knapsack over integer weights with real values.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct KnapsackInstance {
    pub values: Vec<f64>,
    pub weights: Vec<usize>,
    pub capacity: usize,
}

impl KnapsackInstance {
    pub fn new(values: Vec<f64>, weights: Vec<usize>, capacity: usize) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::InvalidParameter(format!(
                "{} values but {} weights",
                values.len(),
                weights.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidParameter(format!("item value {v} is not >= 0")));
        }
        if weights.contains(&0) {
            return Err(Error::InvalidParameter("item weights must be positive".into()));
        }
        Ok(Self {
            values,
            weights,
            capacity,
        })
    }

    pub fn select(&self) -> Vec<usize> {
        knapsack_select(&self.values, &self.weights, self.capacity)
    }
}

/// Indices (ascending) of a maximum-value subset with total weight at most
/// `capacity`.
///
/// Among equal-value subsets the one with the smaller total weight wins, then
/// the lexicographically smallest index list. The table runs over suffixes
/// `i..p` so that the include-`i` branch is always the lexicographically
/// smaller one.
pub fn knapsack_select(values: &[f64], weights: &[usize], capacity: usize) -> Vec<usize> {
    debug_assert_eq!(values.len(), weights.len());
    if let Some(selected) = few_weights_select(values, weights, capacity) {
        return selected;
    }
    dp_select(values, weights, capacity)
}

fn dp_select(values: &[f64], weights: &[usize], capacity: usize) -> Vec<usize> {
    let p = values.len();
    let width = capacity + 1;
    // best (value, weight) over items i+1.. for each residual capacity
    let mut next: Vec<(f64, usize)> = vec![(0.0, 0); width];
    let mut cur = next.clone();
    let mut take = vec![false; p * width];
    for i in (0..p).rev() {
        let (v, w) = (values[i], weights[i]);
        for c in 0..width {
            let skip = next[c];
            cur[c] = skip;
            if w <= c {
                let (rv, rw) = next[c - w];
                let with = (v + rv, w + rw);
                let better = with.0 > skip.0 || (with.0 == skip.0 && with.1 <= skip.1);
                if better {
                    cur[c] = with;
                    take[i * width + c] = true;
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    let mut selected = Vec::new();
    let mut c = capacity;
    for i in 0..p {
        if take[i * width + c] {
            selected.push(i);
            c -= weights[i];
        }
    }
    selected
}

/// Items of one weight, best first: value descending, then index ascending.
pub(crate) struct WeightClass {
    weight: usize,
    items: Vec<usize>,
    /// `prefix[a]` is the value of the first `a` items.
    prefix: Vec<f64>,
}

impl WeightClass {
    fn new(weight: usize, mut items: Vec<usize>, values: &[f64]) -> Self {
        items.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
        Self::presorted(weight, items, values)
    }

    /// `items` must already be in best-first order.
    pub(crate) fn presorted(weight: usize, items: Vec<usize>, values: &[f64]) -> Self {
        let mut prefix = Vec::with_capacity(items.len() + 1);
        prefix.push(0.0);
        for &i in &items {
            prefix.push(prefix[prefix.len() - 1] + values[i]);
        }
        Self {
            weight,
            items,
            prefix,
        }
    }

    /// Smallest count reaching the best value among counts `0..=limit`.
    fn best_count(&self, limit: usize) -> usize {
        let mut a = limit.min(self.items.len());
        while a > 0 && self.prefix[a - 1] == self.prefix[a] {
            a -= 1;
        }
        a
    }
}

/// Exact selection when the items carry at most two distinct weights.
///
/// For fixed per-weight counts the best subset takes the top items of each
/// weight, so it suffices to scan the count of the lighter weight. Ties are
/// resolved as in the table-based solver.
fn few_weights_select(values: &[f64], weights: &[usize], capacity: usize) -> Option<Vec<usize>> {
    let mut distinct: Vec<usize> = Vec::with_capacity(2);
    for &w in weights {
        if !distinct.contains(&w) {
            if distinct.len() == 2 {
                return None;
            }
            distinct.push(w);
        }
    }
    distinct.sort_unstable();
    let classes: Vec<WeightClass> = distinct
        .iter()
        .map(|&w| {
            let items = (0..weights.len()).filter(|&i| weights[i] == w).collect();
            WeightClass::new(w, items, values)
        })
        .collect();
    match classes.as_slice() {
        [] => Some(Vec::new()),
        [light] => Some(two_class_select(light, None, capacity)),
        [light, heavy] => Some(two_class_select(light, Some(heavy), capacity)),
        _ => unreachable!("at most two weights"),
    }
}

/// Best selection from a lighter and an optional heavier weight class.
pub(crate) fn two_class_select(
    light: &WeightClass,
    heavy: Option<&WeightClass>,
    capacity: usize,
) -> Vec<usize> {
    debug_assert!(heavy.is_none_or(|h| h.weight > light.weight));
    let set = |a: usize, b: usize| {
        let mut set: Vec<usize> = light.items[..a].to_vec();
        if let Some(h) = heavy {
            set.extend_from_slice(&h.items[..b]);
        }
        set.sort_unstable();
        set
    };
    // (value, weight, light count, heavy count) with the best heavy count
    let candidate = |a: usize| {
        let rest = capacity - a * light.weight;
        let b = heavy.map_or(0, |h| h.best_count(rest / h.weight));
        let value = light.prefix[a] + heavy.map_or(0.0, |h| h.prefix[b]);
        let weight = a * light.weight + heavy.map_or(0, |h| b * h.weight);
        (value, weight, a, b)
    };
    let mut best = candidate(0);
    for a in 1..=light.items.len().min(capacity / light.weight) {
        let (value, weight, _, b) = candidate(a);
        let (bv, bw, ba, bb) = best;
        if value > bv
            || (value == bv && weight < bw)
            || (value == bv && weight == bw && preferred(&set(a, b), &set(ba, bb)))
        {
            best = (value, weight, a, b);
        }
    }
    set(best.2, best.3)
}

/// Whether `a` wins the index tie-break: the smallest index in exactly one
/// of the two sorted sets belongs to `a`.
fn preferred(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] != b[j] {
            return a[i] < b[j];
        }
        i += 1;
        j += 1;
    }
    i < a.len()
}
