use alloc::vec;
use alloc::vec::Vec;

/// Item count up to which [`subset_sum_max`] enumerates exhaustively.
pub const EXACT_ITEM_LIMIT: usize = 20;

/// Integer resolution (kW) of the dynamic-programming path used above
/// [`EXACT_ITEM_LIMIT`] items.
pub const DP_RESOLUTION: f64 = 1e-3;

/// Absolute slack on the capacity comparison.
pub const CAPACITY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetChoice {
    /// Chosen item indices, ascending.
    pub indices: Vec<usize>,
    /// Sum of the chosen weights, accumulated in index order.
    pub total: f64,
}

/// Maximum-weight subset of `weights` whose sum fits under `capacity`.
///
/// Up to [`EXACT_ITEM_LIMIT`] items the search is exhaustive and exact; ties
/// between subsets of identical total go to the lexicographically smallest
/// ascending index sequence. Beyond that, weights are rounded up and the
/// capacity down to multiples of [`DP_RESOLUTION`] and solved by dynamic
/// programming, so the result is always feasible and optimal with respect to
/// the rounded weights.
pub fn subset_sum_max(weights: &[f64], capacity: f64) -> SubsetChoice {
    if weights.len() <= EXACT_ITEM_LIMIT {
        exhaustive(weights, capacity)
    } else {
        scaled_dp(weights, capacity)
    }
}

fn exhaustive(weights: &[f64], capacity: f64) -> SubsetChoice {
    struct Search<'a> {
        weights: &'a [f64],
        limit: f64,
        current: Vec<usize>,
        best: Vec<usize>,
        best_total: f64,
    }

    impl Search<'_> {
        fn visit(&mut self, i: usize, total: f64) {
            if i == self.weights.len() {
                if total > self.best_total || (total == self.best_total && self.current < self.best) {
                    self.best_total = total;
                    self.best.clone_from(&self.current);
                }
                return;
            }
            let with = total + self.weights[i];
            if with <= self.limit {
                self.current.push(i);
                self.visit(i + 1, with);
                self.current.pop();
            }
            self.visit(i + 1, total);
        }
    }

    let mut search = Search {
        weights,
        limit: capacity + CAPACITY_SLACK,
        current: Vec::with_capacity(weights.len()),
        best: Vec::new(),
        best_total: 0.0,
    };
    search.visit(0, 0.0);
    SubsetChoice {
        indices: search.best,
        total: search.best_total,
    }
}

fn scaled_dp(weights: &[f64], capacity: f64) -> SubsetChoice {
    let units: Vec<usize> = weights
        .iter()
        .map(|w| libm::ceil(w / DP_RESOLUTION - 1e-6).max(0.0) as usize)
        .collect();
    let total_units: usize = units.iter().sum();
    let cap = (libm::floor(capacity / DP_RESOLUTION + 1e-6).max(0.0) as usize).min(total_units);

    // reach[i] = sums attainable with items i.. ; reach[n] = {0}.
    let n = units.len();
    let words = cap / 64 + 1;
    let mut reach = vec![vec![0u64; words]; n + 1];
    reach[n][0] = 1;
    for i in (0..n).rev() {
        let (head, tail) = reach.split_at_mut(i + 1);
        let next = &tail[0];
        let row = &mut head[i];
        row.copy_from_slice(next);
        shift_or(row, next, units[i]);
        mask_tail(row, cap);
    }

    let has = |row: &[u64], c: usize| row[c / 64] >> (c % 64) & 1 == 1;
    let best = (0..=cap).rev().find(|&c| has(&reach[0], c)).unwrap_or(0);

    let mut indices = Vec::new();
    let mut remaining = best;
    for i in 0..n {
        if remaining == 0 {
            break;
        }
        if units[i] <= remaining && has(&reach[i + 1], remaining - units[i]) {
            indices.push(i);
            remaining -= units[i];
        }
    }
    let total = indices.iter().map(|&i| weights[i]).sum();
    SubsetChoice { indices, total }
}

/// `row |= src << shift` over little-endian bit words.
fn shift_or(row: &mut [u64], src: &[u64], shift: usize) {
    let word_shift = shift / 64;
    let bit_shift = shift % 64;
    for k in (word_shift..row.len()).rev() {
        let lo = src[k - word_shift];
        let mut v = lo << bit_shift;
        if bit_shift > 0 && k > word_shift {
            v |= src[k - word_shift - 1] >> (64 - bit_shift);
        }
        row[k] |= v;
    }
}

fn mask_tail(row: &mut [u64], cap: usize) {
    let used = cap % 64 + 1;
    if used < 64 {
        if let Some(last) = row.last_mut() {
            *last &= (1u64 << used) - 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(weights: &[f64], cap: f64) -> f64 {
        let n = weights.len();
        let mut best = 0.0f64;
        for mask in 0u32..(1 << n) {
            let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| weights[i]).sum();
            if s <= cap + CAPACITY_SLACK && s > best {
                best = s;
            }
        }
        best
    }

    #[test]
    fn examples() {
        let c = subset_sum_max(&[5.0, 4.0, 3.0], 7.0);
        assert_eq!(c.indices, vec![1, 2]);
        assert_eq!(c.total, 7.0);

        let c = subset_sum_max(&[], 5.0);
        assert!(c.indices.is_empty());
        assert_eq!(c.total, 0.0);

        let c = subset_sum_max(&[10.0], 7.0);
        assert!(c.indices.is_empty());
        assert_eq!(c.total, 0.0);
    }

    #[test]
    fn ties_go_to_smallest_sequence() {
        assert_eq!(subset_sum_max(&[5.0, 5.0], 5.0).indices, vec![0]);
        // {0} is a prefix of {0, 1}; the zero-weight item is left out.
        assert_eq!(subset_sum_max(&[5.0, 0.0], 5.0).indices, vec![0]);
        // [0, 2] < [1]
        assert_eq!(subset_sum_max(&[2.0, 5.0, 3.0], 5.0).indices, vec![0, 2]);
    }

    #[test]
    fn dp_path_is_feasible_and_optimal_on_integers() {
        let weights: Vec<f64> = (0..25).map(|i| ((i * 7) % 11 + 1) as f64).collect();
        let c = subset_sum_max(&weights, 37.0);
        assert_eq!(c.total, 37.0);
        let s: f64 = c.indices.iter().map(|&i| weights[i]).sum();
        assert_eq!(s, 37.0);
    }

    #[test]
    fn dp_matches_exhaustive_on_small_integer_instance() {
        let weights = [3.0, 9.0, 4.0, 4.0, 7.0, 1.0];
        let exact = exhaustive(&weights, 13.0);
        let dp = scaled_dp(&weights, 13.0);
        assert_eq!(exact.total, dp.total);
        assert_eq!(exact.indices, dp.indices);
    }

    #[test]
    fn shift_or_crosses_words() {
        let src = [1u64 << 63, 0, 0];
        let mut row = [0u64; 3];
        shift_or(&mut row, &src, 65);
        assert_eq!(row, [0, 0, 1]);
    }

    proptest! {
        #[test]
        fn matches_enumeration(w in prop::collection::vec(0u32..20, 0..12), cap in 0u32..80) {
            let weights: Vec<f64> = w.iter().map(|&x| x as f64 * 0.5).collect();
            let cap = cap as f64 * 0.5;
            let c = subset_sum_max(&weights, cap);
            prop_assert_eq!(c.total, brute(&weights, cap));
            prop_assert!(c.total <= cap + CAPACITY_SLACK);
        }

        #[test]
        fn dp_is_feasible(w in prop::collection::vec(0.0f64..10.0, 21..30), cap in 0.0f64..60.0) {
            let c = subset_sum_max(&w, cap);
            let s: f64 = c.indices.iter().map(|&i| w[i]).sum();
            prop_assert!(s <= cap + CAPACITY_SLACK);
            // Maximal w.r.t. the rounded weights: no left-out item still fits.
            let units = |x: f64| libm::ceil(x / DP_RESOLUTION - 1e-6).max(0.0) as usize;
            let cap_units = libm::floor(cap / DP_RESOLUTION + 1e-6) as usize;
            let used: usize = c.indices.iter().map(|&i| units(w[i])).sum();
            for i in (0..w.len()).filter(|i| !c.indices.contains(i)) {
                prop_assert!(units(w[i]) == 0 || used + units(w[i]) > cap_units);
            }
        }
    }
}
