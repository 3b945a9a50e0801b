//! 0/1 knapsack selection of buildings to field-inspect.
//!
//! Inspecting building `i` spends `weights[i]` of the budget and avoids its
//! expected misprediction cost `values[i]`; the solver maximizes total
//! avoided cost under the budget. Weights are quantized to a granularity
//! before the dynamic program: item weights round up and the capacity rounds
//! down, so a quantized-feasible selection never overspends in true dollars.
//!
//! Tie-breaking is fully deterministic. Among selections of equal total
//! value, the solver prefers the smaller quantized total weight, and among
//! those the selection whose sorted index list is lexicographically smallest
//! (equivalently: scanning items in order, an item is included whenever that
//! is still consistent with an optimal value/weight pair). [`solve`] and
//! [`brute_force`] implement the identical rule and agree exactly.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::money::Money;

/// Default ceiling on DP table cells, `(n + 1) * (capacity/granularity + 1)`.
pub const DEFAULT_CELL_LIMIT: usize = 100_000_000;

/// One selection problem: per-item avoided costs and inspection fees, a
/// budget, and the quantization granularity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnapsackInstance {
    values: Vec<Money>,
    weights: Vec<Money>,
    capacity: Money,
    granularity: Money,
    cell_limit: usize,
}

impl KnapsackInstance {
    pub fn new(
        values: Vec<Money>,
        weights: Vec<Money>,
        capacity: Money,
        granularity: Money,
    ) -> Result<KnapsackInstance> {
        if values.len() != weights.len() {
            return Err(Error::validation(format!(
                "{} values but {} weights",
                values.len(),
                weights.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| v.cents() < 0) {
            return Err(Error::validation(format!(
                "item values must be nonnegative, got {v}"
            )));
        }
        if let Some(w) = weights.iter().find(|w| w.cents() <= 0) {
            return Err(Error::validation(format!(
                "item weights must be positive, got {w}"
            )));
        }
        if capacity.cents() < 0 {
            return Err(Error::validation(format!(
                "capacity must be nonnegative, got {capacity}"
            )));
        }
        if granularity.cents() <= 0 {
            return Err(Error::validation(format!(
                "granularity must be positive, got {granularity}"
            )));
        }
        Ok(KnapsackInstance {
            values,
            weights,
            capacity,
            granularity,
            cell_limit: DEFAULT_CELL_LIMIT,
        })
    }

    /// Overrides the DP cell ceiling (mostly for tests and tight memory).
    pub fn with_cell_limit(mut self, cell_limit: usize) -> KnapsackInstance {
        self.cell_limit = cell_limit;
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Money] {
        &self.values
    }

    pub fn weights(&self) -> &[Money] {
        &self.weights
    }

    pub fn capacity(&self) -> Money {
        self.capacity
    }

    pub fn granularity(&self) -> Money {
        self.granularity
    }
}

/// A solved selection. `z[i]` is true when building `i` is inspected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InspectionSelection {
    pub z: Vec<bool>,
    /// True (unquantized) inspection spend of the selected items; never
    /// exceeds the capacity.
    pub total_weight: Money,
    /// Total avoided misprediction cost.
    pub total_value: Money,
    /// Expected misprediction cost left uncovered:
    /// `sum(values) - total_value`.
    pub residual_cost: Money,
}

fn quantize_weight(weight: Money, granularity: Money) -> u64 {
    let (w, g) = (weight.cents(), granularity.cents());
    ((w + g - 1) / g) as u64
}

fn quantize_capacity(capacity: Money, granularity: Money) -> u64 {
    (capacity.cents() / granularity.cents()) as u64
}

/// Suffix DP table over quantized weights, reusable across capacities: the
/// cell for `(item i, remaining budget w)` does not depend on the capacity
/// the table was built for, so one build serves every budget up to the
/// maximum. Decisions are stored as one bit per cell.
pub struct DpTable {
    values: Vec<Money>,
    weights: Vec<Money>,
    wq: Vec<u64>,
    granularity: Money,
    capq_max: u64,
    row_words: usize,
    take: Vec<u64>,
}

impl DpTable {
    /// Builds the table for capacities up to `max_capacity`.
    pub fn build(
        values: &[Money],
        weights: &[Money],
        max_capacity: Money,
        granularity: Money,
        cell_limit: usize,
    ) -> Result<DpTable> {
        let n = values.len();
        let capq = quantize_capacity(max_capacity, granularity);
        let cells = (n as u128 + 1) * (capq as u128 + 1);
        if cells > cell_limit as u128 {
            return Err(Error::size(format!(
                "knapsack table needs {cells} cells for {n} items at capacity {max_capacity} \
                 and granularity {granularity} (limit {cell_limit}); use a coarser granularity"
            )));
        }

        let wq: Vec<u64> = weights
            .iter()
            .map(|w| quantize_weight(*w, granularity))
            .collect();
        let width = capq as usize + 1;
        let row_words = width.div_ceil(64);
        let mut take = vec![0u64; n * row_words];

        // Rolling rows of (best value, smallest quantized weight attaining
        // it) for the item suffix starting at i+1.
        let mut next_val = vec![0i64; width];
        let mut next_wt = vec![0u64; width];
        let mut cur_val = vec![0i64; width];
        let mut cur_wt = vec![0u64; width];

        for i in (0..n).rev() {
            let (vi, wi) = (values[i].cents(), wq[i]);
            let row = &mut take[i * row_words..(i + 1) * row_words];
            for w in 0..width {
                let (mut best_v, mut best_w) = (next_val[w], next_wt[w]);
                if wi as usize <= w {
                    let inc_v = vi + next_val[w - wi as usize];
                    let inc_w = wi + next_wt[w - wi as usize];
                    // Prefer inclusion on exact value/weight ties: that is
                    // what makes the recovered index list lexicographically
                    // smallest.
                    if inc_v > best_v || (inc_v == best_v && inc_w <= best_w) {
                        best_v = inc_v;
                        best_w = inc_w;
                        row[w / 64] |= 1u64 << (w % 64);
                    }
                }
                cur_val[w] = best_v;
                cur_wt[w] = best_w;
            }
            std::mem::swap(&mut next_val, &mut cur_val);
            std::mem::swap(&mut next_wt, &mut cur_wt);
        }

        Ok(DpTable {
            values: values.to_vec(),
            weights: weights.to_vec(),
            wq,
            granularity,
            capq_max: capq,
            row_words,
            take,
        })
    }

    fn taken(&self, i: usize, w: u64) -> bool {
        let bit = w as usize;
        self.take[i * self.row_words + bit / 64] >> (bit % 64) & 1 == 1
    }

    /// Recovers the optimal selection for any capacity the table covers.
    pub fn extract(&self, capacity: Money) -> Result<InspectionSelection> {
        if capacity.cents() < 0 {
            return Err(Error::domain(format!(
                "capacity must be nonnegative, got {capacity}"
            )));
        }
        let capq = quantize_capacity(capacity, self.granularity);
        if capq > self.capq_max {
            return Err(Error::domain(format!(
                "capacity {capacity} exceeds the table's maximum"
            )));
        }
        let n = self.values.len();
        let mut z = vec![false; n];
        let mut w = capq;
        for i in 0..n {
            if self.taken(i, w) {
                z[i] = true;
                w -= self.wq[i];
            }
        }
        let total_weight: Money = (0..n).filter(|i| z[*i]).map(|i| self.weights[i]).sum();
        let total_value: Money = (0..n).filter(|i| z[*i]).map(|i| self.values[i]).sum();
        let residual_cost = self.values.iter().copied().sum::<Money>() - total_value;
        Ok(InspectionSelection {
            z,
            total_weight,
            total_value,
            residual_cost,
        })
    }
}

/// Solves one instance by dynamic programming over quantized weights.
pub fn solve(instance: &KnapsackInstance) -> Result<InspectionSelection> {
    DpTable::build(
        &instance.values,
        &instance.weights,
        instance.capacity,
        instance.granularity,
        instance.cell_limit,
    )?
    .extract(instance.capacity)
}

/// Orders selected-index lists (as bitmasks) lexicographically; a list that
/// is a strict prefix of another sorts first.
fn lex_cmp(mut a: u64, mut b: u64) -> Ordering {
    loop {
        match (a == 0, b == 0) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            (false, false) => {}
        }
        let (ia, ib) = (a.trailing_zeros(), b.trailing_zeros());
        if ia != ib {
            return ia.cmp(&ib);
        }
        a &= a - 1;
        b &= b - 1;
    }
}

const BRUTE_FORCE_MAX_ITEMS: usize = 25;

/// Exact reference solver by subset enumeration, with the same quantization
/// and tie-break rules as [`solve`]. Limited to small instances.
pub fn brute_force(instance: &KnapsackInstance) -> Result<InspectionSelection> {
    let n = instance.len();
    if n > BRUTE_FORCE_MAX_ITEMS {
        return Err(Error::size(format!(
            "subset enumeration is limited to {BRUTE_FORCE_MAX_ITEMS} items, got {n}"
        )));
    }
    let capq = quantize_capacity(instance.capacity, instance.granularity);
    let wq: Vec<u64> = instance
        .weights
        .iter()
        .map(|w| quantize_weight(*w, instance.granularity))
        .collect();
    let values: Vec<i64> = instance.values.iter().map(|v| v.cents()).collect();

    struct Search<'a> {
        values: &'a [i64],
        wq: &'a [u64],
        capq: u64,
        best: (i64, u64, u64), // (value, quantized weight, mask)
    }

    impl Search<'_> {
        fn run(&mut self, i: usize, value: i64, weight: u64, mask: u64) {
            if weight > self.capq {
                return; // weights are positive; no extension becomes feasible
            }
            if i == self.values.len() {
                let better = match value.cmp(&self.best.0) {
                    Ordering::Greater => true,
                    Ordering::Less => false,
                    Ordering::Equal => match weight.cmp(&self.best.1) {
                        Ordering::Less => true,
                        Ordering::Greater => false,
                        Ordering::Equal => lex_cmp(mask, self.best.2) == Ordering::Less,
                    },
                };
                if better {
                    self.best = (value, weight, mask);
                }
                return;
            }
            self.run(i + 1, value + self.values[i], weight + self.wq[i], mask | 1 << i);
            self.run(i + 1, value, weight, mask);
        }
    }

    let mut search = Search {
        values: &values,
        wq: &wq,
        capq,
        best: (i64::MIN, u64::MAX, u64::MAX),
    };
    search.run(0, 0, 0, 0);

    let (_, _, mask) = search.best;
    let z: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
    let total_weight: Money = (0..n).filter(|i| z[*i]).map(|i| instance.weights[i]).sum();
    let total_value: Money = (0..n).filter(|i| z[*i]).map(|i| instance.values[i]).sum();
    let residual_cost = instance.values.iter().copied().sum::<Money>() - total_value;
    Ok(InspectionSelection {
        z,
        total_weight,
        total_value,
        residual_cost,
    })
}
