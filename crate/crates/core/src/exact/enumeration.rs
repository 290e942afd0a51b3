use thiserror::Error;

use crate::heuristic::ffd_construct;
use crate::instance::{val_bpps_unchecked, Instance, Solution};

/// Largest instance the exhaustive search accepts.
pub const MAX_ENUMERATION_ITEMS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("exhaustive search is limited to {MAX_ENUMERATION_ITEMS} items, got {0}")]
pub struct TooLarge(pub usize);

struct Enum<'a> {
    instance: &'a Instance,
    order: Vec<usize>,
    bins: Vec<Vec<usize>>,
    loads: Vec<Vec<u64>>,
    /// Bins touching each scenario.
    count: Vec<usize>,
    best_value: usize,
    best: Vec<Vec<usize>>,
}

impl Enum<'_> {
    fn current(&self) -> usize {
        self.count.iter().copied().max().unwrap_or(0)
    }

    fn place(&mut self, b: usize, item: usize, add: bool) {
        let s = u64::from(self.instance.size(item));
        for &k in self.instance.scenarios_of(item) {
            let before = self.loads[b][k];
            if add {
                self.loads[b][k] += s;
                if before == 0 {
                    self.count[k] += 1;
                }
            } else {
                self.loads[b][k] -= s;
                if self.loads[b][k] == 0 {
                    self.count[k] -= 1;
                }
            }
        }
        if add {
            self.bins[b].push(item);
        } else {
            self.bins[b].pop();
        }
    }

    fn dfs(&mut self, depth: usize) {
        if self.current() >= self.best_value {
            return;
        }
        if depth == self.order.len() {
            self.best_value = self.current();
            self.best = self.bins.clone();
            return;
        }
        let item = self.order[depth];
        let w = u64::from(self.instance.capacity());
        let s = u64::from(self.instance.size(item));
        for b in 0..self.bins.len() {
            if self.instance.scenarios_of(item).iter().all(|&k| self.loads[b][k] + s <= w) {
                self.place(b, item, true);
                self.dfs(depth + 1);
                self.place(b, item, false);
            }
        }
        // a new bin; restricted growth avoids relabeled duplicates
        self.bins.push(Vec::new());
        self.loads.push(vec![0; self.instance.num_scenarios()]);
        let b = self.bins.len() - 1;
        self.place(b, item, true);
        self.dfs(depth + 1);
        self.place(b, item, false);
        self.bins.pop();
        self.loads.pop();
    }
}

/// Exact optimum by enumerating set partitions of the items.
///
/// Items are assigned in non-increasing size order to an existing bin or
/// to one new bin, so each partition is visited once. The search only
/// looks for packings strictly better than first-fit decreasing.
pub fn solve_enumeration(instance: &Instance) -> Result<Solution, TooLarge> {
    let n = instance.num_items();
    if n > MAX_ENUMERATION_ITEMS {
        return Err(TooLarge(n));
    }
    let start = ffd_construct(instance);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(instance.size(i)), i));
    let mut e = Enum {
        instance,
        order,
        bins: Vec::new(),
        loads: Vec::new(),
        count: vec![0; instance.num_scenarios()],
        best_value: val_bpps_unchecked(instance, &start),
        best: start.bins().to_vec(),
    };
    e.dfs(0);
    Ok(Solution::new(e.best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::build_theorem3_instance;
    use crate::generator::{generate_instance, GeneratorParams};
    use crate::instance::{check_feasible, val_bpps, Item};

    /// Every assignment of items to bin labels 0..n, canonical or not.
    fn naive_optimum(instance: &Instance) -> usize {
        let n = instance.num_items();
        let mut best = usize::MAX;
        let mut labels = vec![0usize; n];
        loop {
            let mut bins: Vec<Vec<usize>> = vec![Vec::new(); n];
            for (i, &l) in labels.iter().enumerate() {
                bins[l].push(i);
            }
            bins.retain(|b| !b.is_empty());
            let sol = Solution::new(bins);
            if let Ok(v) = val_bpps(instance, &sol) {
                best = best.min(v);
            }
            let mut pos = 0;
            loop {
                if pos == n {
                    return best;
                }
                labels[pos] += 1;
                if labels[pos] < n {
                    break;
                }
                labels[pos] = 0;
                pos += 1;
            }
        }
    }

    #[test]
    fn small_cases() {
        let one = Instance::new(1, 100, vec![Item::new(5, vec![0])]).unwrap();
        assert_eq!(val_bpps(&one, &solve_enumeration(&one).unwrap()).unwrap(), 1);
        let two = Instance::new(1, 100, vec![Item::new(60, vec![0]), Item::new(60, vec![0])]).unwrap();
        assert_eq!(val_bpps(&two, &solve_enumeration(&two).unwrap()).unwrap(), 2);
        let (t3, _) = build_theorem3_instance(4, 100);
        assert_eq!(val_bpps(&t3, &solve_enumeration(&t3).unwrap()).unwrap(), 2);
    }

    #[test]
    fn agrees_with_naive_labeling() {
        for seed in 0..60 {
            let n = 1 + (seed as usize % 6);
            let inst = generate_instance(&GeneratorParams::new(n, 3, 3000 + seed)).unwrap();
            let sol = solve_enumeration(&inst).unwrap();
            assert!(check_feasible(&inst, &sol).is_ok());
            assert_eq!(val_bpps(&inst, &sol).unwrap(), naive_optimum(&inst), "seed {seed}");
        }
    }

    #[test]
    fn rejects_large_instances() {
        let inst = generate_instance(&GeneratorParams::new(13, 2, 1)).unwrap();
        assert_eq!(solve_enumeration(&inst), Err(TooLarge(13)));
    }
}
