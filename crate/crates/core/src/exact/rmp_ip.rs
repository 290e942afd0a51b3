use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use super::branch::BranchState;
use super::columns::ColumnPool;
use super::master::INTEGRALITY_TOL;
use crate::instance::{val_bpps_unchecked, Instance, Solution};

/// Per-call limits for the pool-restricted integer search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IpBudget {
    pub time: Duration,
    pub nodes: u64,
}

impl Default for IpBudget {
    fn default() -> Self {
        IpBudget {
            time: Duration::from_secs(2),
            nodes: 100_000,
        }
    }
}

/// Turns selected bins into a partition: items already placed are removed
/// from later bins, then empty bins are dropped.
pub fn repair_cover(num_items: usize, bins: &[Vec<usize>]) -> Option<Solution> {
    let mut seen = vec![false; num_items];
    let mut out = Vec::new();
    for bin in bins {
        let kept: Vec<usize> = bin
            .iter()
            .copied()
            .filter(|&i| !std::mem::replace(&mut seen[i], true))
            .collect();
        if !kept.is_empty() {
            out.push(kept);
        }
    }
    seen.iter().all(|&s| s).then(|| Solution::new(out))
}

/// Pair of group representatives whose joint flow is closest to 1/2.
///
/// `x` holds one value per pool column. Returns `None` when no pair has a
/// fractional flow, which includes every integral `x`.
pub fn find_branch_pair(pool: &ColumnPool, x: &[f64], state: &BranchState) -> Option<(usize, usize)> {
    let mut flow: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (id, &v) in x.iter().enumerate() {
        if v <= INTEGRALITY_TOL {
            continue;
        }
        let reps: Vec<usize> = pool
            .get(id)
            .items()
            .iter()
            .copied()
            .filter(|&i| state.find(i) == i)
            .collect();
        for a in 0..reps.len() {
            for b in (a + 1)..reps.len() {
                *flow.entry((reps[a], reps[b])).or_insert(0.0) += v;
            }
        }
    }
    let mut best: Option<((usize, usize), f64)> = None;
    for (&pair, &f) in &flow {
        if f <= INTEGRALITY_TOL || f >= 1.0 - INTEGRALITY_TOL {
            continue;
        }
        let dist = (f - 0.5).abs();
        if best.is_none_or(|(_, bd)| dist < bd - 1e-12) {
            best = Some((pair, dist));
        }
    }
    best.map(|(p, _)| p)
}

struct IpSearch<'a> {
    instance: &'a Instance,
    pool: &'a ColumnPool,
    /// Allowed column ids per item in trial order.
    by_item: Vec<Vec<usize>>,
    covered: Vec<u32>,
    uncovered_load: Vec<u64>,
    count: Vec<usize>,
    chosen: Vec<usize>,
    best_value: usize,
    best: Option<Vec<usize>>,
    nodes: u64,
    budget: IpBudget,
    deadline: Instant,
    stopped: bool,
}

impl IpSearch<'_> {
    fn lower_bound(&self) -> usize {
        let w = u64::from(self.instance.capacity());
        self.count
            .iter()
            .zip(&self.uncovered_load)
            .map(|(&c, &l)| c + l.div_ceil(w) as usize)
            .max()
            .unwrap_or(0)
    }

    fn toggle(&mut self, col: usize, on: bool) {
        let c = self.pool.get(col);
        for &k in c.touched_scenarios() {
            if on {
                self.count[k] += 1;
            } else {
                self.count[k] -= 1;
            }
        }
        for &i in c.items() {
            let was = self.covered[i];
            if on {
                self.covered[i] += 1;
            } else {
                self.covered[i] -= 1;
            }
            let now = self.covered[i];
            if (was == 0) != (now == 0) {
                let s = u64::from(self.instance.size(i));
                for &k in self.instance.scenarios_of(i) {
                    if on {
                        self.uncovered_load[k] -= s;
                    } else {
                        self.uncovered_load[k] += s;
                    }
                }
            }
        }
    }

    fn dfs(&mut self) {
        self.nodes += 1;
        if self.nodes >= self.budget.nodes || (self.nodes.is_multiple_of(256) && Instant::now() >= self.deadline) {
            self.stopped = true;
        }
        if self.stopped {
            return;
        }
        let branch_item = (0..self.covered.len())
            .filter(|&i| self.covered[i] == 0)
            .min_by_key(|&i| (self.by_item[i].len(), i));
        let Some(item) = branch_item else {
            let value = self.count.iter().copied().max().unwrap_or(0);
            if value < self.best_value {
                self.best_value = value;
                self.best = Some(self.chosen.clone());
            }
            return;
        };
        for idx in 0..self.by_item[item].len() {
            let col = self.by_item[item][idx];
            self.toggle(col, true);
            if self.lower_bound() < self.best_value {
                self.chosen.push(col);
                self.dfs();
                self.chosen.pop();
            }
            self.toggle(col, false);
            if self.stopped {
                return;
            }
        }
    }
}

/// Depth-first search over the pooled columns allowed at `state` for a
/// packing better than `incumbent`. Overlapping covers are repaired.
///
/// `lp_values` (one per pool column) orders the candidates: columns with a
/// larger master value are tried first.
pub fn restricted_master_ip(
    instance: &Instance,
    pool: &ColumnPool,
    state: &BranchState,
    incumbent: Option<usize>,
    lp_values: Option<&[f64]>,
    budget: IpBudget,
) -> Option<Solution> {
    let n = instance.num_items();
    let mut by_item: Vec<Vec<usize>> = vec![Vec::new(); n];
    for c in pool.columns() {
        if state.allows(c.items()) {
            for &i in c.items() {
                by_item[i].push(c.id);
            }
        }
    }
    let value = |c: usize| lp_values.and_then(|x| x.get(c)).copied().unwrap_or(0.0);
    for list in &mut by_item {
        list.sort_by(|&a, &b| {
            value(b)
                .total_cmp(&value(a))
                .then(pool.get(b).items().len().cmp(&pool.get(a).items().len()))
                .then(a.cmp(&b))
        });
    }
    if by_item.iter().any(|l| l.is_empty()) {
        return None;
    }
    let uncovered_load = (0..instance.num_scenarios()).map(|k| instance.scenario_load(k)).collect();
    let mut search = IpSearch {
        instance,
        pool,
        by_item,
        covered: vec![0; n],
        uncovered_load,
        count: vec![0; instance.num_scenarios()],
        chosen: Vec::new(),
        best_value: incumbent.unwrap_or(usize::MAX),
        best: None,
        nodes: 0,
        budget,
        deadline: Instant::now() + budget.time,
        stopped: false,
    };
    search.dfs();
    let cols = search.best?;
    let bins: Vec<Vec<usize>> = cols.iter().map(|&c| pool.get(c).items().to_vec()).collect();
    let sol = repair_cover(n, &bins)?;
    debug_assert!(crate::instance::check_feasible(instance, &sol).is_ok());
    debug_assert!(val_bpps_unchecked(instance, &sol) <= search.best_value);
    Some(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::columns::build_initial_columns;
    use crate::exact::enumeration::solve_enumeration;
    use crate::generator::{generate_instance, GeneratorParams};
    use crate::instance::{check_feasible, val_bpps, Item, Pattern};

    #[test]
    fn repair_removes_duplicates_from_later_bins() {
        let sol = repair_cover(3, &[vec![0, 1], vec![1, 2]]).unwrap();
        assert_eq!(sol.bins(), &[vec![0, 1], vec![2]]);
        assert!(repair_cover(3, &[vec![0, 1]]).is_none());
        let sol = repair_cover(2, &[vec![0, 1], vec![1]]).unwrap();
        assert_eq!(sol.num_bins(), 1);
    }

    #[test]
    fn singleton_pool_gives_singleton_bins() {
        let inst = Instance::new(
            2,
            100,
            vec![Item::new(10, vec![0]), Item::new(10, vec![0, 1]), Item::new(10, vec![1])],
        )
        .unwrap();
        let pool = build_initial_columns(&inst, None);
        let sol = restricted_master_ip(&inst, &pool, &BranchState::new(3), None, None, IpBudget::default()).unwrap();
        assert_eq!(sol.num_bins(), 3);
        assert_eq!(val_bpps(&inst, &sol).unwrap(), 2);
        // nothing strictly better exists in the pool
        assert!(restricted_master_ip(&inst, &pool, &BranchState::new(3), Some(2), None, IpBudget::default()).is_none());
    }

    #[test]
    fn recovers_optimal_patterns_from_pool() {
        for seed in 0..30 {
            let inst = generate_instance(&GeneratorParams::new(8, 4, 900 + seed)).unwrap();
            let opt = solve_enumeration(&inst).unwrap();
            let mut pool = build_initial_columns(&inst, None);
            for bin in opt.bins() {
                pool.insert(Pattern::new(&inst, bin.clone()).unwrap());
            }
            let sol = restricted_master_ip(&inst, &pool, &BranchState::new(8), None, None, IpBudget::default()).unwrap();
            assert!(check_feasible(&inst, &sol).is_ok());
            assert_eq!(val_bpps(&inst, &sol).unwrap(), val_bpps(&inst, &opt).unwrap(), "seed {seed}");
        }
    }

    #[test]
    fn branch_pair_closest_to_half() {
        let items: Vec<Item> = (0..3).map(|_| Item::new(10, vec![0])).collect();
        let inst = Instance::new(1, 100, items).unwrap();
        let mut pool = ColumnPool::new();
        pool.insert(Pattern::new(&inst, vec![0, 1]).unwrap());
        pool.insert(Pattern::new(&inst, vec![0, 2]).unwrap());
        let state = BranchState::new(3);
        assert_eq!(find_branch_pair(&pool, &[0.5, 0.5], &state), Some((0, 1)));
        assert_eq!(find_branch_pair(&pool, &[1.0, 0.0], &state), None);
        assert_eq!(find_branch_pair(&pool, &[0.2, 0.9], &state), Some((0, 1)));
    }
}
