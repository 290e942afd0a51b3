//! Reduction to vector bin packing and minimal solutions.
//!
//! A scenario instance maps to a d-dimensional vector instance where item `i`
//! consumes `s_i` in every dimension `k` with `k` in `K_i` and nothing
//! elsewhere. Both instances have exactly the same feasible bin sets. Any
//! solution in which no two bins can be merged (a minimal solution) uses at
//! most `sqrt(d)` times as many bins in total as in its worst scenario.

use crate::instance::{check_feasible, InfeasibleSolution, Instance, Item, Solution};

/// Vector bin packing instance with a uniform capacity per dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VbppInstance {
    dims: usize,
    capacity: u32,
    /// Row-major `n x d` consumption matrix.
    consumption: Vec<u32>,
}

impl VbppInstance {
    pub fn num_items(&self) -> usize {
        if self.dims == 0 {
            0
        } else {
            self.consumption.len() / self.dims
        }
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    pub fn row(&self, item: usize) -> &[u32] {
        &self.consumption[item * self.dims..(item + 1) * self.dims]
    }

    pub fn max_component(&self, item: usize) -> u32 {
        self.row(item).iter().copied().max().unwrap_or(0)
    }

    /// Every dimension of every bin within capacity, and each item packed once.
    pub fn is_feasible(&self, solution: &Solution) -> bool {
        let n = self.num_items();
        let mut seen = vec![false; n];
        for bin in solution.bins() {
            if bin.is_empty() {
                return false;
            }
            let mut load = vec![0u64; self.dims];
            for &i in bin {
                if i >= n || seen[i] {
                    return false;
                }
                seen[i] = true;
                for (l, &c) in load.iter_mut().zip(self.row(i)) {
                    *l += u64::from(c);
                }
            }
            if load.iter().any(|&l| l > u64::from(self.capacity)) {
                return false;
            }
        }
        seen.into_iter().all(|s| s)
    }
}

pub fn to_vbpp(instance: &Instance) -> VbppInstance {
    let d = instance.num_scenarios();
    let mut consumption = vec![0u32; instance.num_items() * d];
    for i in 0..instance.num_items() {
        for &k in instance.scenarios_of(i) {
            consumption[i * d + k] = instance.size(i);
        }
    }
    VbppInstance {
        dims: d,
        capacity: instance.capacity(),
        consumption,
    }
}

/// Items by non-increasing largest component, ties by index.
pub fn default_order(vbpp: &VbppInstance) -> Vec<usize> {
    let mut order: Vec<usize> = (0..vbpp.num_items()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(vbpp.max_component(i)), i));
    order
}

/// First-fit over all dimensions in the given order.
pub fn first_fit_vbpp(vbpp: &VbppInstance, order: &[usize]) -> Solution {
    let d = vbpp.dims();
    let w = u64::from(vbpp.capacity());
    let mut bins: Vec<Vec<usize>> = Vec::new();
    let mut loads: Vec<Vec<u64>> = Vec::new();
    for &i in order {
        let row = vbpp.row(i);
        let fits = |l: &Vec<u64>| l.iter().zip(row).all(|(&a, &c)| a + u64::from(c) <= w);
        let b = match loads.iter().position(fits) {
            Some(b) => b,
            None => {
                bins.push(Vec::new());
                loads.push(vec![0; d]);
                bins.len() - 1
            }
        };
        bins[b].push(i);
        for (l, &c) in loads[b].iter_mut().zip(row) {
            *l += u64::from(c);
        }
    }
    Solution::new(bins)
}

fn mergeable(instance: &Instance, a: &[u64], b: &[u64]) -> bool {
    let w = u64::from(instance.capacity());
    a.iter().zip(b).all(|(&x, &y)| x + y <= w)
}

/// True when every pair of bins conflicts in at least one scenario.
pub fn is_minimal(instance: &Instance, solution: &Solution) -> bool {
    let loads: Vec<Vec<u64>> = solution.bins().iter().map(|b| instance.loads_of(b)).collect();
    for a in 0..loads.len() {
        for b in (a + 1)..loads.len() {
            if mergeable(instance, &loads[a], &loads[b]) {
                return false;
            }
        }
    }
    true
}

/// Merges bin pairs in lexicographic index order, restarting the scan after
/// each merge, until no pair can be merged. The merged bin takes the lower
/// index and the higher one is removed.
pub fn minimalize(instance: &Instance, solution: &Solution) -> Result<Solution, InfeasibleSolution> {
    let report = check_feasible(instance, solution);
    if !report.is_ok() {
        return Err(InfeasibleSolution(report));
    }
    let mut bins = solution.bins().to_vec();
    let mut loads: Vec<Vec<u64>> = bins.iter().map(|b| instance.loads_of(b)).collect();
    'scan: loop {
        for a in 0..bins.len() {
            for b in (a + 1)..bins.len() {
                if mergeable(instance, &loads[a], &loads[b]) {
                    let moved = bins.remove(b);
                    let moved_load = loads.remove(b);
                    bins[a].extend(moved);
                    for (x, y) in loads[a].iter_mut().zip(moved_load) {
                        *x += y;
                    }
                    continue 'scan;
                }
            }
        }
        break;
    }
    Ok(Solution::new(bins))
}

/// Reduction pipeline: map to vector packing, first-fit in the default
/// order, then merge bins until the solution is minimal.
pub fn approx_solve(instance: &Instance) -> Solution {
    let vbpp = to_vbpp(instance);
    let packed = first_fit_vbpp(&vbpp, &default_order(&vbpp));
    minimalize(instance, &packed).expect("vector packing is feasible for the scenario instance")
}

/// Worst-case family for the ratio between total and worst-scenario bins.
///
/// `r = ceil(sqrt(d))` items of size `W`; one scenario per pair of items
/// (scenarios `0 .. r(r-1)/2`), the remaining scenarios empty. For `d = 1`
/// the single item gets scenario 0. The reference solution packs every item
/// alone.
pub fn build_theorem3_instance(d: usize, capacity: u32) -> (Instance, Solution) {
    assert!(d >= 1, "scenario count must be positive");
    let r = ceil_sqrt(d);
    let mut sets: Vec<Vec<usize>> = vec![Vec::new(); r];
    if r == 1 {
        sets[0].push(0);
    } else {
        let mut k = 0;
        for i in 0..r {
            for j in (i + 1)..r {
                sets[i].push(k);
                sets[j].push(k);
                k += 1;
            }
        }
        debug_assert!(k <= d);
    }
    let items = sets.into_iter().map(|s| Item::new(capacity, s)).collect();
    let instance = Instance::new(d, capacity, items).expect("construction is valid");
    (instance, Solution::singletons(r))
}

/// Smallest `r` with `r * r >= d`.
pub fn ceil_sqrt(d: usize) -> usize {
    let mut r = (d as f64).sqrt() as usize;
    while r * r < d {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= d {
        r -= 1;
    }
    r
}
