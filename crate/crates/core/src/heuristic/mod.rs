//! Constructive and local-search heuristics.

mod fitness;
mod moves;
mod vns;

pub use fitness::{fitness, Fitness};
pub use moves::{apply_move, enumerate_neighbors, Move, Target, NUM_NEIGHBORHOODS};
pub use vns::{local_search, shake, vns, VnsConfig, VnsError, VnsStats};

use crate::instance::{Instance, Solution};

/// First-fit decreasing: items by non-increasing size (ties by index), each
/// into the lowest-index bin where every scenario load stays within capacity.
pub fn ffd_construct(instance: &Instance) -> Solution {
    let mut order: Vec<usize> = (0..instance.num_items()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(instance.size(i)), i));
    first_fit(instance, &order)
}

/// First-fit in the given item order.
pub fn first_fit(instance: &Instance, order: &[usize]) -> Solution {
    let d = instance.num_scenarios();
    let w = u64::from(instance.capacity());
    let mut bins: Vec<Vec<usize>> = Vec::new();
    let mut loads: Vec<Vec<u64>> = Vec::new();
    for &i in order {
        let s = u64::from(instance.size(i));
        let ks = instance.scenarios_of(i);
        let b = match loads.iter().position(|l| ks.iter().all(|&k| l[k] + s <= w)) {
            Some(b) => b,
            None => {
                bins.push(Vec::new());
                loads.push(vec![0; d]);
                bins.len() - 1
            }
        };
        bins[b].push(i);
        for &k in ks {
            loads[b][k] += s;
        }
    }
    Solution::new(bins)
}
