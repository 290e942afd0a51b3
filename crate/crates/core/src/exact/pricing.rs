use std::time::Instant;

use super::branch::BranchState;
use crate::instance::Instance;

/// Master duals: `alpha` per item (covering rows), `beta` per scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl DualSolution {
    /// Splits raw row duals and clamps `alpha >= 0`, `beta <= 0`.
    pub fn from_rows(row_duals: &[f64], num_items: usize) -> Self {
        DualSolution {
            alpha: row_duals[..num_items].iter().map(|a| a.max(0.0)).collect(),
            beta: row_duals[num_items..].iter().map(|b| b.min(0.0)).collect(),
        }
    }

    /// Value of a pattern: `sum alpha_i + sum over touched k of beta_k`.
    pub fn pattern_value(&self, instance: &Instance, items: &[usize]) -> f64 {
        let mut touched = vec![false; instance.num_scenarios()];
        let mut v = 0.0;
        for &i in items {
            v += self.alpha[i];
            for &k in instance.scenarios_of(i) {
                touched[k] = true;
            }
        }
        v + touched
            .iter()
            .zip(&self.beta)
            .filter(|(t, _)| **t)
            .map(|(_, b)| b)
            .sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PricingResult {
    /// Best value found; 0 for the empty pattern.
    pub value: f64,
    /// Positive-value patterns found (original items, sorted), best first.
    pub patterns: Vec<(Vec<usize>, f64)>,
    /// False when the search stopped on its deadline.
    pub exact: bool,
    pub nodes: u64,
}

impl PricingResult {
    pub fn best(&self) -> Option<&(Vec<usize>, f64)> {
        self.patterns.first()
    }
}

struct Group {
    members: Vec<usize>,
    alpha: f64,
    /// (scenario, load) pairs, scenarios ascending.
    loads: Vec<(usize, u64)>,
    conflicts: Vec<usize>,
}

struct Search<'a> {
    groups: Vec<Group>,
    beta: &'a [f64],
    capacity: u64,
    /// `cover[depth][k]`: candidates at index >= depth that touch `k`.
    cover: Vec<Vec<u32>>,
    load: Vec<u64>,
    touched: Vec<u32>,
    chosen: Vec<usize>,
    blocked: Vec<u32>,
    value: f64,
    best: f64,
    found: Vec<(Vec<usize>, f64)>,
    nodes: u64,
    deadline: Option<Instant>,
    timed_out: bool,
    tol: f64,
}

impl Search<'_> {
    fn bound(&self, depth: usize) -> f64 {
        let mut ub = self.value;
        let cover = &self.cover[depth];
        for g in depth..self.groups.len() {
            if self.blocked[g] > 0 {
                continue;
            }
            let grp = &self.groups[g];
            let mut gain = grp.alpha;
            for &(k, _) in &grp.loads {
                if self.touched[k] == 0 {
                    gain += self.beta[k] / f64::from(cover[k]);
                }
            }
            if gain > 0.0 {
                ub += gain;
            }
        }
        ub
    }

    fn fits(&self, g: usize) -> bool {
        self.blocked[g] == 0
            && self.groups[g]
                .loads
                .iter()
                .all(|&(k, l)| self.load[k] + l <= self.capacity)
    }

    fn dfs(&mut self, depth: usize) {
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) && self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.timed_out = true;
        }
        if self.timed_out {
            return;
        }
        if self.value > self.best + self.tol {
            self.best = self.value;
            let mut items: Vec<usize> = self
                .chosen
                .iter()
                .flat_map(|&g| self.groups[g].members.iter().copied())
                .collect();
            items.sort_unstable();
            self.found.push((items, self.value));
        }
        if depth == self.groups.len() || self.bound(depth) <= self.best + self.tol {
            return;
        }
        if self.fits(depth) {
            let mut delta = self.groups[depth].alpha;
            for &(k, l) in &self.groups[depth].loads {
                if self.touched[k] == 0 {
                    delta += self.beta[k];
                }
                self.touched[k] += 1;
                self.load[k] += l;
            }
            for c in 0..self.groups[depth].conflicts.len() {
                let other = self.groups[depth].conflicts[c];
                self.blocked[other] += 1;
            }
            self.value += delta;
            self.chosen.push(depth);
            self.dfs(depth + 1);
            self.chosen.pop();
            self.value -= delta;
            for c in 0..self.groups[depth].conflicts.len() {
                let other = self.groups[depth].conflicts[c];
                self.blocked[other] -= 1;
            }
            for &(k, l) in &self.groups[depth].loads {
                self.touched[k] -= 1;
                self.load[k] -= l;
            }
        }
        self.dfs(depth + 1);
    }
}

/// Maximizes `sum alpha_i a_i + sum beta_k b_k` over feasible patterns that
/// keep merged items together and apart pairs separated.
///
/// Merged groups act as single items whose load in scenario `k` is the sum of
/// their members' sizes in `k`. Only groups with positive alpha can improve a
/// pattern, so the search runs over those, ordered by alpha descending.
pub fn price(
    instance: &Instance,
    duals: &DualSolution,
    state: &BranchState,
    deadline: Option<Instant>,
) -> PricingResult {
    const TOL: f64 = 1e-9;
    let d = instance.num_scenarios();
    let w = u64::from(instance.capacity());
    let group_lists = state.groups();
    let mut rep_to_group = vec![usize::MAX; instance.num_items()];
    let mut groups: Vec<Group> = Vec::new();
    for members in group_lists {
        let alpha: f64 = members.iter().map(|&i| duals.alpha[i]).sum();
        if alpha <= TOL {
            continue;
        }
        let loads = instance.loads_of(&members);
        if loads.iter().any(|&l| l > w) {
            continue;
        }
        let loads: Vec<(usize, u64)> = loads
            .into_iter()
            .enumerate()
            .filter(|(_, l)| *l > 0)
            .collect();
        rep_to_group[members[0]] = groups.len();
        groups.push(Group {
            members,
            alpha,
            loads,
            conflicts: Vec::new(),
        });
    }
    let mut order: Vec<usize> = (0..groups.len()).collect();
    order.sort_by(|&a, &b| {
        groups[b]
            .alpha
            .total_cmp(&groups[a].alpha)
            .then(groups[a].members[0].cmp(&groups[b].members[0]))
    });
    let mut position = vec![0usize; groups.len()];
    for (pos, &g) in order.iter().enumerate() {
        position[g] = pos;
    }
    for (a, b) in state.apart_pairs() {
        let (ga, gb) = (rep_to_group[state.find(a)], rep_to_group[state.find(b)]);
        if ga == usize::MAX || gb == usize::MAX || ga == gb {
            continue;
        }
        let (pa, pb) = (position[ga], position[gb]);
        // only later groups need blocking
        let (first, second) = (pa.min(pb), pa.max(pb));
        groups[order[first]].conflicts.push(second);
    }
    let mut slots: Vec<Option<Group>> = groups.into_iter().map(Some).collect();
    let groups: Vec<Group> = order.iter().map(|&g| slots[g].take().expect("each group once")).collect();

    let m = groups.len();
    let mut cover = vec![vec![0u32; d]; m + 1];
    for g in (0..m).rev() {
        cover[g] = cover[g + 1].clone();
        for &(k, _) in &groups[g].loads {
            cover[g][k] += 1;
        }
    }

    let mut search = Search {
        groups,
        beta: &duals.beta,
        capacity: w,
        cover,
        load: vec![0; d],
        touched: vec![0; d],
        chosen: Vec::new(),
        blocked: vec![0; m],
        value: 0.0,
        best: 0.0,
        found: Vec::new(),
        nodes: 0,
        deadline,
        timed_out: false,
        tol: TOL,
    };
    search.dfs(0);
    let mut patterns = search.found;
    patterns.reverse();
    PricingResult {
        value: search.best,
        patterns,
        exact: !search.timed_out,
        nodes: search.nodes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{generate_instance, rng_from_seed, GeneratorParams};
    use crate::instance::Item;
    use rand::Rng;

    /// Exhaustive maximum over all item subsets.
    fn brute_force(instance: &Instance, duals: &DualSolution, state: &BranchState) -> f64 {
        let n = instance.num_items();
        let mut best = 0.0f64;
        for mask in 0u32..(1 << n) {
            let items: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            if !instance.fits(&items) || !state.allows(&items) {
                continue;
            }
            best = best.max(duals.pattern_value(instance, &items));
        }
        best
    }

    fn random_duals(instance: &Instance, rng: &mut impl Rng) -> DualSolution {
        // multiples of 1/64 keep every sum exact in f64
        DualSolution {
            alpha: (0..instance.num_items())
                .map(|_| f64::from(rng.gen_range(0..64u32)) / 64.0)
                .collect(),
            beta: (0..instance.num_scenarios())
                .map(|_| -f64::from(rng.gen_range(0..96u32)) / 64.0)
                .collect(),
        }
    }

    #[test]
    fn zero_duals_give_empty_pattern() {
        let inst = Instance::new(1, 100, vec![Item::new(10, vec![0])]).unwrap();
        let duals = DualSolution { alpha: vec![0.0], beta: vec![0.0] };
        let r = price(&inst, &duals, &BranchState::new(1), None);
        assert_eq!(r.value, 0.0);
        assert!(r.best().is_none());
    }

    #[test]
    fn single_candidate() {
        let inst = Instance::new(1, 100, vec![Item::new(10, vec![0])]).unwrap();
        let duals = DualSolution { alpha: vec![1.0], beta: vec![-0.4] };
        let r = price(&inst, &duals, &BranchState::new(1), None);
        assert!((r.value - 0.6).abs() < 1e-12);
        assert_eq!(r.best().unwrap().0, vec![0]);
    }

    #[test]
    fn clamps_dual_signs() {
        let d = DualSolution::from_rows(&[0.5, -1e-10, 1e-10, -0.25], 2);
        assert_eq!(d.alpha, vec![0.5, 0.0]);
        assert_eq!(d.beta, vec![0.0, -0.25]);
    }

    #[test]
    fn matches_subset_enumeration() {
        let mut rng = rng_from_seed(77);
        for seed in 0..100 {
            let n = rng.gen_range(1..=12);
            let d = rng.gen_range(1..=6);
            let inst = generate_instance(&GeneratorParams::new(n, d, seed)).unwrap();
            let duals = random_duals(&inst, &mut rng);
            let state = BranchState::new(n);
            let r = price(&inst, &duals, &state, None);
            assert!(r.exact);
            assert_eq!(r.value, brute_force(&inst, &duals, &state), "seed {seed}");
            if let Some((items, v)) = r.best() {
                assert!(inst.fits(items));
                assert_eq!(*v, duals.pattern_value(&inst, items));
            }
        }
    }

    #[test]
    fn honors_branching_decisions() {
        let mut rng = rng_from_seed(78);
        for seed in 0..100 {
            let n = rng.gen_range(3..=10);
            let inst = generate_instance(&GeneratorParams::new(n, 3, 500 + seed)).unwrap();
            let duals = random_duals(&inst, &mut rng);
            let mut state = BranchState::new(n);
            for _ in 0..2 {
                let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
                if a == b {
                    continue;
                }
                let next = if rng.gen_bool(0.5) {
                    state.together(a, b)
                } else {
                    state.apart(a, b)
                };
                if next.is_consistent() {
                    state = next;
                }
            }
            let r = price(&inst, &duals, &state, None);
            assert_eq!(r.value, brute_force(&inst, &duals, &state), "seed {seed}");
            for (items, _) in &r.patterns {
                assert!(state.allows(items) && inst.fits(items));
            }
        }
    }
}
