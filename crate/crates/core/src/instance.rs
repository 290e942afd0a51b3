//! Instance and solution data model for bin packing with scenarios.
//!
//! Items and scenarios are indexed from zero inside the library. Text formats
//! (instance files, solution records) use one-based indices.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("scenario count must be positive")]
    NoScenarios,
    #[error("bin capacity must be positive")]
    ZeroCapacity,
    #[error("item {item}: size {size} outside 1..={capacity}")]
    SizeOutOfRange { item: usize, size: u32, capacity: u32 },
    #[error("item {item}: empty scenario set")]
    EmptyScenarioSet { item: usize },
    #[error("item {item}: scenario index {scenario} outside 0..{num_scenarios}")]
    ScenarioOutOfRange {
        item: usize,
        scenario: usize,
        num_scenarios: usize,
    },
    #[error("item {item}: scenario {scenario} listed twice")]
    DuplicateScenario { item: usize, scenario: usize },
}

/// One item of an instance: a size and the scenarios in which it is present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Item {
    pub size: u32,
    pub scenarios: Vec<usize>,
}

impl Item {
    pub fn new(size: u32, scenarios: impl Into<Vec<usize>>) -> Self {
        Item {
            size,
            scenarios: scenarios.into(),
        }
    }
}

/// A validated instance. Scenario sets are stored sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    capacity: u32,
    num_scenarios: usize,
    items: Vec<Item>,
    scenario_items: Vec<Vec<usize>>,
}

impl Instance {
    pub fn new(num_scenarios: usize, capacity: u32, mut items: Vec<Item>) -> Result<Self, InstanceError> {
        if num_scenarios == 0 {
            return Err(InstanceError::NoScenarios);
        }
        if capacity == 0 {
            return Err(InstanceError::ZeroCapacity);
        }
        let mut scenario_items = vec![Vec::new(); num_scenarios];
        for (i, item) in items.iter_mut().enumerate() {
            if item.size == 0 || item.size > capacity {
                return Err(InstanceError::SizeOutOfRange {
                    item: i,
                    size: item.size,
                    capacity,
                });
            }
            if item.scenarios.is_empty() {
                return Err(InstanceError::EmptyScenarioSet { item: i });
            }
            item.scenarios.sort_unstable();
            for w in item.scenarios.windows(2) {
                if w[0] == w[1] {
                    return Err(InstanceError::DuplicateScenario {
                        item: i,
                        scenario: w[0],
                    });
                }
            }
            for &k in &item.scenarios {
                if k >= num_scenarios {
                    return Err(InstanceError::ScenarioOutOfRange {
                        item: i,
                        scenario: k,
                        num_scenarios,
                    });
                }
                scenario_items[k].push(i);
            }
        }
        Ok(Instance {
            capacity,
            num_scenarios,
            items,
            scenario_items,
        })
    }

    #[inline]
    pub fn num_items(&self) -> usize {
        self.items.len()
    }

    #[inline]
    pub fn num_scenarios(&self) -> usize {
        self.num_scenarios
    }

    #[inline]
    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    #[inline]
    pub fn size(&self, item: usize) -> u32 {
        self.items[item].size
    }

    /// Sorted scenario set K_i of an item.
    #[inline]
    pub fn scenarios_of(&self, item: usize) -> &[usize] {
        &self.items[item].scenarios
    }

    /// Items present in scenario `k` (S_k), in increasing index order.
    #[inline]
    pub fn items_in_scenario(&self, k: usize) -> &[usize] {
        &self.scenario_items[k]
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    /// Total size of the items of scenario `k`.
    pub fn scenario_load(&self, k: usize) -> u64 {
        self.scenario_items[k]
            .iter()
            .map(|&i| u64::from(self.items[i].size))
            .sum()
    }

    pub fn in_scenario(&self, item: usize, k: usize) -> bool {
        self.items[item].scenarios.binary_search(&k).is_ok()
    }

    /// Per-scenario loads of an item set. Returns a dense vector of length d.
    pub fn loads_of<'a>(&self, items: impl IntoIterator<Item = &'a usize>) -> Vec<u64> {
        let mut loads = vec![0u64; self.num_scenarios];
        for &i in items {
            let s = u64::from(self.items[i].size);
            for &k in &self.items[i].scenarios {
                loads[k] += s;
            }
        }
        loads
    }

    /// True when the item set respects the capacity in every scenario.
    pub fn fits<'a>(&self, items: impl IntoIterator<Item = &'a usize>) -> bool {
        let w = u64::from(self.capacity);
        self.loads_of(items).iter().all(|&l| l <= w)
    }
}

/// A packing: a list of bins, each a list of item indices.
///
/// The order of bins and of items inside a bin is preserved; some heuristics
/// depend on it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Solution {
    bins: Vec<Vec<usize>>,
}

impl Solution {
    pub fn new(bins: Vec<Vec<usize>>) -> Self {
        Solution { bins }
    }

    /// One bin per item.
    pub fn singletons(n: usize) -> Self {
        Solution {
            bins: (0..n).map(|i| vec![i]).collect(),
        }
    }

    pub fn bins(&self) -> &[Vec<usize>] {
        &self.bins
    }

    pub fn into_bins(self) -> Vec<Vec<usize>> {
        self.bins
    }

    pub fn num_bins(&self) -> usize {
        self.bins.len()
    }

    /// Copy with items sorted inside bins and bins sorted by first item.
    pub fn canonical(&self) -> Solution {
        let mut bins: Vec<Vec<usize>> = self
            .bins
            .iter()
            .map(|b| {
                let mut b = b.clone();
                b.sort_unstable();
                b
            })
            .collect();
        bins.sort();
        Solution { bins }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    ItemOutOfRange { bin: usize, item: usize },
    DuplicateItem { item: usize, first_bin: usize, second_bin: usize },
    MissingItem { item: usize },
    EmptyBin { bin: usize },
    Overload { bin: usize, scenario: usize, load: u64, capacity: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ItemOutOfRange { bin, item } => {
                write!(f, "bin {bin}: item {item} does not exist")
            }
            Violation::DuplicateItem {
                item,
                first_bin,
                second_bin,
            } => write!(f, "item {item} packed in bins {first_bin} and {second_bin}"),
            Violation::MissingItem { item } => write!(f, "item {item} is not packed"),
            Violation::EmptyBin { bin } => write!(f, "bin {bin} is empty"),
            Violation::Overload {
                bin,
                scenario,
                load,
                capacity,
            } => write!(
                f,
                "bin {bin}, scenario {scenario}: load {load} exceeds capacity {capacity} by {}",
                load - u64::from(*capacity)
            ),
        }
    }
}

/// Outcome of [`check_feasible`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for FeasibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("infeasible solution: {0}")]
pub struct InfeasibleSolution(pub FeasibilityReport);

/// Checks the partition property and every per-scenario capacity constraint.
pub fn check_feasible(instance: &Instance, solution: &Solution) -> FeasibilityReport {
    let n = instance.num_items();
    let w = instance.capacity();
    let mut violations = Vec::new();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for (b, bin) in solution.bins().iter().enumerate() {
        if bin.is_empty() {
            violations.push(Violation::EmptyBin { bin: b });
            continue;
        }
        let mut in_range = Vec::with_capacity(bin.len());
        for &i in bin {
            if i >= n {
                violations.push(Violation::ItemOutOfRange { bin: b, item: i });
                continue;
            }
            match owner[i] {
                Some(first) => violations.push(Violation::DuplicateItem {
                    item: i,
                    first_bin: first,
                    second_bin: b,
                }),
                None => owner[i] = Some(b),
            }
            in_range.push(i);
        }
        for (k, &load) in instance.loads_of(&in_range).iter().enumerate() {
            if load > u64::from(w) {
                violations.push(Violation::Overload {
                    bin: b,
                    scenario: k,
                    load,
                    capacity: w,
                });
            }
        }
    }
    for (i, o) in owner.iter().enumerate() {
        if o.is_none() {
            violations.push(Violation::MissingItem { item: i });
        }
    }
    FeasibilityReport { violations }
}

/// Number of bins touching each scenario (|B_k|), without feasibility checks.
pub fn bins_per_scenario(instance: &Instance, solution: &Solution) -> Vec<usize> {
    let d = instance.num_scenarios();
    let mut counts = vec![0usize; d];
    let mut seen = vec![usize::MAX; d];
    for (b, bin) in solution.bins().iter().enumerate() {
        for &i in bin {
            for &k in instance.scenarios_of(i) {
                if seen[k] != b {
                    seen[k] = b;
                    counts[k] += 1;
                }
            }
        }
    }
    counts
}

/// Worst-case scenario bin count, assuming the solution is feasible.
pub(crate) fn val_bpps_unchecked(instance: &Instance, solution: &Solution) -> usize {
    bins_per_scenario(instance, solution)
        .into_iter()
        .max()
        .unwrap_or(0)
}

/// Maximum over scenarios of the number of bins used in that scenario.
pub fn val_bpps(instance: &Instance, solution: &Solution) -> Result<usize, InfeasibleSolution> {
    let report = check_feasible(instance, solution);
    if !report.is_ok() {
        return Err(InfeasibleSolution(report));
    }
    Ok(val_bpps_unchecked(instance, solution))
}

/// Total number of bins.
pub fn val_vbpp(solution: &Solution) -> usize {
    solution.num_bins()
}

/// A feasible single-bin item set together with the scenarios it touches.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    items: Vec<usize>,
    touched: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("item {0} does not exist")]
    UnknownItem(usize),
    #[error("item {0} listed twice")]
    DuplicateItem(usize),
    #[error("scenario {scenario}: load {load} exceeds capacity")]
    Overload { scenario: usize, load: u64 },
}

impl Pattern {
    pub fn new(instance: &Instance, items: impl Into<Vec<usize>>) -> Result<Self, PatternError> {
        let mut items = items.into();
        items.sort_unstable();
        for w in items.windows(2) {
            if w[0] == w[1] {
                return Err(PatternError::DuplicateItem(w[0]));
            }
        }
        if let Some(&bad) = items.iter().find(|&&i| i >= instance.num_items()) {
            return Err(PatternError::UnknownItem(bad));
        }
        let loads = instance.loads_of(&items);
        let w = u64::from(instance.capacity());
        if let Some((k, &load)) = loads.iter().enumerate().find(|(_, &l)| l > w) {
            return Err(PatternError::Overload { scenario: k, load });
        }
        let touched = loads
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > 0)
            .map(|(k, _)| k)
            .collect();
        Ok(Pattern { items, touched })
    }

    /// Sorted packed items (the a_ip support).
    pub fn items(&self) -> &[usize] {
        &self.items
    }

    /// Sorted touched scenarios (the b_kp support).
    pub fn touched_scenarios(&self) -> &[usize] {
        &self.touched
    }

    pub fn contains(&self, item: usize) -> bool {
        self.items.binary_search(&item).is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_items(k1: &[usize], k2: &[usize]) -> Instance {
        Instance::new(
            2,
            100,
            vec![Item::new(60, k1.to_vec()), Item::new(60, k2.to_vec())],
        )
        .unwrap()
    }

    #[test]
    fn disjoint_scenarios_share_a_bin() {
        let inst = two_items(&[0], &[1]);
        let sol = Solution::new(vec![vec![0, 1]]);
        assert!(check_feasible(&inst, &sol).is_ok());
        assert_eq!(val_bpps(&inst, &sol).unwrap(), 1);
        assert_eq!(val_vbpp(&sol), 1);
    }

    #[test]
    fn overload_is_reported() {
        let inst = two_items(&[0], &[0]);
        let sol = Solution::new(vec![vec![0, 1]]);
        let report = check_feasible(&inst, &sol);
        assert_eq!(
            report.violations,
            vec![Violation::Overload {
                bin: 0,
                scenario: 0,
                load: 120,
                capacity: 100
            }]
        );
        assert!(val_bpps(&inst, &sol).is_err());
    }

    #[test]
    fn duplicate_item_is_reported() {
        let inst = two_items(&[0], &[1]);
        let sol = Solution::new(vec![vec![0], vec![0, 1]]);
        let report = check_feasible(&inst, &sol);
        assert!(report.violations.contains(&Violation::DuplicateItem {
            item: 0,
            first_bin: 0,
            second_bin: 1
        }));
    }

    #[test]
    fn missing_and_out_of_range_items() {
        let inst = two_items(&[0], &[1]);
        let report = check_feasible(&inst, &Solution::new(vec![vec![0, 7]]));
        assert!(report
            .violations
            .contains(&Violation::ItemOutOfRange { bin: 0, item: 7 }));
        assert!(report.violations.contains(&Violation::MissingItem { item: 1 }));
    }

    #[test]
    fn objective_values() {
        let inst = two_items(&[0], &[1]);
        let sol = Solution::new(vec![vec![0], vec![1]]);
        assert_eq!(val_bpps(&inst, &sol).unwrap(), 1);
        let inst = two_items(&[0], &[0]);
        assert_eq!(val_bpps(&inst, &sol).unwrap(), 2);
        assert_eq!(val_vbpp(&sol), 2);
    }

    #[test]
    fn empty_instance_has_zero_value() {
        let inst = Instance::new(1, 100, vec![]).unwrap();
        assert_eq!(val_bpps(&inst, &Solution::default()).unwrap(), 0);
    }

    #[test]
    fn construction_rejects_bad_items() {
        assert_eq!(
            Instance::new(1, 100, vec![Item::new(101, vec![0])]),
            Err(InstanceError::SizeOutOfRange {
                item: 0,
                size: 101,
                capacity: 100
            })
        );
        assert_eq!(
            Instance::new(1, 100, vec![Item::new(5, vec![])]),
            Err(InstanceError::EmptyScenarioSet { item: 0 })
        );
        assert!(matches!(
            Instance::new(2, 100, vec![Item::new(5, vec![2])]),
            Err(InstanceError::ScenarioOutOfRange { .. })
        ));
        assert_eq!(Instance::new(0, 100, vec![]), Err(InstanceError::NoScenarios));
    }

    #[test]
    fn pattern_touches_union_of_scenarios() {
        let inst = Instance::new(
            3,
            100,
            vec![Item::new(30, vec![0, 2]), Item::new(40, vec![2])],
        )
        .unwrap();
        let p = Pattern::new(&inst, vec![1, 0]).unwrap();
        assert_eq!(p.items(), &[0, 1]);
        assert_eq!(p.touched_scenarios(), &[0, 2]);
        let inst = two_items(&[0], &[0]);
        assert!(matches!(
            Pattern::new(&inst, vec![0, 1]),
            Err(PatternError::Overload { scenario: 0, load: 120 })
        ));
    }

    #[test]
    fn scenario_accessors() {
        let inst = Instance::new(
            2,
            10,
            vec![Item::new(3, vec![1, 0]), Item::new(4, vec![1])],
        )
        .unwrap();
        assert_eq!(inst.scenarios_of(0), &[0, 1]);
        assert_eq!(inst.items_in_scenario(1), &[0, 1]);
        assert_eq!(inst.scenario_load(1), 7);
        assert!(inst.in_scenario(1, 1) && !inst.in_scenario(1, 0));
    }
}
