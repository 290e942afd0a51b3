use std::collections::HashMap;

use crate::instance::{Instance, Pattern, Solution};

/// A master-problem column: one feasible bin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub id: usize,
    pub pattern: Pattern,
}

impl Column {
    pub fn items(&self) -> &[usize] {
        self.pattern.items()
    }

    pub fn touched_scenarios(&self) -> &[usize] {
        self.pattern.touched_scenarios()
    }

    /// Master coefficients `(row, 1.0)`: item rows first, then one row per
    /// scenario at offset `num_items`.
    pub fn master_entries(&self, num_items: usize) -> Vec<(usize, f64)> {
        self.items()
            .iter()
            .map(|&i| (i, 1.0))
            .chain(self.touched_scenarios().iter().map(|&k| (num_items + k, 1.0)))
            .collect()
    }
}

/// Column pool deduplicated by sorted item set.
#[derive(Debug, Clone, Default)]
pub struct ColumnPool {
    columns: Vec<Column>,
    index: HashMap<Vec<usize>, usize>,
}

impl ColumnPool {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a pattern unless an identical item set is present. Returns the
    /// column id and whether it was new.
    pub fn insert(&mut self, pattern: Pattern) -> (usize, bool) {
        if let Some(&id) = self.index.get(pattern.items()) {
            return (id, false);
        }
        let id = self.columns.len();
        self.index.insert(pattern.items().to_vec(), id);
        self.columns.push(Column { id, pattern });
        (id, true)
    }

    pub fn find(&self, items: &[usize]) -> Option<usize> {
        self.index.get(items).copied()
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn get(&self, id: usize) -> &Column {
        &self.columns[id]
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }
}

/// Singleton columns for every item, optionally followed by the bins of a
/// warm-start solution.
pub fn build_initial_columns(instance: &Instance, warm_start: Option<&Solution>) -> ColumnPool {
    let mut pool = ColumnPool::new();
    for i in 0..instance.num_items() {
        let p = Pattern::new(instance, vec![i]).expect("every item fits alone");
        pool.insert(p);
    }
    if let Some(sol) = warm_start {
        for bin in sol.bins() {
            if let Ok(p) = Pattern::new(instance, bin.clone()) {
                pool.insert(p);
            }
        }
    }
    pool
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Item;

    fn inst() -> Instance {
        Instance::new(
            2,
            100,
            vec![
                Item::new(40, vec![0]),
                Item::new(40, vec![0, 1]),
                Item::new(70, vec![1]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn singletons_carry_scenario_incidence() {
        let inst = inst();
        let pool = build_initial_columns(&inst, None);
        assert_eq!(pool.len(), 3);
        assert_eq!(pool.get(1).touched_scenarios(), &[0, 1]);
        assert_eq!(pool.get(2).master_entries(3), vec![(2, 1.0), (4, 1.0)]);
    }

    #[test]
    fn warm_start_bins_are_deduplicated() {
        let inst = inst();
        let warm = Solution::new(vec![vec![1, 0], vec![2]]);
        let pool = build_initial_columns(&inst, Some(&warm));
        assert_eq!(pool.len(), 4);
        assert_eq!(pool.find(&[0, 1]), Some(3));
        let warm2 = Solution::new(vec![vec![0, 2], vec![1]]);
        assert_eq!(build_initial_columns(&inst, Some(&warm2)).len(), 4);
    }
}
