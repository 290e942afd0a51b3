use std::collections::BTreeSet;

use super::columns::ColumnPool;

/// Ryan-Foster decisions: items forced into the same bin and pairs forced
/// into different bins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchState {
    parent: Vec<usize>,
    group_size: Vec<usize>,
    apart: BTreeSet<(usize, usize)>,
}

impl BranchState {
    pub fn new(num_items: usize) -> Self {
        BranchState {
            parent: (0..num_items).collect(),
            group_size: vec![1; num_items],
            apart: BTreeSet::new(),
        }
    }

    pub fn num_items(&self) -> usize {
        self.parent.len()
    }

    /// Group representative: the smallest item of the group.
    pub fn find(&self, mut i: usize) -> usize {
        while self.parent[i] != i {
            i = self.parent[i];
        }
        i
    }

    pub fn same_group(&self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    /// Child with `a` and `b` in one bin.
    pub fn together(&self, a: usize, b: usize) -> BranchState {
        let mut next = self.clone();
        let (ra, rb) = (next.find(a), next.find(b));
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        if lo == hi {
            return next;
        }
        next.parent[hi] = lo;
        next.group_size[lo] += next.group_size[hi];
        next.group_size[hi] = 0;
        // flatten so `find` stays cheap
        for i in 0..next.parent.len() {
            let r = next.find(i);
            next.parent[i] = r;
        }
        next
    }

    /// Child with `a` and `b` in different bins.
    pub fn apart(&self, a: usize, b: usize) -> BranchState {
        let mut next = self.clone();
        next.apart.insert((a.min(b), a.max(b)));
        next
    }

    pub fn apart_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.apart.iter().copied()
    }

    /// False when some apart pair has been merged.
    pub fn is_consistent(&self) -> bool {
        self.apart.iter().all(|&(a, b)| !self.same_group(a, b))
    }

    /// Groups ordered by representative, members ascending.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let n = self.num_items();
        let mut by_rep: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 0..n {
            by_rep[self.find(i)].push(i);
        }
        by_rep.into_iter().filter(|g| !g.is_empty()).collect()
    }

    /// A column survives iff it holds whole groups and no apart pair.
    pub fn allows(&self, items: &[usize]) -> bool {
        let contains = |i: usize| items.binary_search(&i).is_ok();
        for &i in items {
            let r = self.find(i);
            if !contains(r) {
                return false;
            }
        }
        let members: usize = items
            .iter()
            .filter(|&&i| self.parent[i] == i)
            .map(|&i| self.group_size[i])
            .sum();
        if members != items.len() {
            return false;
        }
        self.apart.iter().all(|&(a, b)| !(contains(a) && contains(b)))
    }

    /// Ids of pool columns whose upper bound is zero at this node.
    pub fn column_fixes(&self, pool: &ColumnPool) -> Vec<usize> {
        pool.columns()
            .iter()
            .filter(|c| !self.allows(c.items()))
            .map(|c| c.id)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::columns::build_initial_columns;
    use crate::instance::{Instance, Item, Pattern};

    #[test]
    fn together_merges_groups() {
        let s = BranchState::new(5).together(3, 1).together(4, 3);
        assert_eq!(s.groups(), vec![vec![0], vec![1, 3, 4], vec![2]]);
        assert_eq!(s.find(4), 1);
        assert!(s.allows(&[0, 1, 3, 4]));
        assert!(!s.allows(&[1, 3]));
        assert!(!s.allows(&[0, 4]));
    }

    #[test]
    fn apart_forbids_pairs_and_detects_conflicts() {
        let s = BranchState::new(4).apart(2, 0);
        assert!(!s.allows(&[0, 2]));
        assert!(s.allows(&[0, 1]));
        assert!(s.is_consistent());
        assert!(!s.together(0, 2).is_consistent());
        // apart pair reached through merged groups
        let t = s.together(1, 2);
        assert!(!t.allows(&[0, 1, 2]));
        assert!(!t.together(0, 1).is_consistent());
    }

    #[test]
    fn children_partition_columns_correctly() {
        let items: Vec<Item> = (0..4).map(|_| Item::new(20, vec![0])).collect();
        let inst = Instance::new(1, 100, items).unwrap();
        let mut pool = build_initial_columns(&inst, None);
        for set in [vec![0, 1], vec![0, 2], vec![1, 2, 3], vec![0, 1, 3]] {
            pool.insert(Pattern::new(&inst, set).unwrap());
        }
        let root = BranchState::new(4);
        let tog = root.together(0, 1);
        for c in pool.columns() {
            let both = c.pattern.contains(0) && c.pattern.contains(1);
            let neither = !c.pattern.contains(0) && !c.pattern.contains(1);
            let fixed = tog.column_fixes(&pool).contains(&c.id);
            assert_eq!(fixed, !(both || neither), "{:?}", c.items());
        }
        let apart = root.apart(0, 1);
        for c in pool.columns() {
            let both = c.pattern.contains(0) && c.pattern.contains(1);
            assert_eq!(apart.column_fixes(&pool).contains(&c.id), both);
        }
    }
}
