use std::time::Instant;

use super::branch::BranchState;
use super::columns::ColumnPool;
use super::pricing::{price, DualSolution};
use crate::instance::{Instance, Pattern};
use crate::lp::{LpProblem, LpSolution, LpSolver, LpStatus, RowSense};

/// Slack below which a fractional master value is treated as integral.
pub const INTEGRALITY_TOL: f64 = 1e-6;
const PRICING_TOL: f64 = 1e-8;

/// Restricted master problem over a growing column pool.
///
/// Rows `0..n` are item covering rows (`>= 1`), rows `n..n+d` link scenario
/// usage to `F` (`sum b X - F <= 0`). LP variable 0 is `F`, variable `p + 1`
/// is pool column `p`.
#[derive(Debug, Clone)]
pub struct Master<'a> {
    instance: &'a Instance,
    pool: ColumnPool,
    solver: LpSolver,
    pricing_columns: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RmpSolution {
    pub lp: LpSolution,
    pub duals: DualSolution,
}

impl RmpSolution {
    /// Objective value `F*`.
    pub fn value(&self) -> f64 {
        self.lp.objective
    }

    /// Value of pool column `id`.
    pub fn column_value(&self, id: usize) -> f64 {
        self.lp.x[id + 1]
    }

    pub fn column_values(&self) -> &[f64] {
        &self.lp.x[1..]
    }
}

/// Outcome of column generation at one node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeResult {
    pub rmp: RmpSolution,
    /// `ceil(F* - tol)`; only a valid bound when `proven` holds.
    pub lp_bound: usize,
    /// Pricing certified that no improving column exists.
    pub proven: bool,
    pub columns_added: usize,
    pub infeasible: bool,
}

impl<'a> Master<'a> {
    pub fn new(instance: &'a Instance, pool: ColumnPool) -> Self {
        let n = instance.num_items();
        let d = instance.num_scenarios();
        let mut rows = vec![(RowSense::Ge, 1.0); n];
        rows.extend(std::iter::repeat_n((RowSense::Le, 0.0), d));
        let mut problem = LpProblem::new(rows).expect("finite rows");
        let f_entries: Vec<(usize, f64)> = (0..d).map(|k| (n + k, -1.0)).collect();
        problem
            .add_column(1.0, &f_entries, 0.0, n as f64)
            .expect("valid F column");
        let mut master = Master {
            instance,
            pool: ColumnPool::new(),
            solver: LpSolver::new(problem),
            pricing_columns: 10,
        };
        for c in pool.columns() {
            master.add_pattern(c.pattern.clone());
        }
        master
    }

    /// Caps the number of columns taken from one pricing round.
    pub fn with_pricing_columns(mut self, count: usize) -> Self {
        self.pricing_columns = count.max(1);
        self
    }

    pub fn pool(&self) -> &ColumnPool {
        &self.pool
    }

    pub fn instance(&self) -> &'a Instance {
        self.instance
    }

    /// Adds a column unless its item set is already pooled.
    pub fn add_pattern(&mut self, pattern: Pattern) -> (usize, bool) {
        let (id, new) = self.pool.insert(pattern);
        if new {
            let entries = self.pool.get(id).master_entries(self.instance.num_items());
            let var = self
                .solver
                .add_column(0.0, &entries, 0.0, f64::INFINITY)
                .expect("valid pattern column");
            debug_assert_eq!(var, id + 1);
        }
        (id, new)
    }

    fn apply_fixes(&mut self, state: &BranchState) {
        for c in 0..self.pool.len() {
            let allowed = state.allows(self.pool.get(c).items());
            let upper = if allowed { f64::INFINITY } else { 0.0 };
            self.solver.set_bounds(c + 1, 0.0, upper).expect("known column");
        }
    }

    /// Solves the LP relaxation over the pool columns allowed at `state`.
    ///
    /// Pattern variables carry no upper bound: with covering rows any value
    /// above one can be lowered to one without loss, so the optimum matches
    /// the `X <= 1` relaxation while pool columns stay dual feasible.
    pub fn solve_rmp(&mut self, state: &BranchState) -> RmpSolution {
        self.apply_fixes(state);
        let lp = self.solver.solve();
        let duals = DualSolution::from_rows(&lp.duals, self.instance.num_items());
        RmpSolution { lp, duals }
    }

    /// Alternates master solves and pricing until no column prices out or
    /// the deadline passes.
    pub fn column_generation(&mut self, state: &BranchState, deadline: Option<Instant>) -> NodeResult {
        let mut added = 0;
        loop {
            let rmp = self.solve_rmp(state);
            match rmp.lp.status {
                LpStatus::Optimal => {}
                LpStatus::Infeasible => {
                    return NodeResult {
                        rmp,
                        lp_bound: usize::MAX,
                        proven: true,
                        columns_added: added,
                        infeasible: true,
                    };
                }
                _ => return self.unproven(rmp, added),
            }
            if deadline.is_some_and(|d| Instant::now() >= d) {
                return self.unproven(rmp, added);
            }
            let priced = price(self.instance, &rmp.duals, state, deadline);
            let mut new_columns = 0;
            for (items, value) in priced.patterns.iter().take(self.pricing_columns) {
                if *value <= PRICING_TOL {
                    continue;
                }
                let pattern = Pattern::new(self.instance, items.clone()).expect("priced pattern is feasible");
                if self.add_pattern(pattern).1 {
                    new_columns += 1;
                }
            }
            added += new_columns;
            if new_columns == 0 {
                if !priced.exact {
                    return self.unproven(rmp, added);
                }
                let lp_bound = ceil_bound(rmp.value());
                return NodeResult {
                    rmp,
                    lp_bound,
                    proven: true,
                    columns_added: added,
                    infeasible: false,
                };
            }
        }
    }

    fn unproven(&self, rmp: RmpSolution, added: usize) -> NodeResult {
        NodeResult {
            rmp,
            lp_bound: 0,
            proven: false,
            columns_added: added,
            infeasible: false,
        }
    }
}

/// `ceil(value - tol)` for a master objective.
pub fn ceil_bound(value: f64) -> usize {
    (value - INTEGRALITY_TOL).ceil().max(0.0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::columns::build_initial_columns;
    use crate::instance::Item;

    #[test]
    fn single_item() {
        let inst = Instance::new(1, 100, vec![Item::new(30, vec![0])]).unwrap();
        let mut m = Master::new(&inst, build_initial_columns(&inst, None));
        let r = m.solve_rmp(&BranchState::new(1));
        assert_eq!(r.lp.status, LpStatus::Optimal);
        assert!((r.value() - 1.0).abs() < 1e-9);
        assert!((r.column_value(0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn conflicting_pair_stays_at_two() {
        let inst = Instance::new(1, 100, vec![Item::new(60, vec![0]), Item::new(60, vec![0])]).unwrap();
        let mut m = Master::new(&inst, build_initial_columns(&inst, None));
        let r = m.column_generation(&BranchState::new(2), None);
        assert!(r.proven);
        assert_eq!(r.columns_added, 0);
        assert!((r.rmp.value() - 2.0).abs() < 1e-9);
        assert_eq!(r.lp_bound, 2);
    }

    #[test]
    fn mergeable_pair_generates_joint_column() {
        let inst = Instance::new(1, 100, vec![Item::new(40, vec![0]), Item::new(50, vec![0])]).unwrap();
        let mut m = Master::new(&inst, build_initial_columns(&inst, None));
        let before = m.solve_rmp(&BranchState::new(2));
        assert!((before.value() - 2.0).abs() < 1e-9);
        let r = m.column_generation(&BranchState::new(2), None);
        assert_eq!(r.columns_added, 1);
        assert_eq!(m.pool().find(&[0, 1]), Some(2));
        assert!((r.rmp.value() - 1.0).abs() < 1e-9);
        assert_eq!(r.lp_bound, 1);
    }

    #[test]
    fn fixed_column_leaves_the_basis() {
        let inst = Instance::new(1, 100, vec![Item::new(40, vec![0]), Item::new(50, vec![0])]).unwrap();
        let mut m = Master::new(&inst, build_initial_columns(&inst, None));
        m.column_generation(&BranchState::new(2), None);
        let apart = BranchState::new(2).apart(0, 1);
        let r = m.solve_rmp(&apart);
        assert_eq!(r.column_value(2), 0.0);
        assert!((r.value() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn bound_rounding() {
        assert_eq!(ceil_bound(2.0000001), 2);
        assert_eq!(ceil_bound(2.01), 3);
        assert_eq!(ceil_bound(0.0), 0);
    }
}
