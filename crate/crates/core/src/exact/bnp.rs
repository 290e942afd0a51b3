use std::time::{Duration, Instant};

use thiserror::Error;

use super::branch::BranchState;
use super::columns::build_initial_columns;
use super::master::{Master, INTEGRALITY_TOL};
use super::rmp_ip::{find_branch_pair, repair_cover, restricted_master_ip, IpBudget};
use crate::bounds::lb_root;
use crate::instance::{check_feasible, val_bpps_unchecked, InfeasibleSolution, Instance, Pattern, Solution};
use crate::io::ProofStatus;

#[derive(Debug, Clone, PartialEq)]
pub struct BnpConfig {
    /// Wall-clock limit in seconds.
    pub time_limit: f64,
    /// Initial incumbent, e.g. a VNS result.
    pub warm_start: Option<Solution>,
    /// Also seed the column pool with the warm start's bins.
    pub warm_columns: bool,
    /// Restricted-master integer search limits at the root.
    pub ip_budget: IpBudget,
    /// The same below the root.
    pub ip_budget_inner: IpBudget,
    /// Columns taken from one pricing round.
    pub pricing_columns: usize,
}

impl Default for BnpConfig {
    fn default() -> Self {
        BnpConfig {
            time_limit: 120.0,
            warm_start: None,
            warm_columns: true,
            ip_budget: IpBudget::default(),
            ip_budget_inner: IpBudget {
                nodes: 5_000,
                ..IpBudget::default()
            },
            pricing_columns: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BnpError {
    #[error("time limit must be positive, got {0}")]
    TimeLimit(f64),
    #[error("warm start: {0}")]
    WarmStart(#[from] InfeasibleSolution),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchStats {
    pub nodes: u64,
    /// Columns generated beyond the initial pool.
    pub columns: u64,
    pub lower_bound: usize,
    pub upper_bound: usize,
    pub root_lower_bound: usize,
    /// Root LP value when column generation finished there.
    pub root_lp: Option<f64>,
    /// Nodes left open because neither branching nor the LP settled them.
    pub unresolved: u64,
    pub time_s: f64,
    pub status: ProofStatus,
}

impl SearchStats {
    /// `(UB - LB) / UB`.
    pub fn gap(&self) -> f64 {
        if self.upper_bound == 0 {
            0.0
        } else {
            (self.upper_bound - self.lower_bound.min(self.upper_bound)) as f64 / self.upper_bound as f64
        }
    }
}

#[derive(Debug, Clone)]
struct Node {
    state: BranchState,
    lb: usize,
    depth: usize,
    id: u64,
}

/// Best bound first, then deeper, then newer.
fn select(open: &[Node]) -> Option<usize> {
    (0..open.len()).min_by(|&a, &b| {
        let (x, y) = (&open[a], &open[b]);
        x.lb.cmp(&y.lb).then(y.depth.cmp(&x.depth)).then(y.id.cmp(&x.id))
    })
}

struct Incumbent {
    solution: Solution,
    value: usize,
}

impl Incumbent {
    fn offer(&mut self, instance: &Instance, candidate: Solution) {
        debug_assert!(check_feasible(instance, &candidate).is_ok());
        let v = val_bpps_unchecked(instance, &candidate);
        if v < self.value {
            self.value = v;
            self.solution = candidate;
        }
    }
}

/// Branch-and-price with Ryan-Foster branching.
///
/// Each node runs column generation on the restricted master, fathoms on
/// `ceil(F*)`, tries the pool-restricted integer search for a better packing
/// and otherwise branches on the item pair with the most fractional joint
/// flow: a together child (the two groups merge) and an apart child.
pub fn branch_and_price(instance: &Instance, config: &BnpConfig) -> Result<(Solution, SearchStats), BnpError> {
    if !(config.time_limit > 0.0) {
        return Err(BnpError::TimeLimit(config.time_limit));
    }
    let start = Instant::now();
    let deadline = Duration::try_from_secs_f64(config.time_limit)
        .ok()
        .and_then(|t| start.checked_add(t));
    let n = instance.num_items();
    let root_lb = lb_root(instance);

    let initial = match &config.warm_start {
        Some(w) => {
            let report = check_feasible(instance, w);
            if !report.is_ok() {
                return Err(InfeasibleSolution(report).into());
            }
            w.clone()
        }
        None => Solution::singletons(n),
    };
    let mut inc = Incumbent {
        value: val_bpps_unchecked(instance, &initial),
        solution: initial,
    };

    let seed_cols = if config.warm_columns { config.warm_start.as_ref() } else { None };
    let pool = build_initial_columns(instance, seed_cols);
    let initial_columns = pool.len();
    let mut master = Master::new(instance, pool).with_pricing_columns(config.pricing_columns);

    let mut stats = SearchStats {
        nodes: 0,
        columns: 0,
        lower_bound: root_lb.min(inc.value),
        upper_bound: inc.value,
        root_lower_bound: root_lb,
        root_lp: None,
        unresolved: 0,
        time_s: 0.0,
        status: ProofStatus::Gap,
    };
    let mut open = vec![Node {
        state: BranchState::new(n),
        lb: root_lb,
        depth: 0,
        id: 0,
    }];
    let mut unresolved_lb: Option<usize> = None;
    let mut next_id = 1u64;

    loop {
        let open_lb = open.iter().map(|nd| nd.lb).min();
        let frontier = match (open_lb, unresolved_lb) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => inc.value,
        };
        stats.lower_bound = stats.lower_bound.max(frontier.min(inc.value));
        if stats.lower_bound >= inc.value || open.is_empty() {
            break;
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        let node = open.swap_remove(select(&open).expect("open is nonempty"));
        if node.lb >= inc.value {
            continue;
        }
        stats.nodes += 1;
        let res = master.column_generation(&node.state, deadline);
        if res.infeasible {
            continue;
        }
        if !res.proven && deadline.is_some_and(|d| Instant::now() >= d) {
            open.push(node);
            break;
        }
        let mut lb = node.lb;
        if res.proven {
            lb = lb.max(res.lp_bound);
            if node.depth == 0 {
                stats.root_lp = Some(res.rmp.value());
            }
        }
        if lb >= inc.value {
            continue;
        }

        let x = res.rmp.column_values();
        let pool = master.pool();
        let integral = x
            .iter()
            .all(|&v| v <= INTEGRALITY_TOL || (v - v.round()).abs() <= INTEGRALITY_TOL);
        let ones: Vec<Vec<usize>> = x
            .iter()
            .enumerate()
            .filter(|(_, &v)| v >= 1.0 - INTEGRALITY_TOL)
            .map(|(id, _)| pool.get(id).items().to_vec())
            .collect();
        if let Some(sol) = repair_cover(n, &ones) {
            // its value is at most F*, so a proven node is settled here
            inc.offer(instance, sol);
            if res.proven || lb >= inc.value {
                continue;
            }
        }
        if integral {
            // nothing to branch on and the bound is not certified
            stats.unresolved += 1;
            unresolved_lb = Some(unresolved_lb.map_or(lb, |u| u.min(lb)));
            continue;
        }

        let budget = if node.depth == 0 {
            config.ip_budget
        } else {
            config.ip_budget_inner
        };
        if let Some(sol) = restricted_master_ip(instance, pool, &node.state, Some(inc.value), Some(x), budget) {
            inc.offer(instance, sol);
        }
        if lb >= inc.value {
            continue;
        }

        match find_branch_pair(pool, x, &node.state) {
            Some((l, m)) => {
                let together = node.state.together(l, m);
                if together.is_consistent() {
                    let group: Vec<usize> = (0..n).filter(|&i| together.same_group(i, l)).collect();
                    if let Ok(p) = Pattern::new(instance, group) {
                        master.add_pattern(p);
                        open.push(Node {
                            state: together,
                            lb,
                            depth: node.depth + 1,
                            id: next_id,
                        });
                        next_id += 1;
                    }
                }
                open.push(Node {
                    state: node.state.apart(l, m),
                    lb,
                    depth: node.depth + 1,
                    id: next_id,
                });
                next_id += 1;
            }
            None => {
                stats.unresolved += 1;
                unresolved_lb = Some(unresolved_lb.map_or(lb, |u| u.min(lb)));
            }
        }
    }

    stats.upper_bound = inc.value;
    stats.lower_bound = stats.lower_bound.min(inc.value);
    stats.columns = (master.pool().len() - initial_columns) as u64;
    stats.status = if stats.lower_bound >= inc.value {
        ProofStatus::Optimal
    } else {
        ProofStatus::Gap
    };
    stats.time_s = start.elapsed().as_secs_f64();
    Ok((inc.solution, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::enumeration::solve_enumeration;
    use crate::generator::{generate_instance, GeneratorParams};
    use crate::instance::{val_bpps, Item};

    #[test]
    fn trivial_instances() {
        let inst = Instance::new(1, 100, vec![Item::new(30, vec![0])]).unwrap();
        let (sol, stats) = branch_and_price(&inst, &BnpConfig::default()).unwrap();
        assert_eq!(sol.num_bins(), 1);
        assert_eq!(stats.status, ProofStatus::Optimal);
        assert_eq!(stats.gap(), 0.0);
    }

    #[test]
    fn matches_enumeration_on_small_instances() {
        for seed in 0..40 {
            let n = 3 + (seed as usize % 6);
            let d = 1 + (seed as usize % 5);
            let inst = generate_instance(&GeneratorParams::new(n, d, 7000 + seed)).unwrap();
            let (sol, stats) = branch_and_price(&inst, &BnpConfig::default()).unwrap();
            let opt = val_bpps(&inst, &solve_enumeration(&inst).unwrap()).unwrap();
            assert_eq!(stats.status, ProofStatus::Optimal, "seed {seed}");
            assert_eq!(val_bpps(&inst, &sol).unwrap(), opt, "seed {seed}");
            assert_eq!(stats.lower_bound, opt);
        }
    }

    #[test]
    fn warm_start_is_kept_when_optimal() {
        let inst = generate_instance(&GeneratorParams::new(8, 4, 5)).unwrap();
        let opt = solve_enumeration(&inst).unwrap();
        let config = BnpConfig {
            warm_start: Some(opt.clone()),
            ..BnpConfig::default()
        };
        let (sol, stats) = branch_and_price(&inst, &config).unwrap();
        assert!(val_bpps(&inst, &sol).unwrap() <= val_bpps(&inst, &opt).unwrap());
        assert_eq!(stats.status, ProofStatus::Optimal);
    }

    #[test]
    fn rejects_bad_input() {
        let inst = Instance::new(1, 100, vec![Item::new(30, vec![0])]).unwrap();
        let bad = BnpConfig {
            time_limit: 0.0,
            ..BnpConfig::default()
        };
        assert!(branch_and_price(&inst, &bad).is_err());
        let bad = BnpConfig {
            warm_start: Some(Solution::default()),
            ..BnpConfig::default()
        };
        assert!(matches!(branch_and_price(&inst, &bad), Err(BnpError::WarmStart(_))));
    }
}
