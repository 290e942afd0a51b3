use std::time::{Duration, Instant};

use rand::Rng;
use thiserror::Error;

use super::fitness::{fitness_unchecked, Fitness};
use super::moves::{apply_move, Packing, NUM_NEIGHBORHOODS};
use crate::generator::{rng_from_seed, SolverRng};
use crate::instance::{check_feasible, val_bpps_unchecked, InfeasibleSolution, Instance, Solution};

#[derive(Debug, Clone, PartialEq)]
pub struct VnsConfig {
    /// Number of neighborhood structures; the search is defined for 1..=4.
    pub n_max: usize,
    /// Wall-clock limit in seconds. `f64::INFINITY` disables it.
    pub t_max: f64,
    /// Outer iterations without improvement before stopping.
    pub c_max: u64,
    pub seed: u64,
}

impl Default for VnsConfig {
    fn default() -> Self {
        VnsConfig {
            n_max: NUM_NEIGHBORHOODS,
            t_max: 1800.0,
            c_max: 500,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VnsError {
    #[error("n_max must be in 1..=4, got {0}")]
    NeighborhoodCount(usize),
    #[error("t_max must be positive, got {0}")]
    TimeLimit(f64),
    #[error("c_max must be positive")]
    ConvergenceLimit,
    #[error(transparent)]
    Infeasible(#[from] InfeasibleSolution),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    TimeLimit,
    Converged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VnsStats {
    pub iterations: u64,
    pub improvements: u64,
    pub local_searches: u64,
    pub time_s: f64,
    pub stop: StopReason,
}

/// Applies one uniformly drawn feasible move of `N_kappa`; returns the input
/// when the neighborhood is empty.
pub fn shake(instance: &Instance, solution: &Solution, kappa: usize, rng: &mut SolverRng) -> Solution {
    assert!((1..=NUM_NEIGHBORHOODS).contains(&kappa), "kappa must be in 1..=4");
    let mut packing = Packing::new(instance, solution);
    let count = packing.count_moves(kappa);
    if count == 0 {
        return solution.clone();
    }
    let pick = rng.gen_range(0..count);
    let mv = packing.nth_move(kappa, pick).expect("index below move count");
    apply_move(instance, solution, &mv).expect("enumerated moves are feasible")
}

/// Variable neighborhood descent over `N_1..N_{n_max}` with best improvement.
pub fn local_search(instance: &Instance, solution: &Solution, n_max: usize) -> Solution {
    local_search_until(instance, solution, n_max, None)
}

pub(crate) fn local_search_until(
    instance: &Instance,
    solution: &Solution,
    n_max: usize,
    deadline: Option<Instant>,
) -> Solution {
    assert!((1..=NUM_NEIGHBORHOODS).contains(&n_max), "n_max must be in 1..=4");
    let mut current = solution.clone();
    let mut kappa = 1;
    while kappa <= n_max {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        let mut packing = Packing::new(instance, &current);
        match packing.best_improving(kappa, deadline) {
            Some((_, next)) => {
                current = next;
                kappa = 1;
            }
            None => kappa += 1,
        }
    }
    current
}

/// Variable neighborhood search started from a feasible solution.
///
/// Returns the solution with the smallest worst-case scenario bin count seen
/// during the run (the first one found on ties) and run statistics.
pub fn vns(
    instance: &Instance,
    initial: &Solution,
    config: &VnsConfig,
) -> Result<(Solution, VnsStats), VnsError> {
    if !(1..=NUM_NEIGHBORHOODS).contains(&config.n_max) {
        return Err(VnsError::NeighborhoodCount(config.n_max));
    }
    if !(config.t_max > 0.0) {
        return Err(VnsError::TimeLimit(config.t_max));
    }
    if config.c_max == 0 {
        return Err(VnsError::ConvergenceLimit);
    }
    let report = check_feasible(instance, initial);
    if !report.is_ok() {
        return Err(InfeasibleSolution(report).into());
    }

    let start = Instant::now();
    let deadline = (config.t_max.is_finite()).then(|| start + Duration::from_secs_f64(config.t_max));
    let mut rng = rng_from_seed(config.seed);

    let mut x = initial.clone();
    let mut fx: Fitness = fitness_unchecked(instance, &x);
    let mut best = x.clone();
    let mut best_val = val_bpps_unchecked(instance, &best);

    let mut stats = VnsStats {
        iterations: 0,
        improvements: 0,
        local_searches: 0,
        time_s: 0.0,
        stop: StopReason::Converged,
    };
    let mut c = 0u64;
    let mut elapsed = Duration::ZERO;
    loop {
        if deadline.is_some() && elapsed.as_secs_f64() >= config.t_max {
            stats.stop = StopReason::TimeLimit;
            break;
        }
        if c >= config.c_max {
            stats.stop = StopReason::Converged;
            break;
        }
        stats.iterations += 1;
        let mut kappa = 1;
        let mut improvement = false;
        loop {
            let shaken = shake(instance, &x, kappa, &mut rng);
            let candidate = local_search_until(instance, &shaken, config.n_max, deadline);
            stats.local_searches += 1;
            let fc = fitness_unchecked(instance, &candidate);
            if fc.val_bpps() < best_val {
                best_val = fc.val_bpps();
                best = candidate.clone();
            }
            if fc.is_better_than(&fx) {
                x = candidate;
                fx = fc;
                kappa = 1;
                improvement = true;
                stats.improvements += 1;
            } else {
                kappa += 1;
            }
            if kappa >= config.n_max {
                break;
            }
        }
        if improvement {
            c = 0;
        } else {
            c += 1;
        }
        elapsed = start.elapsed();
    }
    stats.time_s = start.elapsed().as_secs_f64();
    debug_assert!(check_feasible(instance, &best).is_ok());
    Ok((best, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{generate_instance, GeneratorParams};
    use crate::heuristic::{enumerate_neighbors, ffd_construct, fitness};
    use crate::instance::Item;

    #[test]
    fn shake_on_empty_neighborhood_returns_input() {
        let inst = Instance::new(1, 100, vec![Item::new(50, vec![0])]).unwrap();
        let sol = Solution::new(vec![vec![0]]);
        let mut rng = rng_from_seed(1);
        assert_eq!(shake(&inst, &sol, 1, &mut rng), sol);
        assert_eq!(shake(&inst, &sol, 3, &mut rng), sol);
    }

    #[test]
    fn shake_on_singleton_neighborhood() {
        let inst = Instance::new(
            1,
            100,
            vec![Item::new(60, vec![0]), Item::new(70, vec![0])],
        )
        .unwrap();
        let sol = Solution::new(vec![vec![0], vec![1]]);
        assert_eq!(enumerate_neighbors(&inst, &sol, 1).count(), 1);
        let mut rng = rng_from_seed(9);
        assert_eq!(shake(&inst, &sol, 1, &mut rng), Solution::new(vec![vec![1], vec![0]]));
    }

    #[test]
    fn shake_is_deterministic() {
        let inst = generate_instance(&GeneratorParams::new(12, 4, 3)).unwrap();
        let sol = ffd_construct(&inst);
        for kappa in 1..=4 {
            let a = shake(&inst, &sol, kappa, &mut rng_from_seed(5));
            let b = shake(&inst, &sol, kappa, &mut rng_from_seed(5));
            assert_eq!(a, b);
            assert!(check_feasible(&inst, &a).is_ok());
        }
    }

    #[test]
    fn local_optimum_is_unchanged() {
        let inst = Instance::new(1, 100, vec![Item::new(100, vec![0])]).unwrap();
        let sol = Solution::new(vec![vec![0]]);
        assert_eq!(local_search(&inst, &sol, 4), sol);
    }

    #[test]
    fn local_search_merges_compatible_bins() {
        let inst = Instance::new(
            1,
            100,
            vec![Item::new(30, vec![0]), Item::new(30, vec![0])],
        )
        .unwrap();
        let sol = Solution::new(vec![vec![0], vec![1]]);
        let out = local_search(&inst, &sol, 4);
        assert_eq!(out.num_bins(), 1);
    }

    #[test]
    fn local_search_never_worsens_fitness() {
        for seed in 0..100 {
            let inst = generate_instance(&GeneratorParams::new(10, 5, 1000 + seed)).unwrap();
            let start = ffd_construct(&inst);
            let out = local_search(&inst, &start, 4);
            assert!(check_feasible(&inst, &out).is_ok());
            assert!(fitness(&inst, &out).unwrap() <= fitness(&inst, &start).unwrap());
        }
    }

    #[test]
    fn vns_keeps_optimal_ffd_and_stops_on_convergence() {
        let inst = Instance::new(1, 100, vec![Item::new(40, vec![0]), Item::new(50, vec![0])]).unwrap();
        let start = ffd_construct(&inst);
        let config = VnsConfig {
            c_max: 5,
            ..VnsConfig::default()
        };
        let (sol, stats) = vns(&inst, &start, &config).unwrap();
        assert_eq!(sol.num_bins(), 1);
        assert_eq!(stats.stop, StopReason::Converged);
        assert_eq!(stats.iterations, 5);
    }

    #[test]
    fn vns_is_deterministic_without_time_limit() {
        let inst = generate_instance(&GeneratorParams::new(14, 7, 21)).unwrap();
        let start = ffd_construct(&inst);
        let config = VnsConfig {
            t_max: f64::INFINITY,
            c_max: 20,
            seed: 4,
            ..VnsConfig::default()
        };
        let (a, sa) = vns(&inst, &start, &config).unwrap();
        let (b, sb) = vns(&inst, &start, &config).unwrap();
        assert_eq!(a, b);
        assert_eq!(sa.iterations, sb.iterations);
        assert_eq!(sa.improvements, sb.improvements);
    }

    #[test]
    fn vns_rejects_bad_config() {
        let inst = Instance::new(1, 100, vec![Item::new(40, vec![0])]).unwrap();
        let sol = Solution::new(vec![vec![0]]);
        let bad = VnsConfig {
            n_max: 5,
            ..VnsConfig::default()
        };
        assert!(matches!(vns(&inst, &sol, &bad), Err(VnsError::NeighborhoodCount(5))));
        let bad = VnsConfig {
            c_max: 0,
            ..VnsConfig::default()
        };
        assert!(vns(&inst, &sol, &bad).is_err());
        assert!(matches!(
            vns(&inst, &Solution::default(), &VnsConfig::default()),
            Err(VnsError::Infeasible(_))
        ));
    }
}
