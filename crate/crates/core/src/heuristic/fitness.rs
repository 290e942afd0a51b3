//! The VNS guidance function
//!
//! `f(B) = val_bpps(B) - sum_k sum_{B in B_k} (ocp(k, B) / (|B_k| W))^2`
//!
//! Values are rational. Comparisons run on an `f64` image first and fall back
//! to exact big-rational arithmetic when the two images are within
//! [`FILTER_EPS`] of each other, so the ordering is exact.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::instance::{check_feasible, InfeasibleSolution, Instance, Solution};

pub(crate) const FILTER_EPS: f64 = 1e-9;

/// Per-scenario summary: number of used bins and sum of squared loads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub(crate) struct ScenarioTerm {
    pub bins: u64,
    pub sq_load: u64,
}

impl ScenarioTerm {
    #[inline]
    pub fn approx(self, w2: f64) -> f64 {
        if self.bins == 0 {
            0.0
        } else {
            let h = self.bins as f64;
            self.sq_load as f64 / (h * h * w2)
        }
    }

    pub fn exact(self, w2: &BigInt) -> BigRational {
        if self.bins == 0 {
            return BigRational::zero();
        }
        let h = BigInt::from(self.bins);
        BigRational::new(BigInt::from(self.sq_load), &h * &h * w2)
    }
}

#[derive(Debug, Clone)]
pub struct Fitness {
    value_bpps: usize,
    approx: f64,
    terms: Vec<ScenarioTerm>,
    capacity: u32,
}

impl Fitness {
    pub(crate) fn from_terms(value_bpps: usize, terms: Vec<ScenarioTerm>, capacity: u32) -> Self {
        let w2 = f64::from(capacity) * f64::from(capacity);
        let penalty: f64 = terms.iter().map(|t| t.approx(w2)).sum();
        Fitness {
            value_bpps,
            approx: value_bpps as f64 - penalty,
            terms,
            capacity,
        }
    }

    /// Worst-case scenario bin count of the evaluated solution.
    pub fn val_bpps(&self) -> usize {
        self.value_bpps
    }

    pub fn to_f64(&self) -> f64 {
        self.approx
    }

    pub fn to_rational(&self) -> BigRational {
        let w = BigInt::from(self.capacity);
        let w2 = &w * &w;
        let mut acc = BigRational::from_integer(BigInt::from(self.value_bpps));
        for t in &self.terms {
            acc -= t.exact(&w2);
        }
        acc
    }

    pub fn exact_cmp(&self, other: &Fitness) -> Ordering {
        let diff = self.approx - other.approx;
        if diff.abs() > FILTER_EPS {
            return if diff < 0.0 {
                Ordering::Less
            } else {
                Ordering::Greater
            };
        }
        if self.value_bpps == other.value_bpps && self.terms == other.terms {
            return Ordering::Equal;
        }
        self.to_rational().cmp(&other.to_rational())
    }

    pub fn is_better_than(&self, other: &Fitness) -> bool {
        self.exact_cmp(other) == Ordering::Less
    }
}

impl PartialEq for Fitness {
    fn eq(&self, other: &Self) -> bool {
        self.exact_cmp(other) == Ordering::Equal
    }
}

impl Eq for Fitness {}

impl PartialOrd for Fitness {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fitness {
    fn cmp(&self, other: &Self) -> Ordering {
        self.exact_cmp(other)
    }
}

pub(crate) fn scenario_terms(instance: &Instance, solution: &Solution) -> Vec<ScenarioTerm> {
    let d = instance.num_scenarios();
    let mut terms = vec![ScenarioTerm::default(); d];
    let mut loads = vec![0u64; d];
    let mut touched: Vec<usize> = Vec::new();
    for bin in solution.bins() {
        for &i in bin {
            let s = u64::from(instance.size(i));
            for &k in instance.scenarios_of(i) {
                if loads[k] == 0 {
                    touched.push(k);
                }
                loads[k] += s;
            }
        }
        for &k in &touched {
            terms[k].bins += 1;
            terms[k].sq_load += loads[k] * loads[k];
            loads[k] = 0;
        }
        touched.clear();
    }
    terms
}

/// Fitness of a feasible solution, assuming feasibility was already checked.
pub(crate) fn fitness_unchecked(instance: &Instance, solution: &Solution) -> Fitness {
    let terms = scenario_terms(instance, solution);
    let value = terms.iter().map(|t| t.bins as usize).max().unwrap_or(0);
    Fitness::from_terms(value, terms, instance.capacity())
}

pub fn fitness(instance: &Instance, solution: &Solution) -> Result<Fitness, InfeasibleSolution> {
    let report = check_feasible(instance, solution);
    if !report.is_ok() {
        return Err(InfeasibleSolution(report));
    }
    Ok(fitness_unchecked(instance, solution))
}

/// Exact rational difference of two per-scenario summaries, scaled by `W^2`.
pub(crate) fn exact_term_delta(old: ScenarioTerm, new: ScenarioTerm, w2: &BigInt) -> BigRational {
    new.exact(w2) - old.exact(w2)
}
