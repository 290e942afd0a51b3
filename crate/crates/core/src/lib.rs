//! Solvers for bin packing with scenarios.
//!
//! Each item has a size and a set of scenarios it belongs to. A packing is
//! feasible when every bin respects the capacity in every scenario, and its
//! value is the largest number of bins used by any single scenario.
//!
//! The crate provides:
//!
//! * [`exact`]: branch-and-price over a pattern formulation, plus an
//!   exhaustive oracle for tiny instances;
//! * [`heuristic`]: first-fit decreasing and variable neighborhood search;
//! * [`bounds`]: continuous and dual-feasible-function lower bounds;
//! * [`approx`]: the reduction to vector bin packing and minimal solutions;
//! * [`lp`]: the bounded-variable revised simplex used by the master problem;
//! * [`bench`]: instance classes and the benchmark harness behind the CLI.

pub mod approx;
pub mod bench;
pub mod bounds;
pub mod exact;
pub mod generator;
pub mod heuristic;
pub mod instance;
pub mod io;
pub mod lp;

pub use instance::{
    check_feasible, val_bpps, val_vbpp, FeasibilityReport, InfeasibleSolution, Instance,
    InstanceError, Item, Pattern, Solution, Violation,
};
pub use io::{parse_instance, serialize_instance, serialize_solution, ParseError, ProofStatus};
