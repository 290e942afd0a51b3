//! Branch-and-price over the pattern formulation.
//!
//! The master problem picks bins (patterns) to cover every item while a
//! variable `F` bounds the number of bins touching each scenario:
//!
//! ```text
//! min F
//!   sum_p a_ip X_p >= 1        for each item i
//!   sum_p b_kp X_p - F <= 0    for each scenario k
//! ```
//!
//! Columns come from an exact knapsack-with-scenarios pricing search, and
//! branching follows Ryan and Foster on item pairs.

mod bnp;
mod branch;
mod columns;
mod enumeration;
mod master;
mod pricing;
mod rmp_ip;

pub use bnp::{branch_and_price, BnpConfig, BnpError, SearchStats};
pub use branch::BranchState;
pub use columns::{build_initial_columns, Column, ColumnPool};
pub use enumeration::{solve_enumeration, TooLarge, MAX_ENUMERATION_ITEMS};
pub use master::{ceil_bound, Master, NodeResult, RmpSolution, INTEGRALITY_TOL};
pub use pricing::{price, DualSolution, PricingResult};
pub use rmp_ip::{find_branch_pair, repair_cover, restricted_master_ip, IpBudget};
