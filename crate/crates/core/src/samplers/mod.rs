//! Whole-problem classical solvers: simulated annealing, steepest greedy
//! descent and an exhaustive oracle.

mod brute;
mod greedy;
mod sa;

pub use brute::{brute_force, MAX_BRUTE_FORCE_VARIABLES};
pub use greedy::{descend, run_sgd, SgdResult};
pub use sa::{measure_update_rate, run_sa, SaResult, SaRun, SaSchedule, SweepState};
