//! Optimal strategy pairs for fixed drop times.
//!
//! Between events each player moves at unit speed without turning, and may
//! only turn at its own events: meeting an agent, first finding a gift,
//! its own drop, or (for the agent) first finding Player I's gift. The
//! search walks those events in time order, branching on one heading per
//! information class, and bounds each branch by the remaining gaps.

mod search;
mod state;

pub use search::{solve_fixed_drops, solve_value, solve_with, SolveOptions, SolveResult};
pub use state::{direction_branches, next_event_time, DirectionChoice, SolverState};
