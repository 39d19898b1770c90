//! Exact and heuristic solvers for the allocation model.

mod anneal;
mod brute;
mod coloring;
mod exact;
mod flow;
mod greedy;
mod partial;
mod problem;

pub use anneal::{anneal_improve, AnnealSchedule};
pub use brute::{brute_force, oracle_tree_size, DEFAULT_CELL_LIMIT};
pub use greedy::greedy_construct;
pub use partial::{lower_bound, PartialAssignment};

use crate::assignment::Assignment;
use crate::error::Result;
use crate::model::Model;
use crate::objective::ObjectiveBreakdown;
use serde::Serialize;

pub const DEFAULT_MAX_SECONDS: f64 = 60.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveLimits {
    pub max_nodes: Option<u64>,
    pub max_seconds: Option<f64>,
    /// Stop once the incumbent is within this much of the bound.
    pub target_gap: f64,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits {
            max_nodes: None,
            max_seconds: Some(DEFAULT_MAX_SECONDS),
            target_gap: 0.0,
        }
    }
}

impl SolveLimits {
    pub fn unlimited() -> Self {
        SolveLimits {
            max_nodes: None,
            max_seconds: None,
            target_gap: 0.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SolveStats {
    pub nodes_explored: u64,
    /// Wall time in seconds.
    pub elapsed: f64,
    pub best_bound: f64,
    pub incumbent_fo: f64,
    pub proven_optimal: bool,
    pub gap: f64,
    /// Rooms with `y = 1` in the returned point; may exceed `obj1` when the
    /// room term carries no weight.
    pub rooms_open: usize,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub assignment: Assignment,
    pub breakdown: ObjectiveBreakdown,
    pub stats: SolveStats,
}

/// Minimum-`fo` assignment by branch-and-bound, warm-started from
/// [`greedy_construct`]'s strategy. Deterministic for a given model and node
/// limit.
pub fn solve_exact(model: &Model, limits: &SolveLimits) -> Result<SolveOutcome> {
    exact::solve(model, limits)
}
