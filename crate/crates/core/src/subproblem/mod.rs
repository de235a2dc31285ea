//! The scheduling subproblem left once energy-task starts are fixed: place
//! every task under precedences and renewable capacities.

mod blocking;
mod conflict;
pub(crate) mod engine;

use alloc::vec::Vec;
use core::fmt;

use crate::budget::Budget;
use crate::instance::Instance;
use engine::{Goal, Problem};

pub use blocking::{extract_min_conflict_blocking, solve_blocking_twt, TardinessError, TardinessInstance};
pub use conflict::{extract_min_conflict, Conflict};

/// Start intervals imposed on energy tasks, sorted by task id.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FixedStarts {
    pairs: Vec<(usize, usize)>,
}

impl FixedStarts {
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut pairs: Vec<_> = pairs.into_iter().collect();
        pairs.sort_unstable();
        FixedStarts { pairs }
    }

    /// The energy-task entries of a full start vector.
    pub fn from_starts(instance: &Instance, starts: &[usize]) -> Self {
        FixedStarts::new(instance.energy_tasks().iter().map(|&j| (j, starts[j])))
    }

    pub fn get(&self, task: usize) -> Option<usize> {
        self.pairs
            .binary_search_by_key(&task, |p| p.0)
            .ok()
            .map(|i| self.pairs[i].1)
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn tasks(&self) -> impl Iterator<Item = usize> + '_ {
        self.pairs.iter().map(|p| p.0)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn without(&self, task: usize) -> Self {
        FixedStarts { pairs: self.pairs.iter().copied().filter(|p| p.0 != task).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubproblemError {
    UnknownTask(usize),
    NotEnergy(usize),
    Duplicate(usize),
    OutsideHorizon { task: usize, start: usize },
}

impl fmt::Display for SubproblemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubproblemError::UnknownTask(j) => write!(f, "fixed start names unknown task {j}"),
            SubproblemError::NotEnergy(j) => write!(f, "task {j} is not energy-intensive and cannot be fixed"),
            SubproblemError::Duplicate(j) => write!(f, "task {j} is fixed twice"),
            SubproblemError::OutsideHorizon { task, start } => {
                write!(f, "task {task} fixed at {start} does not fit in the horizon")
            }
        }
    }
}

impl core::error::Error for SubproblemError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubproblemResult {
    Feasible {
        starts: Vec<usize>,
        /// Makespan, or weighted tardiness for the blocking variant.
        objective: u64,
        proven_optimal: bool,
    },
    /// `conflict` lists fixed tasks whose starts cannot hold together.
    Infeasible { conflict: Vec<usize> },
    Unknown,
}

impl SubproblemResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, SubproblemResult::Feasible { .. })
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, SubproblemResult::Infeasible { .. })
    }
}

pub(crate) fn check_fixed(instance: &Instance, fixed: &FixedStarts) -> Result<(), SubproblemError> {
    let h = instance.horizon();
    let mut prev = None;
    for &(j, s) in fixed.pairs() {
        if j >= instance.len() {
            return Err(SubproblemError::UnknownTask(j));
        }
        if prev == Some(j) {
            return Err(SubproblemError::Duplicate(j));
        }
        prev = Some(j);
        if !instance.is_energy(j) {
            return Err(SubproblemError::NotEnergy(j));
        }
        if s == 0 || s + instance.duration(j) - 1 > h {
            return Err(SubproblemError::OutsideHorizon { task: j, start: s });
        }
    }
    Ok(())
}

pub(crate) fn run(
    mut prob: Problem,
    fixed: &FixedStarts,
    goal: Goal<'_>,
    budget: &mut Budget<'_>,
) -> SubproblemResult {
    for &(j, s) in fixed.pairs() {
        prob.fix(j, s);
    }
    let out = engine::solve(&prob, goal, budget);
    match out.best {
        Some((starts, objective)) => SubproblemResult::Feasible {
            starts,
            objective,
            proven_optimal: out.complete,
        },
        None if out.complete => SubproblemResult::Infeasible { conflict: fixed.tasks().collect() },
        None => SubproblemResult::Unknown,
    }
}

/// Finds any schedule honouring the fixed starts. A returned conflict is the
/// full fixed set; see [`extract_min_conflict`] for a minimal one.
pub fn solve_feasibility(
    instance: &Instance,
    fixed: &FixedStarts,
    budget: &mut Budget<'_>,
) -> Result<SubproblemResult, SubproblemError> {
    check_fixed(instance, fixed)?;
    Ok(run(Problem::from_instance(instance), fixed, Goal::Feasible, budget))
}

/// Branch and bound on the makespan (last occupied interval).
pub fn minimize_makespan(
    instance: &Instance,
    fixed: &FixedStarts,
    budget: &mut Budget<'_>,
) -> Result<SubproblemResult, SubproblemError> {
    check_fixed(instance, fixed)?;
    Ok(run(Problem::from_instance(instance), fixed, Goal::Makespan, budget))
}
