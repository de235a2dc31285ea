use alloc::vec::Vec;

use super::engine::{Goal, Problem};
use super::{check_fixed, run, FixedStarts, SubproblemError, SubproblemResult};
use crate::budget::{Budget, Clock, Limits};
use crate::instance::Instance;

/// A set of fixed starts that cannot all hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conflict {
    pub members: FixedStarts,
    /// False when some re-check ran out of budget and its member was kept.
    pub minimal: bool,
    pub checks: usize,
}

/// Deletion-based shrinking of an infeasible fixed set. Members are tried
/// latest start first (ties: highest id). A member stays only if dropping it
/// makes the rest feasible or the check is inconclusive.
///
/// An empty result means the instance is infeasible with nothing fixed.
pub fn extract_min_conflict(
    instance: &Instance,
    fixed: &FixedStarts,
    per_check: Limits,
    clock: Option<&dyn Clock>,
) -> Result<Conflict, SubproblemError> {
    check_fixed(instance, fixed)?;
    Ok(shrink(Problem::from_instance(instance), fixed, per_check, clock))
}

pub(crate) fn shrink(base: Problem, fixed: &FixedStarts, per_check: Limits, clock: Option<&dyn Clock>) -> Conflict {
    let mut order: Vec<(usize, usize)> = fixed.pairs().to_vec();
    order.sort_unstable_by(|a, b| (b.1, b.0).cmp(&(a.1, a.0)));
    let mut current = fixed.clone();
    let mut minimal = true;
    let mut checks = 0;
    for (task, _) in order {
        let trial = current.without(task);
        let mut budget = match clock {
            Some(c) => Budget::with_clock(per_check, c),
            None => Budget::new(per_check),
        };
        checks += 1;
        match run(base.clone(), &trial, Goal::Feasible, &mut budget) {
            SubproblemResult::Infeasible { .. } => current = trial,
            SubproblemResult::Feasible { .. } => {}
            SubproblemResult::Unknown => minimal = false,
        }
    }
    Conflict { members: current, minimal, checks }
}
