//! Weighted tardiness with capacities that drop to zero in blocked intervals.

use alloc::vec::Vec;
use core::fmt;

use super::engine::{Goal, Problem};
use super::{check_fixed, run, FixedStarts, SubproblemError, SubproblemResult};
use super::conflict::{shrink, Conflict};
use crate::budget::{Budget, Clock, Limits};
use crate::instance::{Instance, ENERGY_RESOURCE};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TardinessError {
    Length { what: &'static str, expected: usize, found: usize },
    /// Per-interval capacity must be 0 or the nominal capacity.
    Capacity { resource: usize, interval: usize, value: u32 },
}

impl fmt::Display for TardinessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TardinessError::Length { what, expected, found } => {
                write!(f, "{what} has {found} entries, expected {expected}")
            }
            TardinessError::Capacity { resource, interval, value } => {
                write!(f, "resource {resource} capacity {value} at interval {interval} is not 0 or nominal")
            }
        }
    }
}

impl core::error::Error for TardinessError {}

/// An instance plus due dates, tardiness weights and per-interval
/// capacities. The energy resource is never blocked.
#[derive(Debug, Clone, PartialEq)]
pub struct TardinessInstance {
    base: Instance,
    due: Vec<usize>,
    weights: Vec<u32>,
    profile: Vec<Vec<u32>>,
}

impl TardinessInstance {
    pub fn new(
        base: Instance,
        due: Vec<usize>,
        weights: Vec<u32>,
        profile: Vec<Vec<u32>>,
    ) -> Result<Self, TardinessError> {
        let n = base.len();
        let h = base.horizon();
        if due.len() != n {
            return Err(TardinessError::Length { what: "due dates", expected: n, found: due.len() });
        }
        if weights.len() != n {
            return Err(TardinessError::Length { what: "weights", expected: n, found: weights.len() });
        }
        if profile.len() != base.resource_count() {
            return Err(TardinessError::Length {
                what: "capacity profile",
                expected: base.resource_count(),
                found: profile.len(),
            });
        }
        for (k, row) in profile.iter().enumerate() {
            if row.len() != h {
                return Err(TardinessError::Length { what: "capacity row", expected: h, found: row.len() });
            }
            let nominal = base.capacities()[k];
            for (t, &c) in row.iter().enumerate() {
                let ok = if k == ENERGY_RESOURCE { c == nominal } else { c == 0 || c == nominal };
                if !ok {
                    return Err(TardinessError::Capacity { resource: k, interval: t + 1, value: c });
                }
            }
        }
        Ok(TardinessInstance { base, due, weights, profile })
    }

    /// Nominal capacities everywhere.
    pub fn unblocked(base: Instance, due: Vec<usize>, weights: Vec<u32>) -> Result<Self, TardinessError> {
        let h = base.horizon();
        let profile = base.capacities().iter().map(|&c| alloc::vec![c; h]).collect();
        TardinessInstance::new(base, due, weights, profile)
    }

    pub fn base(&self) -> &Instance {
        &self.base
    }

    pub fn due(&self) -> &[usize] {
        &self.due
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn profile(&self) -> &[Vec<u32>] {
        &self.profile
    }

    /// Weighted tardiness of a start vector, completion being the last
    /// occupied interval.
    pub fn tardiness(&self, starts: &[usize]) -> u64 {
        let p: Vec<usize> = (0..self.base.len()).map(|j| self.base.duration(j)).collect();
        super::engine::tardiness(&p, starts, &self.due, &self.weights)
    }

    /// Upper bound on the weighted tardiness of any schedule.
    pub fn tardiness_bound(&self) -> u64 {
        self.weights.iter().map(|&w| u64::from(w)).sum::<u64>() * self.base.horizon() as u64
    }
}

/// Minimizes weighted tardiness with the energy-task starts fixed.
pub fn solve_blocking_twt(
    variant: &TardinessInstance,
    fixed: &FixedStarts,
    budget: &mut Budget<'_>,
) -> Result<SubproblemResult, SubproblemError> {
    check_fixed(&variant.base, fixed)?;
    let prob = Problem::with_capacities(&variant.base, variant.profile.clone());
    let goal = Goal::Tardiness { due: &variant.due, weight: &variant.weights };
    Ok(run(prob, fixed, goal, budget))
}

/// As [`super::extract_min_conflict`], under the blocked capacity profile.
pub fn extract_min_conflict_blocking(
    variant: &TardinessInstance,
    fixed: &FixedStarts,
    per_check: Limits,
    clock: Option<&dyn Clock>,
) -> Result<Conflict, SubproblemError> {
    check_fixed(&variant.base, fixed)?;
    let prob = Problem::with_capacities(&variant.base, variant.profile.clone());
    Ok(shrink(prob, fixed, per_check, clock))
}
