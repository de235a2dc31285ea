//! The master problem: start times of energy tasks only, priced exactly by
//! job costs and cheapest gap transitions, with a makespan estimate `q`.

mod cuts;
mod export;
#[cfg(test)]
pub(crate) use export::tests as export_tests;
mod search;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::instance::Instance;
use crate::precedence::{start_windows, MdMatrix, WindowError, Windows};
use crate::solution::ObjectiveWeights;
use crate::spaces::SpacesTable;
use crate::subproblem::FixedStarts;

pub use cuts::{Cut, CutKind, CutPool};
pub use search::{solve_master, Candidate, Incumbent, LazyCallback, MasterOutcome, MasterStatus, NoCallback, Verdict};

/// Objective differences below this are ties.
pub const OBJ_EPS: f64 = 1e-9;

pub struct MasterModel<'a> {
    instance: &'a Instance,
    spaces: &'a SpacesTable,
    md: &'a MdMatrix,
    weights: ObjectiveWeights,
    windows: Windows,
    energy: Vec<usize>,
    /// `jobcost[k][s]`, infinite outside the window of energy task `k`.
    jobcost: Vec<Vec<f64>>,
    /// `sufmin[k][s]`: cheapest job cost at or after `s`.
    sufmin: Vec<Vec<f64>>,
    /// `q >= start + tail[k]` for energy task `k`.
    tail: Vec<usize>,
    /// Energy ancestors of each energy task as `(k, md)`.
    energy_anc: Vec<Vec<(usize, usize)>>,
    /// `final_min[l]`: cheapest finite closing gap `(l', h + 1)` with `l' >= l`.
    final_min: Vec<f64>,
    gap_lb: f64,
    /// Whether `q` is the makespan, so the precedence tails bound it.
    makespan_q: bool,
    big_m: u64,
    cuts: CutPool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MasterError {
    Window(WindowError),
    /// The search bounds assume nonnegative objective weights.
    NegativeWeight,
}

impl fmt::Display for MasterError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MasterError::Window(e) => write!(f, "{e}"),
            MasterError::NegativeWeight => f.write_str("objective weights must be nonnegative"),
        }
    }
}

impl core::error::Error for MasterError {}

impl From<WindowError> for MasterError {
    fn from(e: WindowError) -> Self {
        MasterError::Window(e)
    }
}

pub fn build_master<'a>(
    instance: &'a Instance,
    spaces: &'a SpacesTable,
    md: &'a MdMatrix,
    weights: ObjectiveWeights,
) -> Result<MasterModel<'a>, MasterError> {
    if weights.energy_weight() < 0.0 || weights.makespan_weight() < 0.0 {
        return Err(MasterError::NegativeWeight);
    }
    let windows = start_windows(instance)?;
    let h = instance.horizon();
    let energy = instance.energy_tasks().to_vec();
    let mut jobcost = Vec::with_capacity(energy.len());
    let mut sufmin = Vec::with_capacity(energy.len());
    for &j in &energy {
        let mut row = vec![f64::INFINITY; h + 2];
        for s in windows.range(j) {
            row[s] = spaces.job_cost(instance.duration(j), s).expect("window lies in the horizon");
        }
        let mut suf = row.clone();
        for s in (0..h + 1).rev() {
            suf[s] = suf[s].min(suf[s + 1]);
        }
        jobcost.push(row);
        sufmin.push(suf);
    }
    let tail = energy
        .iter()
        .map(|&j| {
            let p = instance.duration(j);
            md.descendants(j)
                .into_iter()
                .map(|(s, d)| d + instance.duration(s))
                .fold(p, usize::max)
                - 1
        })
        .collect();
    let energy_anc = energy
        .iter()
        .map(|&j| {
            energy
                .iter()
                .enumerate()
                .filter_map(|(k, &a)| md.get(a, j).map(|d| (k, d)))
                .collect()
        })
        .collect();
    let mut final_min = vec![f64::INFINITY; h + 3];
    for l in (1..=h).rev() {
        final_min[l] = final_min[l + 1].min(spaces.cost(l, h + 1).unwrap_or(f64::INFINITY));
    }
    let gap_lb = spaces.min_cost().unwrap_or(0.0).min(0.0);
    Ok(MasterModel {
        instance,
        spaces,
        md,
        weights,
        windows,
        energy,
        jobcost,
        sufmin,
        tail,
        energy_anc,
        final_min,
        gap_lb,
        makespan_q: true,
        big_m: h as u64 + 1,
        cuts: CutPool::new(),
    })
}

impl<'a> MasterModel<'a> {
    pub fn instance(&self) -> &'a Instance {
        self.instance
    }

    pub fn spaces(&self) -> &'a SpacesTable {
        self.spaces
    }

    pub fn md(&self) -> &'a MdMatrix {
        self.md
    }

    pub fn weights(&self) -> &ObjectiveWeights {
        &self.weights
    }

    pub fn windows(&self) -> &Windows {
        &self.windows
    }

    pub fn energy_tasks(&self) -> &[usize] {
        &self.energy
    }

    pub fn cuts(&self) -> &CutPool {
        &self.cuts
    }

    pub fn add_cut(&mut self, cut: Cut) {
        self.cuts.add(cut);
    }

    /// Big M of the optimality cuts.
    pub fn big_m(&self) -> u64 {
        self.big_m
    }

    /// Treats `q` as an arbitrary nonnegative subproblem objective: drops the
    /// makespan bounds and uses `big_m` in optimality cuts.
    pub fn generic_objective(&mut self, big_m: u64) {
        self.makespan_q = false;
        self.tail.iter_mut().for_each(|t| *t = 0);
        self.big_m = big_m;
    }

    /// Static lower bound on the makespan given the energy-task starts.
    pub fn makespan_bound(&self, assignment: &FixedStarts) -> u64 {
        if !self.makespan_q {
            return 0;
        }
        self.energy
            .iter()
            .zip(&self.tail)
            .map(|(&j, &t)| (assignment.get(j).unwrap_or(0) + t) as u64)
            .max()
            .unwrap_or(0)
    }

    /// Energy cost of a full assignment if it satisfies every master
    /// constraint apart from the cuts, else `None`.
    pub fn energy_cost(&self, assignment: &FixedStarts) -> Option<f64> {
        if assignment.len() != self.energy.len() {
            return None;
        }
        let mut seq = Vec::with_capacity(self.energy.len());
        for (k, &j) in self.energy.iter().enumerate() {
            let s = assignment.get(j)?;
            if !self.windows.contains(j, s) {
                return None;
            }
            for &(a, d) in &self.energy_anc[k] {
                if s < assignment.get(self.energy[a])? + d {
                    return None;
                }
            }
            seq.push((s, k));
        }
        seq.sort_unstable();
        let mut cur_end = 0;
        let mut tec = 0.0;
        for &(s, k) in &seq {
            if s <= cur_end {
                return None;
            }
            tec += self.gap_cost(cur_end, s)?;
            tec += self.jobcost[k][s];
            cur_end = s + self.instance.duration(self.energy[k]) - 1;
        }
        Some(tec + self.spaces.cost(cur_end + 1, self.instance.horizon() + 1)?)
    }

    /// Cost of the transition between a task ending at `cur_end` (0 for the
    /// start of the horizon) and one starting at `s`.
    pub(crate) fn gap_cost(&self, cur_end: usize, s: usize) -> Option<f64> {
        if cur_end == 0 {
            self.spaces.cost(1, s)
        } else if s == cur_end + 1 {
            Some(0.0)
        } else {
            self.spaces.cost(cur_end + 1, s)
        }
    }

    pub fn objective(&self, tec: f64, q: u64) -> f64 {
        self.weights.combine(tec, q as f64)
    }
}
