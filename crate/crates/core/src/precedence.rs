//! Longest-path distances in the precedence graph and start windows.
//!
//! `md(u, v)` is the least number of intervals between the start of `u` and
//! the start of a descendant `v`: the duration of `u` plus the heaviest chain
//! of tasks strictly between them.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::instance::Instance;
use crate::machine::MachineState;

/// Above this many tasks only descendant rows are stored.
pub const DENSE_LIMIT: usize = 2000;

#[derive(Debug, Clone)]
enum Storage {
    Dense(Vec<Option<u32>>),
    /// Per source, sorted `(descendant, distance)` pairs.
    Sparse(Vec<Vec<(u32, u32)>>),
}

/// Minimal start-to-start distances between ordered pairs of tasks.
#[derive(Debug, Clone)]
pub struct MdMatrix {
    n: usize,
    storage: Storage,
}

impl MdMatrix {
    /// `md(u, v)`, or `None` when `v` is not a descendant of `u`.
    pub fn get(&self, u: usize, v: usize) -> Option<usize> {
        match &self.storage {
            Storage::Dense(d) => d[u * self.n + v].map(|x| x as usize),
            Storage::Sparse(rows) => {
                let row = &rows[u];
                row.binary_search_by_key(&(v as u32), |&(k, _)| k)
                    .ok()
                    .map(|i| row[i].1 as usize)
            }
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Dense(_))
    }

    /// Descendants of `u` with their distances, in increasing id order.
    pub fn descendants(&self, u: usize) -> Vec<(usize, usize)> {
        match &self.storage {
            Storage::Dense(d) => (0..self.n)
                .filter_map(|v| d[u * self.n + v].map(|x| (v, x as usize)))
                .collect(),
            Storage::Sparse(rows) => rows[u].iter().map(|&(v, x)| (v as usize, x as usize)).collect(),
        }
    }

    /// Ancestors of `v` with their distances, in increasing id order.
    pub fn ancestors(&self, v: usize) -> Vec<(usize, usize)> {
        (0..self.n).filter_map(|u| self.get(u, v).map(|x| (u, x))).collect()
    }
}

pub fn compute_md(instance: &Instance) -> MdMatrix {
    compute_md_with_limit(instance, DENSE_LIMIT)
}

/// As [`compute_md`], switching to sparse rows above `dense_limit` tasks.
pub fn compute_md_with_limit(instance: &Instance, dense_limit: usize) -> MdMatrix {
    let n = instance.len();
    let order = instance.topological_order();
    let mut pos = vec![0usize; n];
    for (k, &t) in order.iter().enumerate() {
        pos[t] = k;
    }
    let mut dist: Vec<Option<u32>> = vec![None; n];
    let sweep = |u: usize, dist: &mut Vec<Option<u32>>| {
        dist.iter_mut().for_each(|d| *d = None);
        dist[u] = Some(0);
        for &a in &order[pos[u]..] {
            let Some(da) = dist[a] else { continue };
            let reach = da + instance.duration(a) as u32;
            for &b in instance.successors(a) {
                if dist[b].map_or(true, |db| reach > db) {
                    dist[b] = Some(reach);
                }
            }
        }
        dist[u] = None;
    };
    let storage = if n <= dense_limit {
        let mut dense = vec![None; n * n];
        for u in 0..n {
            sweep(u, &mut dist);
            dense[u * n..(u + 1) * n].copy_from_slice(&dist);
        }
        Storage::Dense(dense)
    } else {
        let mut rows = Vec::with_capacity(n);
        for u in 0..n {
            sweep(u, &mut dist);
            rows.push(
                dist.iter()
                    .enumerate()
                    .filter_map(|(v, d)| d.map(|x| (v as u32, x)))
                    .collect(),
            );
        }
        Storage::Sparse(rows)
    };
    MdMatrix { n, storage }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WindowError {
    /// No start fits for this task.
    Empty { task: usize, earliest: usize, latest: usize },
    /// The machine cannot ramp between off and proc at all.
    NoRamp,
}

impl fmt::Display for WindowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowError::Empty { task, earliest, latest } => {
                write!(f, "task {task} has no feasible start (earliest {earliest}, latest {latest})")
            }
            WindowError::NoRamp => f.write_str("machine cannot move between off and proc"),
        }
    }
}

impl core::error::Error for WindowError {}

/// Inclusive start windows for every task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Windows {
    pub earliest: Vec<usize>,
    pub latest: Vec<usize>,
}

impl Windows {
    pub fn contains(&self, task: usize, start: usize) -> bool {
        self.earliest[task] <= start && start <= self.latest[task]
    }

    pub fn range(&self, task: usize) -> core::ops::RangeInclusive<usize> {
        self.earliest[task]..=self.latest[task]
    }
}

/// Start windows from forward and backward passes over the precedence graph.
///
/// Energy tasks leave room for the opening off interval plus the fastest
/// ramp-up before them, and for the fastest ramp-down plus the closing off
/// interval after them. Every start outside a window is infeasible.
pub fn start_windows(instance: &Instance) -> Result<Windows, WindowError> {
    let ts = instance.transitions();
    let up = ts.min_duration(MachineState::Off, MachineState::Proc).ok_or(WindowError::NoRamp)?;
    let down = ts.min_duration(MachineState::Proc, MachineState::Off).ok_or(WindowError::NoRamp)?;
    let n = instance.len();
    let h = instance.horizon() as isize;
    let order = instance.topological_order();

    let mut earliest = vec![1usize; n];
    for &j in order {
        if instance.is_energy(j) {
            earliest[j] = earliest[j].max(2 + up);
        }
        let finish = earliest[j] + instance.duration(j);
        for &s in instance.successors(j) {
            earliest[s] = earliest[s].max(finish);
        }
    }

    let mut latest = vec![0isize; n];
    for &j in order.iter().rev() {
        let p = instance.duration(j) as isize;
        let mut lst = if instance.is_energy(j) { h - down as isize - p } else { h - p + 1 };
        for &s in instance.successors(j) {
            lst = lst.min(latest[s] - p);
        }
        latest[j] = lst;
    }

    for j in 0..n {
        if latest[j] < earliest[j] as isize {
            return Err(WindowError::Empty { task: j, earliest: earliest[j], latest: latest[j].max(0) as usize });
        }
    }
    Ok(Windows { earliest, latest: latest.into_iter().map(|x| x as usize).collect() })
}
