//! Depth-first search over start times with precedence and timetable
//! propagation. Time-varying capacities are supported.

use alloc::vec;
use alloc::vec::Vec;

use crate::budget::Budget;
use crate::instance::Instance;

#[derive(Debug, Clone)]
pub(crate) struct Problem {
    pub h: usize,
    pub p: Vec<usize>,
    /// `demand[j]` lists `(resource, amount)` with positive amounts.
    pub demand: Vec<Vec<(usize, u32)>>,
    /// `cap[k][t - 1]`.
    pub cap: Vec<Vec<u32>>,
    pub succ: Vec<Vec<usize>>,
    pub topo: Vec<usize>,
    pub lo: Vec<usize>,
    pub hi: Vec<usize>,
}

impl Problem {
    pub fn from_instance(inst: &Instance) -> Self {
        let h = inst.horizon();
        let cap = inst.capacities().iter().map(|&c| vec![c; h]).collect();
        Self::with_capacities(inst, cap)
    }

    pub fn with_capacities(inst: &Instance, cap: Vec<Vec<u32>>) -> Self {
        let n = inst.len();
        let h = inst.horizon();
        let p: Vec<usize> = (0..n).map(|j| inst.duration(j)).collect();
        let demand = inst
            .tasks()
            .iter()
            .map(|t| t.demand.iter().enumerate().filter(|x| *x.1 > 0).map(|(k, &d)| (k, d)).collect())
            .collect();
        let hi = p.iter().map(|&d| (h + 1).saturating_sub(d)).collect();
        Problem {
            h,
            demand,
            cap,
            succ: (0..n).map(|j| inst.successors(j).to_vec()).collect(),
            topo: inst.topological_order().to_vec(),
            lo: vec![1; n],
            hi,
            p,
        }
    }

    pub fn fix(&mut self, task: usize, start: usize) {
        self.lo[task] = start;
        self.hi[task] = start;
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Goal<'a> {
    Feasible,
    Makespan,
    Tardiness { due: &'a [usize], weight: &'a [u32] },
}

#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub best: Option<(Vec<usize>, u64)>,
    /// The search space was exhausted, so `best` is optimal (or none exists).
    pub complete: bool,
}

#[derive(Clone)]
struct Node {
    est: Vec<usize>,
    lst: Vec<usize>,
}

pub(crate) fn makespan(p: &[usize], starts: &[usize]) -> u64 {
    starts.iter().zip(p).map(|(&s, &d)| (s + d - 1) as u64).max().unwrap_or(0)
}

pub(crate) fn tardiness(p: &[usize], starts: &[usize], due: &[usize], weight: &[u32]) -> u64 {
    (0..p.len())
        .map(|j| u64::from(weight[j]) * (starts[j] + p[j] - 1).saturating_sub(due[j]) as u64)
        .sum()
}

struct Search<'p, 'b, 'c> {
    prob: &'p Problem,
    budget: &'b mut Budget<'c>,
    usage: Vec<Vec<i64>>,
    cp: Vec<(usize, usize)>,
}

pub(crate) fn solve(prob: &Problem, goal: Goal<'_>, budget: &mut Budget<'_>) -> Outcome {
    let n = prob.p.len();
    let mut search = Search {
        prob,
        budget,
        usage: vec![vec![0; prob.h]; prob.cap.len()],
        cp: vec![(1, 0); n],
    };
    let mut best: Option<(Vec<usize>, u64)> = None;
    let mut stack = vec![Node { est: prob.lo.clone(), lst: prob.hi.clone() }];
    while let Some(mut node) = stack.pop() {
        if !search.budget.tick() {
            return Outcome { best, complete: false };
        }
        let end_limit = match (goal, &best) {
            (Goal::Makespan, Some((_, ub))) => Some(*ub as usize - 1),
            _ => None,
        };
        if !search.propagate(&mut node, end_limit) {
            continue;
        }
        if let (Goal::Tardiness { due, weight }, Some((_, ub))) = (goal, &best) {
            if tardiness(&prob.p, &node.est, due, weight) >= *ub {
                continue;
            }
        }
        let pick = (0..n).filter(|&j| node.est[j] < node.lst[j]).min_by_key(|&j| (node.est[j], j));
        let Some(j) = pick else {
            let value = match goal {
                Goal::Feasible | Goal::Makespan => makespan(&prob.p, &node.est),
                Goal::Tardiness { due, weight } => tardiness(&prob.p, &node.est, due, weight),
            };
            if best.as_ref().map_or(true, |b| value < b.1) {
                best = Some((node.est, value));
            }
            if matches!(goal, Goal::Feasible) || value == 0 {
                return Outcome { best, complete: true };
            }
            continue;
        };
        let mut left = node.clone();
        left.lst[j] = left.est[j];
        node.est[j] += 1;
        stack.push(node);
        stack.push(left);
    }
    Outcome { best, complete: true }
}

impl Search<'_, '_, '_> {
    fn propagate(&mut self, node: &mut Node, end_limit: Option<usize>) -> bool {
        let prob = self.prob;
        if let Some(limit) = end_limit {
            for (j, &p) in prob.p.iter().enumerate() {
                if limit + 1 < p + 1 {
                    return false;
                }
                node.lst[j] = node.lst[j].min(limit + 1 - p);
            }
        }
        loop {
            for &u in &prob.topo {
                let reach = node.est[u] + prob.p[u];
                for &v in &prob.succ[u] {
                    if node.est[v] < reach {
                        node.est[v] = reach;
                    }
                }
            }
            for &u in prob.topo.iter().rev() {
                for &v in &prob.succ[u] {
                    if node.lst[v] < prob.p[u] + 1 {
                        return false;
                    }
                    node.lst[u] = node.lst[u].min(node.lst[v] - prob.p[u]);
                }
            }
            if (0..prob.p.len()).any(|j| node.est[j] > node.lst[j]) {
                return false;
            }
            match self.timetable(node) {
                None => return false,
                Some(false) => return true,
                Some(true) => {}
            }
        }
    }

    /// One round of compulsory-part filtering. `None` on overload.
    fn timetable(&mut self, node: &mut Node) -> Option<bool> {
        let prob = self.prob;
        for row in &mut self.usage {
            row.iter_mut().for_each(|u| *u = 0);
        }
        for j in 0..prob.p.len() {
            let (a, b) = (node.lst[j], node.est[j] + prob.p[j] - 1);
            self.cp[j] = (a, b);
            if a <= b {
                for &(k, d) in &prob.demand[j] {
                    for t in a..=b {
                        self.usage[k][t - 1] += i64::from(d);
                    }
                }
            }
        }
        for (k, row) in self.usage.iter().enumerate() {
            if row.iter().zip(&prob.cap[k]).any(|(&u, &c)| u > i64::from(c)) {
                return None;
            }
        }
        let mut changed = false;
        for j in 0..prob.p.len() {
            if node.est[j] == node.lst[j] {
                continue;
            }
            let p = prob.p[j];
            let (a, b) = self.cp[j];
            for &(k, d) in &prob.demand[j] {
                let d = i64::from(d);
                let usage = &self.usage[k];
                let cap = &prob.cap[k];
                let blocked = |t: usize| {
                    let own = if a <= t && t <= b { d } else { 0 };
                    usage[t - 1] - own + d > i64::from(cap[t - 1])
                };
                let mut s = node.est[j];
                loop {
                    if s > node.lst[j] {
                        return None;
                    }
                    match (s..s + p).rev().find(|&t| blocked(t)) {
                        Some(t) => s = t + 1,
                        None => break,
                    }
                }
                if s != node.est[j] {
                    node.est[j] = s;
                    changed = true;
                }
                let mut s = node.lst[j];
                loop {
                    if s < node.est[j] {
                        return None;
                    }
                    match (s..s + p).find(|&t| blocked(t)) {
                        Some(t) if t < p + node.est[j] => return None,
                        Some(t) => s = t - p,
                        None => break,
                    }
                }
                if s != node.lst[j] {
                    node.lst[j] = s;
                    changed = true;
                }
            }
        }
        Some(changed)
    }
}
